//! Named sets, maps and distance functions shared by the self-test, the
//! examples and the integration tests.

use crate::arith::{int, rat, LinTerm};
use crate::formula::DefSet;
use crate::plmap::{PLMap, Piece};

fn set(text: &str, vars: &[&str]) -> DefSet {
    DefSet::parse_vars(text, vars).expect("fixture parses")
}

pub struct BijectionFixture {
    pub name: &'static str,
    pub source: DefSet,
    pub map: PLMap,
    pub target: DefSet,
}

/// Certified bijections between definable sets.
pub fn bijections() -> Vec<BijectionFixture> {
    let x = ["x"];
    let xy = ["x", "y"];
    let xyz = ["x", "y", "z"];
    let mut out = Vec::new();
    let mut push = |name, source: DefSet, map: PLMap, target: DefSet| {
        out.push(BijectionFixture {
            name,
            source,
            map,
            target,
        })
    };

    let unit = set("0 < x & x < 1", &x);
    push("halve", unit.clone(), PLMap::halve(unit.clone()), set("0 < x & x < 1/2", &x));
    push(
        "translate",
        unit.clone(),
        PLMap::translate(unit.clone(), &[rat(3, 2)]),
        set("3/2 < x & x < 5/2", &x),
    );
    let ray = set("0 < x", &x);
    push("reflect", ray.clone(), PLMap::reflect(ray), set("x < 0", &x));

    let quadrant = set("0 < x & 0 < y", &xy);
    push(
        "shear",
        quadrant.clone(),
        PLMap::shear(quadrant),
        set("0 < x & x < y", &xy),
    );
    let below = set("0 < y & y < x", &xy);
    push(
        "swap",
        below.clone(),
        PLMap::swap(below, 0, 1),
        set("0 < x & x < y", &xy),
    );

    let cylinder = set("0 < x & x < 1 & 0 < y", &xy);
    push(
        "band-to-cylinder-upper",
        cylinder.clone(),
        PLMap::band_to_cylinder_upper(cylinder.clone(), &LinTerm::var(1, 0)),
        set("0 < x & x < 1 & x < y", &xy),
    );
    let beta = &LinTerm::var(1, 0).scale(&int(2)) + &LinTerm::constant(1, int(1));
    push(
        "band-to-cylinder-lower",
        cylinder.clone(),
        PLMap::band_to_cylinder_lower(cylinder, &beta),
        set("0 < x & x < 1 & y < 2*x + 1", &xy),
    );

    let triangle = set("0 < y & y < x & x < 1", &xy);
    push("identity", triangle.clone(), PLMap::identity(triangle.clone()), triangle);
    push(
        "swap-plane",
        DefSet::universe(2),
        PLMap::swap(DefSet::universe(2), 0, 1),
        DefSet::universe(2),
    );

    let pieces = set("0 < x & x < 1 | 2 < x & x < 3", &x);
    let glue = PLMap::new(
        1,
        1,
        vec![
            Piece {
                domain: set("0 < x & x < 1", &x),
                rows: vec![LinTerm::var(1, 0)],
            },
            Piece {
                domain: set("2 < x & x < 3", &x),
                rows: vec![&LinTerm::var(1, 0) - &LinTerm::constant(1, int(1))],
            },
        ],
    )
    .expect("disjoint pieces");
    push("piecewise-glue", pieces, glue, set("0 < x & x < 2 & x != 1", &x));

    let boxed = set("0 < x & x < 1 & 0 < y & y < 2 & 0 < z & z < 3", &xyz);
    push(
        "cycle-coordinates",
        boxed.clone(),
        PLMap::permutation(boxed, &[1, 2, 0]),
        set("0 < x & x < 2 & 0 < y & y < 3 & 0 < z & z < 1", &xyz),
    );

    let closed = set("0 <= x & x <= 1", &x);
    push(
        "halve-closed",
        closed.clone(),
        PLMap::halve(closed),
        set("0 <= x & x <= 1/2", &x),
    );
    let square = set("0 <= x & x <= 1 & 0 <= y & y <= 1", &xy);
    push(
        "shear-square",
        square.clone(),
        PLMap::shear(square),
        set("0 <= x & x <= 1 & x <= y & y <= x + 1", &xy),
    );
    out
}

pub struct BdFixture {
    pub name: &'static str,
    pub set: DefSet,
    /// Graph with the value `t` as coordinate 0.
    pub graph: DefSet,
}

/// Distance-like functions for the stabilization check. The first three
/// are the documented ones.
pub fn bd_fixtures() -> Vec<BdFixture> {
    let tx = ["t", "x"];
    let txy = ["t", "x", "y"];
    vec![
        BdFixture {
            name: "line-abs",
            set: DefSet::universe(1),
            graph: set("t = x & 0 <= x | t = -x & x < 0", &tx),
        },
        BdFixture {
            name: "ray-identity",
            set: set("0 < x", &["x"]),
            graph: set("t = x & 0 < x", &tx),
        },
        BdFixture {
            name: "interval-zero",
            set: set("0 < x & x < 1", &["x"]),
            graph: set("t = 0 & 0 < x & x < 1", &tx),
        },
        BdFixture {
            name: "plane-l1",
            set: DefSet::universe(2),
            graph: set(
                "t = x + y & 0 <= x & 0 <= y | t = x - y & 0 <= x & y < 0 \
                 | t = y - x & x < 0 & 0 <= y | t = -x - y & x < 0 & y < 0",
                &txy,
            ),
        },
        BdFixture {
            name: "punctured-abs",
            set: set("x != 0", &["x"]),
            graph: set("t = x & 0 < x | t = -x & x < 0", &tx),
        },
        BdFixture {
            name: "quadrant-max",
            set: set("0 < x & 0 < y", &["x", "y"]),
            graph: set("t = x & 0 < y & y <= x | t = y & 0 < x & x < y", &txy),
        },
    ]
}

/// Sets in the plane for the fibre identity.
pub fn fiber_sets() -> Vec<(&'static str, DefSet)> {
    let xy = ["x", "y"];
    vec![
        ("triangle", set("0 < y & y < x & x < 1", &xy)),
        ("closed-square", set("0 <= x & x <= 1 & 0 <= y & y <= 1", &xy)),
        ("half-plane", set("y < x", &xy)),
        (
            "hollow-square",
            set("0 <= x & x <= 1 & 0 <= y & y <= 1 & (x = 0 | x = 1 | y = 0 | y = 1)", &xy),
        ),
        ("vee", set("0 <= x & x <= 2 & (y = x | y = 0)", &xy)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_counts() {
        assert!(bijections().len() >= 10);
        assert!(bd_fixtures().len() >= 5);
        assert_eq!(fiber_sets().len(), 5);
    }
}
