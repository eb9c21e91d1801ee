//! Piecewise-affine maps between definable sets.

use serde_json::{Map, Value};
use thiserror::Error;

use crate::arith::{default_names, int, rat, LinTerm, Rational};
use crate::cell::{decompose, Bound, Cell, Stage};
use crate::formula::{parse_term, Atom, DefSet, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("point is outside the domain")]
    OutsideDomain,
    #[error("set is not contained in the domain")]
    EscapesDomain,
    #[error("domain pieces {0} and {1} overlap")]
    Overlap(usize, usize),
    #[error("graph is not single-valued")]
    NotFunctional,
    #[error("cell has no interval as first projection")]
    NotAnInterval,
    #[error("malformed map document: {0}")]
    Json(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub domain: DefSet,
    /// One affine function of the inputs per output coordinate.
    pub rows: Vec<LinTerm>,
}

/// A map `Q^src -> Q^dst`, affine on each of finitely many disjoint pieces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLMap {
    src: usize,
    dst: usize,
    pieces: Vec<Piece>,
}

impl PLMap {
    /// Checks dimensions and that the pieces are pairwise disjoint.
    pub fn new(src: usize, dst: usize, pieces: Vec<Piece>) -> Result<PLMap, MapError> {
        for p in &pieces {
            if p.domain.dim() != src {
                return Err(MapError::Dimension {
                    expected: src,
                    got: p.domain.dim(),
                });
            }
            if p.rows.len() != dst {
                return Err(MapError::Dimension {
                    expected: dst,
                    got: p.rows.len(),
                });
            }
        }
        for i in 0..pieces.len() {
            for j in i + 1..pieces.len() {
                if !pieces[i].domain.intersect(&pieces[j].domain).is_empty() {
                    return Err(MapError::Overlap(i, j));
                }
            }
        }
        let pieces = pieces
            .into_iter()
            .map(|p| Piece {
                rows: p.rows.into_iter().map(|r| r.with_dim(src)).collect(),
                domain: p.domain,
            })
            .collect();
        Ok(PLMap { src, dst, pieces })
    }

    /// One affine piece on `domain`.
    pub fn affine(domain: DefSet, rows: Vec<LinTerm>) -> PLMap {
        let (src, dst) = (domain.dim(), rows.len());
        PLMap::new(src, dst, vec![Piece { domain, rows }]).expect("single piece")
    }

    pub fn src_dim(&self) -> usize {
        self.src
    }

    pub fn dst_dim(&self) -> usize {
        self.dst
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn domain(&self) -> DefSet {
        self.pieces
            .iter()
            .fold(DefSet::empty(self.src), |acc, p| acc.union(&p.domain))
    }

    pub fn apply(&self, point: &[Rational]) -> Result<Vec<Rational>, MapError> {
        if point.len() != self.src {
            return Err(MapError::Dimension {
                expected: self.src,
                got: point.len(),
            });
        }
        let piece = self
            .pieces
            .iter()
            .find(|p| p.domain.contains(point))
            .ok_or(MapError::OutsideDomain)?;
        Ok(piece.rows.iter().map(|r| r.eval_prefix(point)).collect())
    }

    /// `{(x, y) : y = f(x)}` with the inputs first.
    pub fn graph(&self) -> DefSet {
        let dim = self.src + self.dst;
        self.pieces.iter().fold(DefSet::empty(dim), |acc, p| {
            let eqs = p.rows.iter().enumerate().map(|(i, r)| {
                Atom::eq(&LinTerm::var(dim, self.src + i) - &r.clone().with_dim(dim))
            });
            let piece = p.domain.embed(dim, 0).intersect(&DefSet::from_atoms(dim, eqs));
            acc.union(&piece)
        })
    }

    pub fn image(&self, s: &DefSet) -> Result<DefSet, MapError> {
        self.check_inside(s)?;
        let dim = self.src + self.dst;
        let within = self.graph().intersect(&s.embed(dim, 0));
        Ok(within.project_out(&(0..self.src).collect::<Vec<_>>()))
    }

    fn check_inside(&self, s: &DefSet) -> Result<(), MapError> {
        if s.dim() != self.src {
            return Err(MapError::Dimension {
                expected: self.src,
                got: s.dim(),
            });
        }
        if !s.entails(&self.domain()).expect("same dimension") {
            return Err(MapError::EscapesDomain);
        }
        Ok(())
    }

    /// Decides whether two distinct points of `s` can share an image.
    pub fn is_injective_on(&self, s: &DefSet) -> Result<bool, MapError> {
        self.check_inside(s)?;
        let m = self.src;
        let dim = 2 * m;
        let mut distinct = DefSet::empty(dim);
        for k in 0..m {
            let d = &LinTerm::var(dim, k) - &LinTerm::var(dim, m + k);
            distinct = distinct
                .union(&DefSet::from_atoms(dim, [Atom::lt(d.clone())]))
                .union(&DefSet::from_atoms(dim, [Atom::lt(-d)]));
        }
        for p in &self.pieces {
            let a = s.intersect(&p.domain).embed(dim, 0);
            for q in &self.pieces {
                let b = s.intersect(&q.domain).embed(dim, m);
                let same = p.rows.iter().zip(&q.rows).map(|(r, r2)| {
                    let left = r.clone().with_dim(dim);
                    let right = r2.remap(dim, |i| i + m);
                    Atom::eq(&left - &right)
                });
                let clash = a
                    .intersect(&b)
                    .intersect(&DefSet::from_atoms(dim, same))
                    .intersect(&distinct);
                if !clash.is_empty() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `f` restricted to `s` is a bijection onto `t`.
    pub fn certify_bijection(&self, s: &DefSet, t: &DefSet) -> Result<bool, MapError> {
        if !self.is_injective_on(s)? {
            return Ok(false);
        }
        let img = self.image(s)?;
        Ok(img.dim() == t.dim() && img.equivalent(t).expect("same dimension"))
    }

    pub fn identity(domain: DefSet) -> PLMap {
        let n = domain.dim();
        PLMap::affine(domain, (0..n).map(|i| LinTerm::var(n, i)).collect())
    }

    /// `x -> x + offset`.
    pub fn translate(domain: DefSet, offset: &[Rational]) -> PLMap {
        let n = domain.dim();
        assert_eq!(offset.len(), n);
        let rows = (0..n)
            .map(|i| &LinTerm::var(n, i) + &LinTerm::constant(n, offset[i].clone()))
            .collect();
        PLMap::affine(domain, rows)
    }

    /// `x -> k * x`.
    pub fn scale(domain: DefSet, k: &Rational) -> PLMap {
        let n = domain.dim();
        PLMap::affine(domain, (0..n).map(|i| LinTerm::var(n, i).scale(k)).collect())
    }

    pub fn halve(domain: DefSet) -> PLMap {
        PLMap::scale(domain, &rat(1, 2))
    }

    /// `x -> -x`.
    pub fn reflect(domain: DefSet) -> PLMap {
        PLMap::scale(domain, &int(-1))
    }

    /// Coordinate permutation: output coordinate `j` is input coordinate
    /// `perm[j]`, matching `DefSet::permute`.
    pub fn permutation(domain: DefSet, perm: &[usize]) -> PLMap {
        let n = domain.dim();
        assert_eq!(perm.len(), n);
        PLMap::affine(domain, perm.iter().map(|&i| LinTerm::var(n, i)).collect())
    }

    pub fn swap(domain: DefSet, i: usize, j: usize) -> PLMap {
        let mut perm: Vec<usize> = (0..domain.dim()).collect();
        perm.swap(i, j);
        PLMap::permutation(domain, &perm)
    }

    /// `(x, y) -> (x, x + y)` on the plane.
    pub fn shear(domain: DefSet) -> PLMap {
        assert_eq!(domain.dim(), 2);
        let (x, y) = (LinTerm::var(2, 0), LinTerm::var(2, 1));
        PLMap::affine(domain, vec![x.clone(), &x + &y])
    }

    /// `(x, t) -> (x, alpha(x) + t)`; sends `A x (0, +inf)` onto the band
    /// above `alpha`. `alpha` mentions only the leading coordinates.
    pub fn band_to_cylinder_upper(domain: DefSet, alpha: &LinTerm) -> PLMap {
        Self::band_to_cylinder(domain, alpha, int(1))
    }

    /// `(x, t) -> (x, beta(x) - t)`; sends `A x (0, +inf)` onto the band
    /// below `beta`.
    pub fn band_to_cylinder_lower(domain: DefSet, beta: &LinTerm) -> PLMap {
        Self::band_to_cylinder(domain, beta, int(-1))
    }

    fn band_to_cylinder(domain: DefSet, base: &LinTerm, sign: Rational) -> PLMap {
        let n = domain.dim();
        assert!(n >= 1 && base.max_var().is_none_or(|v| v + 1 < n));
        let mut rows: Vec<LinTerm> = (0..n - 1).map(|i| LinTerm::var(n, i)).collect();
        rows.push(&base.clone().with_dim(n) + &LinTerm::var(n, n - 1).scale(&sign));
        PLMap::affine(domain, rows)
    }

    /// Injection of the first projection of `cell` into `cell`, built stage
    /// by stage: a graph is followed, a full line takes the first
    /// coordinate, a half-bounded band sits at distance 1 from its finite
    /// end, and a bounded band takes its midpoint. Any positive distance
    /// works; 1 is a fixed choice.
    pub fn section_injection(cell: &Cell) -> Result<PLMap, MapError> {
        let n = cell.ambient_dim();
        let domain = match cell.stages().first() {
            Some(Stage::Band { .. }) => cell.truncate(1).to_defset(),
            _ => return Err(MapError::NotAnInterval),
        };
        let x = LinTerm::var(1, 0);
        let mut rows = vec![x.clone()];
        let compose = |t: &LinTerm, rows: &[LinTerm]| {
            t.coeffs()
                .fold(LinTerm::constant(1, t.constant_term().clone()), |acc, (i, c)| {
                    &acc + &rows[i].scale(c)
                })
        };
        for stage in &cell.stages()[1..] {
            let value = match stage {
                Stage::Graph(f) => compose(f, &rows),
                Stage::Band { lower, upper } => match (lower, upper) {
                    (Bound::Finite(l), Bound::Finite(u)) => (&compose(l, &rows) + &compose(u, &rows)).scale(&rat(1, 2)),
                    (Bound::Finite(l), _) => &compose(l, &rows) + &LinTerm::constant(1, int(1)),
                    (_, Bound::Finite(u)) => &compose(u, &rows) - &LinTerm::constant(1, int(1)),
                    _ => x.clone(),
                },
            };
            rows.push(value);
        }
        debug_assert_eq!(rows.len(), n);
        Ok(PLMap::affine(domain, rows))
    }

    /// Reads a map off a functional graph in `Q^{src + dst}` (inputs first).
    pub fn from_graph(graph: &DefSet, src: usize) -> Result<PLMap, MapError> {
        let dst = graph.dim() - src;
        let mut pieces: Vec<Piece> = Vec::new();
        let mut bases: Vec<Cell> = Vec::new();
        for cell in decompose(graph).cells() {
            let base = cell.truncate(src);
            if bases.contains(&base) {
                return Err(MapError::NotFunctional);
            }
            let mut exprs: Vec<LinTerm> = (0..src).map(|i| LinTerm::var(src, i)).collect();
            for stage in &cell.stages()[src..] {
                let Stage::Graph(f) = stage else {
                    return Err(MapError::NotFunctional);
                };
                let value = f
                    .coeffs()
                    .fold(LinTerm::constant(src, f.constant_term().clone()), |acc, (i, c)| {
                        &acc + &exprs[i].scale(c)
                    });
                exprs.push(value);
            }
            pieces.push(Piece {
                domain: base.to_defset(),
                rows: exprs.split_off(src),
            });
            bases.push(base);
        }
        PLMap::new(src, dst, pieces)
    }

    pub fn to_json(&self, names: Option<&[String]>) -> Value {
        let src_names = names.map_or_else(|| default_names(self.src), |n| n.to_vec());
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let mut m = Map::new();
                m.insert("where".into(), Value::String(p.domain.display_with(&src_names)));
                m.insert(
                    "rows".into(),
                    Value::Array(p.rows.iter().map(|r| Value::String(r.display_with(&src_names))).collect()),
                );
                Value::Object(m)
            })
            .collect();
        let mut m = Map::new();
        m.insert("src".into(), Value::from(self.src));
        m.insert("dst".into(), Value::from(self.dst));
        if let Some(n) = names {
            m.insert("vars".into(), Value::Array(n.iter().cloned().map(Value::String).collect()));
        }
        m.insert("pieces".into(), Value::Array(pieces));
        Value::Object(m)
    }

    /// `{"src", "dst", "vars"?, "pieces": [{"where", "rows"}]}`; input
    /// variables default to `x0, x1, ...`.
    pub fn from_json(v: &Value) -> Result<PLMap, MapError> {
        let err = |m: &str| MapError::Json(m.to_string());
        let dim = |key: &str| {
            v.get(key)
                .and_then(Value::as_u64)
                .map(|d| d as usize)
                .ok_or_else(|| err(&format!("missing `{key}`")))
        };
        let (src, dst) = (dim("src")?, dim("dst")?);
        let names: Vec<String> = match v.get("vars") {
            None => default_names(src),
            Some(Value::Array(a)) => a
                .iter()
                .map(|n| n.as_str().map(str::to_string).ok_or_else(|| err("`vars` must be strings")))
                .collect::<Result<_, _>>()?,
            Some(_) => return Err(err("`vars` must be an array")),
        };
        if names.len() != src {
            return Err(MapError::Dimension {
                expected: src,
                got: names.len(),
            });
        }
        let raw = v
            .get("pieces")
            .and_then(Value::as_array)
            .ok_or_else(|| err("missing `pieces`"))?;
        let mut pieces = Vec::new();
        for p in raw {
            let text = p
                .get("where")
                .and_then(Value::as_str)
                .ok_or_else(|| err("piece without `where`"))?;
            let rows = p
                .get("rows")
                .and_then(Value::as_array)
                .ok_or_else(|| err("piece without `rows`"))?
                .iter()
                .map(|r| {
                    let t = r.as_str().ok_or_else(|| err("rows must be strings"))?;
                    Ok(parse_term(t, &names)?)
                })
                .collect::<Result<Vec<_>, MapError>>()?;
            pieces.push(Piece {
                domain: DefSet::parse(text, &names)?,
                rows,
            });
        }
        PLMap::new(src, dst, pieces)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::{chi_b, chi_g};

    fn set(text: &str, v: &[&str]) -> DefSet {
        DefSet::parse_vars(text, v).unwrap()
    }

    fn pt(v: &[(i64, i64)]) -> Vec<Rational> {
        v.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    #[test]
    fn apply_examples() {
        let t = PLMap::translate(DefSet::universe(1), &[rat(3, 2)]);
        assert_eq!(t.apply(&pt(&[(0, 1)])).unwrap(), pt(&[(3, 2)]));
        let h = PLMap::halve(DefSet::universe(1));
        assert_eq!(h.apply(&pt(&[(1, 1)])).unwrap(), pt(&[(1, 2)]));
        let s = PLMap::swap(DefSet::universe(2), 0, 1);
        assert_eq!(s.apply(&pt(&[(1, 1), (2, 1)])).unwrap(), pt(&[(2, 1), (1, 1)]));
        let narrow = PLMap::identity(set("0 < x", &["x"]));
        assert_eq!(narrow.apply(&pt(&[(-1, 1)])), Err(MapError::OutsideDomain));
    }

    #[test]
    fn graphs() {
        let id = PLMap::identity(set("0 < x & x < 1", &["x"]));
        assert!(id.graph().equivalent(&set("0 < x & x < 1 & y = x", &["x", "y"])).unwrap());
        let shift = PLMap::translate(set("0 < x", &["x"]), &[int(5)]);
        assert!(shift.graph().equivalent(&set("0 < x & y = x + 5", &["x", "y"])).unwrap());
        let none = PLMap::new(1, 1, Vec::new()).unwrap();
        assert!(none.graph().is_empty());
    }

    #[test]
    fn images() {
        let unit = set("0 < x & x < 1", &["x"]);
        let img = PLMap::halve(unit.clone()).image(&unit).unwrap();
        assert!(img.equivalent(&set("0 < x & x < 1/2", &["x"])).unwrap());
        let pos = set("0 < x", &["x"]);
        let img = PLMap::reflect(pos.clone()).image(&pos).unwrap();
        assert!(img.equivalent(&set("x < 0", &["x"])).unwrap());
        let quad = set("0 < x & 0 < y", &["x", "y"]);
        let img = PLMap::shear(quad.clone()).image(&quad).unwrap();
        assert!(img.equivalent(&set("0 < x & x < y", &["x", "y"])).unwrap());
        assert_eq!(PLMap::identity(unit).image(&pos), Err(MapError::EscapesDomain));
    }

    #[test]
    fn injectivity() {
        let unit = set("0 < x & x < 1", &["x"]);
        assert!(PLMap::halve(unit.clone()).is_injective_on(&unit).unwrap());
        let zero = PLMap::affine(unit.clone(), vec![LinTerm::zero(1)]);
        assert!(!zero.is_injective_on(&unit).unwrap());
        let plane = DefSet::universe(2);
        assert!(PLMap::shear(plane.clone()).is_injective_on(&plane).unwrap());
        // x -> |x| folds the line
        let fold = PLMap::new(
            1,
            1,
            vec![
                Piece {
                    domain: set("x < 0", &["x"]),
                    rows: vec![-LinTerm::var(1, 0)],
                },
                Piece {
                    domain: set("0 <= x", &["x"]),
                    rows: vec![LinTerm::var(1, 0)],
                },
            ],
        )
        .unwrap();
        assert!(!fold.is_injective_on(&DefSet::universe(1)).unwrap());
    }

    #[test]
    fn bijections() {
        let unit = set("0 < x & x < 1", &["x"]);
        assert!(PLMap::halve(unit.clone())
            .certify_bijection(&unit, &set("0 < x & x < 1/2", &["x"]))
            .unwrap());
        let quad = set("0 < x & 0 < y", &["x", "y"]);
        assert!(PLMap::shear(quad.clone())
            .certify_bijection(&quad, &set("0 < x & x < y", &["x", "y"]))
            .unwrap());
        assert!(!PLMap::identity(unit.clone())
            .certify_bijection(&unit, &set("0 < x & x < 2", &["x"]))
            .unwrap());
    }

    #[test]
    fn band_to_cylinder() {
        let a = set("0 < x & x < 1 & 0 < t", &["x", "t"]);
        let up = PLMap::band_to_cylinder_upper(a.clone(), &LinTerm::var(1, 0));
        assert!(up.certify_bijection(&a, &set("0 < x & x < 1 & x < y", &["x", "y"])).unwrap());
        let beta = &LinTerm::var(1, 0).scale(&int(2)) + &LinTerm::constant(1, int(1));
        let down = PLMap::band_to_cylinder_lower(a.clone(), &beta);
        assert!(down
            .certify_bijection(&a, &set("0 < x & x < 1 & y < 2*x + 1", &["x", "y"]))
            .unwrap());
    }

    #[test]
    fn piecewise_bijection_keeps_characteristics() {
        let s = set("0 < x & x < 1 | 2 < x & x < 3", &["x"]);
        let f = PLMap::new(
            1,
            1,
            vec![
                Piece {
                    domain: set("0 < x & x < 1", &["x"]),
                    rows: vec![LinTerm::var(1, 0)],
                },
                Piece {
                    domain: set("2 < x & x < 3", &["x"]),
                    rows: vec![&LinTerm::var(1, 0) - &LinTerm::constant(1, int(1))],
                },
            ],
        )
        .unwrap();
        let t = set("0 < x & x < 2 & x != 1", &["x"]);
        assert!(f.certify_bijection(&s, &t).unwrap());
        assert_eq!((chi_g(&s), chi_b(&s)), (chi_g(&t), chi_b(&t)));
    }

    #[test]
    fn overlapping_pieces_rejected() {
        let p = |text| Piece {
            domain: set(text, &["x"]),
            rows: vec![LinTerm::var(1, 0)],
        };
        assert_eq!(
            PLMap::new(1, 1, vec![p("0 < x"), p("x < 1")]),
            Err(MapError::Overlap(0, 1))
        );
    }

    #[test]
    fn sections_of_unbounded_cells() {
        let s = set("0 < x & x < y & y < 2*x & 3 < z", &["x", "y", "z"]);
        let cell = decompose(&s).cells()[0].clone();
        let f = PLMap::section_injection(&cell).unwrap();
        let dom = f.domain();
        assert!(dom.equivalent(&set("0 < x", &["x"])).unwrap());
        assert!(f.is_injective_on(&dom).unwrap());
        assert!(f.image(&dom).unwrap().entails(&s).unwrap());
        assert_eq!(f.apply(&pt(&[(2, 1)])).unwrap(), pt(&[(2, 1), (3, 1), (4, 1)]));
    }

    #[test]
    fn from_graph_recovers_pieces() {
        let g = set("y = -x & x < 0 | y = x & 0 <= x", &["x", "y"]);
        let f = PLMap::from_graph(&g, 1).unwrap();
        assert_eq!(f.apply(&pt(&[(-3, 1)])).unwrap(), pt(&[(3, 1)]));
        assert_eq!(f.apply(&pt(&[(5, 2)])).unwrap(), pt(&[(5, 2)]));
        assert!(f.graph().equivalent(&g).unwrap());
        let two_valued = set("y = x | y = x + 1", &["x", "y"]);
        assert_eq!(PLMap::from_graph(&two_valued, 1), Err(MapError::NotFunctional));
    }

    #[test]
    fn json_round_trip() {
        let names = vec!["x".to_string(), "y".to_string()];
        let f = PLMap::shear(set("0 < x & 0 < y", &["x", "y"]));
        let v = f.to_json(Some(&names));
        assert_eq!(PLMap::from_json(&v).unwrap(), f);
        let text = r#"{"src": 1, "dst": 1, "pieces": [{"where": "0 < x0", "rows": ["1/2*x0"]}]}"#;
        let g = PLMap::from_json(&serde_json::from_str(text).unwrap()).unwrap();
        assert_eq!(g.apply(&[int(1)]).unwrap(), vec![rat(1, 2)]);
        let bad = r#"{"src": 1, "dst": 2, "pieces": [{"where": "0 < x0", "rows": ["x0"]}]}"#;
        assert!(PLMap::from_json(&serde_json::from_str(bad).unwrap()).is_err());
    }
}
