//! Cylindrical cell decomposition of semilinear sets.
//!
//! Projection collects, level by level, every root `x_k = e(x_0..x_{k-1})` of
//! the input functionals and adds the pairwise crossings `e_i - e_j` to the
//! next level down. The coordinate functional `x_k` is seeded at every level,
//! so every fibre is split at least once and no stage is ever a full line.
//!
//! Lifting walks back up. Over a base cell all crossings have constant sign,
//! so the roots are totally ordered there and evaluating them at one sample
//! point of the base cell gives that order.

use std::collections::BTreeSet;
use std::fmt;

use num::{Signed, Zero};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::arith::{default_names, fmt_rational_pq, int, parse_rational, LinTerm, Rational};
use crate::formula::{Atom, DefSet, Rel};
use crate::qe;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CellError {
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("malformed cell document: {0}")]
    Json(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Bound {
    NegInf,
    PosInf,
    Finite(LinTerm),
}

impl Bound {
    pub fn finite(&self) -> Option<&LinTerm> {
        match self {
            Bound::Finite(t) => Some(t),
            _ => None,
        }
    }
}

/// One coordinate of a cell over the cell formed by the earlier coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stage {
    /// `x_k = f(x_0..x_{k-1})`
    Graph(LinTerm),
    /// `lower < x_k < upper`
    Band { lower: Bound, upper: Bound },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellKind {
    Exceptional,
    Bad,
    Good,
}

impl CellKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CellKind::Exceptional => "exceptional",
            CellKind::Bad => "bad",
            CellKind::Good => "good",
        }
    }
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A tower of graphs and bands; stage `k` only mentions coordinates `< k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cell {
    stages: Vec<Stage>,
}

impl Cell {
    pub fn new(stages: Vec<Stage>) -> Cell {
        for (k, s) in stages.iter().enumerate() {
            let terms: Vec<&LinTerm> = match s {
                Stage::Graph(f) => vec![f],
                Stage::Band { lower, upper } => lower.finite().into_iter().chain(upper.finite()).collect(),
            };
            for t in terms {
                assert!(t.max_var().is_none_or(|m| m < k), "stage {k} mentions a later coordinate");
            }
        }
        Cell { stages }
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn ambient_dim(&self) -> usize {
        self.stages.len()
    }

    /// Number of band stages.
    pub fn dim(&self) -> usize {
        self.stages.iter().filter(|s| matches!(s, Stage::Band { .. })).count()
    }

    pub fn kind(&self) -> CellKind {
        let mut bad = false;
        for s in &self.stages {
            if let Stage::Band { lower, upper } = s {
                match (lower.finite(), upper.finite()) {
                    (None, None) => return CellKind::Exceptional,
                    (None, Some(_)) | (Some(_), None) => bad = true,
                    _ => {}
                }
            }
        }
        if bad {
            CellKind::Bad
        } else {
            CellKind::Good
        }
    }

    /// A closed box containing the cell, when every band is finite.
    pub fn bounding_box(&self) -> Option<Vec<(Rational, Rational)>> {
        let mut bx: Vec<(Rational, Rational)> = Vec::with_capacity(self.stages.len());
        for s in &self.stages {
            let range = match s {
                Stage::Graph(f) => affine_range(f, &bx),
                Stage::Band { lower, upper } => {
                    let (lo, _) = affine_range(lower.finite()?, &bx);
                    let (_, hi) = affine_range(upper.finite()?, &bx);
                    (lo, hi)
                }
            };
            bx.push(range);
        }
        Some(bx)
    }

    pub fn is_bounded(&self) -> bool {
        self.bounding_box().is_some()
    }

    /// A point of the cell, chosen stage by stage: the graph value, the
    /// midpoint of a finite band, one past a single finite bound, or 0.
    pub fn sample_point(&self) -> Vec<Rational> {
        let mut p: Vec<Rational> = Vec::with_capacity(self.stages.len());
        for s in &self.stages {
            let v = match s {
                Stage::Graph(f) => f.eval_prefix(&p),
                Stage::Band { lower, upper } => {
                    let lo = lower.finite().map(|t| t.eval_prefix(&p));
                    let hi = upper.finite().map(|t| t.eval_prefix(&p));
                    match (lo, hi) {
                        (Some(l), Some(u)) => (l + u) / int(2),
                        (Some(l), None) => l + int(1),
                        (None, Some(u)) => u - int(1),
                        (None, None) => Rational::zero(),
                    }
                }
            };
            p.push(v);
        }
        p
    }

    pub fn contains(&self, point: &[Rational]) -> bool {
        assert_eq!(point.len(), self.ambient_dim());
        self.atoms().iter().all(|a| a.holds_at(point))
    }

    /// Defining constraints in the ambient space.
    pub fn atoms(&self) -> Vec<Atom> {
        let n = self.ambient_dim();
        let mut out = Vec::new();
        for (k, s) in self.stages.iter().enumerate() {
            let x = LinTerm::var(n, k);
            match s {
                Stage::Graph(f) => out.push(Atom::eq(&x - &f.clone().with_dim(n))),
                Stage::Band { lower, upper } => {
                    if let Some(l) = lower.finite() {
                        out.push(Atom::lt(&l.clone().with_dim(n) - &x));
                    }
                    if let Some(u) = upper.finite() {
                        out.push(Atom::lt(&x - &u.clone().with_dim(n)));
                    }
                }
            }
        }
        out
    }

    pub fn to_defset(&self) -> DefSet {
        DefSet::from_atoms(self.ambient_dim(), self.atoms())
    }

    /// Canonical functionals `x_k - f` of every finite boundary.
    pub fn boundary_functionals(&self) -> Vec<LinTerm> {
        let n = self.ambient_dim();
        let mut out = Vec::new();
        for (k, s) in self.stages.iter().enumerate() {
            let x = LinTerm::var(n, k);
            let terms: Vec<&LinTerm> = match s {
                Stage::Graph(f) => vec![f],
                Stage::Band { lower, upper } => lower.finite().into_iter().chain(upper.finite()).collect(),
            };
            for t in terms {
                out.push((&x - &t.clone().with_dim(n)).normalize().expect("mentions x_k").0);
            }
        }
        out
    }

    /// The cell formed by the first `k` stages.
    pub fn truncate(&self, k: usize) -> Cell {
        Cell {
            stages: self.stages[..k].to_vec(),
        }
    }

    pub fn to_json(&self, names: &[String]) -> Value {
        let stages: Vec<Value> = self
            .stages
            .iter()
            .map(|s| match s {
                Stage::Graph(f) => obj([("graph", term_to_json(f, names))]),
                Stage::Band { lower, upper } => {
                    let lo = match lower {
                        Bound::Finite(t) => term_to_json(t, names),
                        _ => Value::String("-inf".into()),
                    };
                    let hi = match upper {
                        Bound::Finite(t) => term_to_json(t, names),
                        _ => Value::String("+inf".into()),
                    };
                    obj([("band", obj([("lo", lo), ("hi", hi)]))])
                }
            })
            .collect();
        obj([
            ("dim", Value::from(self.dim())),
            ("kind", Value::String(self.kind().as_str().into())),
            ("stages", Value::Array(stages)),
        ])
    }

    pub fn from_json(v: &Value, names: &[String]) -> Result<Cell, CellError> {
        let err = |m: &str| CellError::Json(m.to_string());
        let stages = v
            .get("stages")
            .and_then(Value::as_array)
            .ok_or_else(|| err("missing `stages` array"))?;
        let mut out = Vec::new();
        for (k, s) in stages.iter().enumerate() {
            if let Some(g) = s.get("graph") {
                out.push(Stage::Graph(term_from_json(g, names, k)?));
            } else if let Some(b) = s.get("band") {
                let bound = |key: &str, inf: &str, b_inf: Bound| -> Result<Bound, CellError> {
                    match b.get(key) {
                        Some(Value::String(s)) if s == inf => Ok(b_inf),
                        Some(t) => Ok(Bound::Finite(term_from_json(t, names, k)?)),
                        None => Err(err("band without bound")),
                    }
                };
                out.push(Stage::Band {
                    lower: bound("lo", "-inf", Bound::NegInf)?,
                    upper: bound("hi", "+inf", Bound::PosInf)?,
                });
            } else {
                return Err(err("stage is neither graph nor band"));
            }
        }
        Ok(Cell { stages: out })
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let parts: Vec<String> = self
            .stages
            .iter()
            .map(|s| match s {
                Stage::Graph(f) => format!("{{{}}}", f.display_with(names)),
                Stage::Band { lower, upper } => {
                    let lo = lower.finite().map_or("-inf".to_string(), |t| t.display_with(names));
                    let hi = upper.finite().map_or("+inf".to_string(), |t| t.display_with(names));
                    format!("({lo}, {hi})")
                }
            })
            .collect();
        format!("[{}]", parts.join(" x "))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&default_names(self.ambient_dim())))
    }
}

fn obj<const N: usize>(entries: [(&str, Value); N]) -> Value {
    let mut m = Map::new();
    for (k, v) in entries {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

/// Coefficient map keyed by variable name, with `"1"` for the constant.
pub fn term_to_json(t: &LinTerm, names: &[String]) -> Value {
    let mut m = Map::new();
    for (i, c) in t.coeffs() {
        let key = names.get(i).cloned().unwrap_or_else(|| format!("x{i}"));
        m.insert(key, Value::String(fmt_rational_pq(c)));
    }
    if !t.constant_term().is_zero() {
        m.insert("1".into(), Value::String(fmt_rational_pq(t.constant_term())));
    }
    Value::Object(m)
}

pub fn term_from_json(v: &Value, names: &[String], dim: usize) -> Result<LinTerm, CellError> {
    let m = v
        .as_object()
        .ok_or_else(|| CellError::Json("term is not an object".into()))?;
    let mut coeffs = Vec::new();
    let mut constant = Rational::zero();
    for (k, c) in m {
        let q = c
            .as_str()
            .and_then(parse_rational)
            .ok_or_else(|| CellError::Json(format!("bad coefficient for `{k}`")))?;
        if k == "1" {
            constant = q;
            continue;
        }
        let i = names
            .iter()
            .position(|n| n == k)
            .ok_or_else(|| CellError::Json(format!("unknown variable `{k}`")))?;
        if i >= dim {
            return Err(CellError::Json(format!("`{k}` is not an earlier coordinate")));
        }
        coeffs.push((i, q));
    }
    Ok(LinTerm::from_parts(dim, coeffs, constant))
}

/// `[min, max]` of an affine function over a box of its variables.
fn affine_range(f: &LinTerm, bx: &[(Rational, Rational)]) -> (Rational, Rational) {
    let mut lo = f.constant_term().clone();
    let mut hi = lo.clone();
    for (i, c) in f.coeffs() {
        let (a, b) = (c * &bx[i].0, c * &bx[i].1);
        if c.is_negative() {
            lo += b;
            hi += a;
        } else {
            lo += a;
            hi += b;
        }
    }
    (lo, hi)
}

/// Roots per level: `roots[k]` holds the distinct expressions for `x_k` in
/// terms of `x_0..x_{k-1}`.
pub fn projection_roots(dim: usize, functionals: impl IntoIterator<Item = LinTerm>) -> Vec<Vec<LinTerm>> {
    let mut current: BTreeSet<LinTerm> = functionals
        .into_iter()
        .filter(|t| !t.is_constant())
        .map(|t| t.with_dim(dim).normalize().expect("nonconstant").0)
        .collect();
    let mut roots = vec![Vec::new(); dim];
    for k in (0..dim).rev() {
        current.insert(LinTerm::var(k + 1, k));
        let mut level = BTreeSet::new();
        let mut next = BTreeSet::new();
        for t in &current {
            match t.solve_for(k) {
                Some(r) => {
                    level.insert(r.with_dim(k));
                }
                None => {
                    next.insert(t.clone().with_dim(k));
                }
            }
        }
        let level: Vec<LinTerm> = level.into_iter().collect();
        for (i, a) in level.iter().enumerate() {
            for b in &level[i + 1..] {
                let d = a - b;
                if !d.is_constant() {
                    next.insert(d.normalize().expect("nonconstant").0);
                }
            }
        }
        roots[k] = level;
        current = next;
    }
    roots
}

/// Cells over `base`, one column per base cell, restricted to those whose
/// sample point passes `keep`. Discarded cells are returned separately.
fn lift(
    base: &[Cell],
    roots: &[LinTerm],
    keep: impl Fn(&[Rational]) -> bool,
    verify: bool,
) -> Result<(Vec<Cell>, Vec<Cell>), CellError> {
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for c in base {
        let p = c.sample_point();
        let mut valued: Vec<(Rational, &LinTerm)> = roots.iter().map(|r| (r.eval_prefix(&p), r)).collect();
        valued.sort();
        let mut sections: Vec<(Rational, LinTerm)> = Vec::new();
        for (v, r) in &valued {
            match sections.last() {
                Some((last, rep)) if last == v => {
                    if verify {
                        certify_order(c, rep, r, Rel::Eq)?;
                    }
                }
                Some((_, rep)) => {
                    if verify {
                        certify_order(c, rep, r, Rel::Lt)?;
                    }
                    sections.push((v.clone(), (*r).clone()));
                }
                None => sections.push((v.clone(), (*r).clone())),
            }
        }
        let mut column = Vec::with_capacity(2 * sections.len() + 1);
        let mut lower = Bound::NegInf;
        for (_, r) in sections {
            column.push(Stage::Band {
                lower: lower.clone(),
                upper: Bound::Finite(r.clone()),
            });
            column.push(Stage::Graph(r.clone()));
            lower = Bound::Finite(r);
        }
        column.push(Stage::Band {
            lower,
            upper: Bound::PosInf,
        });
        for s in column {
            let mut stages = c.stages.clone();
            stages.push(s);
            let cell = Cell { stages };
            if keep(&cell.sample_point()) {
                kept.push(cell);
            } else {
                dropped.push(cell);
            }
        }
    }
    Ok((kept, dropped))
}

fn certify_order(base: &Cell, a: &LinTerm, b: &LinTerm, rel: Rel) -> Result<(), CellError> {
    let n = base.ambient_dim();
    let claim = Atom::new(&a.clone().with_dim(n) - &b.clone().with_dim(n), rel);
    if qe::conj_entails_atom(&base.atoms(), &claim) {
        Ok(())
    } else {
        Err(CellError::Certification(format!(
            "roots {a} and {b} are not ordered over {base}"
        )))
    }
}

/// Every cell of `Q^dim` for the cylindrical decomposition adapted to the
/// given functionals.
pub fn cylindrical_cells(dim: usize, functionals: impl IntoIterator<Item = LinTerm>) -> Vec<Cell> {
    let roots = projection_roots(dim, functionals);
    let mut cells = vec![Cell::new(Vec::new())];
    for level in &roots {
        cells = lift(&cells, level, |_| true, false).expect("no certification").0;
    }
    cells
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DecomposeOptions {
    /// Certify root orderings, containment and coverage by elimination.
    pub verify: bool,
}

impl DecomposeOptions {
    pub fn verified() -> Self {
        DecomposeOptions { verify: true }
    }
}

/// Partition of a definable set into non-exceptional cells.
#[derive(Debug, Clone)]
pub struct Decomposition {
    cells: Vec<Cell>,
    source: DefSet,
    /// Cells of each projection `p_k(source)`, `tower[k]` in `Q^k`.
    tower: Vec<Vec<Cell>>,
}

impl Decomposition {
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn source(&self) -> &DefSet {
        &self.source
    }

    pub fn ambient_dim(&self) -> usize {
        self.source.dim()
    }

    /// Cells of the decomposition of the first-`k`-coordinate projection
    /// from which this one was lifted.
    pub fn level(&self, k: usize) -> &[Cell] {
        &self.tower[k]
    }

    pub fn chi_g(&self) -> i64 {
        self.cells.iter().map(|c| sign(c.dim())).sum()
    }

    pub fn chi_b(&self) -> i64 {
        self.cells
            .iter()
            .filter(|c| c.kind() == CellKind::Good)
            .map(|c| sign(c.dim()))
            .sum()
    }

    pub fn count(&self, kind: CellKind) -> usize {
        self.cells.iter().filter(|c| c.kind() == kind).count()
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.cells.iter().map(Cell::dim).max()
    }

    /// Checks by elimination that the cells are nonempty, pairwise disjoint,
    /// contained in the source and cover it.
    pub fn certify(&self) -> Result<(), CellError> {
        let fail = |m: String| Err(CellError::Certification(m));
        let sets: Vec<DefSet> = self.cells.iter().map(Cell::to_defset).collect();
        for (c, s) in self.cells.iter().zip(&sets) {
            if s.is_empty() {
                return fail(format!("cell {c} is empty"));
            }
            if !s.entails(&self.source).expect("same dimension") {
                return fail(format!("cell {c} leaves the source set"));
            }
        }
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                let mut atoms = self.cells[i].atoms();
                atoms.extend(self.cells[j].atoms());
                if !qe::conj_is_empty(&atoms) {
                    return fail(format!("cells {} and {} overlap", self.cells[i], self.cells[j]));
                }
            }
        }
        let mut rest = self.source.clone();
        for s in &sets {
            rest = rest.difference(s);
        }
        if !rest.is_empty() {
            return fail("cells do not cover the source set".into());
        }
        Ok(())
    }
}

fn sign(dim: usize) -> i64 {
    if dim % 2 == 0 {
        1
    } else {
        -1
    }
}

fn decompose_functionals(
    s: &DefSet,
    functionals: BTreeSet<LinTerm>,
    opts: DecomposeOptions,
) -> Result<Decomposition, CellError> {
    let n = s.dim();
    if s.is_empty() {
        return Ok(Decomposition {
            cells: Vec::new(),
            source: s.clone(),
            tower: vec![Vec::new(); n + 1],
        });
    }
    let roots = projection_roots(n, functionals);
    // projections[k] = p_k(s) in Q^k
    let mut projections = vec![s.clone()];
    for k in (0..n).rev() {
        let next = projections.last().unwrap().project_out(&[k]);
        projections.push(next);
    }
    projections.reverse();

    let mut cells = vec![Cell::new(Vec::new())];
    let mut tower = vec![cells.clone()];
    for (k, level) in roots.iter().enumerate() {
        let target = &projections[k + 1];
        let (kept, dropped) = lift(&cells, level, |p| target.contains(p), opts.verify)?;
        if opts.verify {
            for c in &kept {
                if !c.to_defset().entails(target).expect("same dimension") {
                    return Err(CellError::Certification(format!("cell {c} leaves the set")));
                }
            }
            for c in &dropped {
                if !c.to_defset().intersect(target).is_empty() {
                    return Err(CellError::Certification(format!("dropped cell {c} meets the set")));
                }
            }
        }
        cells = kept;
        tower.push(cells.clone());
    }
    Ok(Decomposition {
        cells,
        source: s.clone(),
        tower,
    })
}

/// Decomposes `s` into cells adapted to the coordinate order.
pub fn decompose(s: &DefSet) -> Decomposition {
    decompose_with(s, DecomposeOptions::default()).expect("certification is off")
}

pub fn decompose_with(s: &DefSet, opts: DecomposeOptions) -> Result<Decomposition, CellError> {
    decompose_functionals(s, s.functionals(), opts)
}

/// Finer decomposition that is also sign-invariant for every `extra`
/// functional. Each new cell lies in exactly one old cell.
pub fn refine(d: &Decomposition, extra: &[LinTerm]) -> Decomposition {
    refine_with(d, extra, DecomposeOptions::default()).expect("certification is off")
}

pub fn refine_with(d: &Decomposition, extra: &[LinTerm], opts: DecomposeOptions) -> Result<Decomposition, CellError> {
    let n = d.ambient_dim();
    let mut functionals = d.source.functionals();
    for c in &d.cells {
        functionals.extend(c.boundary_functionals());
    }
    for t in extra {
        if !t.is_constant() {
            functionals.insert(t.clone().with_dim(n).normalize().expect("nonconstant").0);
        }
    }
    let out = decompose_functionals(&d.source, functionals, opts)?;
    if opts.verify {
        for c in &out.cells {
            let p = c.sample_point();
            let parents: Vec<&Cell> = d.cells.iter().filter(|o| o.contains(&p)).collect();
            if parents.len() != 1 {
                return Err(CellError::Certification(format!("cell {c} has {} parents", parents.len())));
            }
            if !c.to_defset().entails(&parents[0].to_defset()).expect("same dimension") {
                return Err(CellError::Certification(format!("cell {c} straddles {}", parents[0])));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn set(text: &str, v: &[&str]) -> DefSet {
        DefSet::parse_vars(text, v).unwrap()
    }

    fn c(n: i64) -> LinTerm {
        LinTerm::constant(0, int(n))
    }

    fn band(lo: Bound, hi: Bound) -> Stage {
        Stage::Band { lower: lo, upper: hi }
    }

    fn fin(t: LinTerm) -> Bound {
        Bound::Finite(t)
    }

    fn x1() -> LinTerm {
        LinTerm::var(1, 0)
    }

    #[test]
    fn single_interval() {
        let d = decompose_with(&set("0 < x & x < 1", &["x"]), DecomposeOptions::verified()).unwrap();
        assert_eq!(d.cells(), &[Cell::new(vec![band(fin(c(0)), fin(c(1)))])]);
    }

    #[test]
    fn line_splits_at_zero() {
        let d = decompose_with(&DefSet::universe(1), DecomposeOptions::verified()).unwrap();
        let want = vec![
            Cell::new(vec![band(Bound::NegInf, fin(c(0)))]),
            Cell::new(vec![Stage::Graph(c(0))]),
            Cell::new(vec![band(fin(c(0)), Bound::PosInf)]),
        ];
        assert_eq!(d.cells(), want.as_slice());
        let kinds: Vec<CellKind> = d.cells().iter().map(Cell::kind).collect();
        assert_eq!(kinds, [CellKind::Bad, CellKind::Good, CellKind::Bad]);
    }

    #[test]
    fn open_triangle() {
        let s = set("0 < x & x < 1 & 0 < y & y < x", &["x", "y"]);
        let d = decompose_with(&s, DecomposeOptions::verified()).unwrap();
        let want = Cell::new(vec![band(fin(c(0)), fin(c(1))), band(fin(LinTerm::constant(1, int(0))), fin(x1()))]);
        assert_eq!(d.cells(), &[want]);
        d.certify().unwrap();
    }

    #[test]
    fn empty_set_has_no_cells() {
        let d = decompose(&set("x < 0 & 0 < x", &["x"]));
        assert!(d.cells().is_empty());
        assert_eq!((d.chi_g(), d.chi_b()), (0, 0));
    }

    #[test]
    fn dims() {
        let origin = Cell::new(vec![Stage::Graph(c(0)), Stage::Graph(LinTerm::constant(1, int(0)))]);
        assert_eq!(origin.dim(), 0);
        let g = Cell::new(vec![band(fin(c(0)), fin(c(1))), Stage::Graph(x1())]);
        assert_eq!(g.dim(), 1);
        let tri = Cell::new(vec![band(fin(c(0)), fin(c(1))), band(fin(LinTerm::zero(1)), fin(x1()))]);
        assert_eq!(tri.dim(), 2);
    }

    #[test]
    fn classification() {
        assert_eq!(Cell::new(vec![band(Bound::NegInf, Bound::PosInf)]).kind(), CellKind::Exceptional);
        assert_eq!(Cell::new(vec![band(fin(c(0)), Bound::PosInf)]).kind(), CellKind::Bad);
        let g = Cell::new(vec![band(fin(c(0)), fin(c(1))), Stage::Graph(x1())]);
        assert_eq!(g.kind(), CellKind::Good);
    }

    #[test]
    fn boundedness() {
        let a = Cell::new(vec![band(fin(c(0)), fin(c(1)))]);
        assert_eq!(a.bounding_box(), Some(vec![(int(0), int(1))]));
        assert!(!Cell::new(vec![band(fin(c(0)), Bound::PosInf)]).is_bounded());
        let tri = Cell::new(vec![band(fin(c(0)), fin(c(1))), band(fin(LinTerm::zero(1)), fin(x1()))]);
        assert_eq!(tri.bounding_box(), Some(vec![(int(0), int(1)), (int(0), int(1))]));
    }

    #[test]
    fn refine_splits_interval() {
        let d = decompose(&set("0 < x & x < 1", &["x"]));
        let half = &x1() - &LinTerm::constant(1, rat(1, 2));
        let r = refine_with(&d, &[half], DecomposeOptions::verified()).unwrap();
        let h = LinTerm::constant(0, rat(1, 2));
        let want = vec![
            Cell::new(vec![band(fin(c(0)), fin(h.clone()))]),
            Cell::new(vec![Stage::Graph(h.clone())]),
            Cell::new(vec![band(fin(h), fin(c(1)))]),
        ];
        assert_eq!(r.cells(), want.as_slice());
        let same = refine(&d, &[]);
        assert_eq!(same.cells(), d.cells());
    }

    #[test]
    fn refine_triangle() {
        let s = set("0 < x & x < 1 & 0 < y & y < x", &["x", "y"]);
        let d = decompose(&s);
        let cut = &LinTerm::var(2, 1) - &LinTerm::constant(2, rat(1, 2));
        let r = refine_with(&d, &[cut], DecomposeOptions::verified()).unwrap();
        // y = 1/2 crosses y = x at x = 1/2, so the base splits there too
        let dims: Vec<usize> = r.cells().iter().map(Cell::dim).collect();
        assert_eq!(dims, [2, 1, 2, 1, 2]);
        assert_eq!(r.chi_g(), d.chi_g());
        r.certify().unwrap();
    }

    #[test]
    fn quadrant_is_one_bad_cell() {
        let d = decompose(&set("0 < x & 0 < y", &["x", "y"]));
        assert_eq!(d.cells().len(), 1);
        assert_eq!(d.cells()[0].kind(), CellKind::Bad);
        assert_eq!(d.cells()[0].dim(), 2);
    }

    #[test]
    fn json_round_trip() {
        let names = vec!["x".to_string(), "y".to_string()];
        let s = set("0 < x & x < 1 & 0 < y & y < x | y = 2*x & x < 0", &["x", "y"]);
        for cell in decompose(&s).cells() {
            let v = cell.to_json(&names);
            assert_eq!(Cell::from_json(&v, &names).unwrap(), *cell);
        }
        let tri = Cell::new(vec![band(fin(c(0)), fin(c(1))), band(Bound::NegInf, fin(x1()))]);
        let text = serde_json::to_string(&tri.to_json(&names)).unwrap();
        assert_eq!(
            text,
            r#"{"dim":2,"kind":"bad","stages":[{"band":{"hi":{"1":"1/1"},"lo":{}}},{"band":{"hi":{"x":"1/1"},"lo":"-inf"}}]}"#
        );
    }
}
