//! Quantifier elimination for linear arithmetic over the dense ordered
//! divisible group `(Q, <, +, 0)` by Fourier-Motzkin.
//!
//! Only strict `<` and `=` occur, so pairing a lower bound `l < x` with an
//! upper bound `x < u` yields the strict `l < u`. Density of the order gives a
//! witness between them, and unboundedness lets a variable with bounds on one
//! side only be dropped with no residue.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{int, LinTerm, Rational};
use crate::formula::{Atom, Conj, DefSet, Formula, Rel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QeError {
    #[error("elimination budget of {0} steps exhausted")]
    DepthExceeded(usize),
    #[error("variable x{var} is free but the ambient dimension is {dim}")]
    UnboundVariable { var: usize, dim: usize },
}

/// Environment variable capping the number of single-variable elimination
/// steps one `qe` call may perform.
pub const FM_DEPTH_ENV: &str = "GROTHLIN_FM_DEPTH";

#[derive(Debug, Clone, Default)]
pub struct QeConfig {
    pub max_eliminations: Option<usize>,
    /// Drop atoms implied by the rest of their conjunct after each step.
    pub remove_redundant: bool,
}

impl QeConfig {
    pub fn unbounded() -> Self {
        QeConfig {
            max_eliminations: None,
            remove_redundant: true,
        }
    }

    pub fn with_cap(cap: usize) -> Self {
        QeConfig {
            max_eliminations: Some(cap),
            remove_redundant: true,
        }
    }

    /// Reads the cap from `GROTHLIN_FM_DEPTH` when set to an integer.
    pub fn from_env() -> Self {
        let cap = std::env::var(FM_DEPTH_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok());
        QeConfig {
            max_eliminations: cap,
            remove_redundant: true,
        }
    }
}

/// Atoms of one conjunction sorted by how they constrain a target variable.
/// Bucket terms are solved for the variable, so they no longer mention it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoundPartition {
    /// `l < x`
    pub lowers: Vec<LinTerm>,
    /// `x < u`
    pub uppers: Vec<LinTerm>,
    /// `x = e`
    pub equalities: Vec<LinTerm>,
    pub free: Vec<Atom>,
}

pub fn partition_bounds(var: usize, atoms: &[Atom]) -> BoundPartition {
    let mut p = BoundPartition::default();
    for a in atoms {
        let c = a.term().coeff(var);
        if c.is_zero() {
            p.free.push(a.clone());
            continue;
        }
        let root = a.term().solve_for(var).expect("mentions var");
        match a.rel() {
            Rel::Eq => p.equalities.push(root),
            Rel::Lt if c.is_positive() => p.uppers.push(root),
            Rel::Lt => p.lowers.push(root),
        }
    }
    p
}

/// Parallel atoms share a direction `v = key(x)` up to scaling; per direction
/// only the tightest bounds are kept. Returns `None` on a contradiction.
pub(crate) fn tighten(atoms: Vec<Atom>) -> Option<Vec<Atom>> {
    #[derive(Default)]
    struct Range {
        lower: Option<Rational>,
        upper: Option<Rational>,
        value: Option<Rational>,
    }
    let mut ranges: BTreeMap<LinTerm, Range> = BTreeMap::new();
    let mut dim = 0;
    for a in atoms {
        dim = dim.max(a.dim());
        if let Some(v) = a.ground_value() {
            if v {
                continue;
            }
            return None;
        }
        let linear = a.term().linear_part();
        let (key, _) = linear.normalize().expect("nonconstant");
        let (lead, _) = key.coeffs().next().expect("nonconstant");
        // term = k * key + c
        let k = linear.coeff(lead) / key.coeff(lead);
        let bound = -a.term().constant_term() / &k;
        let r = ranges.entry(key).or_default();
        match a.rel() {
            Rel::Eq => match &r.value {
                Some(v) if *v != bound => return None,
                _ => r.value = Some(bound),
            },
            Rel::Lt if k.is_positive() => {
                if r.upper.as_ref().is_none_or(|u| bound < *u) {
                    r.upper = Some(bound);
                }
            }
            Rel::Lt => {
                if r.lower.as_ref().is_none_or(|l| bound > *l) {
                    r.lower = Some(bound);
                }
            }
        }
    }
    let mut out = Vec::new();
    for (key, r) in ranges {
        let key = key.with_dim(dim);
        if let Some(v) = r.value {
            if r.lower.as_ref().is_some_and(|l| *l >= v) || r.upper.as_ref().is_some_and(|u| *u <= v) {
                return None;
            }
            out.push(Atom::eq(&key - &LinTerm::constant(dim, v)));
            continue;
        }
        if let (Some(l), Some(u)) = (&r.lower, &r.upper) {
            if l >= u {
                return None;
            }
        }
        if let Some(l) = r.lower {
            out.push(Atom::lt(&LinTerm::constant(dim, l) - &key));
        }
        if let Some(u) = r.upper {
            out.push(Atom::lt(&key - &LinTerm::constant(dim, u)));
        }
    }
    out.sort();
    Some(out)
}

/// One elimination step on a conjunction. `None` means the projection is
/// empty.
pub(crate) fn fm_eliminate(var: usize, atoms: Vec<Atom>) -> Option<Vec<Atom>> {
    let atoms = tighten(atoms)?;
    let dim = atoms.iter().map(Atom::dim).max().unwrap_or(0);
    let pivot = atoms
        .iter()
        .filter(|a| a.rel() == Rel::Eq && a.term().mentions(var))
        .min()
        .cloned();
    if let Some(eq) = pivot {
        let root = eq.term().solve_for(var).expect("mentions var");
        let substituted = atoms
            .iter()
            .filter(|a| **a != eq)
            .map(|a| a.substitute(var, &root).with_dim(dim))
            .collect();
        return tighten(substituted);
    }
    let p = partition_bounds(var, &atoms);
    let mut out = p.free;
    for l in &p.lowers {
        for u in &p.uppers {
            out.push(Atom::lt(l - u).with_dim(dim));
        }
    }
    tighten(out)
}

fn elimination_cost(var: usize, atoms: &[Atom]) -> (usize, usize) {
    let mut lo = 0;
    let mut hi = 0;
    for a in atoms {
        let c = a.term().coeff(var);
        if c.is_zero() {
            continue;
        }
        if a.rel() == Rel::Eq {
            return (0, 0);
        }
        if c.is_positive() {
            hi += 1;
        } else {
            lo += 1;
        }
    }
    (lo * hi, lo + hi)
}

fn pick_var(atoms: &[Atom]) -> Option<usize> {
    let mut vars: Vec<usize> = atoms.iter().flat_map(|a| a.term().vars()).collect();
    vars.sort_unstable();
    vars.dedup();
    vars.into_iter()
        .min_by_key(|v| (elimination_cost(*v, atoms), usize::MAX - v))
}

/// True iff no rational point satisfies every atom.
pub fn conj_is_empty(atoms: &[Atom]) -> bool {
    let Some(mut cur) = tighten(atoms.to_vec()) else {
        return true;
    };
    while let Some(v) = pick_var(&cur) {
        match fm_eliminate(v, cur) {
            Some(next) => cur = next,
            None => return true,
        }
    }
    false
}

/// A rational point of `Q^dim` satisfying every atom, by elimination followed
/// by back-substitution.
pub fn witness(atoms: &[Atom], dim: usize) -> Option<Vec<Rational>> {
    let mut cur = tighten(atoms.to_vec())?;
    let mut trail = Vec::new();
    while let Some(v) = pick_var(&cur) {
        let next = fm_eliminate(v, cur.clone())?;
        trail.push((v, cur));
        cur = next;
    }
    let mut point = vec![Rational::zero(); dim];
    for (v, system) in trail.into_iter().rev() {
        point[v] = choose_value(v, &system, &point);
    }
    debug_assert!(atoms.iter().all(|a| a.holds_at(&point)));
    Some(point)
}

/// Picks `x_v` given values for every other variable `system` mentions.
fn choose_value(v: usize, system: &[Atom], point: &[Rational]) -> Rational {
    let mut lower: Option<Rational> = None;
    let mut upper: Option<Rational> = None;
    for a in system {
        let c = a.term().coeff(v);
        if c.is_zero() {
            continue;
        }
        let root = a.term().solve_for(v).expect("mentions var");
        let value = root.eval_prefix(point);
        match a.rel() {
            Rel::Eq => return value,
            Rel::Lt if c.is_positive() => {
                if upper.as_ref().is_none_or(|u| value < *u) {
                    upper = Some(value);
                }
            }
            Rel::Lt => {
                if lower.as_ref().is_none_or(|l| value > *l) {
                    lower = Some(value);
                }
            }
        }
    }
    let zero = Rational::zero();
    let inside = |q: &Rational| {
        lower.as_ref().is_none_or(|l| l < q) && upper.as_ref().is_none_or(|u| q < u)
    };
    if inside(&zero) {
        return zero;
    }
    match (lower, upper) {
        (Some(l), Some(u)) => {
            // prefer an integer strictly inside when one exists
            let f = l.floor() + Rational::one();
            if f < u {
                f
            } else {
                (l + u) / int(2)
            }
        }
        (Some(l), None) => l.floor() + Rational::one(),
        (None, Some(u)) => u.ceil() - Rational::one(),
        (None, None) => zero,
    }
}

/// Is `atom` implied by `atoms`?
pub fn conj_entails_atom(atoms: &[Atom], atom: &Atom) -> bool {
    atom.negation().into_iter().all(|na| {
        let mut probe = atoms.to_vec();
        probe.push(na);
        conj_is_empty(&probe)
    })
}

/// Drops, in sorted order, each atom implied by the remaining ones.
pub fn remove_redundant(atoms: Vec<Atom>) -> Vec<Atom> {
    let mut kept = atoms;
    kept.sort();
    let mut i = 0;
    while i < kept.len() {
        let mut rest = kept.clone();
        let a = rest.remove(i);
        if conj_entails_atom(&rest, &a) {
            kept = rest;
        } else {
            i += 1;
        }
    }
    kept
}

/// `EX x_var. (atoms)` as a quantifier-free formula.
pub fn eliminate_exists(var: usize, conj: &[Atom]) -> Formula {
    match fm_eliminate(var, conj.to_vec()) {
        None => Formula::False,
        Some(atoms) => Conj::new(remove_redundant(atoms))
            .map_or(Formula::False, |c| c.to_formula()),
    }
}

fn first_free_var(f: &Formula, dim: usize, bound: &mut Vec<usize>) -> Option<usize> {
    match f {
        Formula::True | Formula::False => None,
        Formula::Atom(a) => a.term().vars().find(|v| *v >= dim && !bound.contains(v)),
        Formula::And(fs) | Formula::Or(fs) => fs.iter().find_map(|g| first_free_var(g, dim, bound)),
        Formula::Not(g) => first_free_var(g, dim, bound),
        Formula::Exists(v, g) => {
            bound.push(*v);
            let r = first_free_var(g, dim, bound);
            bound.pop();
            r
        }
    }
}

/// Equivalent quantifier-free set; panics if `f` has a free variable
/// `>= dim`.
pub fn qe(f: &Formula, dim: usize) -> DefSet {
    qe_with(f, dim, &QeConfig::unbounded()).expect("unbounded elimination")
}

pub fn qe_with(f: &Formula, dim: usize, config: &QeConfig) -> Result<DefSet, QeError> {
    if let Some(var) = first_free_var(f, dim, &mut Vec::new()) {
        return Err(QeError::UnboundVariable { var, dim });
    }
    let mut steps = 0;
    eliminate(f, dim, config, &mut steps)
}

fn eliminate(f: &Formula, dim: usize, config: &QeConfig, steps: &mut usize) -> Result<DefSet, QeError> {
    Ok(match f {
        Formula::True => DefSet::universe(dim),
        Formula::False => DefSet::empty(dim),
        Formula::Atom(a) => DefSet::from_atoms(dim, [a.clone()]),
        Formula::And(fs) => {
            let mut acc = DefSet::universe(dim);
            for g in fs {
                acc = acc.intersect(&eliminate(g, dim, config, steps)?);
                if acc.is_empty() {
                    break;
                }
            }
            acc
        }
        Formula::Or(fs) => {
            let mut acc = DefSet::empty(dim);
            for g in fs {
                acc = acc.union(&eliminate(g, dim, config, steps)?);
            }
            acc
        }
        Formula::Not(g) => eliminate(g, dim, config, steps)?.complement(),
        Formula::Exists(v, g) => {
            let inner = eliminate(g, dim.max(v + 1), config, steps)?;
            let mut out = Vec::new();
            for c in inner.disjuncts() {
                *steps += 1;
                if let Some(cap) = config.max_eliminations {
                    if *steps > cap {
                        return Err(QeError::DepthExceeded(cap));
                    }
                }
                if let Some(atoms) = fm_eliminate(*v, c.atoms().to_vec()) {
                    let atoms = if config.remove_redundant {
                        remove_redundant(atoms)
                    } else {
                        atoms
                    };
                    out.extend(Conj::new(atoms));
                }
            }
            DefSet::from_disjuncts(dim, out)
        }
    })
}

/// Exact emptiness of a definable set.
pub fn is_empty(s: &DefSet) -> bool {
    s.disjuncts().iter().all(|c| conj_is_empty(c.atoms()))
}

pub fn entails(a: &DefSet, b: &DefSet) -> Result<bool, crate::formula::FormulaError> {
    a.entails(b)
}
