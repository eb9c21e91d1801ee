use std::collections::BTreeSet;

use super::{parse, Atom, Formula, FormulaError, ParseError, Rel};
use crate::arith::{LinTerm, Rational};
use crate::qe;

/// Conjunction of atoms, sorted and deduplicated, with no ground atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Conj(Vec<Atom>);

impl Conj {
    /// Drops true ground atoms; returns `None` if a ground atom is false.
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Option<Conj> {
        let mut out = Vec::new();
        for a in atoms {
            match a.ground_value() {
                Some(true) => {}
                Some(false) => return None,
                None => out.push(a),
            }
        }
        out.sort();
        out.dedup();
        Some(Conj(out))
    }

    pub fn top() -> Conj {
        Conj(Vec::new())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn into_atoms(self) -> Vec<Atom> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn holds_at(&self, point: &[Rational]) -> bool {
        self.0.iter().all(|a| a.holds_at(point))
    }

    fn and(&self, other: &Conj) -> Conj {
        let mut atoms = self.0.clone();
        atoms.extend(other.0.iter().cloned());
        atoms.sort();
        atoms.dedup();
        Conj(atoms)
    }

    fn is_subset_of(&self, other: &Conj) -> bool {
        self.0.iter().all(|a| other.0.binary_search(a).is_ok())
    }

    fn with_dim(self, dim: usize) -> Conj {
        Conj(self.0.into_iter().map(|a| a.with_dim(dim)).collect())
    }

    pub fn to_formula(&self) -> Formula {
        match self.0.len() {
            0 => Formula::True,
            1 => Formula::Atom(self.0[0].clone()),
            _ => Formula::And(self.0.iter().cloned().map(Formula::Atom).collect()),
        }
    }
}

/// A definable subset of `Q^dim`, held as a quantifier-free DNF whose
/// disjuncts are all satisfiable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DefSet {
    dim: usize,
    disjuncts: Vec<Conj>,
}

impl DefSet {
    pub fn empty(dim: usize) -> DefSet {
        DefSet {
            dim,
            disjuncts: Vec::new(),
        }
    }

    pub fn universe(dim: usize) -> DefSet {
        DefSet {
            dim,
            disjuncts: vec![Conj::top()],
        }
    }

    /// Builds from raw disjuncts: unsatisfiable ones are pruned, subsumed ones
    /// dropped, and the rest sorted.
    pub fn from_disjuncts(dim: usize, disjuncts: impl IntoIterator<Item = Conj>) -> DefSet {
        let mut live: Vec<Conj> = disjuncts
            .into_iter()
            .filter_map(|c| qe::tighten(c.with_dim(dim).into_atoms()).and_then(Conj::new))
            .filter(|c| !qe::conj_is_empty(c.atoms()))
            .collect();
        live.sort();
        live.dedup();
        // a disjunct whose atoms include all of another's is contained in it
        let keep: Vec<bool> = (0..live.len())
            .map(|i| !(0..live.len()).any(|j| j != i && live[j].is_subset_of(&live[i])))
            .collect();
        let disjuncts = live
            .into_iter()
            .zip(keep)
            .filter_map(|(c, k)| k.then_some(c))
            .collect();
        DefSet { dim, disjuncts }
    }

    pub fn from_atoms(dim: usize, atoms: impl IntoIterator<Item = Atom>) -> DefSet {
        match Conj::new(atoms) {
            Some(c) => DefSet::from_disjuncts(dim, [c]),
            None => DefSet::empty(dim),
        }
    }

    /// Any formula; quantifiers are eliminated.
    pub fn from_formula(f: &Formula, dim: usize) -> DefSet {
        qe::qe(f, dim)
    }

    /// Parses and eliminates quantifiers; `vars` fixes the coordinate order.
    pub fn parse(text: &str, vars: &[String]) -> Result<DefSet, ParseError> {
        Ok(qe::qe(&parse(text, vars)?, vars.len()))
    }

    /// Parses with variables `x0, x1, ...` or the given names; test helper.
    pub fn parse_vars(text: &str, vars: &[&str]) -> Result<DefSet, ParseError> {
        let names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        DefSet::parse(text, &names)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn disjuncts(&self) -> &[Conj] {
        &self.disjuncts
    }

    /// True iff no disjunct survives. Disjuncts are satisfiable by
    /// construction, so this is exact.
    pub fn is_empty(&self) -> bool {
        self.disjuncts.is_empty()
    }

    pub fn contains(&self, point: &[Rational]) -> bool {
        assert_eq!(point.len(), self.dim, "point dimension");
        self.disjuncts.iter().any(|c| c.holds_at(point))
    }

    pub fn to_formula(&self) -> Formula {
        match self.disjuncts.len() {
            0 => Formula::False,
            1 => self.disjuncts[0].to_formula(),
            _ => Formula::Or(self.disjuncts.iter().map(Conj::to_formula).collect()),
        }
    }

    pub fn display_with(&self, names: &[String]) -> String {
        self.to_formula().display_with(names)
    }

    /// Distinct canonical functionals of all atoms.
    pub fn functionals(&self) -> BTreeSet<LinTerm> {
        self.disjuncts
            .iter()
            .flat_map(|c| c.atoms())
            .filter_map(|a| a.term().normalize().ok().map(|(t, _)| t))
            .collect()
    }

    fn check_dim(&self, other: &DefSet) -> Result<(), FormulaError> {
        if self.dim != other.dim {
            return Err(FormulaError::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }

    pub fn union(&self, other: &DefSet) -> DefSet {
        assert_eq!(self.dim, other.dim, "union of sets in different dimensions");
        DefSet::from_disjuncts(
            self.dim,
            self.disjuncts.iter().chain(&other.disjuncts).cloned(),
        )
    }

    pub fn intersect(&self, other: &DefSet) -> DefSet {
        assert_eq!(self.dim, other.dim, "intersection of sets in different dimensions");
        DefSet::from_disjuncts(self.dim, product_pruned(&self.disjuncts, &other.disjuncts))
    }

    pub fn complement(&self) -> DefSet {
        let mut acc = vec![Conj::top()];
        for k in &self.disjuncts {
            let negated: Vec<Conj> = k
                .atoms()
                .iter()
                .flat_map(Atom::negation)
                .filter_map(|a| Conj::new([a]))
                .collect();
            acc = product_pruned(&acc, &negated);
            if acc.is_empty() {
                break;
            }
        }
        DefSet::from_disjuncts(self.dim, acc)
    }

    pub fn difference(&self, other: &DefSet) -> DefSet {
        assert_eq!(self.dim, other.dim, "difference of sets in different dimensions");
        let mut acc = self.disjuncts.clone();
        for k in &other.disjuncts {
            if acc.is_empty() {
                break;
            }
            // K' \ K = union over i of K' & a_1 & ... & a_{i-1} & !a_i
            let mut next = Vec::new();
            for base in &acc {
                let mut prefix = base.clone();
                for a in k.atoms() {
                    for na in a.negation() {
                        if let Some(c) = Conj::new([na]) {
                            let cand = prefix.and(&c);
                            if !qe::conj_is_empty(cand.atoms()) {
                                next.push(cand);
                            }
                        }
                    }
                    prefix = prefix.and(&Conj(vec![a.clone()]));
                    if qe::conj_is_empty(prefix.atoms()) {
                        break;
                    }
                }
            }
            acc = next;
        }
        DefSet::from_disjuncts(self.dim, acc)
    }

    /// `self \ other` is empty.
    pub fn entails(&self, other: &DefSet) -> Result<bool, FormulaError> {
        self.check_dim(other)?;
        Ok(self.difference(other).is_empty())
    }

    pub fn equivalent(&self, other: &DefSet) -> Result<bool, FormulaError> {
        Ok(self.entails(other)? && other.entails(self)?)
    }

    /// Cartesian product; `other`'s coordinates follow `self`'s.
    pub fn product(&self, other: &DefSet) -> DefSet {
        let dim = self.dim + other.dim;
        let left = self.remap(dim, |i| i);
        let right = other.remap(dim, |i| i + self.dim);
        DefSet::from_disjuncts(dim, product_pruned(&left.disjuncts, &right.disjuncts))
    }

    /// Renames coordinates into a space of dimension `dim`.
    pub fn remap(&self, dim: usize, map: impl Fn(usize) -> usize + Copy) -> DefSet {
        DefSet::from_disjuncts(
            dim,
            self.disjuncts
                .iter()
                .filter_map(|c| Conj::new(c.atoms().iter().map(|a| a.remap(dim, map)))),
        )
    }

    /// Same set viewed in a larger space, coordinates shifted by `offset`;
    /// the new coordinates are unconstrained.
    pub fn embed(&self, dim: usize, offset: usize) -> DefSet {
        assert!(self.dim + offset <= dim);
        self.remap(dim, |i| i + offset)
    }

    /// Image under the coordinate permutation `(x_1..x_n) -> (x_perm[0]..x_perm[n-1])`.
    pub fn permute(&self, perm: &[usize]) -> DefSet {
        assert_eq!(perm.len(), self.dim);
        // new coordinate j holds old coordinate perm[j]
        let mut inverse = vec![0; perm.len()];
        for (j, &i) in perm.iter().enumerate() {
            inverse[i] = j;
        }
        self.remap(self.dim, |i| inverse[i])
    }

    /// Projection forgetting `vars`; the remaining coordinates keep their
    /// relative order.
    pub fn project_out(&self, vars: &[usize]) -> DefSet {
        let mut disjuncts = self.disjuncts.clone();
        let mut order: Vec<usize> = vars.to_vec();
        order.sort_unstable();
        order.dedup();
        for &v in order.iter().rev() {
            disjuncts = disjuncts
                .into_iter()
                .filter_map(|c| qe::fm_eliminate(v, c.into_atoms()))
                .filter_map(Conj::new)
                .collect();
        }
        let kept: Vec<usize> = (0..self.dim).filter(|i| !order.contains(i)).collect();
        let dim = kept.len();
        let mut position = vec![usize::MAX; self.dim];
        for (j, &i) in kept.iter().enumerate() {
            position[i] = j;
        }
        let remapped = disjuncts
            .into_iter()
            .filter_map(|c| Conj::new(c.atoms().iter().map(|a| a.remap(dim, |i| position[i]))));
        DefSet::from_disjuncts(dim, remapped)
    }

    /// Slice at `x_var = value`, as a set in one dimension fewer.
    pub fn substitute_value(&self, var: usize, value: &Rational) -> DefSet {
        let dim = self.dim - 1;
        let shift = |i: usize| if i > var { i - 1 } else { i };
        let expr = LinTerm::constant(self.dim, value.clone());
        DefSet::from_disjuncts(
            dim,
            self.disjuncts.iter().filter_map(|c| {
                Conj::new(
                    c.atoms()
                        .iter()
                        .map(|a| a.substitute(var, &expr).remap(dim, shift)),
                )
            }),
        )
    }

    /// Keeps only points with `x_var REL value`-style constraint `term REL 0`.
    pub fn restrict(&self, term: LinTerm, rel: Rel) -> DefSet {
        self.intersect(&DefSet::from_atoms(self.dim, [Atom::new(term.with_dim(self.dim), rel)]))
    }
}

fn product_pruned(a: &[Conj], b: &[Conj]) -> Vec<Conj> {
    let mut out = Vec::new();
    for x in a {
        for y in b {
            let c = x.and(y);
            if !qe::conj_is_empty(c.atoms()) {
                out.push(c);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Disjunctive normal form of a quantifier-free formula with empty disjuncts
/// pruned and subsumed disjuncts dropped.
pub fn to_dnf(f: &Formula, dim: usize) -> Result<DefSet, FormulaError> {
    let nnf = f.nnf()?;
    Ok(DefSet::from_disjuncts(dim, dnf_of_nnf(&nnf)))
}

fn dnf_of_nnf(f: &Formula) -> Vec<Conj> {
    match f {
        Formula::True => vec![Conj::top()],
        Formula::False => Vec::new(),
        Formula::Atom(a) => Conj::new([a.clone()]).into_iter().collect(),
        Formula::Or(fs) => {
            let mut out: Vec<Conj> = fs.iter().flat_map(dnf_of_nnf).collect();
            out.sort();
            out.dedup();
            out
        }
        Formula::And(fs) => {
            let mut acc = vec![Conj::top()];
            for g in fs {
                acc = product_pruned(&acc, &dnf_of_nnf(g));
                if acc.is_empty() {
                    break;
                }
            }
            acc
        }
        Formula::Not(_) | Formula::Exists(..) => unreachable!("input is in negation normal form"),
    }
}
