//! First-order formulas over `(<, +, -, 0)` with rational constants and
//! rational scalar multiples of variables.

mod defset;
mod parse;

pub use defset::{to_dnf, Conj, DefSet};
pub use parse::{free_names, parse, parse_term, ParseError};

use std::fmt;

use num::{Signed, Zero};
use thiserror::Error;

use crate::arith::{fmt_positive_side, ArithError, LinTerm, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("quantifier encountered where a quantifier-free formula is required")]
    QuantifierFound,
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rel {
    /// `t < 0`
    Lt,
    /// `t = 0`
    Eq,
}

/// `t < 0` or `t = 0` with `t` in canonical form.
///
/// Equalities use [`LinTerm::normalize`]; strict inequalities are only scaled
/// by a positive factor so their orientation is kept. Ground atoms collapse
/// to the constants `-1`, `0` or `1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    term: LinTerm,
    rel: Rel,
}

impl Atom {
    pub fn new(term: LinTerm, rel: Rel) -> Atom {
        let term = if term.is_constant() {
            let c = term.constant_term();
            let s = match rel {
                Rel::Lt => c.signum(),
                Rel::Eq => c.abs().signum(),
            };
            LinTerm::constant(term.dim(), s)
        } else {
            match rel {
                Rel::Eq => term.normalize().expect("nonconstant").0,
                Rel::Lt => term.positive_normalize(),
            }
        };
        Atom { term, rel }
    }

    pub fn lt(term: LinTerm) -> Atom {
        Atom::new(term, Rel::Lt)
    }

    pub fn eq(term: LinTerm) -> Atom {
        Atom::new(term, Rel::Eq)
    }

    pub fn term(&self) -> &LinTerm {
        &self.term
    }

    pub fn rel(&self) -> Rel {
        self.rel
    }

    pub fn dim(&self) -> usize {
        self.term.dim()
    }

    pub fn with_dim(self, dim: usize) -> Atom {
        Atom {
            term: self.term.with_dim(dim),
            rel: self.rel,
        }
    }

    pub fn remap(&self, dim: usize, map: impl Fn(usize) -> usize) -> Atom {
        Atom::new(self.term.remap(dim, map), self.rel)
    }

    /// Truth value of a ground atom.
    pub fn ground_value(&self) -> Option<bool> {
        if !self.term.is_constant() {
            return None;
        }
        let c = self.term.constant_term();
        Some(match self.rel {
            Rel::Lt => c.is_negative(),
            Rel::Eq => c.is_zero(),
        })
    }

    pub fn holds_at(&self, point: &[Rational]) -> bool {
        let v = self.term.eval_prefix(point);
        match self.rel {
            Rel::Lt => v.is_negative(),
            Rel::Eq => v.is_zero(),
        }
    }

    /// Disjuncts of the negation, by trichotomy.
    pub fn negation(&self) -> Vec<Atom> {
        let t = &self.term;
        match self.rel {
            Rel::Lt => vec![Atom::lt(-t), Atom::eq(t.clone())],
            Rel::Eq => vec![Atom::lt(t.clone()), Atom::lt(-t)],
        }
    }

    pub fn substitute(&self, var: usize, expr: &LinTerm) -> Atom {
        Atom::new(self.term.substitute(var, expr), self.rel)
    }

    pub fn display_with(&self, names: &[String]) -> String {
        let (lhs, rhs) = self.term.split_sides();
        let op = match self.rel {
            Rel::Lt => "<",
            Rel::Eq => "=",
        };
        format!(
            "{} {} {}",
            fmt_positive_side(&lhs, names),
            op,
            fmt_positive_side(&rhs, names)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    /// Existential over the coordinate with the given index.
    Exists(usize, Box<Formula>),
}

impl Formula {
    pub fn atom(term: LinTerm, rel: Rel) -> Formula {
        Formula::Atom(Atom::new(term, rel))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn exists(var: usize, f: Formula) -> Formula {
        Formula::Exists(var, Box::new(f))
    }

    /// `ALL x. f` as `!EX x. !f`.
    pub fn forall(var: usize, f: Formula) -> Formula {
        Formula::not(Formula::exists(var, Formula::not(f)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Or(vec![Formula::not(a), b])
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::Exists(..) => false,
        }
    }

    /// Largest coordinate index mentioned or bound.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Formula::True | Formula::False => None,
            Formula::Atom(a) => a.term().max_var(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().filter_map(Formula::max_var).max(),
            Formula::Not(f) => f.max_var(),
            Formula::Exists(v, f) => Some(f.max_var().map_or(*v, |m| m.max(*v))),
        }
    }

    /// Truth at a point, for quantifier-free formulas.
    pub fn eval(&self, point: &[Rational]) -> Result<bool, FormulaError> {
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => a.holds_at(point),
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval(point)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval(point)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Not(f) => !f.eval(point)?,
            Formula::Exists(..) => return Err(FormulaError::QuantifierFound),
        })
    }

    /// Folds ground atoms and boolean constants.
    pub fn simplify(&self) -> Formula {
        match self {
            Formula::Atom(a) => match a.ground_value() {
                Some(true) => Formula::True,
                Some(false) => Formula::False,
                None => self.clone(),
            },
            Formula::True | Formula::False => self.clone(),
            Formula::And(fs) => {
                let mut out = Vec::new();
                for f in fs {
                    match f.simplify() {
                        Formula::True => {}
                        Formula::False => return Formula::False,
                        g => out.push(g),
                    }
                }
                match out.len() {
                    0 => Formula::True,
                    1 => out.pop().unwrap(),
                    _ => Formula::And(out),
                }
            }
            Formula::Or(fs) => {
                let mut out = Vec::new();
                for f in fs {
                    match f.simplify() {
                        Formula::False => {}
                        Formula::True => return Formula::True,
                        g => out.push(g),
                    }
                }
                match out.len() {
                    0 => Formula::False,
                    1 => out.pop().unwrap(),
                    _ => Formula::Or(out),
                }
            }
            Formula::Not(f) => match f.simplify() {
                Formula::True => Formula::False,
                Formula::False => Formula::True,
                g => Formula::not(g),
            },
            Formula::Exists(v, f) => match f.simplify() {
                g @ (Formula::True | Formula::False) => g,
                g => Formula::exists(*v, g),
            },
        }
    }

    /// Negation normal form: negations are pushed through the connectives and
    /// absorbed into atoms by trichotomy. The result contains no `Not`.
    pub fn nnf(&self) -> Result<Formula, FormulaError> {
        self.nnf_signed(true)
    }

    /// Negation normal form of `!self`.
    pub fn negated_nnf(&self) -> Result<Formula, FormulaError> {
        self.nnf_signed(false)
    }

    fn nnf_signed(&self, positive: bool) -> Result<Formula, FormulaError> {
        Ok(match (self, positive) {
            (Formula::True, true) | (Formula::False, false) => Formula::True,
            (Formula::True, false) | (Formula::False, true) => Formula::False,
            (Formula::Atom(a), true) => Formula::Atom(a.clone()),
            (Formula::Atom(a), false) => {
                Formula::Or(a.negation().into_iter().map(Formula::Atom).collect())
            }
            (Formula::And(fs), true) | (Formula::Or(fs), false) => Formula::And(
                fs.iter()
                    .map(|f| f.nnf_signed(positive))
                    .collect::<Result<_, _>>()?,
            ),
            (Formula::Or(fs), true) | (Formula::And(fs), false) => Formula::Or(
                fs.iter()
                    .map(|f| f.nnf_signed(positive))
                    .collect::<Result<_, _>>()?,
            ),
            (Formula::Not(f), _) => f.nnf_signed(!positive)?,
            (Formula::Exists(..), _) => return Err(FormulaError::QuantifierFound),
        })
    }

    /// Renders in the input grammar. Bound coordinates beyond `names` get
    /// generated names.
    pub fn display_with(&self, names: &[String]) -> String {
        let mut names = names.to_vec();
        let mut out = String::new();
        self.write(&mut names, &mut out);
        out
    }

    fn write(&self, names: &mut Vec<String>, out: &mut String) {
        match self {
            Formula::True => out.push_str("true"),
            Formula::False => out.push_str("false"),
            Formula::Atom(a) => out.push_str(&a.display_with(names)),
            Formula::And(fs) | Formula::Or(fs) => {
                let (sep, empty) = if matches!(self, Formula::And(_)) {
                    (" & ", "true")
                } else {
                    (" | ", "false")
                };
                if fs.is_empty() {
                    out.push_str(empty);
                }
                for (i, f) in fs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(sep);
                    }
                    f.write_operand(names, out);
                }
            }
            Formula::Not(f) => {
                out.push('!');
                f.write_operand(names, out);
            }
            Formula::Exists(v, f) => {
                let saved = names.clone();
                let name = fresh_name(names, *v);
                if names.len() <= *v {
                    names.resize_with(*v + 1, String::new);
                }
                names[*v] = name.clone();
                out.push_str("EX ");
                out.push_str(&name);
                out.push_str(". ");
                f.write(names, out);
                *names = saved;
            }
        }
    }

    fn write_operand(&self, names: &mut Vec<String>, out: &mut String) {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::Not(_) => {
                self.write(names, out)
            }
            _ => {
                out.push('(');
                self.write(names, out);
                out.push(')');
            }
        }
    }
}

fn fresh_name(names: &[String], var: usize) -> String {
    let mut candidate = format!("_b{var}");
    while names.contains(&candidate) {
        candidate.push('\'');
    }
    candidate
}

impl From<Atom> for Formula {
    fn from(a: Atom) -> Formula {
        Formula::Atom(a)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.max_var().map_or(0, |m| m + 1);
        f.write_str(&self.display_with(&crate::arith::default_names(n)))
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, LinTerm};

    fn x() -> LinTerm {
        LinTerm::var(1, 0)
    }

    #[test]
    fn lt_atoms_keep_orientation() {
        let a = Atom::lt(-&x().scale(&int(2)));
        assert_eq!(a.term(), &-&x());
        let e = Atom::eq(-&x().scale(&int(2)));
        assert_eq!(e.term(), &x());
    }

    #[test]
    fn ground_atoms_collapse() {
        assert_eq!(Atom::lt(LinTerm::constant(1, int(-7))).ground_value(), Some(true));
        assert_eq!(Atom::eq(LinTerm::constant(1, int(-7))).ground_value(), Some(false));
        assert_eq!(
            Atom::eq(LinTerm::constant(1, int(-7))),
            Atom::eq(LinTerm::constant(1, int(3)))
        );
    }

    #[test]
    fn nnf_examples() {
        let lt = Formula::atom(x(), Rel::Lt);
        let got = Formula::not(lt).nnf().unwrap();
        assert_eq!(
            got,
            Formula::Or(vec![Formula::atom(-x(), Rel::Lt), Formula::atom(x(), Rel::Eq)])
        );

        let eq = Formula::atom(x(), Rel::Eq);
        let got = Formula::not(eq).nnf().unwrap();
        assert_eq!(
            got,
            Formula::Or(vec![Formula::atom(x(), Rel::Lt), Formula::atom(-x(), Rel::Lt)])
        );

        let a = Formula::atom(x(), Rel::Lt);
        let b = Formula::atom(&x() - &LinTerm::constant(1, int(1)), Rel::Eq);
        let got = Formula::not(Formula::And(vec![a.clone(), b.clone()])).nnf().unwrap();
        let want = Formula::Or(vec![
            Formula::not(a).nnf().unwrap(),
            Formula::not(b).nnf().unwrap(),
        ]);
        assert_eq!(got, want);
    }

    #[test]
    fn nnf_rejects_quantifiers() {
        let f = Formula::exists(1, Formula::True);
        assert_eq!(f.nnf(), Err(FormulaError::QuantifierFound));
    }

    #[test]
    fn atom_printing() {
        let names = vec!["x".to_string()];
        assert_eq!(Atom::lt(&x() - &LinTerm::constant(1, int(1))).display_with(&names), "x < 1");
        assert_eq!(Atom::lt(-x()).display_with(&names), "0 < x");
        assert_eq!(Atom::eq(LinTerm::zero(1)).display_with(&names), "0 = 0");
    }
}
