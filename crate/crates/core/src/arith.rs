//! Exact rationals and sparse affine functionals.
//!
//! A [`LinTerm`] is `c_0 + c_1 x_1 + ... + c_n x_n` over a fixed ambient
//! dimension. Only nonzero coefficients are stored, keyed by the 0-based
//! coordinate index.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision fraction, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cannot normalize a functional with no variable part")]
    ZeroFunctional,
}

/// Shorthand for `n/d`. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p` or `p/q` with `q > 0`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    if den.starts_with(['-', '+']) {
        return None;
    }
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// Renders `p` for integers and `p/q` otherwise.
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Renders as `p/q` unconditionally (integers get `/1`).
pub fn fmt_rational_pq(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn lcm_of_denominators<'a>(values: impl Iterator<Item = &'a Rational>) -> BigInt {
    values.fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

fn gcd_of_numerators<'a>(values: impl Iterator<Item = &'a Rational>) -> BigInt {
    values.fold(BigInt::zero(), |acc, q| acc.gcd(q.numer()))
}

/// Affine functional over `dim` coordinates.
///
/// Equality, ordering and hashing look only at the coefficients and the
/// constant; the recorded dimension is bookkeeping.
#[derive(Clone, Debug)]
pub struct LinTerm {
    dim: usize,
    coeffs: BTreeMap<usize, Rational>,
    constant: Rational,
}

impl PartialEq for LinTerm {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.constant == other.constant
    }
}

impl Eq for LinTerm {}

impl Hash for LinTerm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
        self.constant.hash(state);
    }
}

impl PartialOrd for LinTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LinTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .iter()
            .cmp(other.coeffs.iter())
            .then_with(|| self.constant.cmp(&other.constant))
    }
}

impl LinTerm {
    pub fn zero(dim: usize) -> Self {
        LinTerm {
            dim,
            coeffs: BTreeMap::new(),
            constant: Rational::zero(),
        }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        LinTerm {
            dim,
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    /// The coordinate functional `x_var`.
    pub fn var(dim: usize, var: usize) -> Self {
        assert!(var < dim, "variable x{var} outside dimension {dim}");
        let mut coeffs = BTreeMap::new();
        coeffs.insert(var, Rational::one());
        LinTerm {
            dim,
            coeffs,
            constant: Rational::zero(),
        }
    }

    pub fn from_parts(
        dim: usize,
        coeffs: impl IntoIterator<Item = (usize, Rational)>,
        constant: Rational,
    ) -> Self {
        let mut t = LinTerm::constant(dim, constant);
        for (i, c) in coeffs {
            assert!(i < dim, "variable x{i} outside dimension {dim}");
            t.add_coeff(i, c);
        }
        t
    }

    fn add_coeff(&mut self, var: usize, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(var).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&var);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, var: usize) -> Rational {
        self.coeffs.get(&var).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coeffs.iter().map(|(i, c)| (*i, c))
    }

    pub fn constant_term(&self) -> &Rational {
        &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }

    pub fn mentions(&self, var: usize) -> bool {
        self.coeffs.contains_key(&var)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    /// Same functional with the constant dropped.
    pub fn linear_part(&self) -> LinTerm {
        LinTerm {
            dim: self.dim,
            coeffs: self.coeffs.clone(),
            constant: Rational::zero(),
        }
    }

    /// Re-declares the ambient dimension. Panics if a stored coordinate would
    /// fall outside it.
    pub fn with_dim(mut self, dim: usize) -> Self {
        if let Some(m) = self.max_var() {
            assert!(m < dim, "x{m} does not fit in dimension {dim}");
        }
        self.dim = dim;
        self
    }

    /// Renames coordinates through `map` into a space of dimension `dim`.
    pub fn remap(&self, dim: usize, map: impl Fn(usize) -> usize) -> Self {
        let mut t = LinTerm::constant(dim, self.constant.clone());
        for (i, c) in &self.coeffs {
            let j = map(*i);
            assert!(j < dim, "x{j} does not fit in dimension {dim}");
            t.add_coeff(j, c.clone());
        }
        t
    }

    /// Exact value at `point`, whose length must equal the ambient dimension.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational, ArithError> {
        if point.len() != self.dim {
            return Err(ArithError::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        Ok(self.eval_prefix(point))
    }

    /// Value at a point that covers every mentioned coordinate; extra
    /// trailing coordinates are ignored.
    pub fn eval_prefix(&self, point: &[Rational]) -> Rational {
        let mut acc = self.constant.clone();
        for (i, c) in &self.coeffs {
            acc += c * &point[*i];
        }
        acc
    }

    pub fn scale(&self, k: &Rational) -> LinTerm {
        if k.is_zero() {
            return LinTerm::zero(self.dim);
        }
        LinTerm {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|(i, c)| (*i, c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    /// Replaces `x_var` by `expr`.
    pub fn substitute(&self, var: usize, expr: &LinTerm) -> LinTerm {
        let Some(c) = self.coeffs.get(&var) else {
            return self.clone();
        };
        let mut rest = self.clone();
        rest.coeffs.remove(&var);
        rest.dim = rest.dim.max(expr.dim);
        &rest + &expr.scale(c)
    }

    /// Replaces `x_var` by a constant.
    pub fn substitute_value(&self, var: usize, value: &Rational) -> LinTerm {
        self.substitute(var, &LinTerm::constant(self.dim, value.clone()))
    }

    /// For `self = 0`, returns the expression `e` with `x_var = e`, or `None`
    /// when `x_var` does not occur.
    pub fn solve_for(&self, var: usize) -> Option<LinTerm> {
        let c = self.coeffs.get(&var)?;
        let mut rest = self.clone();
        rest.coeffs.remove(&var);
        Some(rest.scale(&(-c.recip())))
    }

    /// Scales by a positive factor so all coefficients, constant included,
    /// are coprime integers.
    pub fn positive_normalize(&self) -> LinTerm {
        if self.is_zero() {
            return self.clone();
        }
        let values = || self.coeffs.values().chain(std::iter::once(&self.constant));
        let lcm = lcm_of_denominators(values());
        let scaled = self.scale(&Rational::from_integer(lcm));
        let g = gcd_of_numerators(scaled.coeffs.values().chain(std::iter::once(&scaled.constant)));
        scaled.scale(&Rational::new(BigInt::one(), g))
    }

    /// Canonical scalar multiple: coprime integer coefficients and a positive
    /// coefficient on the lowest-index variable. The flag reports whether the
    /// sign was flipped.
    pub fn normalize(&self) -> Result<(LinTerm, bool), ArithError> {
        let Some((_, lead)) = self.coeffs.iter().next() else {
            return Err(ArithError::ZeroFunctional);
        };
        let flipped = lead.is_negative();
        let t = self.positive_normalize();
        Ok(if flipped { (-&t, true) } else { (t, false) })
    }
}

impl Add for &LinTerm {
    type Output = LinTerm;

    fn add(self, rhs: &LinTerm) -> LinTerm {
        let mut out = self.clone();
        out.dim = self.dim.max(rhs.dim);
        for (i, c) in &rhs.coeffs {
            out.add_coeff(*i, c.clone());
        }
        out.constant += &rhs.constant;
        out
    }
}

impl Sub for &LinTerm {
    type Output = LinTerm;

    fn sub(self, rhs: &LinTerm) -> LinTerm {
        self + &(-rhs)
    }
}

impl Neg for &LinTerm {
    type Output = LinTerm;

    fn neg(self) -> LinTerm {
        LinTerm {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|(i, c)| (*i, -c)).collect(),
            constant: -&self.constant,
        }
    }
}

impl Add for LinTerm {
    type Output = LinTerm;
    fn add(self, rhs: LinTerm) -> LinTerm {
        &self + &rhs
    }
}

impl Sub for LinTerm {
    type Output = LinTerm;
    fn sub(self, rhs: LinTerm) -> LinTerm {
        &self - &rhs
    }
}

impl Neg for LinTerm {
    type Output = LinTerm;
    fn neg(self) -> LinTerm {
        -&self
    }
}

impl Mul<&Rational> for &LinTerm {
    type Output = LinTerm;
    fn mul(self, k: &Rational) -> LinTerm {
        self.scale(k)
    }
}

/// Default coordinate names `x0, x1, ...`.
pub fn default_names(dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("x{i}")).collect()
}

fn name_of(names: &[String], i: usize) -> String {
    names.get(i).cloned().unwrap_or_else(|| format!("x{i}"))
}

fn push_monomial(out: &mut String, c: &Rational, name: &str) {
    if c.is_one() {
        out.push_str(name);
    } else {
        out.push_str(&fmt_rational(c));
        out.push('*');
        out.push_str(name);
    }
}

/// Sum of nonnegative monomials, e.g. `2*x + y + 1/2`; empty renders `0`.
pub(crate) fn fmt_positive_side(parts: &[(Option<usize>, Rational)], names: &[String]) -> String {
    let mut out = String::new();
    for (var, c) in parts {
        if !out.is_empty() {
            out.push_str(" + ");
        }
        match var {
            Some(i) => push_monomial(&mut out, c, &name_of(names, *i)),
            None => out.push_str(&fmt_rational(c)),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl LinTerm {
    /// Renders in the formula term syntax with the given coordinate names.
    pub fn display_with(&self, names: &[String]) -> String {
        let mut out = String::new();
        let mut first = true;
        let terms = self
            .coeffs
            .iter()
            .map(|(i, c)| (Some(*i), c.clone()))
            .chain((!self.constant.is_zero()).then(|| (None, self.constant.clone())));
        for (var, c) in terms {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            first = false;
            match var {
                Some(i) => push_monomial(&mut out, &abs, &name_of(names, i)),
                None => out.push_str(&fmt_rational(&abs)),
            }
        }
        if first {
            out.push('0');
        }
        out
    }

    /// Splits into positive parts on each side of `lhs REL rhs`, so that
    /// `self = lhs - rhs`.
    pub(crate) fn split_sides(&self) -> (Vec<(Option<usize>, Rational)>, Vec<(Option<usize>, Rational)>) {
        let mut lhs = Vec::new();
        let mut rhs = Vec::new();
        for (i, c) in &self.coeffs {
            if c.is_positive() {
                lhs.push((Some(*i), c.clone()));
            } else {
                rhs.push((Some(*i), -c));
            }
        }
        if self.constant.is_positive() {
            lhs.push((None, self.constant.clone()));
        } else if self.constant.is_negative() {
            rhs.push((None, -&self.constant));
        }
        (lhs, rhs)
    }
}

impl fmt::Display for LinTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&default_names(self.dim)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(i: usize, dim: usize) -> LinTerm {
        LinTerm::var(dim, i)
    }

    #[test]
    fn eval_examples() {
        let t = &x(0, 1) - &LinTerm::constant(1, rat(1, 2));
        assert_eq!(t.eval(&[rat(1, 2)]).unwrap(), int(0));

        let t = LinTerm::from_parts(2, [(0, int(2)), (1, int(3))], int(1));
        assert_eq!(t.eval(&[int(1), int(1)]).unwrap(), int(6));

        let z = LinTerm::zero(3);
        assert_eq!(z.eval(&[int(5), rat(-7, 3), int(2)]).unwrap(), int(0));
    }

    #[test]
    fn eval_rejects_wrong_length() {
        let t = x(0, 2);
        assert_eq!(
            t.eval(&[int(1)]),
            Err(ArithError::DimensionMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn normalize_examples() {
        let t = LinTerm::from_parts(1, [(0, int(-2))], int(4));
        let (n, flipped) = t.normalize().unwrap();
        assert_eq!(n, LinTerm::from_parts(1, [(0, int(1))], int(-2)));
        assert!(flipped);

        let (n, flipped) = x(0, 1).normalize().unwrap();
        assert_eq!(n, x(0, 1));
        assert!(!flipped);

        // 2/3 x2 - 2 with x2 the second coordinate
        let t = LinTerm::from_parts(2, [(1, rat(2, 3))], int(-2));
        let (n, flipped) = t.normalize().unwrap();
        assert_eq!(n, LinTerm::from_parts(2, [(1, int(1))], int(-3)));
        assert!(!flipped);
    }

    #[test]
    fn normalize_rejects_constants() {
        assert_eq!(LinTerm::constant(2, int(3)).normalize(), Err(ArithError::ZeroFunctional));
        assert_eq!(LinTerm::zero(2).normalize(), Err(ArithError::ZeroFunctional));
    }

    #[test]
    fn no_zero_coefficients_stored() {
        let t = &x(0, 2) - &x(0, 2);
        assert!(t.is_zero());
        assert_eq!(t.coeffs().count(), 0);
    }

    #[test]
    fn solve_and_substitute() {
        // 2x + 3y - 1 = 0  =>  y = (1 - 2x)/3
        let t = LinTerm::from_parts(2, [(0, int(2)), (1, int(3))], int(-1));
        let e = t.solve_for(1).unwrap();
        assert_eq!(e, LinTerm::from_parts(2, [(0, rat(-2, 3))], rat(1, 3)));
        assert!(t.substitute(1, &e).is_zero());
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/6"), Some(rat(1, 2)));
        assert_eq!(parse_rational("-4"), Some(int(-4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1/-2"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(fmt_rational(&rat(-6, 4)), "-3/2");
        assert_eq!(fmt_rational_pq(&int(2)), "2/1");
    }

    #[test]
    fn display_terms() {
        let names = vec!["x".to_string(), "y".to_string()];
        let t = LinTerm::from_parts(2, [(0, int(1)), (1, rat(-1, 2))], rat(3, 2));
        assert_eq!(t.display_with(&names), "x - 1/2*y + 3/2");
        let t = LinTerm::from_parts(2, [(0, int(-1))], int(1));
        assert_eq!(t.display_with(&names), "-x + 1");
    }

    fn small_rat() -> impl Strategy<Value = Rational> {
        (-20i64..=20, 1i64..=6).prop_map(|(n, d)| rat(n, d))
    }

    fn term3() -> impl Strategy<Value = LinTerm> {
        (proptest::collection::vec(small_rat(), 3), small_rat())
            .prop_map(|(cs, c0)| LinTerm::from_parts(3, cs.into_iter().enumerate(), c0))
    }

    proptest! {
        #[test]
        fn normalize_idempotent_and_scale_invariant(t in term3(), k in small_rat()) {
            prop_assume!(!t.is_constant() && !k.is_zero());
            let (n, _) = t.normalize().unwrap();
            let (nn, flipped) = n.normalize().unwrap();
            prop_assert_eq!(&nn, &n);
            prop_assert!(!flipped);
            let (ns, _) = t.scale(&k).normalize().unwrap();
            prop_assert_eq!(ns, n);
        }

        #[test]
        fn eval_is_additive(s in term3(), t in term3(), p in proptest::collection::vec(small_rat(), 3)) {
            let lhs = (&s + &t).eval(&p).unwrap();
            prop_assert_eq!(lhs, s.eval(&p).unwrap() + t.eval(&p).unwrap());
        }
    }
}
