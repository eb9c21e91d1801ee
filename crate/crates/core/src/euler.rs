//! Euler characteristics and classes in `Z[T]/(T^2 + T)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::Zero;
use thiserror::Error;

use crate::arith::{fmt_rational, int, LinTerm, Rational};
use crate::cell::{decompose, CellKind, Decomposition};
use crate::formula::{DefSet, Formula, Rel};
use crate::qe::{qe_with, QeConfig, QeError};

/// `m + n*T` with `T^2 = -T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GClass {
    pub m: i64,
    pub n: i64,
}

impl GClass {
    pub const ZERO: GClass = GClass { m: 0, n: 0 };
    pub const ONE: GClass = GClass { m: 1, n: 0 };
    /// Class of the open half-line.
    pub const T: GClass = GClass { m: 0, n: 1 };

    pub fn new(m: i64, n: i64) -> GClass {
        GClass { m, n }
    }

    /// Recovers the class from its two Euler characteristics.
    pub fn from_chis(chi_g: i64, chi_b: i64) -> GClass {
        GClass::new(chi_b, chi_b - chi_g)
    }

    pub fn psi_g(self) -> i64 {
        self.m - self.n
    }

    pub fn psi_b(self) -> i64 {
        self.m
    }
}

impl Add for GClass {
    type Output = GClass;
    fn add(self, o: GClass) -> GClass {
        GClass::new(self.m + o.m, self.n + o.n)
    }
}

impl Sub for GClass {
    type Output = GClass;
    fn sub(self, o: GClass) -> GClass {
        self + (-o)
    }
}

impl Neg for GClass {
    type Output = GClass;
    fn neg(self) -> GClass {
        GClass::new(-self.m, -self.n)
    }
}

impl Mul for GClass {
    type Output = GClass;
    fn mul(self, o: GClass) -> GClass {
        GClass::new(self.m * o.m, self.m * o.n + o.m * self.n - self.n * o.n)
    }
}

impl std::iter::Sum for GClass {
    fn sum<I: Iterator<Item = GClass>>(iter: I) -> GClass {
        iter.fold(GClass::ZERO, Add::add)
    }
}

impl fmt::Display for GClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let GClass { m, n } = *self;
        if n == 0 {
            return write!(f, "{m}");
        }
        match n {
            1 => f.write_str("T")?,
            -1 => f.write_str("-T")?,
            _ => write!(f, "{n}*T")?,
        }
        match m.signum() {
            1 => write!(f, " + {m}"),
            -1 => write!(f, " - {}", -m),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed class `{0}`")]
pub struct ClassParseError(pub String);

impl FromStr for GClass {
    type Err = ClassParseError;

    fn from_str(s: &str) -> Result<GClass, ClassParseError> {
        let err = || ClassParseError(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err());
        }
        // split before every sign that is not leading
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, ch) in compact.char_indices() {
            if i > 0 && (ch == '+' || ch == '-') {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        let mut out = GClass::ZERO;
        for term in terms {
            let (neg, body) = match term.as_bytes().first() {
                Some(b'+') => (false, &term[1..]),
                Some(b'-') => (true, &term[1..]),
                _ => (false, term),
            };
            let sign = if neg { -1 } else { 1 };
            if let Some(coef) = body.strip_suffix('T') {
                let k = match coef {
                    "" => 1,
                    c => c.strip_suffix('*').ok_or_else(err)?.parse::<i64>().map_err(|_| err())?,
                };
                out.n += sign * k;
            } else {
                out.m += sign * body.parse::<i64>().map_err(|_| err())?;
            }
        }
        Ok(out)
    }
}

pub fn chi_g(s: &DefSet) -> i64 {
    decompose(s).chi_g()
}

pub fn chi_b(s: &DefSet) -> i64 {
    decompose(s).chi_b()
}

pub fn g_class(s: &DefSet) -> GClass {
    class_of(&decompose(s))
}

pub fn class_of(d: &Decomposition) -> GClass {
    GClass::from_chis(d.chi_g(), d.chi_b())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Holds,
    Fails,
    /// The elimination budget ran out before a decision.
    Unverified,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Holds => "holds",
            CheckStatus::Fails => "fails",
            CheckStatus::Unverified => "unverified",
        })
    }
}

#[derive(Debug, Clone)]
pub struct BdSample {
    pub t: Rational,
    pub chi_g: i64,
}

#[derive(Debug, Clone)]
pub struct BdReport {
    pub mu: Rational,
    pub chi_b: i64,
    pub total: CheckStatus,
    pub single_valued: CheckStatus,
    pub nonnegative: CheckStatus,
    pub bounded_fibres: CheckStatus,
    pub samples: Vec<BdSample>,
}

impl BdReport {
    pub fn preconditions(&self) -> [(&'static str, CheckStatus); 4] {
        [
            ("total", self.total),
            ("single-valued", self.single_valued),
            ("nonnegative", self.nonnegative),
            ("bounded fibres", self.bounded_fibres),
        ]
    }

    /// Every sampled `t` gives `chi_g(X_d(t)) = chi_b(X)`.
    pub fn stabilizes(&self) -> bool {
        self.samples.iter().all(|s| s.chi_g == self.chi_b)
    }

    /// Preconditions hold (or could not be decided) and the identity holds.
    pub fn passed(&self) -> bool {
        self.preconditions().iter().all(|(_, c)| *c != CheckStatus::Fails) && self.stabilizes()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, status) in self.preconditions() {
            out.push_str(&format!("{name}: {status}\n"));
        }
        out.push_str(&format!("mu = {}\nchi_b(X) = {}\n", fmt_rational(&self.mu), self.chi_b));
        for s in &self.samples {
            let mark = if s.chi_g == self.chi_b { "ok" } else { "MISMATCH" };
            out.push_str(&format!("t = {}: chi_g(X_d(t)) = {} {mark}\n", fmt_rational(&s.t), s.chi_g));
        }
        out
    }
}

fn status(b: bool) -> CheckStatus {
    if b {
        CheckStatus::Holds
    } else {
        CheckStatus::Fails
    }
}

fn remap_set(s: &DefSet, dim: usize, map: impl Fn(usize) -> usize + Copy) -> Formula {
    Formula::Or(
        s.disjuncts()
            .iter()
            .map(|c| Formula::And(c.atoms().iter().map(|a| Formula::Atom(a.remap(dim, map))).collect()))
            .collect(),
    )
}

/// `d^{-1}(t)` is bounded for every `t >= 0`, decided as the negation of
/// `EX t. t >= 0 & ALL B. EX x. graph(t, x) & |x_i| >= B for some i`.
/// The graph is never complemented, only the two-variable set in `(t, B)`.
fn fibres_bounded(graph: &DefSet, config: &QeConfig) -> Result<bool, QeError> {
    let n = graph.dim() - 1;
    // t -> 0, B -> 1, x_j -> j + 2
    let dim = n + 2;
    let shift = |i: usize| if i == 0 { 0 } else { i + 1 };
    let g = remap_set(graph, dim, shift);
    let t = LinTerm::var(dim, 0);
    let b = LinTerm::var(dim, 1);
    let mut escapes = Vec::new();
    for j in 0..n {
        let x = LinTerm::var(dim, j + 2);
        // B <= x and B <= -x
        for far in [&b - &x, &b + &x] {
            escapes.push(Formula::Or(vec![
                Formula::atom(far.clone(), Rel::Lt),
                Formula::atom(far, Rel::Eq),
            ]));
        }
    }
    let mut inner = Formula::And(vec![g, Formula::Or(escapes)]);
    for j in (0..n).rev() {
        inner = Formula::exists(j + 2, inner);
    }
    let nonneg = Formula::Or(vec![Formula::atom(-t.clone(), Rel::Lt), Formula::atom(t, Rel::Eq)]);
    let unbounded = Formula::exists(0, Formula::And(vec![nonneg, Formula::forall(1, inner)]));
    Ok(qe_with(&unbounded, 0, config)?.is_empty())
}

/// Checks that `chi_g({x in s : d(x) <= t}) = chi_b(s)` past a threshold.
///
/// `graph` lives in `Q^{1+n}` with the value `t = d(x)` as coordinate 0.
pub fn bd_check(s: &DefSet, graph: &DefSet, config: &QeConfig) -> BdReport {
    let n = s.dim();
    assert_eq!(graph.dim(), n + 1, "graph must have the value as an extra first coordinate");
    let over_s = graph.intersect(&s.embed(n + 1, 1));

    let total = status(s.entails(&over_s.project_out(&[0])).expect("same dimension"));
    let two = graph.remap(n + 2, |i| if i == 0 { 0 } else { i + 1 });
    let other = graph.remap(n + 2, |i| i + 1);
    let clash = two
        .intersect(&other)
        .intersect(&s.embed(n + 2, 2))
        .restrict(&LinTerm::var(n + 2, 0) - &LinTerm::var(n + 2, 1), Rel::Lt);
    let single_valued = status(clash.is_empty());
    let nonnegative = status(over_s.restrict(LinTerm::var(n + 1, 0), Rel::Lt).is_empty());
    let bounded_fibres = match fibres_bounded(&over_s, config) {
        Ok(b) => status(b),
        Err(_) => CheckStatus::Unverified,
    };

    let d = decompose(&over_s);
    let mu = d
        .cells()
        .iter()
        .filter(|c| c.kind() == CellKind::Good)
        .filter_map(|c| c.bounding_box())
        .map(|bx| bx[0].1.clone() + int(1))
        .max()
        .unwrap_or_else(Rational::zero);

    let chi_b = decompose(s).chi_b();
    let samples = [&mu + int(1), &mu * int(2) + int(2), &mu * int(10) + int(10)]
        .into_iter()
        .map(|t| {
            let lower = over_s.restrict(LinTerm::var(n + 1, 0) - LinTerm::constant(n + 1, t.clone()), Rel::Lt);
            let level = over_s.restrict(LinTerm::var(n + 1, 0) - LinTerm::constant(n + 1, t.clone()), Rel::Eq);
            let x_d = lower.union(&level).project_out(&[0]);
            BdSample {
                chi_g: decompose(&x_d).chi_g(),
                t,
            }
        })
        .collect();

    BdReport {
        mu,
        chi_b,
        total,
        single_valued,
        nonnegative,
        bounded_fibres,
        samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(text: &str, v: &[&str]) -> DefSet {
        DefSet::parse_vars(text, v).unwrap()
    }

    fn class(text: &str, v: &[&str]) -> GClass {
        g_class(&set(text, v))
    }

    #[test]
    fn characteristics_in_one_dimension() {
        let open = set("0 < x & x < 1", &["x"]);
        assert_eq!((chi_g(&open), chi_b(&open)), (-1, -1));
        let closed = set("0 <= x & x <= 1", &["x"]);
        assert_eq!((chi_g(&closed), chi_b(&closed)), (1, 1));
        let line = DefSet::universe(1);
        assert_eq!((chi_g(&line), chi_b(&line)), (-1, 1));
        assert_eq!(chi_b(&set("0 < x", &["x"])), 0);
    }

    #[test]
    fn classes() {
        assert_eq!(class("0 < x & x < 1", &["x"]), GClass::new(-1, 0));
        assert_eq!(class("x = x", &["x"]), GClass::new(1, 2));
        assert_eq!(class("0 < x", &["x"]), GClass::T);
        assert_eq!(class("x < 0 & 0 < x", &["x"]), GClass::ZERO);
        assert_eq!(class("0 < x & 0 < y", &["x", "y"]), -GClass::T);
    }

    #[test]
    fn ring_arithmetic() {
        assert_eq!(GClass::T * GClass::T, GClass::new(0, -1));
        assert_eq!(GClass::T * GClass::T + GClass::T, GClass::ZERO);
        let a = GClass::new(3, -7);
        assert_eq!(GClass::ONE * a, a);
        assert_eq!(GClass::new(1, 2) * GClass::new(1, 2), GClass::new(1, 0));
        assert_eq!(GClass::T.psi_g(), -1);
        assert_eq!(GClass::T.psi_b(), 0);
        assert_eq!(GClass::ONE.psi_g(), 1);
    }

    #[test]
    fn rendering() {
        let cases = [
            (GClass::new(-1, 0), "-1"),
            (GClass::new(1, 2), "2*T + 1"),
            (GClass::T, "T"),
            (GClass::ZERO, "0"),
            (GClass::new(1, 1), "T + 1"),
            (GClass::new(0, -1), "-T"),
            (GClass::new(-1, 2), "2*T - 1"),
            (GClass::new(5, -3), "-3*T + 5"),
        ];
        for (c, text) in cases {
            assert_eq!(c.to_string(), text);
            assert_eq!(text.parse::<GClass>().unwrap(), c);
        }
        assert_eq!("1 + 2*T".parse::<GClass>().unwrap(), GClass::new(1, 2));
        assert!("2*X".parse::<GClass>().is_err());
        assert!("".parse::<GClass>().is_err());
    }

    fn bd(s: &str, graph: &str, vars: &[&str]) -> BdReport {
        let s = set(s, &vars[1..]);
        let g = set(graph, vars);
        bd_check(&s, &g, &QeConfig::unbounded())
    }

    #[test]
    fn bd_absolute_value() {
        let r = bd("x = x", "t = x & 0 <= x | t = -x & x < 0", &["t", "x"]);
        assert_eq!(r.preconditions().map(|p| p.1), [CheckStatus::Holds; 4]);
        assert_eq!(r.chi_b, 1);
        assert!(r.stabilizes(), "{}", r.render());
    }

    #[test]
    fn bd_identity_on_half_line() {
        let r = bd("0 < x", "t = x & 0 < x", &["t", "x"]);
        assert!(r.passed(), "{}", r.render());
        assert_eq!(r.chi_b, 0);
        assert!(r.samples.iter().all(|s| s.chi_g == 0));
    }

    #[test]
    fn bd_constant_on_interval() {
        let r = bd("0 < x & x < 1", "t = 0 & 0 < x & x < 1", &["t", "x"]);
        assert!(r.passed(), "{}", r.render());
        assert_eq!(r.chi_b, -1);
        assert_eq!(r.mu, int(1));
    }

    #[test]
    fn bd_reports_failures() {
        // negative values
        let r = bd("x = x", "t = x", &["t", "x"]);
        assert_eq!(r.nonnegative, CheckStatus::Fails);
        // two values at each point
        let r = bd("0 < x", "t = x & 0 < x | t = 2*x & 0 < x", &["t", "x"]);
        assert_eq!(r.single_valued, CheckStatus::Fails);
        // undefined on part of the set
        let r = bd("x = x", "t = x & 0 < x", &["t", "x"]);
        assert_eq!(r.total, CheckStatus::Fails);
        // unbounded fibre over t = 0
        let r = bd("x = x", "t = 0", &["t", "x"]);
        assert_eq!(r.bounded_fibres, CheckStatus::Fails);
    }

    #[test]
    fn bd_budget_gives_unverified() {
        let s = set("x = x", &["x"]);
        let g = set("t = x & 0 <= x | t = -x & x < 0", &["t", "x"]);
        let r = bd_check(&s, &g, &QeConfig::with_cap(1));
        assert_eq!(r.bounded_fibres, CheckStatus::Unverified);
    }
}
