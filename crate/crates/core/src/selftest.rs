//! Invariant suites over the corpus and the named fixtures.

use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use num::Signed;
use rand::{Rng, SeedableRng};

use crate::arith::{int, LinTerm, Rational};
use crate::cell::{decompose, decompose_with, refine, Cell, CellKind, DecomposeOptions, Stage};
use crate::corpus::CorpusEntry;
use crate::euler::{bd_check, chi_b, chi_g, class_of, g_class, GClass};
use crate::fixtures;
use crate::formula::DefSet;
use crate::oracle::{oracle_chi, OracleCaps, OracleError};
use crate::plmap::PLMap;
use crate::qe::QeConfig;

pub const SUITES: &[&str] = &[
    "corpus",
    "claim1",
    "claim2",
    "claim3",
    "ring",
    "partition",
    "goodbounded",
    "oracle",
    "bijection",
    "boundedcond",
    "unionproduct",
    "fiber",
    "bd",
];

const SEED: u64 = 0x5eed;

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Tally {
    checks: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Tally {
        Tally {
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

pub struct Options {
    pub verify: bool,
}

/// Runs every suite whose name contains `filter`.
pub fn run(filter: Option<&str>, corpus: &[CorpusEntry], opts: &Options) -> Vec<SuiteOutcome> {
    SUITES
        .iter()
        .filter(|s| filter.is_none_or(|f| s.contains(f)))
        .map(|s| run_suite(s, corpus, opts).expect("known suite"))
        .collect()
}

pub fn run_suite(name: &str, corpus: &[CorpusEntry], opts: &Options) -> Option<SuiteOutcome> {
    let start = Instant::now();
    let mut t = Tally::new();
    let name = *SUITES.iter().find(|s| **s == name)?;
    match name {
        "corpus" => suite_corpus(&mut t, corpus, opts),
        "claim1" => suite_claim1(&mut t),
        "claim2" => suite_claim2(&mut t),
        "claim3" => suite_claim3(&mut t),
        "ring" => suite_ring(&mut t, corpus),
        "partition" => suite_partition(&mut t, corpus),
        "goodbounded" => suite_good_bounded(&mut t, corpus),
        "oracle" => suite_oracle(&mut t, corpus),
        "bijection" => suite_bijection(&mut t, corpus),
        "boundedcond" => suite_bounded_condition(&mut t),
        "unionproduct" => suite_union_product(&mut t, corpus),
        "fiber" => suite_fiber(&mut t),
        "bd" => suite_bd(&mut t),
        _ => unreachable!(),
    }
    Some(SuiteOutcome {
        name,
        checks: t.checks,
        failures: t.failures,
        elapsed: start.elapsed(),
    })
}

fn suite_corpus(t: &mut Tally, corpus: &[CorpusEntry], opts: &Options) {
    for e in corpus {
        let d = match decompose_with(&e.set, DecomposeOptions { verify: opts.verify }) {
            Ok(d) => d,
            Err(err) => {
                t.check(false, || format!("{}: {err}", e.name));
                continue;
            }
        };
        if opts.verify {
            let cert = d.certify();
            t.check(cert.is_ok(), || format!("{}: {}", e.name, cert.unwrap_err()));
        }
        let got = (d.chi_g(), d.chi_b(), class_of(&d));
        let want = (e.expect.chi_g, e.expect.chi_b, e.expect.class);
        t.check(got == want, || format!("{}: got {got:?}, expected {want:?}", e.name));
        t.check(got.2.psi_g() == got.0 && got.2.psi_b() == got.1, || {
            format!("{}: class does not evaluate back to its characteristics", e.name)
        });
        t.check(d.count(CellKind::Exceptional) == 0, || format!("{}: exceptional cell", e.name));
    }
}

/// Random rational in `[-bound, bound]` with denominator up to 6.
pub fn random_rational(rng: &mut StdRng, bound: i64) -> Rational {
    let den = rng.gen_range(1..=6);
    Rational::new(rng.gen_range(-bound * den..=bound * den).into(), den.into())
}

fn interval(a: &Rational, b: &Rational) -> DefSet {
    let x = LinTerm::var(1, 0);
    let lo = &LinTerm::constant(1, a.clone()) - &x;
    let hi = &x - &LinTerm::constant(1, b.clone());
    DefSet::from_atoms(1, [crate::Atom::lt(lo), crate::Atom::lt(hi)])
}

fn suite_claim1(t: &mut Tally) {
    let mut rng = StdRng::seed_from_u64(SEED);
    for _ in 0..10 {
        let a = random_rational(&mut rng, 50);
        let b = &a + random_rational(&mut rng, 50).abs() + Rational::new(1.into(), 7.into());
        let c = g_class(&interval(&a, &b));
        t.check(c.to_string() == "-1", || format!("({a}, {b}) has class {c}"));
    }
}

fn suite_claim2(t: &mut Tally) {
    let c = g_class(&DefSet::universe(1));
    t.check(c.to_string() == "2*T + 1", || format!("the line has class {c}"));
    let halves = g_class(&DefSet::parse_vars("x < 0", &["x"]).unwrap())
        + g_class(&DefSet::parse_vars("x = 0", &["x"]).unwrap())
        + g_class(&DefSet::parse_vars("0 < x", &["x"]).unwrap());
    t.check(halves == c, || format!("pieces of the line sum to {halves}"));
}

fn suite_claim3(t: &mut Tally) {
    t.check(GClass::T * GClass::T == -GClass::T, || "T*T != -T".into());
    t.check(GClass::T * GClass::T + GClass::T == GClass::ZERO, || "T^2 + T != 0".into());
    let ray = g_class(&DefSet::parse_vars("0 < x", &["x"]).unwrap());
    let quadrant = g_class(&DefSet::parse_vars("0 < x & 0 < y", &["x", "y"]).unwrap());
    t.check(quadrant == -GClass::T, || format!("open quadrant has class {quadrant}"));
    t.check(quadrant == ray * ray, || format!("{quadrant} != {ray} * {ray}"));
}

fn suite_ring(t: &mut Tally, corpus: &[CorpusEntry]) {
    let classes: Vec<GClass> = corpus.iter().map(|e| g_class(&e.set)).collect();
    if classes.is_empty() {
        return;
    }
    let mut rng = StdRng::seed_from_u64(SEED);
    for _ in 0..100 {
        let pick = |rng: &mut StdRng| classes[rng.gen_range(0..classes.len())];
        let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        t.check((a + b) + c == a + (b + c), || format!("+ not associative on {a}, {b}, {c}"));
        t.check((a * b) * c == a * (b * c), || format!("* not associative on {a}, {b}, {c}"));
        t.check(a * (b + c) == a * b + a * c, || format!("not distributive on {a}, {b}, {c}"));
        t.check(a * b == b * a && a + b == b + a, || format!("not commutative on {a}, {b}"));
        t.check(
            (a * b).psi_g() == a.psi_g() * b.psi_g() && (a + b).psi_g() == a.psi_g() + b.psi_g(),
            || format!("psi_g not a homomorphism on {a}, {b}"),
        );
        t.check(
            (a * b).psi_b() == a.psi_b() * b.psi_b() && (a + b).psi_b() == a.psi_b() + b.psi_b(),
            || format!("psi_b not a homomorphism on {a}, {b}"),
        );
    }
}

/// Random nonconstant functionals with small coefficients.
pub fn random_functionals(rng: &mut StdRng, dim: usize, count: usize) -> Vec<LinTerm> {
    let mut out = Vec::new();
    while out.len() < count {
        let coeffs: Vec<(usize, Rational)> = (0..dim).map(|i| (i, int(rng.gen_range(-2..=2)))).collect();
        let t = LinTerm::from_parts(dim, coeffs, random_rational(rng, 2));
        if !t.is_constant() {
            out.push(t);
        }
    }
    out
}

fn suite_partition(t: &mut Tally, corpus: &[CorpusEntry]) {
    let mut rng = StdRng::seed_from_u64(SEED);
    for e in corpus {
        let d = decompose(&e.set);
        for _ in 0..5 {
            let k = rng.gen_range(1..=2);
            let extra = random_functionals(&mut rng, e.set.dim(), k);
            let r = refine(&d, &extra);
            t.check(r.chi_b() == d.chi_b() && r.chi_g() == d.chi_g(), || {
                format!("{}: refinement changes ({}, {}) to ({}, {})", e.name, d.chi_g(), d.chi_b(), r.chi_g(), r.chi_b())
            });
        }
    }
}

fn suite_good_bounded(t: &mut Tally, corpus: &[CorpusEntry]) {
    let mut rng = StdRng::seed_from_u64(SEED);
    for e in corpus {
        let d = decompose(&e.set);
        let r = refine(&d, &random_functionals(&mut rng, e.set.dim(), 1));
        for c in d.cells().iter().chain(r.cells()) {
            t.check((c.kind() == CellKind::Good) == c.is_bounded(), || {
                format!("{}: cell {c} is {} but bounded = {}", e.name, c.kind(), c.is_bounded())
            });
        }
    }
}

fn suite_oracle(t: &mut Tally, corpus: &[CorpusEntry]) {
    for e in corpus {
        match oracle_chi(&e.set, OracleCaps::default()) {
            Ok(o) => {
                let d = decompose(&e.set);
                let got = (d.chi_g(), d.chi_b());
                t.check(o == got, || format!("{}: oracle {o:?}, decomposition {got:?}", e.name));
            }
            Err(OracleError::DimensionCap { .. } | OracleError::FunctionalCap { .. }) => {}
        }
    }
}

fn suite_bijection(t: &mut Tally, corpus: &[CorpusEntry]) {
    for f in fixtures::bijections() {
        let ok = f.map.certify_bijection(&f.source, &f.target);
        t.check(ok == Ok(true), || format!("{}: not certified ({ok:?})", f.name));
        let (s, g) = (&f.source, &f.target);
        t.check(chi_g(s) == chi_g(g) && chi_b(s) == chi_b(g), || {
            format!("{}: characteristics change under the bijection", f.name)
        });
    }
    // coordinate permutations of every corpus set
    for e in corpus.iter().filter(|e| e.set.dim() >= 2) {
        let n = e.set.dim();
        let before = (chi_g(&e.set), chi_b(&e.set));
        for perm in permutations(n) {
            let img = PLMap::permutation(DefSet::universe(n), &perm).image(&e.set).expect("total map");
            let after = (chi_g(&img), chi_b(&img));
            t.check(before == after, || format!("{}: permutation {perm:?} gives {after:?}", e.name));
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn all_good(s: &DefSet) -> bool {
    decompose(s).cells().iter().all(|c| c.kind() == CellKind::Good)
}

fn suite_bounded_condition(t: &mut Tally) {
    for f in fixtures::bijections() {
        if f.map.certify_bijection(&f.source, &f.target) != Ok(true) {
            continue;
        }
        let (a, b) = (all_good(&f.source), all_good(&f.target));
        t.check(!a || b, || format!("{}: bounded source, unbounded target", f.name));
        t.check(a == b, || format!("{}: boundedness differs across the bijection", f.name));
    }
}

fn suite_union_product(t: &mut Tally, corpus: &[CorpusEntry]) {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut unions = 0;
    let mut attempts = 0;
    while unions < 12 && attempts < 1000 && !corpus.is_empty() {
        attempts += 1;
        let a = &corpus[rng.gen_range(0..corpus.len())];
        let b = &corpus[rng.gen_range(0..corpus.len())];
        if a.set.dim() != b.set.dim() {
            continue;
        }
        unions += 1;
        let (x, y) = (&a.set, &b.set);
        let lhs = chi_b(&x.union(y)) + chi_b(&x.intersect(y));
        t.check(lhs == chi_b(x) + chi_b(y), || format!("chi_b inclusion-exclusion fails on {}, {}", a.name, b.name));
        let lhs = chi_g(&x.union(y)) + chi_g(&x.intersect(y));
        t.check(lhs == chi_g(x) + chi_g(y), || format!("chi_g inclusion-exclusion fails on {}, {}", a.name, b.name));
    }
    let mut products = 0;
    attempts = 0;
    while products < 12 && attempts < 1000 && !corpus.is_empty() {
        attempts += 1;
        let a = &corpus[rng.gen_range(0..corpus.len())];
        let b = &corpus[rng.gen_range(0..corpus.len())];
        if a.set.dim() + b.set.dim() > 3 {
            continue;
        }
        products += 1;
        let p = a.set.product(&b.set);
        t.check(chi_b(&p) == chi_b(&a.set) * chi_b(&b.set), || format!("chi_b not multiplicative on {} x {}", a.name, b.name));
        t.check(chi_g(&p) == chi_g(&a.set) * chi_g(&b.set), || format!("chi_g not multiplicative on {} x {}", a.name, b.name));
        t.check(g_class(&p) == g_class(&a.set) * g_class(&b.set), || format!("class not multiplicative on {} x {}", a.name, b.name));
    }
}

/// Five points of a one-dimensional cell.
pub fn cell_samples(c: &Cell) -> Vec<Rational> {
    let k = |i: i64| int(i);
    match &c.stages()[0] {
        Stage::Graph(f) => vec![f.constant_term().clone(); 5],
        Stage::Band { lower, upper } => {
            let lo = lower.finite().map(|t| t.constant_term().clone());
            let hi = upper.finite().map(|t| t.constant_term().clone());
            (1..=5)
                .map(|i| match (&lo, &hi) {
                    (Some(l), Some(u)) => l + (u - l) * Rational::new(i.into(), 6.into()),
                    (Some(l), None) => l + k(i),
                    (None, Some(u)) => u - k(i),
                    (None, None) => k(i - 3),
                })
                .collect()
        }
    }
}

/// `chi_b` of a single cell, which is `(-1)^dim` for good cells and 0
/// otherwise.
fn cell_chi_b(c: &Cell) -> i64 {
    decompose(&c.to_defset()).chi_b()
}

fn suite_fiber(t: &mut Tally) {
    for (name, x) in fixtures::fiber_sets() {
        let d = decompose(&x);
        for base in d.level(1) {
            let es: Vec<i64> = cell_samples(base)
                .iter()
                .map(|a| chi_b(&x.substitute_value(0, a)))
                .collect();
            let e = es[0];
            t.check(es.iter().all(|&v| v == e), || format!("{name}: fibre chi_b varies over {base}: {es:?}"));
            let over = x.intersect(&base.to_defset().embed(2, 0));
            let lhs = chi_b(&over);
            let rhs = cell_chi_b(base) * e;
            t.check(lhs == rhs, || format!("{name}: over {base}, chi_b = {lhs} but chi_b(A) * e_A = {rhs}"));
        }
    }
}

fn suite_bd(t: &mut Tally) {
    for f in fixtures::bd_fixtures() {
        let r = bd_check(&f.set, &f.graph, &QeConfig::from_env());
        t.check(r.passed(), || format!("{}:\n{}", f.name, r.render()));
        for s in &r.samples {
            t.check(s.t > r.mu, || format!("{}: sample {} not above mu", f.name, s.t));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::bundled;

    #[test]
    fn claims_pass() {
        let opts = Options { verify: true };
        for s in ["claim1", "claim2", "claim3"] {
            let o = run_suite(s, &[], &opts).unwrap();
            assert!(o.passed(), "{s}: {:?}", o.failures);
        }
    }

    #[test]
    fn filter_selects_suites() {
        let opts = Options { verify: false };
        let out = run(Some("claim3"), &[], &opts);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].name, "claim3");
        assert!(run_suite("nope", &[], &opts).is_none());
    }

    #[test]
    fn corpus_expectations_hold() {
        let o = run_suite("corpus", &bundled(), &Options { verify: true }).unwrap();
        assert!(o.passed(), "{:#?}", o.failures);
    }

    #[test]
    fn permutations_are_complete() {
        assert_eq!(permutations(3).len(), 6);
    }
}
