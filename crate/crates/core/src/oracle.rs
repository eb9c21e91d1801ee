//! Brute-force Euler characteristics from the faces of a hyperplane
//! arrangement, independent of the cell decomposer.
//!
//! The arrangement always contains the coordinate hyperplanes, so no face
//! contains a line. A relatively open face of dimension `d` then contributes
//! `(-1)^d` to both characteristics when bounded and only to `chi_g`
//! otherwise.

use std::fmt;

use num::{Signed, Zero};
use thiserror::Error;

use crate::arith::{LinTerm, Rational};
use crate::formula::{Atom, DefSet, Rel};
use crate::qe;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("ambient dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("{count} functionals exceed the cap {cap}")]
    FunctionalCap { count: usize, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCaps {
    pub max_dim: usize,
    /// Counts the functionals of the set, not the coordinate hyperplanes.
    pub max_functionals: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            max_dim: 3,
            max_functionals: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn of(q: &Rational) -> Sign {
        if q.is_zero() {
            Sign::Zero
        } else if q.is_positive() {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }

    fn atom(self, t: &LinTerm) -> Atom {
        match self {
            Sign::Neg => Atom::lt(t.clone()),
            Sign::Zero => Atom::eq(t.clone()),
            Sign::Pos => Atom::lt(-t.clone()),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Neg => "-",
            Sign::Zero => "0",
            Sign::Pos => "+",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    /// One sign per entry of `Arrangement::functionals`.
    pub signs: Vec<Sign>,
    pub dim: usize,
    pub bounded: bool,
    pub witness: Vec<Rational>,
}

#[derive(Debug, Clone)]
pub struct Arrangement {
    pub dim: usize,
    /// Functionals of the set followed by the coordinate functionals not
    /// already among them.
    pub functionals: Vec<LinTerm>,
    pub faces: Vec<Face>,
}

impl Arrangement {
    pub fn face_atoms(&self, face: &Face) -> Vec<Atom> {
        self.functionals
            .iter()
            .zip(&face.signs)
            .map(|(t, s)| s.atom(t))
            .collect()
    }
}

/// Every nonempty face of the arrangement of `s`'s functionals together with
/// the coordinate hyperplanes.
pub fn arrangement(s: &DefSet, caps: OracleCaps) -> Result<Arrangement, OracleError> {
    let n = s.dim();
    if n > caps.max_dim {
        return Err(OracleError::DimensionCap {
            dim: n,
            cap: caps.max_dim,
        });
    }
    let mut functionals: Vec<LinTerm> = s.functionals().into_iter().collect();
    if functionals.len() > caps.max_functionals {
        return Err(OracleError::FunctionalCap {
            count: functionals.len(),
            cap: caps.max_functionals,
        });
    }
    for i in 0..n {
        let x = LinTerm::var(n, i);
        if !functionals.contains(&x) {
            functionals.push(x);
        }
    }
    let mut faces = Vec::new();
    let mut signs = Vec::with_capacity(functionals.len());
    let mut atoms = Vec::with_capacity(functionals.len());
    enumerate(n, &functionals, &mut signs, &mut atoms, &mut faces);
    Ok(Arrangement { dim: n, functionals, faces })
}

fn enumerate(n: usize, fs: &[LinTerm], signs: &mut Vec<Sign>, atoms: &mut Vec<Atom>, out: &mut Vec<Face>) {
    let k = signs.len();
    if k == fs.len() {
        let witness = qe::witness(atoms, n).expect("feasible by construction");
        let zeros: Vec<&LinTerm> = fs.iter().zip(signs.iter()).filter(|(_, s)| **s == Sign::Zero).map(|(t, _)| t).collect();
        out.push(Face {
            signs: signs.clone(),
            dim: n - rank(&zeros, n),
            bounded: is_bounded(atoms, n),
            witness,
        });
        return;
    }
    for s in [Sign::Neg, Sign::Zero, Sign::Pos] {
        atoms.push(s.atom(&fs[k]));
        if !qe::conj_is_empty(atoms) {
            signs.push(s);
            enumerate(n, fs, signs, atoms, out);
            signs.pop();
        }
        atoms.pop();
    }
}

/// Rank of the linear parts, by Gaussian elimination.
pub fn rank(terms: &[&LinTerm], n: usize) -> usize {
    let mut rows: Vec<Vec<Rational>> = terms.iter().map(|t| (0..n).map(|i| t.coeff(i)).collect()).collect();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][col].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = &rows[i][col] / &pivot;
                for j in col..n {
                    let d = &f * &rows[r][j];
                    rows[i][j] -= d;
                }
            }
        }
        r += 1;
    }
    r
}

/// Each coordinate's projection has a finite bound on both sides.
fn is_bounded(atoms: &[Atom], n: usize) -> bool {
    let face = DefSet::from_atoms(n, atoms.iter().cloned());
    (0..n).all(|i| {
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let line = face.project_out(&others);
        line.disjuncts().iter().all(|c| {
            let (mut above, mut below) = (false, false);
            for a in c.atoms() {
                let k = a.term().coeff(0);
                match a.rel() {
                    Rel::Eq => (above, below) = (true, true),
                    Rel::Lt if k.is_positive() => above = true,
                    Rel::Lt if k.is_negative() => below = true,
                    Rel::Lt => {}
                }
            }
            above && below
        })
    })
}

/// `(chi_g, chi_b)` summed over the faces inside `s`.
pub fn oracle_chi(s: &DefSet, caps: OracleCaps) -> Result<(i64, i64), OracleError> {
    let arr = arrangement(s, caps)?;
    let (mut g, mut b) = (0, 0);
    for f in &arr.faces {
        if s.contains(&f.witness) {
            let e = if f.dim % 2 == 0 { 1 } else { -1 };
            g += e;
            if f.bounded {
                b += e;
            }
        }
    }
    Ok((g, b))
}
