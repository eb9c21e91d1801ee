pub mod arith;
pub mod cell;
pub mod corpus;
pub mod euler;
pub mod fixtures;
pub mod formula;
pub mod oracle;
pub mod plmap;
pub mod qe;
pub mod report;
pub mod selftest;

pub use arith::{LinTerm, Rational};
pub use formula::{Atom, DefSet, Formula, Rel};
