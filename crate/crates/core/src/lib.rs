//! Exact constructions of the q-deformed function algebras of the compact
//! symplectic and orthogonal series, their central-unitary ("tilde")
//! extensions, and the machinery that verifies the defining identities:
//! R-matrices and braid checks, FRT relation ideals, cofactor matrices,
//! quantum determinants, Hopf data, degree-bounded ideal membership with
//! certificates, representation twisting, and the classical matrix-group
//! counterparts.

pub mod coeff;

pub use coeff::{CoeffError, EvalValue, HalfLaurent, Rat, RatFunc};
