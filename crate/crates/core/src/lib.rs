//! Exact computational commutative algebra for verifying the Casas-Alvero
//! conjecture machinery at desk scale.
//!
//! The crate is organised around the pipeline used by the verification
//! commands:
//!
//! * [`coeff`] — exact coefficient fields: arbitrary-precision rationals and
//!   word-size prime fields behind one [`coeff::Field`] abstraction.
//! * [`poly`] — sparse multivariate and dense univariate polynomial
//!   arithmetic, Hasse-Schmidt derivatives, the `Φ#` automorphisms,
//!   univariate gcd and resultants.
//! * [`groebner`] — Buchberger's algorithm, normal forms, Hilbert series,
//!   Krull dimension, regular-sequence certification and colon ideals.
//! * [`casas`] — the polynomial sequences of the conjecture reformulation,
//!   the index reductions, per-polynomial conjecture checks and bad-prime
//!   scans.
//! * [`koszul`] — graded chain complexes with polynomial-matrix
//!   differentials, the truncated/filtered complexes, chain maps and exact
//!   per-degree homology.
//! * [`report`] — machine-readable verification reports with witnesses.

pub mod casas;
pub mod coeff;
pub mod groebner;
pub mod koszul;
pub mod linalg;
pub mod poly;
pub mod report;
