//! Exact symbolic engine for "exotic" order-4 differential operators on the
//! minimal nilpotent orbit of sl(N,ℂ) and so(N,ℂ), with machine verification
//! of the identities the construction satisfies: eigenvalue laws on powers
//! of the highest-weight coordinate, lowest-weight and grading conditions,
//! the principal-symbol identity, commutativity of the generated family,
//! and positivity of the induced pairing.
//!
//! All arithmetic is exact over ℚ; every verification is an identity of
//! canonical normal forms, never a numerical approximation.

pub mod chart;
pub mod diffop;
pub mod exotic;
pub mod inner;
pub mod lie;
pub mod linalg;
pub mod poly;
pub mod rat;
pub mod report;
