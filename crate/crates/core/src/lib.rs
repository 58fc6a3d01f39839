//! Decides whether sufficient conditions for Mordell-Weil rank constancy of an
//! elliptic curve over Q hold in the cyclotomic Z_p-tower at an odd prime p.
//!
//! The pipeline: exact curve arithmetic and minimal models, local reduction
//! data via Tate's algorithm, p-adic heights and regulators through the
//! Mazur-Tate sigma function, Iwasawa invariants by Weierstrass preparation,
//! and sieves over auxiliary primes.

pub mod arith;
pub mod curve;
pub mod heights;
pub mod iwasawa;
pub mod kedlaya;
pub mod padic;
pub mod polyfp;
pub mod reduction;
pub mod report;
pub mod sieve;

pub use curve::{derive_invariants, CurveContext, CurveError, EllipticCurveQ, PointQ};
pub use reduction::{
    bad_primes, classify, count_points, minimal_model, tate_local, GoodPrimeClass,
    KodairaType, LocalData, MinimalModel, ReductionError, ReductionKind,
};
