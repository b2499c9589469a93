//! Root finding for polynomials over the p-adic integers.
//!
//! The crate computes with truncated elements of Z_p (residues mod `p^N`
//! with explicit precision tracking), evaluates polynomials over them, and
//! lifts residue roots to high-precision roots with a fourth-order
//! simplified Jarratt iteration, alongside Newton and Olver baselines. A
//! digit-chain search turns residues that fail the generalized Hensel
//! admission test into admissible seeds, and a floating-point reference
//! module measures the real-number order of convergence of the same
//! iteration.
//!
//! Core arithmetic is generic over the backing integer type; the aliases
//! below fix the two useful lanes.

pub mod error;
pub mod padic;
pub mod poly;
pub mod real;
pub mod seed;
pub mod solver;

pub use error::{Error, Result};

use num_bigint::BigInt;

/// Arbitrary-precision element of truncated Z_p (the default lane).
pub type Zp = padic::PadicApprox<BigInt>;
/// Context for the arbitrary-precision lane.
pub type ZpContext = padic::PadicContext<BigInt>;
/// Dense polynomial over the arbitrary-precision lane.
pub type ZpPoly = poly::Poly<BigInt>;
/// Root record over the arbitrary-precision lane.
pub type ZpRootRecord = solver::RootRecord<BigInt>;

/// Fixed-width lane for desk-scale parameters; products are formed before
/// reduction, so `p^(2 * work_prec)` must stay below `i128::MAX`.
pub type Zp128 = padic::PadicApprox<i128>;
pub type Zp128Context = padic::PadicContext<i128>;
pub type Zp128Poly = poly::Poly<i128>;

/// Double-precision report of the real-number order measurement.
pub type RealReport = real::RealIterationReport<f64>;
