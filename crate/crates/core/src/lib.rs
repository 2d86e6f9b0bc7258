//! Exact intersection theory for log terminal surface singularities and
//! rank one log del Pezzo surfaces.
//!
//! Surfaces are presented as blow-up programs over the plane (or as abstract
//! or local configurations of curves), contracted to normal surfaces, and
//! studied with Mumford's rational intersection pairing. All arithmetic is
//! exact.

pub mod config;
pub mod criteria;
pub mod exact;
pub mod hunt;
pub mod singularity;

use num_bigint::BigInt;
use num_rational::Ratio;

/// Exact rational number with arbitrary precision.
pub type Rational = Ratio<BigInt>;
/// Rational with a first-order infinitesimal part.
pub type EpsRational = exact::Eps<Rational>;
/// Square matrix of rationals.
pub type RatMatrix = exact::Matrix<Rational>;

pub use exact::{fmt_q, parse_q, q, qi};
