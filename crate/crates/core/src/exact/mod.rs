//! Exact scalars and small dense linear algebra.
//!
//! Everything is generic over [`Field`], an ordered field with exact
//! division. The crate root fixes the concrete instantiation used by the rest
//! of the library ([`crate::Rational`]).

mod eps;
mod matrix;

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Num, Signed};

pub use eps::Eps;
pub use matrix::{LinalgError, Matrix};

/// An ordered field with exact arithmetic.
pub trait Field: Clone + Ord + Num + Signed + Debug + Display {
    fn from_i64(n: i64) -> Self;
}

impl Field for Ratio<BigInt> {
    fn from_i64(n: i64) -> Self {
        Ratio::from_integer(BigInt::from(n))
    }
}

impl Field for Ratio<i128> {
    fn from_i64(n: i64) -> Self {
        Ratio::from_integer(n as i128)
    }
}

impl Field for Ratio<i64> {
    fn from_i64(n: i64) -> Self {
        Ratio::from_integer(n)
    }
}

/// Shorthand for `p/q` as a [`crate::Rational`]. Panics on `q == 0`.
pub fn q(p: i64, q: i64) -> crate::Rational {
    Ratio::new(BigInt::from(p), BigInt::from(q))
}

/// Integer as a [`crate::Rational`].
pub fn qi(n: i64) -> crate::Rational {
    Ratio::from_integer(BigInt::from(n))
}

/// Formats a rational as `p/q` in lowest terms, always with a denominator.
pub fn fmt_q<T: Clone + num_integer::Integer + Display>(x: &Ratio<T>) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q` or `p` into a [`crate::Rational`].
pub fn parse_q(s: &str) -> Option<crate::Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let n: BigInt = a.trim().parse().ok()?;
            let d: BigInt = b.trim().parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(Ratio::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Ratio::from_integer),
    }
}

/// Least common multiple of the denominators of `xs` (1 for an empty slice).
pub fn lcm_denominators<'a, I>(xs: I) -> BigInt
where
    I: IntoIterator<Item = &'a crate::Rational>,
{
    use num_integer::Integer;
    xs.into_iter()
        .fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()))
}

/// Serializes a rational as the string `p/q`, for `#[serde(serialize_with)]`.
pub fn ser_q<S: serde::Serializer>(x: &crate::Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(x))
}
