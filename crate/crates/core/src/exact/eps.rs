use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::Field;

/// `std + eps·ε` in `F[ε]/(ε²)`, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Eps<F> {
    pub std: F,
    pub eps: F,
}

impl<F: Field> Eps<F> {
    pub fn new(std: F, eps: F) -> Self {
        Eps { std, eps }
    }

    pub fn from_std(std: F) -> Self {
        Eps { std, eps: F::zero() }
    }

    /// The formal infinitesimal itself.
    pub fn epsilon() -> Self {
        Eps { std: F::zero(), eps: F::one() }
    }

    pub fn zero() -> Self {
        Self::from_std(F::zero())
    }

    pub fn one() -> Self {
        Self::from_std(F::one())
    }

    pub fn is_zero(&self) -> bool {
        self.std.is_zero() && self.eps.is_zero()
    }

    pub fn is_std(&self) -> bool {
        self.eps.is_zero()
    }

    pub fn scale(&self, k: &F) -> Self {
        Eps { std: self.std.clone() * k.clone(), eps: self.eps.clone() * k.clone() }
    }

    /// Division; `None` when the standard part of the divisor vanishes.
    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.std.is_zero() {
            return None;
        }
        let u = rhs.std.clone();
        let std = self.std.clone() / u.clone();
        let eps = (self.eps.clone() * u.clone() - self.std.clone() * rhs.eps.clone()) / (u.clone() * u);
        Some(Eps { std, eps })
    }
}

impl<F: Field> PartialOrd for Eps<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<F: Field> Ord for Eps<F> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.std.cmp(&other.std).then_with(|| self.eps.cmp(&other.eps))
    }
}

impl<F: Field> From<F> for Eps<F> {
    fn from(x: F) -> Self {
        Eps::from_std(x)
    }
}

impl<F: Field> Add for Eps<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Eps { std: self.std + rhs.std, eps: self.eps + rhs.eps }
    }
}

impl<F: Field> Sub for Eps<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Eps { std: self.std - rhs.std, eps: self.eps - rhs.eps }
    }
}

impl<F: Field> Neg for Eps<F> {
    type Output = Self;
    fn neg(self) -> Self {
        Eps { std: -self.std, eps: -self.eps }
    }
}

impl<F: Field> Mul for Eps<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let eps = self.std.clone() * rhs.eps + self.eps * rhs.std.clone();
        Eps { std: self.std * rhs.std, eps }
    }
}

impl<F: Field> Div for Eps<F> {
    type Output = Self;
    /// Panics when the standard part of `rhs` is zero.
    fn div(self, rhs: Self) -> Self {
        self.checked_div(&rhs).expect("division by an infinitesimal")
    }
}

impl<F: Field> fmt::Display for Eps<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.eps.is_zero() {
            write!(f, "{}", self.std)
        } else if self.eps.is_negative() {
            write!(f, "{} - {}ε", self.std, -self.eps.clone())
        } else {
            write!(f, "{} + {}ε", self.std, self.eps)
        }
    }
}

impl<F: Field> Zero for Eps<F> {
    fn zero() -> Self {
        Eps::from_std(F::zero())
    }
    fn is_zero(&self) -> bool {
        Eps::is_zero(self)
    }
}

impl<F: Field> One for Eps<F> {
    fn one() -> Self {
        Eps::from_std(F::one())
    }
}

impl serde::Serialize for Eps<crate::Rational> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Eps", 2)?;
        st.serialize_field("std", &crate::fmt_q(&self.std))?;
        st.serialize_field("eps", &crate::fmt_q(&self.eps))?;
        st.end()
    }
}
