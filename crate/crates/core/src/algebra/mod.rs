//! Exact scalars and linear algebra: F_p, F_p[t], F_p(t), sparse
//! multivariate polynomials over any of those, and dense matrices.

pub mod exponent;
pub mod field;
pub mod linalg;
pub mod matrix;
pub mod mpoly;
pub mod ratfunc;
pub mod unipoly;

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

pub use exponent::Exponent;
pub use field::{binomial, prime, set_global_prime, with_prime, Fp, DEFAULT_PRIME};
pub use matrix::{ExactMatrix, Index};
pub use mpoly::MPoly;
pub use ratfunc::RatFunc;
pub use unipoly::UniPoly;

/// A commutative ring with exact equality.
pub trait Ring:
    Clone
    + PartialEq
    + Eq
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_fp(c: Fp) -> Self;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * &base;
            }
        }
        acc
    }
}

/// An integral domain with exact division, enough for Bareiss elimination.
pub trait Domain: Ring {
    /// True when every nonzero element is a unit (plain elimination applies).
    const IS_FIELD: bool = false;

    /// `self / d`, where the caller guarantees `d` divides `self`.
    fn div_exact(&self, d: &Self) -> Self;

    /// Evaluate at a point of F_p^m (extra coordinates are ignored). Used to
    /// pick pivots cheaply; a ring homomorphism onto F_p.
    fn eval_fp(&self, pt: &[Fp]) -> Fp;

    /// A rough cost measure used to prefer small pivots.
    fn weight(&self) -> usize {
        1
    }
}

pub trait Field: Ring {
    fn inv(&self) -> Option<Self>;
}

/// Scalars whose matrices can be handed to fraction-free elimination after
/// clearing denominators row by row.
pub trait Scalar: Ring {
    type Dom: Domain;
    /// Multiply a row by a nonzero element so every entry lands in `Dom`.
    fn clear_row(row: &[Self]) -> Vec<Self::Dom>;
}

impl Ring for Fp {
    fn zero() -> Self {
        Fp::ZERO
    }
    fn one() -> Self {
        Fp::one()
    }
    fn is_zero(&self) -> bool {
        Fp::is_zero(*self)
    }
    fn from_fp(c: Fp) -> Self {
        c
    }
}

impl Domain for Fp {
    const IS_FIELD: bool = true;
    fn div_exact(&self, d: &Self) -> Self {
        *self * d.inv().expect("division by zero in F_p")
    }
    fn eval_fp(&self, _pt: &[Fp]) -> Fp {
        *self
    }
}

impl Field for Fp {
    fn inv(&self) -> Option<Self> {
        Fp::inv(*self)
    }
}

impl Scalar for Fp {
    type Dom = Fp;
    fn clear_row(row: &[Self]) -> Vec<Fp> {
        row.to_vec()
    }
}
