//! Blackbox hitting sets for sparse polynomials in a few variables, via
//! Kronecker substitution x_j -> y^{W_j} and a full set of y values.
//!
//! With W_j = prod_{i<j} (δ_i + 1) distinct monomials of per-variable degree
//! at most δ_i land on distinct powers of y, all below prod (δ_i + 1). A
//! nonzero univariate of degree below G is nonzero at one of G points.

use serde::{Deserialize, Serialize};

use crate::algebra::{prime, Fp};
use crate::error::{Error, Result};

/// Uniform degree bound δ on m variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseHittingSpec {
    pub m: usize,
    pub delta: u32,
}

impl SparseHittingSpec {
    pub fn new(m: usize, delta: u32) -> Self {
        SparseHittingSpec { m, delta }
    }

    /// Exponents (δ+1)^{j}, j = 0..m-1.
    pub fn weights(&self) -> Vec<u64> {
        kronecker_weights(&vec![self.delta; self.m])
    }

    /// Largest exponent of y after substitution: (δ+1)^m - 1.
    pub fn substituted_degree(&self) -> u128 {
        (self.delta as u128 + 1).pow(self.m as u32) - 1
    }

    /// The documented grid bound m·δ·(δ+1)^{m-1} + 1. The emitted point
    /// count, `substituted_degree() + 1`, never exceeds it.
    pub fn grid_size(&self) -> u128 {
        if self.m == 0 {
            return 1;
        }
        self.m as u128 * self.delta as u128 * (self.delta as u128 + 1).pow(self.m as u32 - 1) + 1
    }
}

/// Mixed-radix Kronecker exponents W_j = prod_{i<j} (δ_i + 1).
pub fn kronecker_weights(degs: &[u32]) -> Vec<u64> {
    let mut w = Vec::with_capacity(degs.len());
    let mut acc: u64 = 1;
    for &d in degs {
        w.push(acc);
        acc = acc
            .checked_mul(d as u64 + 1)
            .expect("Kronecker exponent overflow");
    }
    w
}

/// Number of points needed for per-variable degree bounds `degs`.
pub fn kronecker_point_count(degs: &[u32]) -> u128 {
    degs.iter()
        .fold(1u128, |acc, &d| acc.saturating_mul(d as u128 + 1))
}

/// (y^{W_1}, ..., y^{W_m}) for y = 0, 1, ..., prod(δ_j+1) - 1.
pub fn kronecker_points(degs: &[u32]) -> Result<Vec<Vec<Fp>>> {
    let g = kronecker_point_count(degs);
    let p = prime();
    if g > p as u128 {
        return Err(Error::FieldTooSmall {
            needed: g,
            prime: p,
        });
    }
    let w = kronecker_weights(degs);
    Ok((0..g as u64)
        .map(|y| {
            let y = Fp::new(y);
            w.iter().map(|&e| y.pow(e)).collect()
        })
        .collect())
}

/// Hitting set for m-variate polynomials of per-variable degree at most δ.
pub fn hitting_points(spec: &SparseHittingSpec) -> Result<Vec<Vec<Fp>>> {
    let pts = kronecker_points(&vec![spec.delta; spec.m])?;
    debug_assert!(pts.len() as u128 <= spec.grid_size());
    Ok(pts)
}

/// Zero test of a low-variate blackbox. Returns a witness point when the
/// polynomial is nonzero.
pub fn low_variate_hitting(
    m: usize,
    delta: u32,
    bb: impl Fn(&[Fp]) -> Fp,
) -> Result<Option<Vec<Fp>>> {
    Ok(hitting_points(&SparseHittingSpec::new(m, delta))?
        .into_iter()
        .find(|pt| !bb(pt).is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::with_prime;

    #[test]
    fn point_counts() {
        let s = SparseHittingSpec::new(2, 1);
        assert_eq!(s.substituted_degree(), 3);
        assert_eq!(hitting_points(&s).unwrap().len(), 4);
        assert_eq!(s.grid_size(), 5);
        assert_eq!(
            hitting_points(&SparseHittingSpec::new(1, 2)).unwrap().len(),
            3
        );
    }

    #[test]
    fn too_small_field() {
        with_prime(7, || {
            assert!(matches!(
                hitting_points(&SparseHittingSpec::new(2, 2)),
                Err(Error::FieldTooSmall {
                    needed: 9,
                    prime: 7
                })
            ));
        });
    }

    #[test]
    fn x1x2_minus_one_is_hit() {
        let w = low_variate_hitting(2, 1, |p| p[0] * p[1] - Fp::one()).unwrap();
        assert!(w.is_some());
        assert!(low_variate_hitting(2, 1, |_| Fp::ZERO).unwrap().is_none());
    }
}
