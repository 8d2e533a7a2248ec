//! The Hadamard algebra H_κ(R) (R^κ under coordinatewise product) and
//! sparse polynomials with coefficients in it.

mod concentration;
mod poly;

use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::algebra::{Field, Fp, Ring};
use crate::error::{Error, Result};

pub use concentration::{coefficient_matrix, is_l_concentrated, Concentration, Weighting};
pub use poly::HadamardPoly;

/// An element of H_κ(R).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HadamardVec<S> {
    coords: Vec<S>,
}

impl<S: Ring> HadamardVec<S> {
    pub fn new(coords: Vec<S>) -> Self {
        assert!(
            !coords.is_empty(),
            "Hadamard vectors need at least one coordinate"
        );
        HadamardVec { coords }
    }

    pub fn zeros(kappa: usize) -> Self {
        Self::new(vec![S::zero(); kappa])
    }

    pub fn ones(kappa: usize) -> Self {
        Self::new(vec![S::one(); kappa])
    }

    pub fn splat(kappa: usize, c: S) -> Self {
        Self::new(vec![c; kappa])
    }

    pub fn kappa(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Coordinatewise product.
    pub fn had_mul(&self, other: &Self) -> Result<Self> {
        if self.kappa() != other.kappa() {
            return Err(Error::DimensionMismatch(format!(
                "Hadamard product of lengths {} and {}",
                self.kappa(),
                other.kappa()
            )));
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        HadamardVec {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() * b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        HadamardVec {
            coords: self.coords.iter().map(|a| a.clone() * c).collect(),
        }
    }

    /// Drop one coordinate, mapping H_κ onto H_{κ-1}.
    pub fn project_out(&self, coord: usize) -> Self {
        let mut coords = self.coords.clone();
        coords.remove(coord);
        HadamardVec { coords }
    }

    /// Keep only the listed coordinates, in order.
    pub fn select(&self, keep: &[usize]) -> Self {
        Self::new(keep.iter().map(|&i| self.coords[i].clone()).collect())
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> HadamardVec<T> {
        HadamardVec {
            coords: self.coords.iter().map(f).collect(),
        }
    }

    /// cᵀ·v
    pub fn dot(&self, c: &Self) -> S {
        self.coords
            .iter()
            .zip(&c.coords)
            .fold(S::zero(), |acc, (a, b)| acc + &(a.clone() * b))
    }
}

impl<S: Field> HadamardVec<S> {
    /// Coordinatewise inverse; fails on the first zero coordinate.
    pub fn had_inverse(&self) -> Result<Self> {
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, c)| c.inv().ok_or(Error::NotAUnit { coord: i }))
            .collect::<Result<Vec<_>>>()?;
        Ok(HadamardVec { coords })
    }
}

impl<'a, S: Ring> Add<&'a HadamardVec<S>> for HadamardVec<S> {
    type Output = HadamardVec<S>;
    fn add(self, o: &HadamardVec<S>) -> Self {
        assert_eq!(self.kappa(), o.kappa(), "Hadamard sum of different lengths");
        HadamardVec {
            coords: self
                .coords
                .into_iter()
                .zip(&o.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<'a, S: Ring> Sub<&'a HadamardVec<S>> for HadamardVec<S> {
    type Output = HadamardVec<S>;
    fn sub(self, o: &HadamardVec<S>) -> Self {
        assert_eq!(
            self.kappa(),
            o.kappa(),
            "Hadamard difference of different lengths"
        );
        HadamardVec {
            coords: self
                .coords
                .into_iter()
                .zip(&o.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Disjoint variable blocks X_1, ..., X_d (0-based variable indices).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for b in blocks.iter_mut() {
            b.sort_unstable();
            for &v in b.iter() {
                if !seen.insert(v) {
                    return Err(Error::PartitionViolation {
                        gate: "partition".into(),
                        msg: format!("variable {} appears in two blocks", v + 1),
                    });
                }
            }
        }
        Ok(Partition { blocks })
    }

    /// Consecutive blocks of the given sizes starting at variable 0.
    pub fn contiguous(sizes: &[usize]) -> Self {
        let mut start = 0;
        let blocks = sizes
            .iter()
            .map(|&s| {
                let b: Vec<usize> = (start..start + s).collect();
                start += s;
                b
            })
            .collect();
        Partition { blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, var: usize) -> Option<usize> {
        self.blocks
            .iter()
            .position(|b| b.binary_search(&var).is_ok())
    }

    /// Number of blocks met by the support of `e`.
    pub fn block_weight(&self, e: &crate::algebra::Exponent) -> Result<usize> {
        let mut hit = vec![false; self.blocks.len()];
        for i in e.support() {
            let b = self
                .block_of(i)
                .ok_or(Error::IndexOutsidePartition { index: i + 1 })?;
            hit[b] = true;
        }
        Ok(hit.into_iter().filter(|&h| h).count())
    }
}

/// Block weight with an explicit exponent slice, for callers holding raw vectors.
pub fn block_weight(e: &[u32], p: &Partition) -> Result<usize> {
    p.block_weight(&crate::algebra::Exponent::from_slice(e))
}

/// Shorthand: Hadamard vector over F_p from signed integers.
pub fn hv(cs: &[i64]) -> HadamardVec<Fp> {
    HadamardVec::new(cs.iter().map(|&c| Fp::from_i64(c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{with_prime, Exponent};

    #[test]
    fn vector_examples() {
        with_prime(7, || {
            assert_eq!(hv(&[1, 2]).had_mul(&hv(&[3, 4])).unwrap(), hv(&[3, 8]));
            assert_eq!(hv(&[0, 1]).had_mul(&hv(&[1, 0])).unwrap(), hv(&[0, 0]));
            assert_eq!(hv(&[1, 2]).had_inverse().unwrap(), hv(&[1, 4]));
            assert_eq!(hv(&[0, 1]).had_inverse(), Err(Error::NotAUnit { coord: 0 }));
            assert!(hv(&[1]).had_mul(&hv(&[1, 2])).is_err());
        });
    }

    #[test]
    fn block_weights() {
        let p = Partition::contiguous(&[2, 2]);
        assert_eq!(
            p.block_weight(&Exponent::from_slice(&[1, 0, 1, 0]))
                .unwrap(),
            2
        );
        assert_eq!(p.block_weight(&Exponent::zero()).unwrap(), 0);
        assert_eq!(
            p.block_weight(&Exponent::from_slice(&[1, 1, 0, 0]))
                .unwrap(),
            1
        );
        assert!(p.block_weight(&Exponent::unit(5)).is_err());
    }
}
