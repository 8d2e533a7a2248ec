use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{binomial, Fp};

/// An exponent vector. Trailing zeros are trimmed so that vectors of
/// different nominal length compare by their nonzero content.
///
/// Ordering is graded lexicographic: total degree first, then the first
/// differing coordinate, larger entry wins.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn zero() -> Self {
        Exponent(Vec::new())
    }

    pub fn new(mut v: Vec<u32>) -> Self {
        while v.last() == Some(&0) {
            v.pop();
        }
        Exponent(v)
    }

    pub fn from_slice(v: &[u32]) -> Self {
        Self::new(v.to_vec())
    }

    /// x_i as an exponent (0-based).
    pub fn unit(i: usize) -> Self {
        let mut v = vec![0; i + 1];
        v[i] = 1;
        Exponent(v)
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn set(&mut self, i: usize, e: u32) {
        if i >= self.0.len() {
            if e == 0 {
                return;
            }
            self.0.resize(i + 1, 0);
        }
        self.0[i] = e;
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
    }

    /// Number of stored coordinates (index of the last nonzero plus one).
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn to_vec(&self, n: usize) -> Vec<u32> {
        assert!(self.0.len() <= n, "exponent {self:?} wider than {n}");
        let mut v = self.0.clone();
        v.resize(n, 0);
        v
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn max_entry(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Indices with a nonzero entry.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|&&e| e > 0).count()
    }

    /// Coordinatewise `self <= other`.
    pub fn divides(&self, other: &Exponent) -> bool {
        self.0.len() <= other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        let n = self.0.len().max(other.0.len());
        Exponent((0..n).map(|i| self.get(i) + other.get(i)).collect())
    }

    /// `self - other`; panics unless `other` divides `self`.
    pub fn sub(&self, other: &Exponent) -> Exponent {
        assert!(other.divides(self), "{other:?} does not divide {self:?}");
        Exponent::new(
            (0..self.0.len())
                .map(|i| self.get(i) - other.get(i))
                .collect(),
        )
    }

    pub fn dot(&self, w: &[u64]) -> u64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &e)| e as u64 * w.get(i).copied().expect("weight vector too short"))
            .sum()
    }

    /// Restriction to the given coordinates (others zeroed).
    pub fn restrict(&self, keep: &[usize]) -> Exponent {
        let mut v = vec![0; self.0.len()];
        for &i in keep {
            if i < v.len() {
                v[i] = self.0[i];
            }
        }
        Exponent::new(v)
    }

    /// prod_i C(self_i, u_i) mod p.
    pub fn binomial(&self, u: &Exponent) -> Fp {
        let n = self.0.len().max(u.0.len());
        let mut acc = Fp::one();
        for i in 0..n {
            acc *= binomial(self.get(i) as u64, u.get(i) as u64);
            if acc.is_zero() {
                break;
            }
        }
        acc
    }

    /// Every exponent coordinatewise below `self`, including zero and self.
    pub fn below(&self) -> Vec<Exponent> {
        let mut out = vec![Vec::new()];
        for &e in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for prefix in &out {
                for k in 0..=e {
                    let mut p = prefix.clone();
                    p.push(k);
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(Exponent::new).collect()
    }
}

/// prod_i C(v_i, u_i) over slices of equal length.
pub fn binomial_vec(v: &[u32], u: &[u32]) -> Fp {
    assert_eq!(v.len(), u.len(), "exponent vectors of different length");
    v.iter().zip(u).fold(Fp::one(), |acc, (&a, &b)| {
        acc * binomial(a as u64, b as u64)
    })
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total().cmp(&other.total()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for i in 0..n {
                match self.get(i).cmp(&other.get(i)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Exponent::new(Vec::<u32>::deserialize(d)?))
    }
}

impl From<Vec<u32>> for Exponent {
    fn from(v: Vec<u32>) -> Self {
        Exponent::new(v)
    }
}
