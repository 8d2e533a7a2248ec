use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Domain, Fp, Ring};

/// Dense univariate polynomial over F_p, lowest degree first. The zero
/// polynomial is the empty vector and the last entry is never zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Fp>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Fp>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_i64(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| Fp::from_i64(c)).collect())
    }

    pub fn constant(c: Fp) -> Self {
        Self::new(vec![c])
    }

    /// c * t^d
    pub fn monomial(c: Fp, d: usize) -> Self {
        if c.is_zero() {
            return UniPoly::default();
        }
        let mut v = vec![Fp::ZERO; d + 1];
        v[d] = c;
        UniPoly { coeffs: v }
    }

    pub fn t() -> Self {
        Self::monomial(Fp::one(), 1)
    }

    pub fn coeffs(&self) -> &[Fp] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fp {
        self.coeffs.get(i).copied().unwrap_or(Fp::ZERO)
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Fp {
        self.coeffs.last().copied().unwrap_or(Fp::ZERO)
    }

    /// Lowest power with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn eval(&self, x: Fp) -> Fp {
        self.coeffs
            .iter()
            .rev()
            .fold(Fp::ZERO, |acc, &c| acc * x + c)
    }

    pub fn scale(&self, c: Fp) -> Self {
        if c.is_zero() {
            return UniPoly::default();
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    /// Multiply by t^k.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.coeffs.is_empty() {
            return self.clone();
        }
        let mut v = vec![Fp::ZERO; k];
        v.extend_from_slice(&self.coeffs);
        UniPoly { coeffs: v }
    }

    pub fn monic(&self) -> Self {
        match self.lead().inv() {
            Some(li) => self.scale(li),
            None => self.clone(),
        }
    }

    /// Euclidean division: (q, r) with self = q*d + r and deg r < deg d.
    pub fn divrem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("polynomial division by zero");
        let li = d.lead().inv().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (UniPoly::default(), self.clone());
        }
        let mut q = vec![Fp::ZERO; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = r[i] * li;
            if c.is_zero() {
                continue;
            }
            q[i - dd] = c;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                r[i - dd + j] -= c * dc;
            }
        }
        r.truncate(dd);
        (UniPoly::new(q), UniPoly::new(r))
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn compose_monomial(&self, k: usize) -> UniPoly {
        // p(t^k)
        if k == 0 {
            return UniPoly::constant(self.coeffs.iter().fold(Fp::ZERO, |a, &c| a + c));
        }
        let mut v = vec![Fp::ZERO; self.coeffs.len().saturating_sub(1) * k + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            v[i * k] = c;
        }
        UniPoly::new(v)
    }
}

impl Ring for UniPoly {
    fn zero() -> Self {
        UniPoly::default()
    }
    fn one() -> Self {
        UniPoly::constant(Fp::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn from_fp(c: Fp) -> Self {
        UniPoly::constant(c)
    }
}

impl Domain for UniPoly {
    fn div_exact(&self, d: &Self) -> Self {
        let (q, r) = self.divrem(d);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }
    fn eval_fp(&self, pt: &[Fp]) -> Fp {
        self.eval(pt[0])
    }
    fn weight(&self) -> usize {
        self.coeffs.len()
    }
}

impl<'a> Add<&'a UniPoly> for UniPoly {
    type Output = UniPoly;
    fn add(mut self, o: &UniPoly) -> UniPoly {
        if self.coeffs.len() < o.coeffs.len() {
            self.coeffs.resize(o.coeffs.len(), Fp::ZERO);
        }
        for (a, &b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a += b;
        }
        UniPoly::new(self.coeffs)
    }
}

impl<'a> Sub<&'a UniPoly> for UniPoly {
    type Output = UniPoly;
    fn sub(mut self, o: &UniPoly) -> UniPoly {
        if self.coeffs.len() < o.coeffs.len() {
            self.coeffs.resize(o.coeffs.len(), Fp::ZERO);
        }
        for (a, &b) in self.coeffs.iter_mut().zip(&o.coeffs) {
            *a -= b;
        }
        UniPoly::new(self.coeffs)
    }
}

impl<'a> Mul<&'a UniPoly> for UniPoly {
    type Output = UniPoly;
    fn mul(self, o: &UniPoly) -> UniPoly {
        &self * o
    }
}

impl<'a, 'b> Mul<&'b UniPoly> for &'a UniPoly {
    type Output = UniPoly;
    fn mul(self, o: &UniPoly) -> UniPoly {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return UniPoly::default();
        }
        let mut v = vec![Fp::ZERO; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        UniPoly::new(v)
    }
}

impl Add for UniPoly {
    type Output = UniPoly;
    fn add(self, o: UniPoly) -> UniPoly {
        self + &o
    }
}

impl Sub for UniPoly {
    type Output = UniPoly;
    fn sub(self, o: UniPoly) -> UniPoly {
        self - &o
    }
}

impl Mul for UniPoly {
    type Output = UniPoly;
    fn mul(self, o: UniPoly) -> UniPoly {
        &self * &o
    }
}

impl Neg for UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*t")?,
                _ => write!(f, "{c}*t^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::with_prime;

    #[test]
    fn divrem_roundtrip() {
        with_prime(101, || {
            let a = UniPoly::from_i64(&[3, 0, 5, 7, 1]);
            let b = UniPoly::from_i64(&[1, 2, 3]);
            let (q, r) = a.divrem(&b);
            assert_eq!(q * &b + &r, a);
            assert!(r.degree().unwrap_or(0) < 2);
        });
    }

    #[test]
    fn gcd_of_shared_factor() {
        with_prime(101, || {
            let f = UniPoly::from_i64(&[1, 1]);
            let a = &f * &UniPoly::from_i64(&[2, 0, 1]);
            let b = &f * &UniPoly::from_i64(&[5, 3]);
            assert_eq!(UniPoly::gcd(&a, &b), f);
        });
    }
}
