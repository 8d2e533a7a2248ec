use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Domain, Exponent, Fp, Ring, Scalar};

/// Sparse multivariate polynomial with coefficients in `S`. No zero
/// coefficient is ever stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MPoly<S> {
    terms: BTreeMap<Exponent, S>,
}

impl<S: Ring> MPoly<S> {
    pub fn new() -> Self {
        MPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: S) -> Self {
        Self::term(Exponent::zero(), c)
    }

    pub fn term(e: Exponent, c: S) -> Self {
        let mut p = Self::new();
        p.add_term(e, c);
        p
    }

    /// The variable with 0-based index `i`.
    pub fn var(i: usize) -> Self {
        Self::term(Exponent::unit(i), S::one())
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Exponent, S)>) -> Self {
        let mut p = Self::new();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: Exponent, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, S> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Exponent, S> {
        self.terms
    }

    pub fn coeff(&self, e: &Exponent) -> S {
        self.terms.get(e).cloned().unwrap_or_else(S::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Width needed to hold every exponent.
    pub fn num_vars(&self) -> usize {
        self.terms.keys().map(|e| e.len()).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(|e| e.total()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e.get(i)).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, a)| (e.clone(), a.clone() * c)))
    }

    pub fn mul_term(&self, e: &Exponent, c: &S) -> Self {
        Self::from_terms(self.terms.iter().map(|(f, a)| (f.add(e), a.clone() * c)))
    }

    /// Graded-lex leading term.
    pub fn leading(&self) -> Option<(&Exponent, &S)> {
        self.terms.iter().next_back()
    }

    /// Evaluate every variable at a scalar of `S`.
    pub fn eval(&self, pt: &[S]) -> S {
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (i, &k) in e.as_slice().iter().enumerate() {
                if k > 0 {
                    m = m * &pt[i].pow(k as u64);
                }
            }
            acc = acc + &m;
        }
        acc
    }

    /// Substitute each variable by a polynomial over the same ring.
    pub fn substitute(&self, images: &[MPoly<S>]) -> MPoly<S> {
        let mut acc = MPoly::new();
        for (e, c) in &self.terms {
            let mut m = MPoly::constant(c.clone());
            for (i, &k) in e.as_slice().iter().enumerate() {
                if k > 0 {
                    m = &m * &images[i].pow(k as u64);
                }
            }
            acc = acc + &m;
        }
        acc
    }

    pub fn map_coeffs<T: Ring>(&self, f: impl Fn(&S) -> T) -> MPoly<T> {
        MPoly::from_terms(self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }
}

impl MPoly<Fp> {
    pub fn eval_fp(&self, pt: &[Fp]) -> Fp {
        let mut acc = Fp::ZERO;
        for (e, c) in &self.terms {
            let mut m = *c;
            for (i, &k) in e.as_slice().iter().enumerate() {
                if k > 0 {
                    m *= pt.get(i).copied().unwrap_or(Fp::ZERO).pow(k as u64);
                }
            }
            acc += m;
        }
        acc
    }

    /// Set variable `i` to the scalar `v`.
    pub fn specialize(&self, i: usize, v: Fp) -> MPoly<Fp> {
        let mut out = MPoly::new();
        for (e, c) in &self.terms {
            let k = e.get(i);
            let mut e2 = e.clone();
            e2.set(i, 0);
            out.add_term(e2, *c * v.pow(k as u64));
        }
        out
    }

    /// Exact division. Panics if `d` does not divide `self`.
    pub fn div_exact_poly(&self, d: &MPoly<Fp>) -> MPoly<Fp> {
        let (ld, lc) = d.leading().expect("division by zero polynomial");
        let lci = lc.inv().unwrap();
        let ld = ld.clone();
        let mut r = self.clone();
        let mut q = MPoly::new();
        while let Some((lr, cr)) = r.leading() {
            assert!(ld.divides(lr), "inexact multivariate division");
            let e = lr.sub(&ld);
            let c = *cr * lci;
            r = r - &d.mul_term(&e, &c);
            q.add_term(e, c);
        }
        q
    }
}

impl<S: Ring> Ring for MPoly<S> {
    fn zero() -> Self {
        MPoly::new()
    }
    fn one() -> Self {
        MPoly::constant(S::one())
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn from_fp(c: Fp) -> Self {
        MPoly::constant(S::from_fp(c))
    }
}

impl Domain for MPoly<Fp> {
    fn div_exact(&self, d: &Self) -> Self {
        self.div_exact_poly(d)
    }
    fn eval_fp(&self, pt: &[Fp]) -> Fp {
        MPoly::eval_fp(self, pt)
    }
    fn weight(&self) -> usize {
        self.terms.len()
    }
}

impl Scalar for MPoly<Fp> {
    type Dom = MPoly<Fp>;
    fn clear_row(row: &[Self]) -> Vec<Self> {
        row.to_vec()
    }
}

impl<'a, S: Ring> Add<&'a MPoly<S>> for MPoly<S> {
    type Output = MPoly<S>;
    fn add(mut self, o: &MPoly<S>) -> MPoly<S> {
        for (e, c) in &o.terms {
            self.add_term(e.clone(), c.clone());
        }
        self
    }
}

impl<'a, S: Ring> Sub<&'a MPoly<S>> for MPoly<S> {
    type Output = MPoly<S>;
    fn sub(mut self, o: &MPoly<S>) -> MPoly<S> {
        for (e, c) in &o.terms {
            self.add_term(e.clone(), -c.clone());
        }
        self
    }
}

impl<'a, 'b, S: Ring> Mul<&'b MPoly<S>> for &'a MPoly<S> {
    type Output = MPoly<S>;
    fn mul(self, o: &MPoly<S>) -> MPoly<S> {
        let mut out = MPoly::new();
        for (e, a) in &self.terms {
            for (f, b) in &o.terms {
                out.add_term(e.add(f), a.clone() * b);
            }
        }
        out
    }
}

impl<'a, S: Ring> Mul<&'a MPoly<S>> for MPoly<S> {
    type Output = MPoly<S>;
    fn mul(self, o: &MPoly<S>) -> MPoly<S> {
        &self * o
    }
}

impl<S: Ring> Add for MPoly<S> {
    type Output = MPoly<S>;
    fn add(self, o: MPoly<S>) -> MPoly<S> {
        self + &o
    }
}

impl<S: Ring> Sub for MPoly<S> {
    type Output = MPoly<S>;
    fn sub(self, o: MPoly<S>) -> MPoly<S> {
        self - &o
    }
}

impl<S: Ring> Mul for MPoly<S> {
    type Output = MPoly<S>;
    fn mul(self, o: MPoly<S>) -> MPoly<S> {
        &self * &o
    }
}

impl<S: Ring> Neg for MPoly<S> {
    type Output = MPoly<S>;
    fn neg(self) -> MPoly<S> {
        MPoly {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl<S: Ring> fmt::Debug for MPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("{c:?}*x^{e:?}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::with_prime;

    #[test]
    fn exact_division_recovers_factor() {
        with_prime(101, || {
            let x: MPoly<Fp> = MPoly::var(0);
            let y: MPoly<Fp> = MPoly::var(1);
            let a = x.clone() + &y + &MPoly::one();
            let b = x.clone() * &y - &MPoly::constant(Fp::new(3));
            let prod = &a * &b;
            assert_eq!(prod.div_exact_poly(&b), a);
        });
    }

    #[test]
    fn cancellation_removes_terms() {
        with_prime(101, || {
            let x: MPoly<Fp> = MPoly::var(0);
            assert!((x.clone() - &x).is_empty());
        });
    }
}
