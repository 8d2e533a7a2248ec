use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

use super::HadamardVec;
use crate::algebra::{Exponent, Fp, MPoly, Ring};
use crate::error::{Error, Result};
use crate::util::choose;

/// A polynomial in n variables with coefficients in H_κ(S). Terms are kept
/// in graded-lex order and zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HadamardPoly<S> {
    n: usize,
    kappa: usize,
    terms: BTreeMap<Exponent, HadamardVec<S>>,
}

impl<S: Ring> HadamardPoly<S> {
    pub fn zero(n: usize, kappa: usize) -> Self {
        HadamardPoly {
            n,
            kappa,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: HadamardVec<S>) -> Self {
        let mut p = Self::zero(n, c.kappa());
        p.add_term(Exponent::zero(), c);
        p
    }

    pub fn from_terms(
        n: usize,
        kappa: usize,
        it: impl IntoIterator<Item = (Exponent, HadamardVec<S>)>,
    ) -> Self {
        let mut p = Self::zero(n, kappa);
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    /// Stack κ scalar polynomials into one Hadamard polynomial.
    pub fn from_coordinates(n: usize, polys: &[MPoly<S>]) -> Self {
        let kappa = polys.len();
        let mut p = Self::zero(n, kappa);
        for (i, f) in polys.iter().enumerate() {
            for (e, c) in f.terms() {
                let mut v = vec![S::zero(); kappa];
                v[i] = c.clone();
                p.add_term(e.clone(), HadamardVec::new(v));
            }
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, HadamardVec<S>> {
        &self.terms
    }

    pub fn add_term(&mut self, e: Exponent, c: HadamardVec<S>) {
        assert_eq!(c.kappa(), self.kappa, "coefficient length differs from κ");
        assert!(
            e.len() <= self.n,
            "exponent {e:?} has more than {} variables",
            self.n
        );
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&e) {
            None => {
                self.terms.insert(e, c);
            }
            Some(old) => {
                let s = old + &c;
                if !s.is_zero() {
                    self.terms.insert(e, s);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coef(e)(f), the zero vector when absent.
    pub fn coeff(&self, e: &Exponent) -> HadamardVec<S> {
        self.terms
            .get(e)
            .cloned()
            .unwrap_or_else(|| HadamardVec::zeros(self.kappa))
    }

    /// S(f)
    pub fn support(&self) -> Vec<Exponent> {
        self.terms.keys().cloned().collect()
    }

    /// s(f)
    pub fn sparsity(&self) -> usize {
        self.terms.len()
    }

    /// μ(f), the largest support size of a monomial.
    pub fn mu(&self) -> Result<usize> {
        self.terms
            .keys()
            .map(|e| e.support_size())
            .max()
            .ok_or(Error::EmptyPolynomial)
    }

    /// (S(f), s(f), μ(f))
    pub fn support_stats(&self) -> Result<(Vec<Exponent>, usize, usize)> {
        let mu = self.mu()?;
        Ok((self.support(), self.sparsity(), mu))
    }

    pub fn total_degree(&self) -> u64 {
        self.terms.keys().map(|e| e.total()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e.get(i)).max().unwrap_or(0)
    }

    /// The cone 𝒮(f): every exponent below some monomial of f, sorted.
    pub fn cone(&self) -> Vec<Exponent> {
        let mut set = BTreeSet::new();
        for e in self.terms.keys() {
            if set.contains(e) {
                continue;
            }
            for u in e.below() {
                set.insert(u);
            }
        }
        set.into_iter().collect()
    }

    /// 𝔰(f), checked against C(n+1, μ)·C(d+μ, μ) with d the total degree.
    pub fn cone_size(&self) -> usize {
        let c = self.cone().len();
        if let Ok(mu) = self.mu() {
            let d = self.total_degree();
            let bound = choose(self.n as u64 + 1, mu as u64)
                .saturating_mul(choose(d + mu as u64, mu as u64));
            assert!(
                c as u128 <= bound,
                "cone of size {c} exceeds the bound {bound}"
            );
        }
        c
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&S) -> T) -> HadamardPoly<T> {
        let mut out = HadamardPoly::zero(self.n, self.kappa);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.map(&f));
        }
        out
    }

    /// f(x + a) by the binomial expansion of each monomial.
    pub fn shift(&self, a: &[S]) -> Self {
        assert_eq!(a.len(), self.n, "translation has the wrong length");
        let maxdeg: Vec<u32> = (0..self.n).map(|i| self.degree_in(i)).collect();
        let pows: Vec<Vec<S>> = a
            .iter()
            .zip(&maxdeg)
            .map(|(ai, &d)| {
                let mut v = vec![S::one()];
                for _ in 0..d {
                    let next = v.last().unwrap().clone() * ai;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out: BTreeMap<Exponent, HadamardVec<S>> = BTreeMap::new();
        for (v, z) in &self.terms {
            for u in v.below() {
                let b = v.binomial(&u);
                let mut factor = S::from_fp(b);
                for i in 0..v.len() {
                    let k = (v.get(i) - u.get(i)) as usize;
                    if k > 0 {
                        factor = factor * &pows[i][k];
                    }
                }
                if factor.is_zero() {
                    continue;
                }
                let add = z.scale(&factor);
                match out.get_mut(&u) {
                    Some(acc) => *acc = acc.clone() + &add,
                    None => {
                        out.insert(u, add);
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        HadamardPoly {
            n: self.n,
            kappa: self.kappa,
            terms: out,
        }
    }

    /// Value at a point, an element of H_κ(S).
    pub fn eval(&self, pt: &[S]) -> HadamardVec<S> {
        let mut acc = HadamardVec::zeros(self.kappa);
        for (e, c) in &self.terms {
            let mut m = S::one();
            for (i, &k) in e.as_slice().iter().enumerate() {
                if k > 0 {
                    m = m * &pt[i].pow(k as u64);
                }
            }
            acc = acc + &c.scale(&m);
        }
        acc
    }

    /// Product in H_κ(S)[x].
    pub fn had_mul(&self, other: &Self) -> Result<Self> {
        if self.kappa != other.kappa || self.n != other.n {
            return Err(Error::DimensionMismatch(
                "Hadamard polynomial product shape".into(),
            ));
        }
        let mut out = Self::zero(self.n, self.kappa);
        for (e, a) in &self.terms {
            for (f, b) in &other.terms {
                out.add_term(e.add(f), a.mul_unchecked(b));
            }
        }
        Ok(out)
    }

    /// c ⋆ f for a constant c.
    pub fn scale_vec(&self, c: &HadamardVec<S>) -> Self {
        Self::from_terms(
            self.n,
            self.kappa,
            self.terms
                .iter()
                .map(|(e, v)| (e.clone(), v.mul_unchecked(c))),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    /// The i-th coordinate as a scalar polynomial.
    pub fn coordinate(&self, i: usize) -> MPoly<S> {
        MPoly::from_terms(
            self.terms
                .iter()
                .map(|(e, c)| (e.clone(), c.coords()[i].clone())),
        )
    }

    /// cᵀ·f, a scalar polynomial.
    pub fn dot(&self, c: &HadamardVec<S>) -> MPoly<S> {
        MPoly::from_terms(self.terms.iter().map(|(e, v)| (e.clone(), v.dot(c))))
    }

    /// Drop coordinate `coord`, moving to H_{κ-1}.
    pub fn project_out(&self, coord: usize) -> Self {
        Self::from_terms(
            self.n,
            self.kappa - 1,
            self.terms
                .iter()
                .map(|(e, c)| (e.clone(), c.project_out(coord))),
        )
    }

    pub fn select_coords(&self, keep: &[usize]) -> Self {
        Self::from_terms(
            self.n,
            keep.len(),
            self.terms.iter().map(|(e, c)| (e.clone(), c.select(keep))),
        )
    }

    /// Keep the terms whose exponent satisfies `pred`.
    pub fn filter_terms(&self, pred: impl Fn(&Exponent) -> bool) -> Self {
        Self::from_terms(
            self.n,
            self.kappa,
            self.terms
                .iter()
                .filter(|(e, _)| pred(e))
                .map(|(e, c)| (e.clone(), c.clone())),
        )
    }

    /// Same polynomial viewed in a larger variable count.
    pub fn widen(&self, n: usize) -> Self {
        assert!(n >= self.n);
        HadamardPoly {
            n,
            kappa: self.kappa,
            terms: self.terms.clone(),
        }
    }

    /// Substitute x_i -> x_{map[i]} inside an m-variate ring.
    pub fn rename_vars(&self, m: usize, map: &[usize]) -> Self {
        Self::from_terms(
            m,
            self.kappa,
            self.terms.iter().map(|(e, c)| {
                let mut v = vec![0u32; m];
                for (i, &k) in e.as_slice().iter().enumerate() {
                    v[map[i]] += k;
                }
                (Exponent::new(v), c.clone())
            }),
        )
    }
}

impl HadamardPoly<Fp> {
    /// Canonical JSON: {n, kappa, terms: [{exp, coeffs}]}, exponents graded-lex.
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(e, c)| json!({"exp": e.to_vec(self.n), "coeffs": c.coords()}))
            .collect();
        json!({"n": self.n, "kappa": self.kappa, "terms": terms})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let err = |path: &str, msg: &str| Error::SchemaError {
            path: path.into(),
            msg: msg.into(),
        };
        let n = v["n"]
            .as_u64()
            .ok_or_else(|| err("/n", "expected an integer"))? as usize;
        let kappa = v["kappa"]
            .as_u64()
            .ok_or_else(|| err("/kappa", "expected an integer"))? as usize;
        let terms = v["terms"]
            .as_array()
            .ok_or_else(|| err("/terms", "expected an array"))?;
        let mut p = Self::zero(n, kappa);
        for (i, t) in terms.iter().enumerate() {
            let exp: Vec<u32> = serde_json::from_value(t["exp"].clone())
                .map_err(|e| err(&format!("/terms/{i}/exp"), &e.to_string()))?;
            let coeffs: Vec<Fp> = serde_json::from_value(t["coeffs"].clone())
                .map_err(|e| err(&format!("/terms/{i}/coeffs"), &e.to_string()))?;
            if exp.len() != n || coeffs.len() != kappa {
                return Err(err(
                    &format!("/terms/{i}"),
                    "wrong exponent or coefficient length",
                ));
            }
            p.add_term(Exponent::new(exp), HadamardVec::new(coeffs));
        }
        Ok(p)
    }

    /// A scalar polynomial as an element of H_1(F_p)[x].
    pub fn from_scalar(n: usize, f: &MPoly<Fp>) -> Self {
        Self::from_coordinates(n, std::slice::from_ref(f))
    }
}
