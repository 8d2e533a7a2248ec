use std::collections::BTreeSet;

use serde::Serialize;

use crate::algebra::{Exponent, Fp, MPoly};
use crate::error::{Error, Result};
use crate::hadamard::HadamardPoly;

/// One summand α·t_layer^a of the image of x_var.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftTerm {
    pub var: usize,
    pub layer: usize,
    pub alpha: Fp,
    pub exponent: u64,
}

/// A Hadamard coordinate dropped while building a layer because it was
/// identically zero there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Projection {
    pub layer: usize,
    pub coord: usize,
    pub reason: String,
}

/// x_i ↦ x_i + Σ_h α_{h,i} t_h^{a_{h,i}}. Layers are added from the top
/// down, and adding one never touches the layers already present.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftMap {
    pub n: usize,
    pub terms: Vec<ShiftTerm>,
    pub projections: Vec<Projection>,
}

impl ShiftMap {
    pub fn identity(n: usize) -> Self {
        ShiftMap {
            n,
            terms: Vec::new(),
            projections: Vec::new(),
        }
    }

    pub fn layers(&self) -> BTreeSet<usize> {
        self.terms.iter().map(|t| t.layer).collect()
    }

    /// Number of t variables needed to write the map down.
    pub fn t_vars(&self) -> usize {
        self.terms.iter().map(|t| t.layer + 1).max().unwrap_or(0)
    }

    /// τ_h from τ_{h+1}: adds x_i ↦ … + α_i t_layer^{a_i}. The new layer
    /// must lie strictly below every existing one.
    pub fn extend(&self, layer: usize, alphas: &[Fp], exps: &[u64]) -> Result<Self> {
        if alphas.len() != self.n || exps.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "layer {layer} has {} shifts and {} exponents for {} variables",
                alphas.len(),
                exps.len(),
                self.n
            )));
        }
        if self.layers().iter().any(|&l| l <= layer) {
            return Err(Error::PreconditionViolated(format!(
                "layer {layer} is not below the existing layers"
            )));
        }
        let mut out = self.clone();
        out.terms.extend(
            (0..self.n)
                .filter(|&i| !alphas[i].is_zero())
                .map(|i| ShiftTerm {
                    var: i,
                    layer,
                    alpha: alphas[i],
                    exponent: exps[i],
                }),
        );
        Ok(out)
    }

    /// The part of the map living on layers strictly above `layer`.
    pub fn restrict_above(&self, layer: usize) -> Self {
        ShiftMap {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|t| t.layer > layer)
                .cloned()
                .collect(),
            projections: self
                .projections
                .iter()
                .filter(|p| p.layer > layer)
                .cloned()
                .collect(),
        }
    }

    pub fn record_projection(&mut self, layer: usize, coord: usize, reason: impl Into<String>) {
        self.projections.push(Projection {
            layer,
            coord,
            reason: reason.into(),
        });
    }

    /// Images τ(x_i) − x_i as polynomials in `nt` layer variables.
    pub fn translations(&self, nt: usize) -> Vec<MPoly<Fp>> {
        let mut out = vec![MPoly::new(); self.n];
        for t in &self.terms {
            assert!(t.layer < nt, "layer {} needs more t variables", t.layer);
            let mut e = Exponent::zero();
            e.set(t.layer, t.exponent as u32);
            out[t.var].add_term(e, t.alpha);
        }
        out
    }

    /// τ(f) with coefficients in F_p[t_0, …, t_{nt-1}].
    pub fn apply(&self, f: &HadamardPoly<Fp>, nt: usize) -> HadamardPoly<MPoly<Fp>> {
        self.apply_lifted(&f.map(|c| MPoly::constant(*c)), nt)
    }

    pub fn apply_lifted(&self, f: &HadamardPoly<MPoly<Fp>>, nt: usize) -> HadamardPoly<MPoly<Fp>> {
        f.shift(&self.translations(nt))
    }

    /// The point x + τ-translation at concrete layer values t.
    pub fn translate(&self, x: &[Fp], t: &[Fp]) -> Vec<Fp> {
        let mut out = x.to_vec();
        for term in &self.terms {
            out[term.var] = out[term.var] + term.alpha * t[term.layer].pow(term.exponent);
        }
        out
    }

    /// Degree bound in t_layer of τ(C) for any C whose degree in each
    /// variable is at most `var_degree`.
    pub fn layer_degree(&self, layer: usize, var_degree: u32) -> u64 {
        self.terms
            .iter()
            .filter(|t| t.layer == layer)
            .map(|t| t.exponent.saturating_mul(var_degree as u64))
            .fold(0u64, |a, b| a.saturating_add(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extension_is_monotone() {
        let one = vec![Fp::one(); 2];
        let a = ShiftMap::identity(2).extend(1, &one, &[1, 2]).unwrap();
        let b = a.extend(0, &one, &[3, 4]).unwrap();
        assert_eq!(b.restrict_above(0), a);
        assert!(b.extend(0, &one, &[1, 1]).is_err());
        assert_eq!(
            b.translate(&[Fp::ZERO, Fp::ZERO], &[Fp::new(2), Fp::new(3)]),
            vec![Fp::new(11), Fp::new(25)]
        );
        assert_eq!(b.layer_degree(0, 2), 14);
    }
}
