use super::{DiagonalCircuit, Node, SetDepthFormula};
use crate::algebra::{Fp, MPoly};
use crate::error::{Error, Result};
use crate::hadamard::{HadamardPoly, HadamardVec};

/// κ sub-formulas sharing one variable scope, viewed as a single
/// H_κ-valued polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StackedFactor {
    /// Product layer (0-based) whose gates sit directly below these nodes.
    pub layer: usize,
    pub scope: Vec<usize>,
    pub coords: Vec<Node>,
}

/// f = W · (f_1 ⋆ ... ⋆ f_d) where W is block diagonal: coordinate i of
/// the input is Σ_p weights[i*k + p] times coordinate (i, p) of the product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HadamardProductForm {
    pub kappa_in: usize,
    pub k: usize,
    pub weights: Vec<Fp>,
    pub factors: Vec<StackedFactor>,
}

impl StackedFactor {
    pub fn kappa(&self) -> usize {
        self.coords.len()
    }

    pub fn evaluate(&self, pt: &[Fp]) -> HadamardVec<Fp> {
        HadamardVec::new(self.coords.iter().map(|c| c.evaluate(pt)).collect())
    }

    pub fn expand(&self, n: usize, limit: usize) -> Result<HadamardPoly<Fp>> {
        let polys = self
            .coords
            .iter()
            .map(|c| c.expand(limit))
            .collect::<Result<Vec<MPoly<Fp>>>>()?;
        Ok(HadamardPoly::from_coordinates(n, &polys))
    }

    /// Split into block weights and stacked factors one layer down.
    pub fn to_hadamard_product(&self, f: &SetDepthFormula) -> Result<HadamardProductForm> {
        if self.layer >= f.structural_levels() {
            return Err(Error::NotNormalized);
        }
        let positions = f.positions(self.layer, &self.scope);
        let mut k = None;
        for c in &self.coords {
            let Node::Sum(ts) = c else {
                return Err(Error::NotNormalized);
            };
            if *k.get_or_insert(ts.len()) != ts.len() {
                return Err(Error::NotNormalized);
            }
            if ts.iter().any(|t| t.factors.len() != positions.len()) {
                return Err(Error::NotNormalized);
            }
        }
        let k = k.unwrap_or(0);
        let mut weights = Vec::with_capacity(self.kappa() * k);
        let mut factors: Vec<StackedFactor> = positions
            .iter()
            .map(|b| StackedFactor {
                layer: self.layer + 1,
                scope: b.clone(),
                coords: Vec::with_capacity(self.kappa() * k),
            })
            .collect();
        for c in &self.coords {
            let Node::Sum(ts) = c else { unreachable!() };
            for t in ts {
                weights.push(t.weight);
                for (j, g) in t.factors.iter().enumerate() {
                    if !g.vars().iter().all(|v| positions[j].contains(v)) {
                        return Err(Error::NotNormalized);
                    }
                    factors[j].coords.push(g.clone());
                }
            }
        }
        Ok(HadamardProductForm {
            kappa_in: self.kappa(),
            k,
            weights,
            factors,
        })
    }
}

impl HadamardProductForm {
    pub fn kappa(&self) -> usize {
        self.kappa_in * self.k
    }

    /// The product D = f_1 ⋆ ... ⋆ f_d at a point.
    pub fn product_at(&self, pt: &[Fp]) -> HadamardVec<Fp> {
        self.factors
            .iter()
            .fold(HadamardVec::ones(self.kappa()), |acc, f| {
                acc.mul_unchecked(&f.evaluate(pt))
            })
    }

    /// W · D at a point: recovers the stacked input.
    pub fn evaluate(&self, pt: &[Fp]) -> HadamardVec<Fp> {
        let d = self.product_at(pt);
        HadamardVec::new(
            (0..self.kappa_in)
                .map(|i| {
                    (0..self.k).fold(Fp::ZERO, |acc, p| {
                        acc + self.weights[i * self.k + p] * d.coords()[i * self.k + p]
                    })
                })
                .collect(),
        )
    }

    /// Expanded product D as a Hadamard polynomial.
    pub fn expand_product(&self, n: usize, limit: usize) -> Result<HadamardPoly<Fp>> {
        let mut acc = HadamardPoly::constant(n, HadamardVec::ones(self.kappa()));
        for f in &self.factors {
            acc = acc.had_mul(&f.expand(n, limit)?)?;
        }
        Ok(acc)
    }

    pub fn weight_vector(&self) -> HadamardVec<Fp> {
        HadamardVec::new(self.weights.clone())
    }
}

/// Top-level split C = cᵀ · (f_1 ⋆ ... ⋆ f_d). The formula must already be
/// fanin-normalized.
pub fn to_hadamard_product(f: &SetDepthFormula) -> Result<HadamardProductForm> {
    let top = StackedFactor {
        layer: 0,
        scope: (0..f.n).collect(),
        coords: vec![f.root.clone()],
    };
    top.to_hadamard_product(f)
}

/// (w, F, d) with F = (f_1, ..., f_k) over H_k so that C = wᵀ · F^d.
pub fn diagonal_to_hadamard(c: &DiagonalCircuit) -> (HadamardVec<Fp>, HadamardPoly<Fp>, u32) {
    let polys: Vec<MPoly<Fp>> = (0..c.k()).map(|i| c.form_poly(i)).collect();
    (
        HadamardVec::new(c.weights.clone()),
        HadamardPoly::from_coordinates(c.n, &polys),
        c.power,
    )
}
