use serde::Serialize;

use super::{HadamardPoly, Partition};
use crate::algebra::{linalg, Exponent, Ring, Scalar};
use crate::error::Result;

/// How the weight of an exponent is measured.
#[derive(Clone, Copy, Debug)]
pub enum Weighting<'a> {
    /// s(e): the number of variables present.
    Support,
    /// bs(e): the number of partition blocks touched.
    Block(&'a Partition),
}

impl Weighting<'_> {
    pub fn weight(&self, e: &Exponent) -> Result<usize> {
        match self {
            Weighting::Support => Ok(e.support_size()),
            Weighting::Block(p) => p.block_weight(e),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Concentration {
    pub concentrated: bool,
    pub rank_low: usize,
    pub rank_full: usize,
}

/// The κ × |exps| matrix whose columns are Coef(e)(f).
pub fn coefficient_matrix<S: Ring>(f: &HadamardPoly<S>, exps: &[Exponent]) -> Vec<Vec<S>> {
    let cols: Vec<_> = exps.iter().map(|e| f.coeff(e)).collect();
    (0..f.kappa())
        .map(|i| cols.iter().map(|c| c.coords()[i].clone()).collect())
        .collect()
}

/// Whether the coefficients of weight below ℓ span every coefficient of f.
/// Ranks are exact; over F_p(t) or polynomial rings they come from
/// fraction-free elimination.
pub fn is_l_concentrated<S: Scalar>(
    f: &HadamardPoly<S>,
    ell: usize,
    mode: Weighting<'_>,
) -> Result<Concentration> {
    let mut low = Vec::new();
    let mut all = Vec::new();
    for e in f.terms().keys() {
        if mode.weight(e)? < ell {
            low.push(e.clone());
        }
        all.push(e.clone());
    }
    let rank_low = linalg::rank(&coefficient_matrix(f, &low));
    let rank_full = if rank_low == f.kappa() || low.len() == all.len() {
        rank_low
    } else {
        linalg::rank(&coefficient_matrix(f, &all))
    };
    debug_assert!(rank_low <= rank_full && rank_full <= f.kappa());
    Ok(Concentration {
        concentrated: rank_low == rank_full,
        rank_low,
        rank_full,
    })
}
