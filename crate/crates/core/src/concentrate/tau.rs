use serde::Serialize;

use super::schedule::{ell_schedule, EllSchedule};
use super::shift_map::ShiftMap;
use super::sparse::{preserve_invertibility_alpha_nonzero, sparse_shift_weights};
use crate::algebra::{linalg, Exponent, Fp, MPoly, Ring};
use crate::error::{Error, Result};
use crate::formula::{to_hadamard_product, ClassParams, SetDepthFormula, StackedFactor};
use crate::hadamard::{
    coefficient_matrix, is_l_concentrated, Concentration, HadamardPoly, Weighting,
};
use crate::oracle::DEFAULT_LIMIT;
use crate::sparsepit::{kronecker_point_count, kronecker_weights};
use crate::transfer::{build_weight_vector, DEFAULT_MAX_WEIGHT};

fn as_usize(v: u128) -> usize {
    usize::try_from(v).unwrap_or(usize::MAX)
}

/// τ₀ for a whole class, read off the parameters alone: every layer uses
/// Kronecker exponents a_{h,i} = (δ+1)^i and α = 1. The exponents are
/// injective on all monomials of per-variable degree ≤ δ, so they separate
/// the cones of every product the induction meets, and each f̂_j(t^a) is a
/// unit whenever every coordinate of f̂_j is a nonzero polynomial.
pub fn build_tau(params: &ClassParams) -> Result<ShiftMap> {
    params.validate()?;
    let degs = vec![params.var_degree(); params.n];
    if kronecker_point_count(&degs) > u32::MAX as u128 {
        return Err(Error::TooLarge(format!(
            "Kronecker exponents for n = {}",
            params.n
        )));
    }
    let w = kronecker_weights(&degs);
    let ones = vec![Fp::one(); params.n];
    let mut map = ShiftMap::identity(params.n);
    for h in (0..params.height).rev() {
        map = map.extend(h, &ones, &w)?;
    }
    Ok(map)
}

#[derive(Clone, Debug, Serialize)]
pub struct LayerRecord {
    pub layer: usize,
    /// Concentration the factors carry into this layer.
    pub incoming_ell: usize,
    pub weights: Vec<u64>,
    pub alphas: Vec<Fp>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TauConstruction {
    pub schedule: EllSchedule,
    pub map: ShiftMap,
    pub layers: Vec<LayerRecord>,
}

fn stacks_by_layer(f: &SetDepthFormula) -> Result<Vec<Vec<StackedFactor>>> {
    let mut out = vec![vec![StackedFactor {
        layer: 0,
        scope: (0..f.n).collect(),
        coords: vec![f.root.clone()],
    }]];
    for _ in 0..f.structural_levels() {
        let mut next = Vec::new();
        for s in out.last().unwrap() {
            next.extend(s.to_hadamard_product(f)?.factors);
        }
        out.push(next);
    }
    Ok(out)
}

fn concat_coords<S: Ring>(polys: &[HadamardPoly<S>]) -> Vec<MPoly<S>> {
    polys
        .iter()
        .flat_map(|p| (0..p.kappa()).map(move |c| p.coordinate(c)))
        .collect()
}

/// Terms of support below ℓ.
pub fn truncate<S: Ring>(f: &HadamardPoly<S>, ell: usize) -> HadamardPoly<S> {
    HadamardPoly::from_terms(
        f.n(),
        f.kappa(),
        f.terms()
            .iter()
            .filter(|(e, _)| e.support_size() < ell)
            .map(|(e, c)| (e.clone(), c.clone())),
    )
}

/// The inductive construction run on one formula: sparse shift (even depth)
/// or identity at the top, then per layer Theorem-3.1 exponents from the
/// truncated factors and α from the invertibility-preserving search.
/// The formula must be fanin-normalized.
pub fn build_tau_for(f: &SetDepthFormula) -> Result<TauConstruction> {
    let params = f.params();
    if !f.is_normalized(params.k) {
        return Err(Error::NotNormalized);
    }
    let schedule = ell_schedule(&params);
    let n = f.n;
    let nt = f.height();
    let delta = params.var_degree();
    let stacks = stacks_by_layer(f)?;
    let levels = f.structural_levels();
    let mut map = ShiftMap::identity(n);
    let mut layers = Vec::new();

    if f.depth % 2 == 0 {
        let leaves = stacks[levels]
            .iter()
            .map(|s| s.expand(n, DEFAULT_LIMIT))
            .collect::<Result<Vec<_>>>()?;
        let stacked = HadamardPoly::from_coordinates(n, &concat_coords(&leaves));
        if !stacked.is_zero() {
            let (w, ell) = sparse_shift_weights(&stacked, delta)?;
            map = map.extend(nt - 1, &vec![Fp::one(); n], &w)?;
            layers.push(LayerRecord {
                layer: nt - 1,
                incoming_ell: ell,
                weights: w,
                alphas: vec![Fp::one(); n],
            });
        }
    }

    for h in (0..levels).rev() {
        let incoming = as_usize(schedule.get(h + 1).unwrap_or(2));
        let mut weights = vec![1u64; n];
        let mut hats = Vec::new();
        for s in &stacks[h] {
            let form = s.to_hadamard_product(f)?;
            let mut cones = Vec::with_capacity(form.factors.len());
            for fj in &form.factors {
                let hat = map.apply(&fj.expand(n, DEFAULT_LIMIT)?, nt);
                cones.push(truncate(&hat, incoming).cone());
                hats.push(hat);
            }
            let w = build_weight_vector(&cones, n, DEFAULT_MAX_WEIGHT)?;
            for &i in &s.scope {
                weights[i] = w[i];
            }
        }
        // f̂_j(x ⋆ t_h^a): the unit condition on f̂_j(α t_h^a) becomes the
        // unit condition on this polynomial at α.
        let scaled: Vec<MPoly<MPoly<Fp>>> = concat_coords(&hats)
            .into_iter()
            .map(|p| {
                MPoly::from_terms(p.terms().iter().map(|(e, c)| {
                    let mut te = Exponent::zero();
                    te.set(h, e.dot(&weights) as u32);
                    (e.clone(), c.mul_term(&te, &Fp::one()))
                }))
            })
            .collect();
        let mut kept = Vec::new();
        for (c, p) in scaled.into_iter().enumerate() {
            if p.is_empty() {
                map.record_projection(h, c, "factor coordinate is identically zero");
            } else {
                kept.push(p);
            }
        }
        let alphas = if kept.is_empty() {
            vec![Fp::one(); n]
        } else {
            preserve_invertibility_alpha_nonzero(
                &HadamardPoly::from_coordinates(n, &kept),
                incoming,
                delta,
            )?
        };
        map = map.extend(h, &alphas, &weights)?;
        layers.push(LayerRecord {
            layer: h,
            incoming_ell: incoming,
            weights,
            alphas,
        });
    }
    Ok(TauConstruction {
        schedule,
        map,
        layers,
    })
}

/// Support-mode concentration of τ(D₀), exactly over F_p(t_0, …).
pub fn verify_tau_concentration(
    f: &SetDepthFormula,
    map: &ShiftMap,
    ell: usize,
) -> Result<Concentration> {
    let d = to_hadamard_product(f)?.expand_product(f.n, DEFAULT_LIMIT)?;
    let shifted = map.apply(&d, map.t_vars().max(1));
    is_l_concentrated(&shifted, ell, Weighting::Support)
}

/// Basis of the coefficient span, greedily from lowest support and then
/// graded-lex order.
pub fn low_support_basis(f: &HadamardPoly<MPoly<Fp>>) -> Vec<Exponent> {
    let mut exps: Vec<Exponent> = f.terms().keys().cloned().collect();
    exps.sort_by(|a, b| (a.support_size(), a).cmp(&(b.support_size(), b)));
    let full = linalg::rank(&coefficient_matrix(f, &exps));
    let mut basis: Vec<Exponent> = Vec::new();
    for e in exps {
        if basis.len() == full {
            break;
        }
        basis.push(e);
        if linalg::rank(&coefficient_matrix(f, &basis)) < basis.len() {
            basis.pop();
        }
    }
    basis
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DetCheck {
    /// Shifted basis coefficients lie in the span of the unshifted ones.
    pub spans: bool,
    /// det M′ ≡ 1 (mod t_layer).
    pub one_mod_t: bool,
    pub invertible: bool,
}

impl DetCheck {
    pub fn holds(&self) -> bool {
        self.spans && self.one_mod_t && self.invertible
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisChange {
    pub basis: Vec<Exponent>,
    pub full: DetCheck,
    pub truncated: DetCheck,
}

impl BasisChange {
    pub fn holds(&self) -> bool {
        self.full.holds() && self.truncated.holds()
    }
}

fn det_check(
    f: &HadamardPoly<MPoly<Fp>>,
    basis: &[Exponent],
    shift: &[MPoly<Fp>],
    layer: usize,
) -> DetCheck {
    let z = coefficient_matrix(f, basis);
    let zs = coefficient_matrix(&f.shift(shift), basis);
    let b = basis.len();
    let joined: Vec<Vec<MPoly<Fp>>> = z
        .iter()
        .zip(&zs)
        .map(|(a, s)| a.iter().chain(s).cloned().collect())
        .collect();
    let spans = linalg::rank(&z) == b && linalg::rank(&joined) == b;
    // Rows of an invertible b × b minor of Z.
    let mut rows: Vec<usize> = Vec::new();
    for r in 0..z.len() {
        if rows.len() == b {
            break;
        }
        rows.push(r);
        let sub: Vec<Vec<MPoly<Fp>>> = rows.iter().map(|&i| z[i].clone()).collect();
        if linalg::rank(&sub) < rows.len() {
            rows.pop();
        }
    }
    if rows.len() < b {
        return DetCheck {
            spans,
            one_mod_t: false,
            invertible: false,
        };
    }
    let pick = |m: &[Vec<MPoly<Fp>>]| -> Vec<Vec<MPoly<Fp>>> {
        rows.iter().map(|&i| m[i].clone()).collect()
    };
    let d = linalg::det_domain(&pick(&z));
    let ds = linalg::det_domain(&pick(&zs));
    // det M′ = ds / d with d free of t_layer.
    let free = d.terms().keys().all(|e| e.get(layer) == 0);
    let diff = ds.clone() - &d;
    DetCheck {
        spans,
        one_mod_t: free && diff.terms().keys().all(|e| e.get(layer) > 0),
        invertible: !ds.is_zero() && !d.is_zero(),
    }
}

/// Builds the change of basis from the coefficients of f̂ to those of
/// f̂(x + shift) and of ĝ(x + shift), with ĝ the truncation of f̂, and checks
/// both determinants are ≡ 1 mod t_layer. The two low-support bases must
/// agree.
pub fn verify_basis_change(
    f_hat: &HadamardPoly<MPoly<Fp>>,
    g_hat: &HadamardPoly<MPoly<Fp>>,
    shift: &[MPoly<Fp>],
    layer: usize,
) -> Result<BasisChange> {
    let basis = low_support_basis(f_hat);
    if low_support_basis(g_hat) != basis {
        return Err(Error::BasisMismatch { factor: 0 });
    }
    Ok(BasisChange {
        full: det_check(f_hat, &basis, shift, layer),
        truncated: det_check(g_hat, &basis, shift, layer),
        basis,
    })
}
