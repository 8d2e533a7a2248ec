use std::collections::BTreeSet;

use super::shift_map::ShiftMap;
use crate::algebra::{prime, Exponent, Fp, Ring, Scalar};
use crate::error::{Error, Result};
use crate::hadamard::{is_l_concentrated, Concentration, HadamardPoly, Weighting};
use crate::sparsepit::kronecker_points;
use crate::transfer::{build_weight_vector, shift_poly, DEFAULT_MAX_WEIGHT};
use crate::util::{ceil_log2, subsets_up_to};

/// ℓ′ = 1 + min(2⌈log₂(κ·s)⌉, μ) for a nonzero f.
pub fn sparse_shift_ell<S: Ring>(f: &HadamardPoly<S>) -> Result<usize> {
    if f.is_zero() {
        return Err(Error::EmptyPolynomial);
    }
    let ks = (f.kappa() as u128) * (f.sparsity() as u128);
    Ok(1 + (2 * ceil_log2(ks) as usize).min(f.mu()?))
}

/// Exponents b with x_i ↦ x_i + t^{b_i} making f ℓ′-concentrated.
///
/// f is lifted to a product of univariates, one per variable, whose
/// Hadamard coordinates are indexed by the support of f. The weights
/// separate every monomial of that product, so the low block support
/// argument applies to every ℓ′-subset of variables at once.
pub fn sparse_shift_weights(f: &HadamardPoly<Fp>, delta: u32) -> Result<(Vec<u64>, usize)> {
    let ell = sparse_shift_ell(f)?;
    let n = f.n();
    let mut cones = Vec::with_capacity(n);
    for i in 0..n {
        let d = f.degree_in(i);
        if d > delta {
            return Err(Error::PreconditionViolated(format!(
                "variable {} has degree {d} above the bound {delta}",
                i + 1
            )));
        }
        if d > 0 {
            cones.push(
                (0..=d)
                    .map(|k| {
                        let mut e = Exponent::zero();
                        e.set(i, k);
                        e
                    })
                    .collect(),
            );
        }
    }
    let w = build_weight_vector(&cones, n, DEFAULT_MAX_WEIGHT)?;
    Ok((w, ell))
}

/// σ: x_i ↦ x_i + t^{b_i} on layer 0, with ℓ′.
pub fn sparse_shift(f: &HadamardPoly<Fp>, delta: u32) -> Result<(ShiftMap, usize)> {
    let (w, ell) = sparse_shift_weights(f, delta)?;
    let map = ShiftMap::identity(f.n()).extend(0, &vec![Fp::one(); f.n()], &w)?;
    Ok((map, ell))
}

/// Exact support-mode concentration of f(x + t^b) over F_p(t).
pub fn check_sparse_shift(f: &HadamardPoly<Fp>, w: &[u64], ell: usize) -> Result<Concentration> {
    is_l_concentrated(&shift_poly(f, w)?, ell, Weighting::Support)
}

/// Points hitting every polynomial of per-variable degree ≤ δ that has a
/// nonzero coefficient of support below ℓ: Kronecker grids on every
/// variable set of size min(ℓ − 1, n), zero elsewhere.
pub fn low_support_points(n: usize, ell: usize, delta: u32) -> Result<Vec<Vec<Fp>>> {
    let r = ell.saturating_sub(1).min(n);
    let grid = kronecker_points(&vec![delta; r])?;
    let mut out = BTreeSet::new();
    for x in subsets_up_to(n, r).into_iter().filter(|x| x.len() == r) {
        for g in &grid {
            let mut pt = vec![Fp::ZERO; n];
            for (&i, &v) in x.iter().zip(g) {
                pt[i] = v;
            }
            out.insert(pt);
        }
    }
    Ok(out.into_iter().collect())
}

fn has_unit_value<S: Scalar>(f: &HadamardPoly<S>, alpha: &[Fp]) -> bool {
    let pt: Vec<S> = alpha.iter().map(|&a| S::from_fp(a)).collect();
    f.eval(&pt).coords().iter().all(|c| !c.is_zero())
}

/// α ∈ F_p^n with every coordinate of f(α) nonzero, for f assumed
/// ℓ-concentrated with per-variable degree ≤ δ.
///
/// The low-support points σ_1..σ_N hit each coordinate separately. The
/// curve σ(u, v) = v·Σ_j L_j(u)·σ_j passes through all of them (L_j the
/// Lagrange basis on nodes 0..N−1), so every coordinate of f(σ(u, v)) is a
/// nonzero bivariate polynomial; a grid sized by the degrees of their
/// product contains a common nonvanishing point.
pub fn preserve_invertibility_alpha<S: Scalar>(
    f: &HadamardPoly<S>,
    ell: usize,
    delta: u32,
) -> Result<Vec<Fp>> {
    alpha_search(f, ell, delta, false)
}

/// Same as `preserve_invertibility_alpha` with every α_i also nonzero.
pub fn preserve_invertibility_alpha_nonzero<S: Scalar>(
    f: &HadamardPoly<S>,
    ell: usize,
    delta: u32,
) -> Result<Vec<Fp>> {
    alpha_search(f, ell, delta, true)
}

fn alpha_search<S: Scalar>(
    f: &HadamardPoly<S>,
    ell: usize,
    delta: u32,
    nonzero: bool,
) -> Result<Vec<Fp>> {
    let n = f.n();
    for c in 0..f.kappa() {
        if f.coordinate(c).is_empty() {
            return Err(Error::NoCoordinateWitness { coord: c });
        }
    }
    let ok = |a: &[Fp]| (!nonzero || a.iter().all(|x| !x.is_zero())) && has_unit_value(f, a);
    let zero = vec![Fp::ZERO; n];
    if ok(&zero) {
        return Ok(zero);
    }
    let mut pts = low_support_points(n, ell, delta)?;
    if nonzero {
        pts.push(vec![Fp::one(); n]);
    }
    let big_n = pts.len() as u64;
    let deg = f.total_degree();
    let extra = if nonzero { n as u64 } else { 0 };
    let kappa = f.kappa() as u64;
    let du = (kappa * deg + extra).saturating_mul(big_n - 1);
    let dv = kappa * deg + extra;
    let p = prime();
    if du.max(dv).max(big_n) >= p {
        return Err(Error::FieldTooSmall {
            needed: du.max(dv).max(big_n) as u128 + 1,
            prime: p,
        });
    }
    // Barycentric weights on the nodes 0..N−1.
    let nodes: Vec<Fp> = (0..big_n).map(Fp::new).collect();
    let bary: Vec<Fp> = (0..nodes.len())
        .map(|j| {
            let prod = (0..nodes.len())
                .filter(|&m| m != j)
                .fold(Fp::one(), |acc, m| acc * (nodes[j] - nodes[m]));
            prod.inv().expect("distinct nodes")
        })
        .collect();
    let curve_at = |u: u64| -> Vec<Fp> {
        if u < big_n {
            return pts[u as usize].clone();
        }
        let uf = Fp::new(u);
        let diffs: Vec<Fp> = nodes.iter().map(|&b| uf - b).collect();
        let full = diffs.iter().fold(Fp::one(), |a, &d| a * d);
        let mut out = vec![Fp::ZERO; n];
        for (j, pt) in pts.iter().enumerate() {
            let l = full * bary[j] * diffs[j].inv().expect("u is not a node");
            for (o, &x) in out.iter_mut().zip(pt) {
                *o = *o + l * x;
            }
        }
        out
    };
    for u in 0..=du {
        let base = curve_at(u);
        for v in 1..=dv {
            let vf = Fp::new(v);
            let a: Vec<Fp> = base.iter().map(|&x| vf * x).collect();
            if ok(&a) {
                return Ok(a);
            }
        }
    }
    Err(Error::NoAlphaFound {
        tried: (du + 1).saturating_mul(dv),
    })
}
