//! Transfer matrices: how the coefficients of a Hadamard polynomial move
//! under a shift x -> x + t followed by normalization by f(t).
//!
//! The formal shift t is always realized through one variable y with
//! t_i = y^{w_i}, so every symbolic computation is univariate.

mod minor;
mod product;

pub use minor::{
    build_nullspace_a, greedy_basis_from_largest, minor_det, reduce_factor,
    select_invertible_minor, tensor_entry, verify_tna_det, Radix, TnaCheck,
};
pub use product::{
    certify_product, project_units, shifted_product, verify_low_block_support,
    verify_transfer_depth3, ProductCertificate, ProductReport,
};

use std::collections::BTreeSet;

use serde::Serialize;

use crate::algebra::{ExactMatrix, Exponent, Fp, Index, RatFunc, Ring, UniPoly};
use crate::error::{Error, Result};
use crate::hadamard::{HadamardPoly, HadamardVec};

/// Default ceiling for the weight search.
pub const DEFAULT_MAX_WEIGHT: u64 = 1 << 20;

/// T: entry (v, u) is C(v, u). Lower triangular with unit diagonal when the
/// cone is listed in graded order.
pub fn transfer_matrix(cone: &[Exponent]) -> ExactMatrix<Fp> {
    ExactMatrix::from_fn(Index::exps(cone), Index::exps(cone), |i, j| {
        cone[i].binomial(&cone[j])
    })
}

/// T' = T^{-1} in closed form: entry (u, v) is (-1)^{|u-v|} C(u, v).
pub fn transfer_inverse(cone: &[Exponent]) -> ExactMatrix<Fp> {
    ExactMatrix::from_fn(Index::exps(cone), Index::exps(cone), |i, j| {
        signed_binomial(&cone[i], &cone[j])
    })
}

fn signed_binomial(u: &Exponent, v: &Exponent) -> Fp {
    if !v.divides(u) {
        return Fp::ZERO;
    }
    let b = u.binomial(v);
    if (u.total() - v.total()) % 2 == 1 {
        -b
    } else {
        b
    }
}

/// 𝒮* = 𝒮 without the zero exponent.
pub fn punctured(cone: &[Exponent]) -> Vec<Exponent> {
    cone.iter().filter(|e| !e.is_zero()).cloned().collect()
}

/// T'_{𝒮*,𝒮}: the inverse transfer matrix without its zero row.
pub fn punctured_inverse(cone: &[Exponent]) -> ExactMatrix<Fp> {
    let star = punctured(cone);
    ExactMatrix::from_fn(Index::exps(&star), Index::exps(cone), |i, j| {
        signed_binomial(&star[i], &cone[j])
    })
}

/// N_𝒞 with u-th diagonal entry y^{⟨w,u⟩}, or its inverse when `inverse`.
pub fn monomial_diag(idx: &[Exponent], w: &[u64], inverse: bool) -> ExactMatrix<RatFunc> {
    ExactMatrix::from_fn(Index::exps(idx), Index::exps(idx), |i, j| {
        if i != j {
            return RatFunc::zero();
        }
        let e = idx[i].dot(w) as i64;
        RatFunc::t_pow(if inverse { -e } else { e })
    })
}

/// y^{w_1}, ..., y^{w_n}.
pub fn shift_point(w: &[u64]) -> Vec<UniPoly> {
    w.iter()
        .map(|&e| UniPoly::monomial(Fp::one(), e as usize))
        .collect()
}

fn check_weights(f_n: usize, w: &[u64]) -> Result<()> {
    if w.len() != f_n {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} variables",
            w.len(),
            f_n
        )));
    }
    Ok(())
}

/// f(t) with t = y^w, over F_p[y]. Fails with NotAUnit at the first zero
/// coordinate.
pub fn value_at_shift(f: &HadamardPoly<Fp>, w: &[u64]) -> Result<HadamardVec<UniPoly>> {
    check_weights(f.n(), w)?;
    let v = f.map(|c| UniPoly::constant(*c)).eval(&shift_point(w));
    if let Some(coord) = v.coords().iter().position(|c| c.is_zero()) {
        return Err(Error::NotAUnit { coord });
    }
    Ok(v)
}

/// f(x + t) with t = y^w and coefficients in F_p[y].
pub fn shift_poly(f: &HadamardPoly<Fp>, w: &[u64]) -> Result<HadamardPoly<UniPoly>> {
    check_weights(f.n(), w)?;
    Ok(f.map(|c| UniPoly::constant(*c)).shift(&shift_point(w)))
}

/// f' = f(t)^{-1} ⋆ f(x + t) over H_κ(F_p(y)), together with f(t).
pub fn shift_normalize(
    f: &HadamardPoly<Fp>,
    w: &[u64],
) -> Result<(HadamardPoly<RatFunc>, HadamardVec<RatFunc>)> {
    let at = value_at_shift(f, w)?.map(|p| RatFunc::from_poly(p.clone()));
    let inv = at.had_inverse()?;
    let shifted = shift_poly(f, w)?.map(|p| RatFunc::from_poly(p.clone()));
    Ok((shifted.scale_vec(&inv), at))
}

/// Z: column u is Coef(u)(f), rows are the κ coordinates.
pub fn coefficient_columns<S: Ring>(f: &HadamardPoly<S>, cols: &[Exponent]) -> ExactMatrix<S> {
    let data = crate::hadamard::coefficient_matrix(f, cols);
    ExactMatrix {
        rows: Index::coords(f.kappa()),
        cols: Index::exps(cols),
        data,
    }
}

/// v ⋆ M: row i of M scaled by v_i.
pub fn had_scale_rows<S: Ring>(v: &HadamardVec<S>, m: &ExactMatrix<S>) -> ExactMatrix<S> {
    let mut out = m.clone();
    for (row, c) in out.data.iter_mut().zip(v.coords()) {
        for x in row.iter_mut() {
            *x = x.clone() * c;
        }
    }
    out
}

fn to_ratfunc(m: &ExactMatrix<Fp>) -> ExactMatrix<RatFunc> {
    m.map(|c| RatFunc::from_poly(UniPoly::constant(*c)))
}

/// Primal transfer equation: Z' = f(t)^{-1} ⋆ Z N_𝒮 T N_𝒮^{-1}, checked
/// exactly over F_p(y).
pub fn verify_transfer_primal(f: &HadamardPoly<Fp>, w: &[u64]) -> Result<bool> {
    let cone = f.cone();
    let (fp, at) = shift_normalize(f, w)?;
    let lhs = coefficient_columns(&fp, &cone);
    let z = to_ratfunc(&coefficient_columns(f, &cone));
    let rhs = z
        .mul(&monomial_diag(&cone, w, false))?
        .mul(&to_ratfunc(&transfer_matrix(&cone)))?
        .mul(&monomial_diag(&cone, w, true))?;
    let rhs = had_scale_rows(&at.had_inverse()?, &rhs);
    Ok(lhs == rhs)
}

/// Modular transfer equation: every column of
/// f(t)^{-1} ⋆ Z - Z'_{𝒮*} N_{𝒮*} T'_{𝒮*,𝒮} N_𝒮^{-1} is a multiple of
/// z'_0 = 1, and T'_{𝒮*,𝒮} is strongly full.
pub fn verify_transfer_mod(f: &HadamardPoly<Fp>, w: &[u64]) -> Result<bool> {
    let cone = f.cone();
    let star = punctured(&cone);
    if star.is_empty() {
        return Err(Error::PreconditionViolated(
            "constant factor has an empty punctured cone".into(),
        ));
    }
    let (fp, at) = shift_normalize(f, w)?;
    if !fp
        .coeff(&Exponent::zero())
        .coords()
        .iter()
        .all(|c| c.is_one())
    {
        return Ok(false);
    }
    let tp = punctured_inverse(&cone);
    let lhs = had_scale_rows(
        &at.had_inverse()?,
        &to_ratfunc(&coefficient_columns(f, &cone)),
    );
    let rhs = coefficient_columns(&fp, &star)
        .mul(&monomial_diag(&star, w, false))?
        .mul(&to_ratfunc(&tp))?
        .mul(&monomial_diag(&cone, w, true))?;
    let diff = lhs.sub(&rhs)?;
    let along_one = (0..diff.ncols()).all(|j| {
        let col = diff.column(j);
        col.iter().all(|x| *x == col[0])
    });
    Ok(along_one && tp.is_strongly_full()?)
}

/// Every sum e_1 + ... + e_ℓ with e_i in cone i.
pub fn product_exponents(cones: &[Vec<Exponent>]) -> Vec<Exponent> {
    let mut acc = vec![Exponent::zero()];
    for c in cones {
        acc = acc
            .iter()
            .flat_map(|a| c.iter().map(move |e| a.add(e)))
            .collect();
    }
    acc
}

/// Whether ⟨w,·⟩ is injective on the product exponents.
pub fn separates(w: &[u64], cones: &[Vec<Exponent>]) -> bool {
    let prods: BTreeSet<Exponent> = product_exponents(cones).into_iter().collect();
    let mut seen = BTreeSet::new();
    prods.iter().all(|e| seen.insert(e.dot(w)))
}

/// Positive weights, chosen one variable at a time as the smallest value
/// keeping the partial weights injective on the projected product
/// exponents. Fails if some variable needs a weight above `max_weight`.
pub fn build_weight_vector(cones: &[Vec<Exponent>], n: usize, max_weight: u64) -> Result<Vec<u64>> {
    let prods: Vec<Exponent> = product_exponents(cones)
        .into_iter()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut w = vec![1u64; n];
    let mut partial = vec![0u64; prods.len()];
    for j in 0..n {
        let pairs: BTreeSet<(u64, u32)> = prods
            .iter()
            .zip(&partial)
            .map(|(e, &p)| (p, e.get(j)))
            .collect();
        if pairs.iter().all(|&(_, e)| e == 0) {
            continue;
        }
        let mut chosen = None;
        for wj in 1..=max_weight {
            let mut vals = BTreeSet::new();
            if pairs.iter().all(|&(p, e)| vals.insert(p + wj * e as u64)) {
                chosen = Some(wj);
                break;
            }
        }
        let wj = chosen.ok_or(Error::SearchExhausted { max_weight })?;
        w[j] = wj;
        for (p, e) in partial.iter_mut().zip(&prods) {
            *p += wj * e.get(j) as u64;
        }
    }
    debug_assert!(separates(&w, cones));
    Ok(w)
}

/// JSON forensics for a single factor: Z, Z', T, T'.
#[derive(Serialize)]
pub struct TransferDump {
    pub z: serde_json::Value,
    pub z_prime: serde_json::Value,
    pub t: serde_json::Value,
    pub t_prime: serde_json::Value,
}

pub fn dump_factor(f: &HadamardPoly<Fp>, w: &[u64]) -> Result<TransferDump> {
    let cone = f.cone();
    let (fp, _) = shift_normalize(f, w)?;
    Ok(TransferDump {
        z: coefficient_columns(f, &cone).to_debug_json(),
        z_prime: coefficient_columns(&fp, &cone).to_debug_json(),
        t: transfer_matrix(&cone).to_debug_json(),
        t_prime: transfer_inverse(&cone).to_debug_json(),
    })
}
