//! Products of Hadamard polynomials on disjoint variables: the tensored
//! transfer equation and the full low-block-support certificate.

use std::collections::BTreeSet;

use serde::Serialize;

use super::minor::{self, Radix, TnaCheck};
use super::{
    build_weight_vector, punctured_inverse, shift_poly, value_at_shift, DEFAULT_MAX_WEIGHT,
};
use crate::algebra::{linalg, Exponent, Fp, Ring, UniPoly};
use crate::error::{Error, Result};
use crate::hadamard::{
    is_l_concentrated, Concentration, HadamardPoly, HadamardVec, Partition, Weighting,
};

fn var_set(f: &HadamardPoly<Fp>) -> BTreeSet<usize> {
    f.terms().keys().flat_map(|e| e.support()).collect()
}

/// Variable blocks of the factors, checked pairwise disjoint and nonempty.
fn factor_partition(factors: &[HadamardPoly<Fp>]) -> Result<Partition> {
    let mut blocks = Vec::with_capacity(factors.len());
    for (i, f) in factors.iter().enumerate() {
        let vs = var_set(f);
        if vs.is_empty() {
            return Err(Error::PreconditionViolated(format!(
                "factor {} is constant",
                i + 1
            )));
        }
        blocks.push(vs.into_iter().collect());
    }
    Partition::new(blocks)
        .map_err(|_| Error::PreconditionViolated("factors share a variable".into()))
}

fn check_shapes(factors: &[HadamardPoly<Fp>]) -> Result<(usize, usize)> {
    let first = factors
        .first()
        .ok_or_else(|| Error::PreconditionViolated("empty product".into()))?;
    let (n, kappa) = (first.n(), first.kappa());
    if factors.iter().any(|f| f.n() != n || f.kappa() != kappa) {
        return Err(Error::DimensionMismatch("factors differ in n or κ".into()));
    }
    Ok((n, kappa))
}

/// Drop every Hadamard coordinate where some factor is the zero
/// polynomial. Returns the projected factors and the kept coordinates.
pub fn project_units(factors: &[HadamardPoly<Fp>]) -> (Vec<HadamardPoly<Fp>>, Vec<usize>) {
    let kappa = factors.first().map_or(0, |f| f.kappa());
    let kept: Vec<usize> = (0..kappa)
        .filter(|&j| factors.iter().all(|f| !f.coordinate(j).is_empty()))
        .collect();
    (
        factors.iter().map(|f| f.select_coords(&kept)).collect(),
        kept,
    )
}

/// D(x + t) = ⋆_i f_i(x + t) with t = y^w.
pub fn shifted_product(factors: &[HadamardPoly<Fp>], w: &[u64]) -> Result<HadamardPoly<UniPoly>> {
    let (n, kappa) = check_shapes(factors)?;
    let mut acc = HadamardPoly::constant(n, HadamardVec::ones(kappa));
    for f in factors {
        acc = acc.had_mul(&shift_poly(f, w)?)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductReport {
    pub weights: Vec<u64>,
    /// Number of factors; coefficients of block weight below this span.
    pub ell: usize,
    /// Hadamard coordinates that survived the unit projection.
    pub kept: Vec<usize>,
    pub concentration: Concentration,
}

/// Shift-and-normalize the product under the weight vector (built when
/// `w` is None) and test block-weight concentration with ℓ = #factors,
/// exactly over F_p(y).
pub fn verify_low_block_support(
    factors: &[HadamardPoly<Fp>],
    w: Option<&[u64]>,
) -> Result<ProductReport> {
    let (n, _) = check_shapes(factors)?;
    let partition = factor_partition(factors)?;
    let (factors, kept) = project_units(factors);
    let weights = match w {
        Some(w) => w.to_vec(),
        None => {
            let cones: Vec<Vec<Exponent>> = factors.iter().map(|f| f.cone()).collect();
            build_weight_vector(&cones, n, DEFAULT_MAX_WEIGHT)?
        }
    };
    let ell = factors.len();
    if kept.is_empty() {
        return Ok(ProductReport {
            weights,
            ell,
            kept,
            concentration: Concentration {
                concentrated: true,
                rank_low: 0,
                rank_full: 0,
            },
        });
    }
    for f in &factors {
        value_at_shift(f, &weights)?;
    }
    let d = shifted_product(&factors, &weights)?;
    let concentration = is_l_concentrated(&d, ell, Weighting::Block(&partition))?;
    Ok(ProductReport {
        weights,
        ell,
        kept,
        concentration,
    })
}

fn ypow(e: u64) -> UniPoly {
    UniPoly::monomial(Fp::one(), e as usize)
}

/// Visit every tuple with the coordinatewise product of the chosen table
/// entries, reusing prefix products.
fn tuple_products(
    tables: &[Vec<Vec<UniPoly>>],
    kappa: usize,
    keep: &dyn Fn(&[usize]) -> bool,
    visit: &mut dyn FnMut(&[usize], &[UniPoly]),
) {
    fn rec(
        tables: &[Vec<Vec<UniPoly>>],
        depth: usize,
        prefix: &mut Vec<usize>,
        acc: &[UniPoly],
        keep: &dyn Fn(&[usize]) -> bool,
        visit: &mut dyn FnMut(&[usize], &[UniPoly]),
    ) {
        if depth == tables.len() {
            if keep(prefix) {
                visit(prefix, acc);
            }
            return;
        }
        for (u, col) in tables[depth].iter().enumerate() {
            prefix.push(u);
            let next: Vec<UniPoly> = acc.iter().zip(col).map(|(a, b)| a * b).collect();
            rec(tables, depth + 1, prefix, &next, keep, visit);
            prefix.pop();
        }
    }
    let ones = vec![UniPoly::one(); kappa];
    rec(tables, 0, &mut Vec::new(), &ones, keep, visit);
}

struct FactorData {
    cone: Vec<Exponent>,
    /// Coef(v)(f(x + t)) per cone element, per coordinate.
    shifted: Vec<Vec<UniPoly>>,
    omega: Vec<u64>,
    top: u64,
}

fn factor_data(f: &HadamardPoly<Fp>, w: &[u64]) -> Result<FactorData> {
    value_at_shift(f, w)?;
    let cone = f.cone();
    let p = shift_poly(f, w)?;
    let shifted = cone.iter().map(|v| p.coeff(v).into_coords()).collect();
    let omega: Vec<u64> = cone.iter().map(|v| v.dot(w)).collect();
    let top = omega.iter().copied().max().unwrap_or(0);
    Ok(FactorData {
        cone,
        shifted,
        omega,
        top,
    })
}

/// Tensored transfer equation:
/// D(t)^{-1} ⋆ Z ≡ Z' N_{𝒮'} T' N_𝒮^{-1} (mod 𝒱_ℓ(D')), ℓ = #factors.
///
/// Coordinate j of everything is multiplied by D(t)_j · y^{Σ top_i}, which
/// turns every entry into a polynomial in y without changing which columns
/// lie in the span. Each T'_i is also checked strongly full.
pub fn verify_transfer_depth3(factors: &[HadamardPoly<Fp>], w: &[u64]) -> Result<bool> {
    let (_, kappa) = check_shapes(factors)?;
    factor_partition(factors)?;
    let ell = factors.len();
    let data = factors
        .iter()
        .map(|f| factor_data(f, w))
        .collect::<Result<Vec<_>>>()?;
    let mut zhat = Vec::with_capacity(ell);
    let mut chat = Vec::with_capacity(ell);
    for fd in &data {
        let tp = punctured_inverse(&fd.cone);
        if !tp.is_strongly_full()? {
            return Ok(false);
        }
        zhat.push(
            fd.shifted
                .iter()
                .map(|col| col.iter().map(|p| p * &ypow(fd.top)).collect())
                .collect::<Vec<Vec<UniPoly>>>(),
        );
        // Ĉ_u = y^{top - ω(u)} Σ_{r in 𝒮*} T'(r, u) · P_r · y^{ω(r)}
        let cols: Vec<Vec<UniPoly>> = (0..fd.cone.len())
            .map(|u| {
                (0..kappa)
                    .map(|j| {
                        let mut s = UniPoly::zero();
                        for r in 1..fd.cone.len() {
                            let c = tp.data[r - 1][u];
                            if !c.is_zero() {
                                s = s + (&fd.shifted[r][j] * &ypow(fd.omega[r])).scale(c);
                            }
                        }
                        &s * &ypow(fd.top - fd.omega[u])
                    })
                    .collect()
            })
            .collect();
        chat.push(cols);
    }
    let total_top: u64 = data.iter().map(|fd| fd.top).sum();
    let mut d = HadamardPoly::constant(factors[0].n(), HadamardVec::ones(kappa));
    for f in factors {
        d = d.had_mul(f)?;
    }

    let mut diff: Vec<Vec<UniPoly>> = vec![Vec::new(); kappa];
    let shift_top = ypow(total_top);
    tuple_products(&chat, kappa, &|_| true, &mut |t, rhs| {
        let e = t
            .iter()
            .zip(&data)
            .fold(Exponent::zero(), |acc, (&u, fd)| acc.add(&fd.cone[u]));
        let z = d.coeff(&e);
        for j in 0..kappa {
            let lhs = shift_top.scale(z.coords()[j]);
            diff[j].push(lhs - &rhs[j]);
        }
    });
    let mut span: Vec<Vec<UniPoly>> = vec![Vec::new(); kappa];
    let low = |t: &[usize]| t.iter().filter(|&&u| u != 0).count() < ell;
    tuple_products(&zhat, kappa, &low, &mut |_, col| {
        for j in 0..kappa {
            span[j].push(col[j].clone());
        }
    });
    if linalg::rank_evaluated(&span, 0x5eed) == kappa {
        return Ok(true);
    }
    let r = linalg::rank(&span);
    let joined: Vec<Vec<UniPoly>> = span
        .into_iter()
        .zip(diff)
        .map(|(mut a, b)| {
            a.extend(b);
            a
        })
        .collect();
    Ok(linalg::rank(&joined) == r)
}

/// Every intermediate object of the low-block-support argument for one
/// product, with the checks that tie them together.
#[derive(Clone, Debug, Serialize)]
pub struct ProductCertificate {
    pub weights: Vec<u64>,
    pub cone_sizes: Vec<usize>,
    pub marked: Vec<Vec<usize>>,
    pub chosen: Vec<Vec<usize>>,
    pub nullspace_ok: bool,
    pub tna: TnaCheck,
}

impl ProductCertificate {
    pub fn holds(&self) -> bool {
        self.nullspace_ok && self.tna.holds()
    }
}

/// Build 𝓜 greedily from the largest column of Z, select 𝒞, build A and
/// check det(T' N^{-1} A) with its leading coefficient.
pub fn certify_product(
    factors: &[HadamardPoly<Fp>],
    w: Option<&[u64]>,
) -> Result<ProductCertificate> {
    let (n, kappa) = check_shapes(factors)?;
    factor_partition(factors)?;
    let cones: Vec<Vec<Exponent>> = factors.iter().map(|f| f.cone()).collect();
    let weights = match w {
        Some(w) => w.to_vec(),
        None => build_weight_vector(&cones, n, DEFAULT_MAX_WEIGHT)?,
    };
    let radix = Radix::new(cones.iter().map(|c| c.len()).collect());
    let tuples: Vec<Vec<usize>> = radix.tuples().collect();
    let exps: Vec<Exponent> = tuples
        .iter()
        .map(|t| {
            t.iter()
                .zip(&cones)
                .fold(Exponent::zero(), |acc, (&u, c)| acc.add(&c[u]))
        })
        .collect();
    let omega: Vec<u64> = exps.iter().map(|e| e.dot(&weights)).collect();
    if omega.iter().collect::<BTreeSet<_>>().len() != omega.len() {
        return Err(Error::PreconditionViolated(
            "weight vector does not separate the product monomials".into(),
        ));
    }
    let mut d = HadamardPoly::constant(n, HadamardVec::ones(kappa));
    for f in factors {
        d = d.had_mul(f)?;
    }
    let z = crate::hadamard::coefficient_matrix(&d, &exps);
    let marked = minor::greedy_basis_from_largest(&z, &omega);
    let tps: Vec<_> = cones.iter().map(|c| punctured_inverse(c)).collect();
    let marked_tuples: Vec<Vec<usize>> = marked.iter().map(|&m| tuples[m].clone()).collect();
    let chosen = minor::select_invertible_minor(&tps, &marked_tuples, kappa)?;
    let chosen_flat: Vec<usize> = chosen.iter().map(|t| radix.encode(t)).collect();
    let a = minor::build_nullspace_a(&z, &omega, &marked, &chosen_flat)?;
    let nullspace_ok = z.iter().all(|row| {
        (0..chosen.len()).all(|c| {
            (0..row.len())
                .fold(Fp::ZERO, |s, u| s + row[u] * a[u][c])
                .is_zero()
        })
    }) && chosen_flat.iter().enumerate().all(|(c, &v)| {
        a[v][c].is_one() && (0..a.len()).all(|u| a[u][c].is_zero() || omega[u] >= omega[v])
    });
    let tna = minor::verify_tna_det(&tps, &radix, &omega, &a, &chosen_flat)?;
    Ok(ProductCertificate {
        weights,
        cone_sizes: cones.iter().map(|c| c.len()).collect(),
        marked: marked_tuples,
        chosen,
        nullspace_ok,
        tna,
    })
}
