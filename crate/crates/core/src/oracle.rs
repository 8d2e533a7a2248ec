//! Brute-force ground truth. Everything here expands polynomials in full and
//! is meant for desk-scale inputs only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{linalg, prime, Exponent, Field, Fp, MPoly, UniPoly};
use crate::error::{Error, Result};
use crate::formula::{
    corpus, to_hadamard_product, Blackbox, Circuit, DiagonalCircuit, DualRepresentation,
};
use crate::hadamard::{HadamardPoly, Weighting};

/// Default cap on the number of monomials or grid points handled.
pub const DEFAULT_LIMIT: usize = 1_000_000;

/// Expand any circuit into a sparse polynomial.
pub fn expand(c: &Circuit, limit: usize) -> Result<MPoly<Fp>> {
    match c {
        Circuit::SetDepth(f) => f.root.expand(limit),
        Circuit::Diagonal(d) => expand_diagonal(d, limit),
        Circuit::Dual(d) => expand_dual(d, limit),
    }
}

fn check_limit(p: &MPoly<Fp>, limit: usize) -> Result<()> {
    if p.len() > limit {
        return Err(Error::TooLarge(format!("{} monomials", p.len())));
    }
    Ok(())
}

fn expand_diagonal(d: &DiagonalCircuit, limit: usize) -> Result<MPoly<Fp>> {
    let mut acc = MPoly::new();
    for i in 0..d.k() {
        let f = d.form_poly(i);
        let mut pw = MPoly::constant(d.weights[i]);
        for _ in 0..d.power {
            pw = &pw * &f;
            check_limit(&pw, limit)?;
        }
        acc = acc + &pw;
    }
    Ok(acc)
}

fn uni_to_mpoly(v: usize, g: &UniPoly) -> MPoly<Fp> {
    MPoly::from_terms(g.coeffs().iter().enumerate().map(|(j, &c)| {
        let mut e = Exponent::zero();
        e.set(v, j as u32);
        (e, c)
    }))
}

fn expand_dual(d: &DualRepresentation, limit: usize) -> Result<MPoly<Fp>> {
    let mut acc = MPoly::new();
    for (w, fs) in &d.products {
        let mut prod = MPoly::constant(*w);
        for (v, g) in fs {
            prod = &prod * &uni_to_mpoly(*v, g);
            check_limit(&prod, limit)?;
        }
        acc = acc + &prod;
    }
    Ok(acc)
}

/// Recover a blackbox polynomial from its values on the tensor grid
/// {0..degs[0]} × ... × {0..degs[n-1]}. Exact whenever p exceeds every
/// per-variable degree bound and the bounds are correct.
pub fn expand_blackbox(bb: &dyn Blackbox, degs: &[u32], limit: usize) -> Result<MPoly<Fp>> {
    let n = bb.n();
    if degs.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} degree bounds for {} variables",
            degs.len(),
            n
        )));
    }
    let size = degs
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d as usize + 1));
    let size = match size {
        Some(s) if s <= limit => s,
        _ => return Err(Error::TooLarge("interpolation grid".into())),
    };
    if let Some(&m) = degs.iter().max() {
        if m as u64 >= prime() {
            return Err(Error::FieldTooSmall {
                needed: m as u128 + 1,
                prime: prime(),
            });
        }
    }
    // Mixed-radix layout, variable 0 fastest.
    let idx = |mut r: usize| -> Vec<usize> {
        degs.iter()
            .map(|&d| {
                let v = r % (d as usize + 1);
                r /= d as usize + 1;
                v
            })
            .collect()
    };
    let mut vals: Vec<Fp> = (0..size)
        .map(|r| {
            let pt: Vec<Fp> = idx(r).into_iter().map(|v| Fp::new(v as u64)).collect();
            bb.eval(&pt)
        })
        .collect();
    let mut stride = 1usize;
    for &d in degs {
        let m = d as usize + 1;
        let vinv = vandermonde_inverse(m)?;
        for base in 0..size {
            if (base / stride) % m != 0 {
                continue;
            }
            let fiber: Vec<Fp> = (0..m).map(|j| vals[base + j * stride]).collect();
            for (i, row) in vinv.iter().enumerate() {
                vals[base + i * stride] = row
                    .iter()
                    .zip(&fiber)
                    .fold(Fp::ZERO, |a, (x, y)| a + *x * *y);
            }
        }
        stride *= m;
    }
    Ok(MPoly::from_terms(
        vals.into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(r, c)| {
                let e: Vec<u32> = idx(r).into_iter().map(|v| v as u32).collect();
                (Exponent::new(e), c)
            }),
    ))
}

/// Inverse of the Vandermonde matrix V[j][i] = j^i on nodes 0..m-1, so that
/// coefficients = V^{-1} · values.
fn vandermonde_inverse(m: usize) -> Result<Vec<Vec<Fp>>> {
    let v: Vec<Vec<Fp>> = (0..m)
        .map(|j| (0..m).map(|i| Fp::new(j as u64).pow(i as u64)).collect())
        .collect();
    linalg::inverse(&v)
}

/// True iff the circuit expands to the zero polynomial.
pub fn is_zero_bruteforce(c: &Circuit) -> Result<bool> {
    Ok(expand(c, DEFAULT_LIMIT)?.is_empty())
}

/// ℓ-concentration decided coefficient by coefficient: every coefficient of
/// weight at least ℓ must solve a linear system over the low-weight ones.
/// Independent of the rank-based check in `hadamard`.
pub fn concentration_oracle<F: Field>(
    f: &HadamardPoly<F>,
    ell: usize,
    mode: Weighting<'_>,
) -> Result<bool> {
    let mut low = Vec::new();
    let mut high = Vec::new();
    for (e, c) in f.terms() {
        if mode.weight(e)? < ell {
            low.push(c.coords().to_vec());
        } else {
            high.push(c.coords().to_vec());
        }
    }
    let kappa = f.kappa();
    // κ × |low| system.
    let a: Vec<Vec<F>> = (0..kappa)
        .map(|i| low.iter().map(|c| c[i].clone()).collect())
        .collect();
    for b in high {
        if low.is_empty() {
            return Ok(false);
        }
        if linalg::solve(&a, &b).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Shapes for the concentration probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProbeShape {
    /// x_1 ⋯ x_n over H_1.
    Monomial { n: usize },
    /// Random set-multilinear depth-3 product part.
    SetMl3 { n: usize, k: usize, d: usize },
    /// Random set-depth-4 product part.
    SetDepth4 {
        n: usize,
        k: usize,
        d: usize,
        lambda: usize,
    },
}

impl std::fmt::Display for ProbeShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProbeShape::Monomial { n } => write!(f, "monomial/n={n}"),
            ProbeShape::SetMl3 { n, k, d } => write!(f, "setml3/n={n}/k={k}/d={d}"),
            ProbeShape::SetDepth4 { n, k, d, lambda } => {
                write!(f, "setdepth4/n={n}/k={k}/d={d}/lambda={lambda}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeRow {
    pub trial: usize,
    pub shape: String,
    pub ell: usize,
    pub rank_low: usize,
    pub rank_full: usize,
    pub pass: bool,
}

/// EXPERIMENTAL. Empirical check of the conjectured phenomenon that a
/// generically shifted Hadamard product D over H_κ is ℓ-concentrated once
/// ℓ > log₂ κ. `ell = None` uses ⌊log₂ κ⌋ + 1. Nothing else in the crate
/// depends on the outcome.
pub fn conjecture_probe(
    shape: ProbeShape,
    ell: Option<usize>,
    shifted: bool,
    trials: usize,
    seed: u64,
) -> Result<Vec<ProbeRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(trials);
    for trial in 0..trials {
        let d = match shape {
            ProbeShape::Monomial { n } => {
                HadamardPoly::from_scalar(n, &MPoly::term(Exponent::new(vec![1; n]), Fp::one()))
            }
            ProbeShape::SetMl3 { n, k, d } => {
                let f = corpus::setml3(&mut rng, n, k, d).normalize_fanin(k)?;
                to_hadamard_product(&f)?.expand_product(n, DEFAULT_LIMIT)?
            }
            ProbeShape::SetDepth4 { n, k, d, lambda } => {
                let f = corpus::setdepth4(&mut rng, n, k, d, lambda, 2).normalize_fanin(k)?;
                to_hadamard_product(&f)?.expand_product(n, DEFAULT_LIMIT)?
            }
        };
        let d = if shifted {
            let a: Vec<Fp> = (0..d.n())
                .map(|_| Fp::new(rng.gen_range(1..prime())))
                .collect();
            d.shift(&a)
        } else {
            d
        };
        let kappa = d.kappa().max(1);
        let l = ell.unwrap_or((usize::BITS - 1 - kappa.leading_zeros()) as usize + 1);
        let c = crate::hadamard::is_l_concentrated(&d, l, Weighting::Support)?;
        rows.push(ProbeRow {
            trial,
            shape: shape.to_string(),
            ell: l,
            rank_low: c.rank_low,
            rank_full: c.rank_full,
            pass: c.concentrated,
        });
    }
    Ok(rows)
}

/// CSV with header `trial,shape,ell,rank_low,rank_full,pass`.
pub fn probe_csv(rows: &[ProbeRow]) -> String {
    let mut s = String::from("trial,shape,ell,rank_low,rank_full,pass\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.trial, r.shape, r.ell, r.rank_low, r.rank_full, r.pass
        ));
    }
    s
}

/// Per-variable degree bounds read off an expansion; used to size the
/// interpolation grid when cross-checking the blackbox path.
pub fn degree_bounds(p: &MPoly<Fp>, n: usize) -> Vec<u32> {
    (0..n).map(|i| p.degree_in(i)).collect()
}
