//! Hitting sets built from class parameters only, and the blackbox verdict.
//!
//! Every generator has the same shape: a translation that makes nonzero
//! members concentrated on low-support monomials, then a Kronecker grid on
//! each maximal low-support projection.

use std::collections::BTreeSet;
use std::io::Write;

use serde::Serialize;

use crate::algebra::{prime, Fp};
use crate::concentrate::{build_tau, ell_schedule, ShiftMap};
use crate::error::{Error, Result};
use crate::formula::{Blackbox, ClassParams, DiagonalCircuit, DualRepresentation};
use crate::sparsepit::{kronecker_point_count, kronecker_points};
use crate::util::{ceil_log2, choose, par_map, subsets_up_to};

/// Refuse to materialize more points than this.
pub const MAX_POINTS: u128 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub generator: String,
    /// Support bound: monomials of support below this carry the span.
    pub ell: u128,
    pub fast_path: bool,
    /// Size of each projected variable set.
    pub subset_size: usize,
    pub subsets: usize,
    /// Kronecker degree bounds: projected x variables, then layer variables.
    pub grid_degrees: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<ShiftMap>,
    /// Translations used by the diagonal generator, one grid per α.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub alphas: Vec<Fp>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HittingSet {
    pub n: usize,
    pub prime: u64,
    pub points: Vec<Vec<Fp>>,
    /// Closed-form bound Σ_{|X| < ℓ} G(X) with G the grid size.
    pub bound: u128,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Zero,
    Nonzero { witness: Vec<Fp> },
}

impl Verdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, Verdict::Zero)
    }
}

fn too_large(what: &str, count: u128) -> Error {
    Error::TooLarge(format!("{what}: {count} points"))
}

fn grid_count(degs: &[u64]) -> u128 {
    degs.iter()
        .fold(1u128, |a, &d| a.saturating_mul(d as u128 + 1))
}

/// Σ_{s ≤ r} C(n, s) · G_s, the size of the full family of projections.
fn projection_bound(n: usize, r: usize, grid_for: impl Fn(usize) -> u128) -> u128 {
    (0..=r.min(n)).fold(0u128, |acc, s| {
        acc.saturating_add(choose(n as u64, s as u64).saturating_mul(grid_for(s)))
    })
}

/// Kronecker grid on (x_X, layer variables) for every X of size r, pushed
/// through `finish` to a point of F_p^n.
fn projected_grid(
    n: usize,
    r: usize,
    x_degree: u32,
    layer_degrees: &[u64],
    finish: impl Fn(&[Fp], &[Fp]) -> Vec<Fp>,
) -> Result<BTreeSet<Vec<Fp>>> {
    let mut degs: Vec<u32> = vec![x_degree; r];
    for &d in layer_degrees {
        degs.push(u32::try_from(d).map_err(|_| Error::TooLarge(format!("layer degree {d}")))?);
    }
    let grid = kronecker_points(&degs)?;
    let subsets: Vec<Vec<usize>> = subsets_up_to(n, r)
        .into_iter()
        .filter(|x| x.len() == r)
        .collect();
    let total = grid.len() as u128 * subsets.len() as u128;
    if total > MAX_POINTS {
        return Err(too_large("projected grid", total));
    }
    let mut out = BTreeSet::new();
    for x in &subsets {
        for g in &grid {
            let mut base = vec![Fp::ZERO; n];
            for (&i, &v) in x.iter().zip(g) {
                base[i] = v;
            }
            out.insert(finish(&base, &g[r..]));
        }
    }
    Ok(out)
}

/// Hitting set for the class described by `params`.
///
/// With ℓ₀ > n every monomial already has support below ℓ₀, so the plain
/// Kronecker grid on all n variables is used. Otherwise τ₀ from the class
/// parameters is applied and the layer variables join the projected grid.
pub fn hitting_set(params: &ClassParams) -> Result<HittingSet> {
    params.validate()?;
    let n = params.n;
    let ell0 = ell_schedule(params).ell0();
    let delta = params.var_degree();
    if ell0 > n as u128 {
        let count = kronecker_point_count(&vec![delta; n]);
        if count > MAX_POINTS {
            return Err(too_large("Kronecker grid", count));
        }
        let points = kronecker_points(&vec![delta; n])?;
        return Ok(HittingSet {
            n,
            prime: prime(),
            bound: count,
            points,
            provenance: Provenance {
                generator: "set-depth".into(),
                ell: ell0,
                fast_path: true,
                subset_size: n,
                subsets: 1,
                grid_degrees: vec![delta as u64; n],
                tau: None,
                alphas: Vec::new(),
            },
        });
    }
    let r = (ell0 - 1) as usize;
    let tau = build_tau(params)?;
    let layer_degrees: Vec<u64> = (0..params.height)
        .map(|h| tau.layer_degree(h, delta))
        .collect();
    let layer_grid = grid_count(&layer_degrees);
    let bound = projection_bound(n, r, |s| {
        grid_count(&vec![delta as u64; s]).saturating_mul(layer_grid)
    });
    let points = projected_grid(n, r, delta, &layer_degrees, |x, t| tau.translate(x, t))?;
    let mut grid_degrees = vec![delta as u64; r];
    grid_degrees.extend(&layer_degrees);
    Ok(HittingSet {
        n,
        prime: prime(),
        bound,
        points: points.into_iter().collect(),
        provenance: Provenance {
            generator: "set-depth".into(),
            ell: ell0,
            fast_path: false,
            subset_size: r,
            subsets: choose(n as u64, r as u64) as usize,
            grid_degrees,
            tau: Some(tau),
            alphas: Vec::new(),
        },
    })
}

/// Evaluate the blackbox on the points in order, in parallel chunks, and
/// report the first nonzero point.
pub fn test_blackbox(bb: &dyn Blackbox, hs: &HittingSet) -> Verdict {
    assert_eq!(
        bb.n(),
        hs.n,
        "blackbox arity does not match the hitting set"
    );
    const CHUNK: usize = 4096;
    for chunk in hs.points.chunks(CHUNK) {
        let ranges: Vec<(usize, usize)> = (0..chunk.len())
            .step_by(256)
            .map(|s| (s, (s + 256).min(chunk.len())))
            .collect();
        let hits = par_map(&ranges, |&(a, b)| {
            (a..b).find(|&i| !bb.eval(&chunk[i]).is_zero())
        });
        if let Some(i) = hits.into_iter().flatten().min() {
            return Verdict::Nonzero {
                witness: chunk[i].clone(),
            };
        }
    }
    Verdict::Zero
}

/// Support bound for k summands of powers of linear forms: the picked
/// basis monomials z'^e with support m force 2^m ≤ k, so support ⌊log₂ k⌋
/// is reachable and the span sits below ⌊log₂ k⌋ + 1.
pub fn diagonal_support_bound(k: usize) -> usize {
    (usize::BITS - 1 - k.max(1).leading_zeros()) as usize + 1
}

/// α among 1..=kn+1 with no f_i(α, α², …, αⁿ) zero.
pub fn diagonal_alpha(c: &DiagonalCircuit) -> Result<Fp> {
    let tried = (c.k() * c.n + 1) as u64;
    (1..=tried)
        .map(Fp::new)
        .find(|&a| {
            let pt: Vec<Fp> = (1..=c.n as u64).map(|j| a.pow(j)).collect();
            (0..c.k()).all(|i| !c.form_value(i, &pt).is_zero())
        })
        .ok_or(Error::NoAlphaFound { tried })
}

/// Hitting set for k-term diagonal circuits Σ w_i f_i^d in n variables.
/// Without seeing the forms, a grid is laid around (α, α², …, αⁿ) for
/// every α in 1..=kn+1; one of them is a valid shift.
pub fn hitting_set_diagonal(k: usize, n: usize, d: u32) -> Result<HittingSet> {
    let candidates = (k * n + 1) as u64;
    let p = prime();
    if p <= candidates || p <= d as u64 {
        return Err(Error::FieldTooSmall {
            needed: candidates.max(d as u64) as u128 + 1,
            prime: p,
        });
    }
    let ell = diagonal_support_bound(k);
    let r = (ell - 1).min(n);
    let alphas: Vec<Fp> = (1..=candidates).map(Fp::new).collect();
    let per_alpha = projection_bound(n, r, |s| grid_count(&vec![d as u64; s]));
    let bound = per_alpha.saturating_mul(candidates as u128);
    let mut points = BTreeSet::new();
    for &a in &alphas {
        let shift: Vec<Fp> = (1..=n as u64).map(|j| a.pow(j)).collect();
        points.extend(projected_grid(n, r, d, &[], |x, _| {
            x.iter().zip(&shift).map(|(&u, &v)| u + v).collect()
        })?);
        if points.len() as u128 > MAX_POINTS {
            return Err(too_large("diagonal grid", points.len() as u128));
        }
    }
    Ok(HittingSet {
        n,
        prime: p,
        bound,
        points: points.into_iter().collect(),
        provenance: Provenance {
            generator: "diagonal".into(),
            ell: ell as u128,
            fast_path: false,
            subset_size: r,
            subsets: choose(n as u64, r as u64) as usize,
            grid_degrees: vec![d as u64; r],
            tau: None,
            alphas,
        },
    })
}

/// Hitting set for sums of k′ products of univariates G_1(x_1) ⋆ ⋯ ⋆
/// G_n(x_n) with per-variable degree bounds `degs`.
///
/// Each G_i has monomial weight at most 1, so the low block support
/// argument with singleton blocks applies directly: after x_i ↦ x_i + t^{w_i}
/// with separating w the span sits on support below 2⌈log₂ k′⌉ + 1.
pub fn hitting_set_dual(k_prime: usize, degs: &[u32]) -> Result<HittingSet> {
    if k_prime == 0 {
        return Err(Error::NotADualForm("no products".into()));
    }
    let n = degs.len();
    let ell = 2 * ceil_log2(k_prime as u128) as usize + 1;
    let r = (ell - 1).min(n);
    // Kronecker weights separate the whole box of exponents.
    let w = crate::sparsepit::kronecker_weights(degs);
    let t_degree = degs.iter().zip(&w).fold(0u64, |a, (&d, &wi)| {
        a.saturating_add(wi.saturating_mul(d as u64))
    });
    let dmax = degs.iter().copied().max().unwrap_or(0);
    let bound = projection_bound(n, r, |s| {
        grid_count(&vec![dmax as u64; s]).saturating_mul(t_degree as u128 + 1)
    });
    let points = projected_grid(n, r, dmax, &[t_degree], |x, t| {
        x.iter().zip(&w).map(|(&u, &wi)| u + t[0].pow(wi)).collect()
    })?;
    Ok(HittingSet {
        n,
        prime: prime(),
        bound,
        points: points.into_iter().collect(),
        provenance: Provenance {
            generator: "dual".into(),
            ell: ell as u128,
            fast_path: false,
            subset_size: r,
            subsets: choose(n as u64, r as u64) as usize,
            grid_degrees: {
                let mut g = vec![dmax as u64; r];
                g.push(t_degree);
                g
            },
            tau: None,
            alphas: Vec::new(),
        },
    })
}

/// Shape parameters of a dual representation.
pub fn hitting_set_for_dual(c: &DualRepresentation) -> Result<HittingSet> {
    hitting_set_dual(c.products.len(), &c.var_degrees())
}

#[derive(Serialize)]
struct Header<'a> {
    kind: &'static str,
    n: usize,
    prime: u64,
    size: usize,
    bound: String,
    provenance: &'a Provenance,
}

/// JSON lines: one header record, then one array of point coordinates per
/// line.
pub fn write_jsonl(hs: &HittingSet, out: &mut dyn Write) -> Result<()> {
    let header = Header {
        kind: "header",
        n: hs.n,
        prime: hs.prime,
        size: hs.points.len(),
        bound: hs.bound.to_string(),
        provenance: &hs.provenance,
    };
    let line = serde_json::to_string(&header).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{line}")?;
    for p in &hs.points {
        let vals: Vec<u64> = p.iter().map(|c| c.value()).collect();
        writeln!(
            out,
            "{}",
            serde_json::to_string(&vals).map_err(|e| Error::Io(e.to_string()))?
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Exponent, MPoly};
    use crate::formula::FnBlackbox;

    fn params(n: usize, k: usize, height: usize, depth: usize) -> ClassParams {
        ClassParams {
            n,
            k,
            d: n,
            lambda: 1,
            height,
            depth,
            s: 64,
            leaf_degree: None,
        }
    }

    #[test]
    fn fast_path_hits_product() {
        let hs = hitting_set(&params(2, 2, 1, 3)).unwrap();
        assert!(hs.provenance.fast_path);
        let c = MPoly::term(Exponent::new(vec![1, 1]), Fp::one());
        assert!(!test_blackbox(&c, &hs).is_zero());
        assert!(hs.points.len() as u128 <= hs.bound);
    }

    #[test]
    fn zero_and_constant() {
        let hs = hitting_set(&params(3, 1, 1, 3)).unwrap();
        let zero = FnBlackbox {
            n: 3,
            f: |_: &[Fp]| Fp::ZERO,
        };
        assert_eq!(test_blackbox(&zero, &hs), Verdict::Zero);
        let one = FnBlackbox {
            n: 3,
            f: |_: &[Fp]| Fp::one(),
        };
        assert_eq!(
            test_blackbox(&one, &hs),
            Verdict::Nonzero {
                witness: hs.points[0].clone()
            }
        );
    }

    #[test]
    fn projected_path_counts() {
        let hs = hitting_set(&params(5, 2, 1, 3)).unwrap();
        assert!(!hs.provenance.fast_path);
        assert_eq!(hs.provenance.subset_size, 2);
        assert!(hs.points.len() as u128 <= hs.bound);
    }

    #[test]
    fn diagonal_bound() {
        assert_eq!(diagonal_support_bound(1), 1);
        assert_eq!(diagonal_support_bound(2), 2);
        assert_eq!(diagonal_support_bound(3), 2);
        assert_eq!(diagonal_support_bound(8), 4);
    }
}
