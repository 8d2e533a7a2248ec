//! Dense exact linear algebra on row-major `Vec<Vec<_>>` matrices.
//!
//! Over F_p everything is plain Gaussian elimination. Over polynomial
//! domains ranks and determinants go through fraction-free (Bareiss)
//! elimination; a random evaluation into F_p is used only to choose pivots,
//! never to decide a rank.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Domain, Field, Fp, Scalar};
use crate::error::{Error, Result};

/// Gaussian elimination over F_p. Returns the rank and the pivot sequence
/// as (row, column) pairs in elimination order.
pub fn gauss_fp(mut a: Vec<Vec<Fp>>) -> (usize, Vec<(usize, usize)>) {
    let m = a.len();
    if m == 0 {
        return (0, Vec::new());
    }
    let n = a[0].len();
    let mut row_done = vec![false; m];
    let mut pivots = Vec::new();
    for j in 0..n {
        let Some(pi) = (0..m).find(|&i| !row_done[i] && !a[i][j].is_zero()) else {
            continue;
        };
        let inv = a[pi][j].inv().unwrap();
        let prow: Vec<Fp> = a[pi][j..].iter().map(|&x| x * inv).collect();
        for i in 0..m {
            if row_done[i] || i == pi {
                continue;
            }
            let f = a[i][j];
            if f.is_zero() {
                continue;
            }
            for (x, &y) in a[i][j..].iter_mut().zip(&prow) {
                *x -= f * y;
            }
        }
        row_done[pi] = true;
        pivots.push((pi, j));
        if pivots.len() == m {
            break;
        }
    }
    (pivots.len(), pivots)
}

pub fn rank_fp(a: Vec<Vec<Fp>>) -> usize {
    gauss_fp(a).0
}

fn random_point(seed: u64, len: usize) -> Vec<Fp> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = super::prime();
    (0..len).map(|_| Fp::new(rng.gen_range(1..p))).collect()
}

/// Number of evaluation coordinates handed to `Domain::eval_fp`. Covers the
/// univariate y and every layer variable of a multi-layer shift.
const EVAL_WIDTH: usize = 16;

/// Fraction-free elimination. The first pivots are taken from `hint` as long
/// as they are exactly nonzero; afterwards the smallest nonzero entry of the
/// remaining block is used. Returns the pivot sequence.
fn bareiss<D: Domain>(a: &mut [Vec<D>], hint: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let m = a.len();
    if m == 0 {
        return Vec::new();
    }
    let n = a[0].len();
    let mut row_done = vec![false; m];
    let mut col_done = vec![false; n];
    let mut prev = D::one();
    let mut seq = Vec::new();
    let mut hints = hint.iter();
    loop {
        let hinted = hints
            .next()
            .copied()
            .filter(|&(i, j)| !row_done[i] && !col_done[j] && !a[i][j].is_zero());
        let piv = hinted.or_else(|| {
            let mut best: Option<(usize, usize, usize)> = None;
            for i in (0..m).filter(|&i| !row_done[i]) {
                for j in (0..n).filter(|&j| !col_done[j]) {
                    if !a[i][j].is_zero() {
                        let w = a[i][j].weight();
                        if best.is_none_or(|b| w < b.2) {
                            best = Some((i, j, w));
                        }
                    }
                }
            }
            best.map(|(i, j, _)| (i, j))
        });
        let Some((pi, pj)) = piv else { break };
        let pv = a[pi][pj].clone();
        let prow = a[pi].clone();
        for i in 0..m {
            if row_done[i] || i == pi {
                continue;
            }
            let f = a[i][pj].clone();
            for j in 0..n {
                if col_done[j] || j == pj {
                    continue;
                }
                let v = if f.is_zero() {
                    pv.clone() * &a[i][j]
                } else {
                    pv.clone() * &a[i][j] - f.clone() * &prow[j]
                };
                a[i][j] = if prev.is_one() { v } else { v.div_exact(&prev) };
            }
            a[i][pj] = D::zero();
        }
        row_done[pi] = true;
        col_done[pj] = true;
        prev = pv;
        seq.push((pi, pj));
    }
    seq
}

/// Exact rank over the fraction field of a domain.
pub fn rank_domain<D: Domain>(a: Vec<Vec<D>>) -> usize {
    if a.is_empty() || a[0].is_empty() {
        return 0;
    }
    if D::IS_FIELD {
        return rank_fp(
            a.iter()
                .map(|r| r.iter().map(|x| x.eval_fp(&[])).collect())
                .collect(),
        );
    }
    let pt = random_point((a.len() * 1_000_003 + a[0].len()) as u64, EVAL_WIDTH);
    let ev: Vec<Vec<Fp>> = a
        .iter()
        .map(|r| r.iter().map(|x| x.eval_fp(&pt)).collect())
        .collect();
    let (_, hint) = gauss_fp(ev);
    let mut a = a;
    bareiss(&mut a, &hint).len()
}

/// Exact rank of a matrix over F_p, F_p[t], F_p(t) or F_p[t_0, ...].
pub fn rank<S: Scalar>(a: &[Vec<S>]) -> usize {
    rank_domain(a.iter().map(|r| S::clear_row(r)).collect())
}

/// Rank of the image under a random evaluation. Never exceeds `rank`.
pub fn rank_evaluated<D: Domain>(a: &[Vec<D>], seed: u64) -> usize {
    let pt = random_point(seed, EVAL_WIDTH);
    rank_fp(
        a.iter()
            .map(|r| r.iter().map(|x| x.eval_fp(&pt)).collect())
            .collect(),
    )
}

fn perm_sign(p: &[usize]) -> bool {
    let mut neg = false;
    let mut seen = vec![false; p.len()];
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut c = s;
        while !seen[c] {
            seen[c] = true;
            c = p[c];
            len += 1;
        }
        if len % 2 == 0 {
            neg = !neg;
        }
    }
    neg
}

/// Determinant over a domain by fraction-free elimination.
pub fn det_domain<D: Domain>(a: &[Vec<D>]) -> D {
    let n = a.len();
    if n == 0 {
        return D::one();
    }
    assert!(
        a.iter().all(|r| r.len() == n),
        "determinant of non-square matrix"
    );
    let mut w = a.to_vec();
    let seq = bareiss(&mut w, &[]);
    if seq.len() < n {
        return D::zero();
    }
    let rows: Vec<usize> = seq.iter().map(|p| p.0).collect();
    let cols: Vec<usize> = seq.iter().map(|p| p.1).collect();
    let (r, c) = seq[n - 1];
    let d = w[r][c].clone();
    if perm_sign(&rows) != perm_sign(&cols) {
        -d
    } else {
        d
    }
}

/// Reduced row echelon form over a field; returns pivot columns.
pub fn rref<F: Field>(a: &mut [Vec<F>]) -> Vec<usize> {
    let m = a.len();
    if m == 0 {
        return Vec::new();
    }
    let n = a[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for j in 0..n {
        if r == m {
            break;
        }
        let Some(pi) = (r..m).find(|&i| !a[i][j].is_zero()) else {
            continue;
        };
        a.swap(r, pi);
        let inv = a[r][j].inv().unwrap();
        for x in a[r].iter_mut() {
            *x = x.clone() * &inv;
        }
        let prow = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[j].is_zero() {
                continue;
            }
            let f = row[j].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x = x.clone() - f.clone() * y;
                }
            }
        }
        pivots.push(j);
        r += 1;
    }
    pivots
}

pub fn det_field<F: Field>(a: &[Vec<F>]) -> F {
    let n = a.len();
    assert!(
        a.iter().all(|r| r.len() == n),
        "determinant of non-square matrix"
    );
    let mut w = a.to_vec();
    let mut det = F::one();
    for j in 0..n {
        let Some(pi) = (j..n).find(|&i| !w[i][j].is_zero()) else {
            return F::zero();
        };
        if pi != j {
            w.swap(pi, j);
            det = -det;
        }
        det = det * &w[j][j];
        let inv = w[j][j].inv().unwrap();
        for i in j + 1..n {
            if w[i][j].is_zero() {
                continue;
            }
            let f = w[i][j].clone() * &inv;
            for k in j..n {
                let t = f.clone() * &w[j][k];
                w[i][k] = w[i][k].clone() - t;
            }
        }
    }
    det
}

pub fn inverse<F: Field>(a: &[Vec<F>]) -> Result<Vec<Vec<F>>> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "inverse of a {}x{} matrix",
            n,
            a.first().map_or(0, |r| r.len())
        )));
    }
    let mut aug: Vec<Vec<F>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            row
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() < n || piv[n - 1] >= n {
        return Err(Error::SingularMatrix);
    }
    Ok(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// A basis of {v : A v = 0}, one vector per free column, with a 1 in that
/// free position.
pub fn nullspace<F: Field>(a: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let mut w = a.to_vec();
    let piv = rref(&mut w);
    let mut out = Vec::new();
    for free in (0..ncols).filter(|j| !piv.contains(j)) {
        let mut v = vec![F::zero(); ncols];
        v[free] = F::one();
        for (r, &pj) in piv.iter().enumerate() {
            v[pj] = -w[r][free].clone();
        }
        out.push(v);
    }
    out
}

/// Solve A x = b for one solution, if any.
pub fn solve<F: Field>(a: &[Vec<F>], b: &[F]) -> Option<Vec<F>> {
    let n = a.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<F>> = a
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut row = r.clone();
            row.push(x.clone());
            row
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.last() == Some(&n) {
        return None;
    }
    let mut x = vec![F::zero(); n];
    for (r, &pj) in piv.iter().enumerate() {
        x[pj] = aug[r][n].clone();
    }
    Some(x)
}

pub fn mat_mul<F: super::Ring>(a: &[Vec<F>], b: &[Vec<F>]) -> Vec<Vec<F>> {
    let k = b.len();
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), k, "incompatible shapes");
            (0..n)
                .map(|j| {
                    let mut acc = F::zero();
                    for (t, x) in row.iter().enumerate() {
                        if !x.is_zero() && !b[t][j].is_zero() {
                            acc = acc + &(x.clone() * &b[t][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}
