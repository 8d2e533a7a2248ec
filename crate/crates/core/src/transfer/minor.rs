//! Column selection for the tensored transfer matrix and the nullspace
//! matrix A built on top of it.
//!
//! Tuple conventions: a factor with punctured cone of size n_i has row
//! labels 1..=n_i and column labels 0..=n_i, column 0 being the zero
//! exponent. Tuples over all factors index rows and columns of the tensor
//! product T' = T'_1 ⊗ ... ⊗ T'_ℓ.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::algebra::{linalg, ExactMatrix, Fp, Ring, UniPoly};
use crate::error::{Error, Result};
use crate::util::ceil_log2;

/// Mixed-radix bijection between tuples and flat indices, first
/// coordinate most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Radix {
    pub sizes: Vec<usize>,
}

impl Radix {
    pub fn new(sizes: Vec<usize>) -> Self {
        Radix { sizes }
    }

    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn encode(&self, t: &[usize]) -> usize {
        t.iter()
            .zip(&self.sizes)
            .fold(0, |acc, (&x, &s)| acc * s + x)
    }

    pub fn decode(&self, mut r: usize) -> Vec<usize> {
        let mut t = vec![0; self.sizes.len()];
        for (slot, &s) in t.iter_mut().zip(&self.sizes).rev() {
            *slot = r % s;
            r /= s;
        }
        t
    }

    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len()).map(|r| self.decode(r))
    }
}

/// Marked columns: scan columns from the largest weight down and keep each
/// one that is independent of those kept so far. Returns column indices in
/// the order they were marked.
pub fn greedy_basis_from_largest(z: &[Vec<Fp>], weights: &[u64]) -> Vec<usize> {
    let ncols = weights.len();
    let mut order: Vec<usize> = (0..ncols).collect();
    order.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
    let mut basis: Vec<(usize, Vec<Fp>)> = Vec::new();
    let mut marked = Vec::new();
    for j in order {
        let mut v: Vec<Fp> = z.iter().map(|row| row[j]).collect();
        for (p, b) in &basis {
            if !v[*p].is_zero() {
                let c = v[*p];
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * *y;
                }
            }
        }
        if let Some(p) = v.iter().position(|x| !x.is_zero()) {
            let inv = v[p].inv().unwrap();
            for x in v.iter_mut() {
                *x *= inv;
            }
            basis.push((p, v));
            marked.push(j);
        }
    }
    marked
}

/// Row-reduce T'_i so its columns 1..=n_i form the identity. Column 0 must
/// then be free of zeros; anything else means T'_i was not strongly full.
pub fn reduce_factor(t: &ExactMatrix<Fp>) -> Result<Vec<Vec<Fp>>> {
    let n = t.nrows();
    if t.ncols() != n + 1 || n == 0 {
        return Err(Error::DimensionMismatch(format!(
            "factor must be n x (n+1) with n >= 1, got {}x{}",
            n,
            t.ncols()
        )));
    }
    let square: Vec<Vec<Fp>> = t.data.iter().map(|r| r[1..].to_vec()).collect();
    let e = linalg::inverse(&square)
        .map_err(|_| Error::PreconditionViolated("factor is not strongly full".into()))?;
    let reduced = linalg::mat_mul(&e, &t.data);
    if reduced.iter().any(|r| r[0].is_zero()) {
        return Err(Error::PreconditionViolated(
            "reduced factor has a zero in column 0".into(),
        ));
    }
    Ok(reduced)
}

/// Entry of the tensor product at a row tuple (entries >= 1) and a column
/// tuple (entries >= 0).
pub fn tensor_entry(factors: &[Vec<Vec<Fp>>], row: &[usize], col: &[usize]) -> Fp {
    factors
        .iter()
        .zip(row.iter().zip(col))
        .fold(Fp::one(), |acc, (f, (&r, &c))| {
            if acc.is_zero() {
                acc
            } else {
                acc * f[r - 1][c]
            }
        })
}

fn row_tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    Radix::new(sizes.to_vec())
        .tuples()
        .map(|t| t.into_iter().map(|x| x + 1).collect())
        .collect()
}

/// det(T'_{𝒮',𝒞}) for the given column tuples, rows in tuple order.
pub fn minor_det(factors: &[ExactMatrix<Fp>], cols: &[Vec<usize>]) -> Fp {
    let data: Vec<Vec<Vec<Fp>>> = factors.iter().map(|f| f.data.clone()).collect();
    let sizes: Vec<usize> = factors.iter().map(|f| f.nrows()).collect();
    let rows = row_tuples(&sizes);
    let m: Vec<Vec<Fp>> = rows
        .iter()
        .map(|r| cols.iter().map(|c| tensor_entry(&data, r, c)).collect())
        .collect();
    linalg::det_field(&m)
}

/// Reorder rows so that, for every prefix length, equal prefixes sit
/// together in non-increasing order of frequency; ties go to the smaller
/// value.
fn frequency_sort(rows: Vec<Vec<usize>>, depth: usize) -> Vec<Vec<usize>> {
    if rows.len() <= 1 || depth >= rows[0].len() {
        return rows;
    }
    let mut groups: Vec<(usize, Vec<Vec<usize>>)> = Vec::new();
    for r in rows {
        match groups.iter_mut().find(|(v, _)| *v == r[depth]) {
            Some((_, g)) => g.push(r),
            None => groups.push((r[depth], vec![r])),
        }
    }
    groups.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));
    groups
        .into_iter()
        .flat_map(|(_, g)| frequency_sort(g, depth + 1))
        .collect()
}

/// Binary search for positions I with |I| <= ⌈lg(i+1)⌉ on which row i
/// differs from every earlier row.
fn distinguishing_positions(list: &[Vec<usize>], i: usize) -> Vec<usize> {
    let mut set = Vec::new();
    if i == 0 {
        return set;
    }
    let mut lo = 0;
    let mut start = 0;
    loop {
        let j = (start..list[i].len())
            .find(|&j| list[lo..=i].iter().any(|u| u[j] != list[i][j]))
            .expect("rows of the marked list are distinct");
        set.push(j);
        let mu = list[lo..=i]
            .iter()
            .rev()
            .take_while(|u| u[j] == list[i][j])
            .count();
        if mu == 1 {
            return set;
        }
        lo = i + 1 - mu;
        start = j + 1;
    }
}

/// Unmarked columns 𝒞 with |𝒞| = |𝒮'| and det(T'_{𝒮',𝒞}) != 0.
///
/// `factors[i]` is T'_i with rows 𝒮_i* and columns 𝒮_i (zero first);
/// `marked` lists column tuples. The returned minor is verified before it
/// is handed back.
pub fn select_invertible_minor(
    factors: &[ExactMatrix<Fp>],
    marked: &[Vec<usize>],
    kappa: usize,
) -> Result<Vec<Vec<usize>>> {
    let ell = factors.len();
    if kappa == 0 || ell == 0 {
        return Err(Error::PreconditionViolated(
            "need κ >= 1 and at least one factor".into(),
        ));
    }
    if marked.len() > kappa {
        return Err(Error::PreconditionViolated(format!(
            "{} marked columns exceed κ = {kappa}",
            marked.len()
        )));
    }
    let lg = ceil_log2(kappa as u128) as usize;
    let room = if ell >= lg {
        1u128.checked_shl((ell - lg) as u32).unwrap_or(u128::MAX)
    } else {
        0
    };
    if room <= kappa as u128 {
        return Err(Error::PreconditionViolated(format!(
            "counting bound 2^(ℓ-⌈lg κ⌉) - κ > 0 fails for ℓ = {ell}, κ = {kappa}"
        )));
    }
    let sizes: Vec<usize> = factors.iter().map(|f| f.nrows()).collect();
    for m in marked {
        if m.len() != ell || m.iter().zip(&sizes).any(|(&x, &n)| x > n) {
            return Err(Error::DimensionMismatch(format!(
                "marked tuple {m:?} out of range"
            )));
        }
    }
    let reduced = factors
        .iter()
        .map(reduce_factor)
        .collect::<Result<Vec<_>>>()?;
    let marked_set: BTreeSet<Vec<usize>> = marked.iter().cloned().collect();
    let in_u = |t: &Vec<usize>| t.iter().all(|&x| x >= 1);

    let mut chosen: Vec<Vec<usize>> = row_tuples(&sizes)
        .into_iter()
        .filter(|u| !marked_set.contains(u))
        .collect();
    let m1: Vec<Vec<usize>> = marked_set.iter().filter(|t| in_u(t)).cloned().collect();
    let m2: BTreeSet<Vec<usize>> = marked_set.iter().filter(|t| !in_u(t)).cloned().collect();

    if !m1.is_empty() {
        let rows = frequency_sort(m1, 0);
        let mut masks: Vec<u64> = (0..(1u64 << ell) - 1).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        let mut picked: BTreeSet<Vec<usize>> = BTreeSet::new();
        for i in 0..rows.len() {
            let pos = distinguishing_positions(&rows, i);
            let need: u64 = pos.iter().fold(0, |acc, &j| acc | (1 << j));
            let found = masks.iter().filter(|&&m| m & need == need).find_map(|&m| {
                let w: Vec<usize> = (0..ell)
                    .map(|r| if m >> r & 1 == 1 { rows[i][r] } else { 0 })
                    .collect();
                if m2.contains(&w) || picked.contains(&w) {
                    return None;
                }
                debug_assert!(!tensor_entry(&reduced, &rows[i], &w).is_zero());
                debug_assert!(rows[..i]
                    .iter()
                    .all(|u| tensor_entry(&reduced, u, &w).is_zero()));
                Some(w)
            });
            let w = found.ok_or_else(|| {
                Error::PreconditionViolated(format!("no free column for marked row {:?}", rows[i]))
            })?;
            picked.insert(w.clone());
            chosen.push(w);
        }
    }
    if minor_det(factors, &chosen).is_zero() {
        return Err(Error::SingularMatrix);
    }
    Ok(chosen)
}

/// A: one column per v in `chosen`, equal to 1 at row v and expressing the
/// dependence of z_v on strictly heavier marked columns, so Z·A = 0.
/// Rows follow the columns of Z.
pub fn build_nullspace_a(
    z: &[Vec<Fp>],
    weights: &[u64],
    marked: &[usize],
    chosen: &[usize],
) -> Result<Vec<Vec<Fp>>> {
    let ncols = weights.len();
    let mut a = vec![vec![Fp::ZERO; chosen.len()]; ncols];
    for (c, &v) in chosen.iter().enumerate() {
        let heavier: Vec<usize> = marked
            .iter()
            .copied()
            .filter(|&m| weights[m] > weights[v])
            .collect();
        let sys: Vec<Vec<Fp>> = z
            .iter()
            .map(|row| heavier.iter().map(|&m| row[m]).collect())
            .collect();
        let rhs: Vec<Fp> = z.iter().map(|row| -row[v]).collect();
        let x = if heavier.is_empty() {
            rhs.iter().all(|r| r.is_zero()).then(Vec::new)
        } else {
            linalg::solve(&sys, &rhs)
        };
        let x = x.ok_or_else(|| {
            Error::PreconditionViolated(format!(
                "column {v} is not spanned by heavier marked columns"
            ))
        })?;
        a[v][c] = Fp::one();
        for (&m, xm) in heavier.iter().zip(x) {
            a[m][c] = xm;
        }
    }
    debug_assert!(z.iter().all(|row| (0..chosen.len()).all(|c| (0..ncols)
        .fold(Fp::ZERO, |s, u| s + row[u] * a[u][c])
        .is_zero())));
    Ok(a)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TnaCheck {
    /// det(T' N^{-1} A) is nonzero.
    pub nonzero: bool,
    /// Exponent of the leading inverse monomial y^{-e}.
    pub leading_exponent: u64,
    /// Its coefficient, read off the interpolated determinant.
    pub leading: Fp,
    /// det(T'_{𝒮',𝒞}).
    pub minor_det: Fp,
}

impl TnaCheck {
    pub fn holds(&self) -> bool {
        self.nonzero && self.leading == self.minor_det && !self.minor_det.is_zero()
    }
}

/// Newton interpolation on nodes 0..m-1, returned in the monomial basis.
fn interpolate(ys: &[Fp]) -> UniPoly {
    let m = ys.len();
    let mut dd = ys.to_vec();
    for k in 1..m {
        let inv = Fp::new(k as u64)
            .inv()
            .expect("interpolation needs p > number of nodes");
        for i in (k..m).rev() {
            dd[i] = (dd[i] - dd[i - 1]) * inv;
        }
    }
    let mut p = UniPoly::constant(dd[m - 1]);
    for k in (0..m - 1).rev() {
        p = &p * &UniPoly::new(vec![-Fp::new(k as u64), Fp::one()]) + UniPoly::constant(dd[k]);
    }
    p
}

/// det(T' N_𝒮^{-1} A) over F_p(y), computed exactly by interpolating the
/// cleared determinant, with its leading inverse monomial compared against
/// det(T'_{𝒮',𝒞}). `weights` gives ⟨w,u⟩ for every column tuple of 𝒮.
pub fn verify_tna_det(
    factors: &[ExactMatrix<Fp>],
    radix: &Radix,
    weights: &[u64],
    a: &[Vec<Fp>],
    chosen: &[usize],
) -> Result<TnaCheck> {
    let data: Vec<Vec<Vec<Fp>>> = factors.iter().map(|f| f.data.clone()).collect();
    let sizes: Vec<usize> = factors.iter().map(|f| f.nrows()).collect();
    let rows = row_tuples(&sizes);
    if rows.len() != chosen.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} rows but {} chosen columns",
            rows.len(),
            chosen.len()
        )));
    }
    // Per column: the rows of A that are nonzero, their exponents y^{-ω(u)}.
    let mut cols = Vec::with_capacity(chosen.len());
    let mut span = 0u64;
    for (c, &v) in chosen.iter().enumerate() {
        let support: Vec<usize> = (0..a.len()).filter(|&u| !a[u][c].is_zero()).collect();
        if support.iter().any(|&u| weights[u] < weights[v]) {
            return Err(Error::PreconditionViolated(format!(
                "column {v} of A is not led by row {v}"
            )));
        }
        let top = support
            .iter()
            .map(|&u| weights[u])
            .max()
            .unwrap_or(weights[v]);
        span += top - weights[v];
        cols.push((support, top));
    }
    if span as u128 + 1 > crate::algebra::prime() as u128 {
        return Err(Error::FieldTooSmall {
            needed: span as u128 + 1,
            prime: crate::algebra::prime(),
        });
    }
    let tuples: Vec<Vec<usize>> = radix.tuples().collect();
    // Column c times y^{top_c} is a polynomial of degree top_c - ω(v).
    let entry_terms: Vec<Vec<Vec<(Fp, u64)>>> = rows
        .iter()
        .map(|r| {
            cols.iter()
                .enumerate()
                .map(|(c, (support, top))| {
                    support
                        .iter()
                        .map(|&u| {
                            (
                                tensor_entry(&data, r, &tuples[u]) * a[u][c],
                                top - weights[u],
                            )
                        })
                        .filter(|(x, _)| !x.is_zero())
                        .collect()
                })
                .collect()
        })
        .collect();
    let values: Vec<Fp> = (0..=span)
        .map(|y| {
            let y = Fp::new(y);
            let m: Vec<Vec<Fp>> = entry_terms
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|terms| terms.iter().fold(Fp::ZERO, |s, &(x, e)| s + x * y.pow(e)))
                        .collect()
                })
                .collect();
            linalg::det_field(&m)
        })
        .collect();
    let p = interpolate(&values);
    let chosen_tuples: Vec<Vec<usize>> = chosen.iter().map(|&v| tuples[v].clone()).collect();
    let md = minor_det(factors, &chosen_tuples);
    // Leading inverse monomial: y^{-Σ ω(v)} sits at degree `span` of p.
    let lead_exp: u64 = chosen.iter().map(|&v| weights[v]).sum();
    Ok(TnaCheck {
        nonzero: !p.is_zero(),
        leading_exponent: lead_exp,
        leading: p.coeff(span as usize),
        minor_det: md,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Exponent;
    use crate::transfer::punctured_inverse;

    fn univariate_factor(deg: u32) -> ExactMatrix<Fp> {
        let cone: Vec<Exponent> = (0..=deg).map(|k| Exponent::new(vec![k])).collect();
        punctured_inverse(&cone)
    }

    #[test]
    fn radix_roundtrip() {
        let r = Radix::new(vec![2, 3, 2]);
        for i in 0..r.len() {
            assert_eq!(r.encode(&r.decode(i)), i);
        }
    }

    #[test]
    fn no_marks_gives_identity() {
        let fs = vec![
            univariate_factor(1),
            univariate_factor(1),
            univariate_factor(1),
        ];
        let c = select_invertible_minor(&fs, &[], 2).unwrap();
        assert_eq!(c, vec![vec![1, 1, 1]]);
        assert_eq!(minor_det(&fs, &c), Fp::one());
    }

    #[test]
    fn marked_identity_column_is_replaced() {
        let fs = vec![
            univariate_factor(1),
            univariate_factor(1),
            univariate_factor(1),
        ];
        let c = select_invertible_minor(&fs, &[vec![1, 1, 1]], 2).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c[0].contains(&0));
        assert!(!minor_det(&fs, &c).is_zero());
    }

    #[test]
    fn counting_bound_enforced() {
        let fs = vec![univariate_factor(1)];
        assert!(matches!(
            select_invertible_minor(&fs, &[vec![1]], 4),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn greedy_marks_larger_column() {
        let z = vec![vec![Fp::one(), Fp::one()]];
        assert_eq!(greedy_basis_from_largest(&z, &[1, 2]), vec![1]);
    }

    #[test]
    fn interpolation_exact() {
        let p = UniPoly::from_i64(&[3, 0, -2, 5]);
        let ys: Vec<Fp> = (0..4).map(|y| p.eval(Fp::new(y))).collect();
        assert_eq!(interpolate(&ys), p);
    }
}
