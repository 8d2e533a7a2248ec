//! Random circuit generators for tests, benchmarks, and `gen-corpus`.
//!
//! The `*_zero` generators build identically-zero circuits by construction
//! (scaled copies that cancel, distributive splits, telescoping pairs), so
//! soundness can be tested without trusting the oracle.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Circuit, DiagonalCircuit, DualRepresentation, Node, SetDepthFormula, Term};
use crate::algebra::{Exponent, Fp, MPoly, UniPoly};
use crate::hadamard::Partition;

fn small<R: Rng>(rng: &mut R) -> Fp {
    Fp::from_i64(rng.gen_range(-4..=4))
}

fn small_nonzero<R: Rng>(rng: &mut R) -> Fp {
    loop {
        let c = rng.gen_range(-4i64..=4);
        if c != 0 {
            return Fp::from_i64(c);
        }
    }
}

/// Random split of {0..n-1} into `d` nonempty blocks (d <= n).
pub fn random_partition<R: Rng>(rng: &mut R, n: usize, d: usize) -> Partition {
    assert!(
        d >= 1 && d <= n,
        "cannot split {n} variables into {d} blocks"
    );
    let mut vars: Vec<usize> = (0..n).collect();
    vars.shuffle(rng);
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(d - 1).collect();
    cuts.sort_unstable();
    let mut blocks = Vec::with_capacity(d);
    let mut start = 0;
    for c in cuts.into_iter().chain(std::iter::once(n)) {
        blocks.push(vars[start..c].to_vec());
        start = c;
    }
    Partition::new(blocks).expect("blocks are disjoint by construction")
}

/// Affine form on `block` with at least one nonzero variable coefficient.
pub fn random_linear<R: Rng>(rng: &mut R, block: &[usize]) -> MPoly<Fp> {
    loop {
        let mut p = MPoly::constant(small(rng));
        for &v in block {
            p.add_term(Exponent::unit(v), small(rng));
        }
        if p.total_degree() == 1 {
            return p;
        }
    }
}

/// Sparse polynomial on `block` with at most `lambda` monomials, each of
/// per-variable degree at most `delta`.
pub fn random_sparse<R: Rng>(rng: &mut R, block: &[usize], lambda: usize, delta: u32) -> MPoly<Fp> {
    loop {
        let mut p = MPoly::new();
        let terms = rng.gen_range(1..=lambda);
        for _ in 0..terms {
            let mut e = Exponent::zero();
            for &v in block {
                if rng.gen_bool(0.6) {
                    e.set(v, rng.gen_range(0..=delta));
                }
            }
            p.add_term(e, small_nonzero(rng));
        }
        if !p.is_empty() && p.total_degree() > 0 {
            return p;
        }
    }
}

fn product_on<R: Rng>(
    rng: &mut R,
    part: &Partition,
    leaf: &mut impl FnMut(&mut R, &[usize]) -> MPoly<Fp>,
) -> Vec<Node> {
    part.blocks()
        .iter()
        .map(|b| Node::Leaf(leaf(rng, b)))
        .collect()
}

/// Random set-multilinear depth-3 formula: Σ_{i≤k} c_i Π_{j≤d} ℓ_{i,j}(x_{X_j}).
pub fn setml3<R: Rng>(rng: &mut R, n: usize, k: usize, d: usize) -> SetDepthFormula {
    let part = random_partition(rng, n, d);
    let terms = (0..k)
        .map(|_| Term {
            weight: small_nonzero(rng),
            factors: product_on(rng, &part, &mut |r, b| random_linear(r, b)),
        })
        .collect();
    SetDepthFormula::new(n, Some(3), vec![part], Node::Sum(terms))
        .expect("generator respects the partition")
}

/// Identically zero set-multilinear depth-3 formula; `variant` picks the
/// construction. Needs k >= 2 (k >= 3 for the distributive split, k >= 4
/// for the telescoping pair).
pub fn setml3_zero<R: Rng>(
    rng: &mut R,
    n: usize,
    k: usize,
    d: usize,
    variant: usize,
) -> SetDepthFormula {
    let part = random_partition(rng, n, d);
    let mut lin = |r: &mut R, b: &[usize]| random_linear(r, b);
    let terms = zero_terms(rng, &part, k, variant, &mut lin);
    SetDepthFormula::new(n, Some(3), vec![part], Node::Sum(terms))
        .expect("generator respects the partition")
}

fn zero_terms<R: Rng>(
    rng: &mut R,
    part: &Partition,
    k: usize,
    variant: usize,
    leaf: &mut impl FnMut(&mut R, &[usize]) -> MPoly<Fp>,
) -> Vec<Term> {
    assert!(k >= 2, "a cancelling sum needs at least two terms");
    let variant = match variant % 3 {
        1 if k < 3 => 0,
        2 if k < 4 => 0,
        v => v,
    };
    match variant {
        0 => {
            // Σ c_i · (s_i ρ_1) ρ_2 ... with Σ c_i s_i = 0
            let base = product_on(rng, part, leaf);
            let scales: Vec<Fp> = (0..k).map(|_| small_nonzero(rng)).collect();
            let mut weights: Vec<Fp> = (0..k - 1).map(|_| small_nonzero(rng)).collect();
            let partial = weights
                .iter()
                .zip(&scales)
                .fold(Fp::ZERO, |acc, (w, s)| acc + *w * *s);
            weights.push(-partial * scales[k - 1].inv().unwrap());
            (0..k)
                .map(|i| {
                    let mut factors = base.clone();
                    if let Node::Leaf(p) = &factors[0] {
                        factors[0] = Node::Leaf(p.scale(&scales[i]));
                    }
                    Term {
                        weight: weights[i],
                        factors,
                    }
                })
                .collect()
        }
        1 => {
            // (g + h)·P - g·P - h·P
            let rest = product_on(rng, part, leaf);
            let b0 = &part.blocks()[0];
            let g = leaf(rng, b0);
            let h = leaf(rng, b0);
            let with = |f: MPoly<Fp>| {
                let mut fs = rest.clone();
                fs[0] = Node::Leaf(f);
                fs
            };
            vec![
                Term {
                    weight: Fp::one(),
                    factors: with(g.clone() + &h),
                },
                Term {
                    weight: -Fp::one(),
                    factors: with(g),
                },
                Term {
                    weight: -Fp::one(),
                    factors: with(h),
                },
            ]
        }
        _ => {
            // ρ_1 - ρ_2 + ρ_2 - ρ_1
            let a = product_on(rng, part, leaf);
            let b = product_on(rng, part, leaf);
            let w1 = small_nonzero(rng);
            let w2 = small_nonzero(rng);
            vec![
                Term {
                    weight: w1,
                    factors: a.clone(),
                },
                Term {
                    weight: -w2,
                    factors: b.clone(),
                },
                Term {
                    weight: w2,
                    factors: b,
                },
                Term {
                    weight: -w1,
                    factors: a,
                },
            ]
        }
    }
}

/// Random set-depth-4 formula (height 2): Σ_i c_i Π_j g_{i,j}(x_{X_j}) with
/// sparse leaves of at most `lambda` monomials and per-variable degree
/// at most `delta`.
pub fn setdepth4<R: Rng>(
    rng: &mut R,
    n: usize,
    k: usize,
    d: usize,
    lambda: usize,
    delta: u32,
) -> SetDepthFormula {
    let part = random_partition(rng, n, d);
    let terms = (0..k)
        .map(|_| Term {
            weight: small_nonzero(rng),
            factors: product_on(rng, &part, &mut |r, b| random_sparse(r, b, lambda, delta)),
        })
        .collect();
    SetDepthFormula::new(n, Some(4), vec![part], Node::Sum(terms))
        .expect("generator respects the partition")
}

pub fn setdepth4_zero<R: Rng>(
    rng: &mut R,
    n: usize,
    k: usize,
    d: usize,
    lambda: usize,
    delta: u32,
    variant: usize,
) -> SetDepthFormula {
    let part = random_partition(rng, n, d);
    let mut leaf = |r: &mut R, b: &[usize]| random_sparse(r, b, lambda, delta);
    let terms = zero_terms(rng, &part, k, variant, &mut leaf);
    SetDepthFormula::new(n, Some(4), vec![part], Node::Sum(terms))
        .expect("generator respects the partition")
}

/// Random set-depth-5 formula (height 2, linear leaves). The second
/// partition refines the first; each first-level block is split into at
/// most `d2` pieces.
pub fn setdepth5<R: Rng>(rng: &mut R, n: usize, k: usize, d1: usize, d2: usize) -> SetDepthFormula {
    let p1 = random_partition(rng, n, d1);
    let mut blocks2 = Vec::new();
    let mut inner: Vec<Partition> = Vec::new();
    for b in p1.blocks() {
        let pieces = d2.min(b.len()).max(1);
        let sub = random_partition(rng, b.len(), pieces);
        let mapped: Vec<Vec<usize>> = sub
            .blocks()
            .iter()
            .map(|s| s.iter().map(|&i| b[i]).collect())
            .collect();
        inner.push(Partition::new(mapped.clone()).unwrap());
        blocks2.extend(mapped);
    }
    let p2 = Partition::new(blocks2).unwrap();
    let terms = (0..k)
        .map(|_| Term {
            weight: small_nonzero(rng),
            factors: inner
                .iter()
                .map(|q| {
                    Node::Sum(
                        (0..k)
                            .map(|_| Term {
                                weight: small_nonzero(rng),
                                factors: product_on(rng, q, &mut |r, b| random_linear(r, b)),
                            })
                            .collect(),
                    )
                })
                .collect(),
        })
        .collect();
    SetDepthFormula::new(n, Some(5), vec![p1, p2], Node::Sum(terms))
        .expect("generator respects the partitions")
}

/// Random Σ w_i f_i^d with affine f_i over all n variables.
pub fn diagonal<R: Rng>(rng: &mut R, n: usize, k: usize, power: u32) -> DiagonalCircuit {
    let forms = (0..k)
        .map(|_| (small(rng), (0..n).map(|_| small(rng)).collect()))
        .collect();
    DiagonalCircuit {
        n,
        power,
        weights: (0..k).map(|_| small_nonzero(rng)).collect(),
        forms,
    }
}

/// Identically zero diagonal circuit: scaled copies of forms whose weights
/// cancel, w·(s f)^d + (-w s^d)·f^d.
pub fn diagonal_zero<R: Rng>(rng: &mut R, n: usize, k: usize, power: u32) -> DiagonalCircuit {
    let mut c = diagonal(rng, n, k.div_ceil(2), power);
    let m = c.forms.len();
    let mut weights = Vec::new();
    let mut forms = Vec::new();
    for i in 0..m {
        let s = small_nonzero(rng);
        let (a, b) = &c.forms[i];
        forms.push((*a * s, b.iter().map(|x| *x * s).collect()));
        weights.push(c.weights[i]);
        forms.push(c.forms[i].clone());
        weights.push(-c.weights[i] * s.pow(power as u64));
    }
    c.forms = forms;
    c.weights = weights;
    c
}

/// Random Σ_i w_i Π_j g_{i,j}(x_j) with univariates of degree at most `deg`.
pub fn dual<R: Rng>(rng: &mut R, n: usize, k: usize, deg: usize) -> DualRepresentation {
    let products = (0..k)
        .map(|_| {
            let mut fs = Vec::new();
            for j in 0..n {
                if rng.gen_bool(0.8) {
                    let cs: Vec<Fp> = (0..=deg).map(|_| small(rng)).collect();
                    fs.push((j, UniPoly::new(cs)));
                }
            }
            (small_nonzero(rng), fs)
        })
        .collect();
    DualRepresentation::new(n, products).unwrap()
}

/// Two identical products with weights 1 and -1, plus cancelling copies.
pub fn dual_zero<R: Rng>(rng: &mut R, n: usize, k: usize, deg: usize) -> DualRepresentation {
    let base = dual(rng, n, k.div_ceil(2).max(1), deg);
    let mut products = Vec::new();
    for (w, fs) in base.products {
        products.push((w, fs.clone()));
        products.push((-w, fs));
    }
    DualRepresentation::new(n, products).unwrap()
}

/// Families understood by `gen-corpus` and `bench`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Setml3,
    Setdepth4,
    Diagonal,
}

impl std::str::FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "setml3" => Ok(Family::Setml3),
            "setdepth4" => Ok(Family::Setdepth4),
            "diagonal" => Ok(Family::Diagonal),
            other => Err(format!(
                "unknown family {other:?} (setml3, setdepth4, diagonal)"
            )),
        }
    }
}

/// One corpus entry. Every fifth instance is zero by construction; the flag
/// says so.
pub fn corpus_instance<R: Rng>(rng: &mut R, family: Family, index: usize) -> (Circuit, bool) {
    let zero = index % 5 == 4;
    match family {
        Family::Setml3 => {
            let n = rng.gen_range(2..=8);
            let d = rng.gen_range(1..=n.min(4));
            let k = rng.gen_range(if zero { 2 } else { 1 }..=4);
            let f = if zero {
                setml3_zero(rng, n, k, d, index / 5)
            } else {
                setml3(rng, n, k, d)
            };
            (Circuit::SetDepth(f), zero)
        }
        Family::Setdepth4 => {
            let n = rng.gen_range(2..=6);
            let d = rng.gen_range(1..=2.min(n));
            let lambda = rng.gen_range(1..=3);
            let f = if zero {
                setdepth4_zero(rng, n, 2, d, lambda, 2, index / 5)
            } else {
                let k = rng.gen_range(1..=2);
                setdepth4(rng, n, k, d, lambda, 2)
            };
            (Circuit::SetDepth(f), zero)
        }
        Family::Diagonal => {
            let n = rng.gen_range(1..=6);
            let k = rng.gen_range(if zero { 2 } else { 1 }..=8);
            let d = rng.gen_range(1..=6);
            let c = if zero {
                diagonal_zero(rng, n, k, d)
            } else {
                diagonal(rng, n, k, d)
            };
            (Circuit::Diagonal(c), zero)
        }
    }
}
