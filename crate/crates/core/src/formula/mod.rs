//! Circuit IR for set-depth formulas plus the diagonal and dual input forms.
//!
//! Variables are 0-based in memory and 1-based in JSON.

pub mod corpus;
mod hadamard_form;
pub mod json;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::algebra::{Exponent, Fp, MPoly, UniPoly};
use crate::error::{Error, Result};
use crate::hadamard::Partition;

pub use hadamard_form::{
    diagonal_to_hadamard, to_hadamard_product, HadamardProductForm, StackedFactor,
};

/// The parameters a blackbox test is allowed to see.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassParams {
    pub n: usize,
    /// Σ-fanin
    pub k: usize,
    /// Π-fanin
    pub d: usize,
    /// bound on the number of monomials in a leaf
    pub lambda: usize,
    #[serde(alias = "H")]
    pub height: usize,
    #[serde(alias = "Delta")]
    pub depth: usize,
    /// size bound
    pub s: usize,
    /// Per-variable degree bound of the sparse leaves (even depth only).
    /// Defaults to `s`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf_degree: Option<u32>,
}

impl ClassParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::PreconditionViolated(msg));
        if self.height == 0 || self.k == 0 || self.lambda == 0 || self.d == 0 {
            return bad("height, k, d and lambda must be positive".into());
        }
        if self.depth != 2 * self.height && self.depth != 2 * self.height + 1 {
            return bad(format!(
                "depth {} does not match height {}",
                self.depth, self.height
            ));
        }
        if self.k.max(self.d).max(self.lambda) > self.s {
            return bad("k, d and lambda must not exceed the size bound s".into());
        }
        Ok(())
    }

    pub fn odd_depth(&self) -> bool {
        self.depth % 2 == 1
    }

    /// Per-variable degree bound of every formula in the class.
    pub fn var_degree(&self) -> u32 {
        if self.odd_depth() {
            1
        } else {
            self.leaf_degree.unwrap_or(self.s as u32).max(1)
        }
    }

    /// Number of partitioned product layers above the leaves.
    pub fn structural_levels(&self) -> usize {
        if self.odd_depth() {
            self.height
        } else {
            self.height - 1
        }
    }
}

/// A formula node: either a weighted sum of products or a leaf polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Sum(Vec<Term>),
    Leaf(MPoly<Fp>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub weight: Fp,
    pub factors: Vec<Node>,
}

impl Node {
    pub fn constant(c: Fp) -> Node {
        Node::Leaf(MPoly::constant(c))
    }

    pub fn linear(constant: Fp, coeffs: &[(usize, Fp)]) -> Node {
        let mut p = MPoly::constant(constant);
        for &(i, c) in coeffs {
            p.add_term(Exponent::unit(i), c);
        }
        Node::Leaf(p)
    }

    pub fn is_constant(&self) -> Option<Fp> {
        match self {
            Node::Leaf(p) if p.terms().keys().all(|e| e.is_zero()) => {
                Some(p.coeff(&Exponent::zero()))
            }
            _ => None,
        }
    }

    /// Variables that occur in the node.
    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Node::Leaf(p) => {
                for e in p.terms().keys() {
                    out.extend(e.support());
                }
            }
            Node::Sum(ts) => {
                for t in ts {
                    for f in &t.factors {
                        f.collect_vars(out);
                    }
                }
            }
        }
    }

    pub fn evaluate(&self, pt: &[Fp]) -> Fp {
        match self {
            Node::Leaf(p) => p.eval_fp(pt),
            Node::Sum(ts) => ts.iter().fold(Fp::ZERO, |acc, t| {
                if t.weight.is_zero() {
                    return acc;
                }
                let mut prod = t.weight;
                for f in &t.factors {
                    prod *= f.evaluate(pt);
                    if prod.is_zero() {
                        break;
                    }
                }
                acc + prod
            }),
        }
    }

    /// Full expansion. Fails with TooLarge once an intermediate result has
    /// more than `limit` monomials.
    pub fn expand(&self, limit: usize) -> Result<MPoly<Fp>> {
        match self {
            Node::Leaf(p) => Ok(p.clone()),
            Node::Sum(ts) => {
                let mut acc = MPoly::new();
                for t in ts {
                    if t.weight.is_zero() {
                        continue;
                    }
                    let mut prod = MPoly::constant(t.weight);
                    for f in &t.factors {
                        let g = f.expand(limit)?;
                        if prod.len().saturating_mul(g.len()) > limit.saturating_mul(4)
                            && prod.len() > 1
                        {
                            return Err(Error::TooLarge(format!(
                                "product of {} and {} monomials",
                                prod.len(),
                                g.len()
                            )));
                        }
                        prod = &prod * &g;
                        if prod.len() > limit {
                            return Err(Error::TooLarge(format!("{} monomials", prod.len())));
                        }
                    }
                    acc = acc + &prod;
                    if acc.len() > limit {
                        return Err(Error::TooLarge(format!("{} monomials", acc.len())));
                    }
                }
                Ok(acc)
            }
        }
    }

    /// Nesting depth of Σ nodes above the leaves.
    pub fn levels(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Sum(ts) => {
                1 + ts
                    .iter()
                    .flat_map(|t| t.factors.iter())
                    .map(|f| f.levels())
                    .max()
                    .unwrap_or(0)
            }
        }
    }

    fn max_sum_fanin(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Sum(ts) => ts
                .iter()
                .flat_map(|t| t.factors.iter())
                .map(|f| f.max_sum_fanin())
                .max()
                .unwrap_or(0)
                .max(ts.len()),
        }
    }

    fn max_prod_fanin(&self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Sum(ts) => ts
                .iter()
                .map(|t| {
                    t.factors
                        .iter()
                        .map(|f| f.max_prod_fanin())
                        .max()
                        .unwrap_or(0)
                        .max(t.factors.len())
                })
                .max()
                .unwrap_or(0),
        }
    }

    fn leaf_stats(&self, terms: &mut usize, deg: &mut u32, linear: &mut bool) {
        match self {
            Node::Leaf(p) => {
                *terms = (*terms).max(p.len());
                for e in p.terms().keys() {
                    *deg = (*deg).max(e.max_entry());
                    if e.total() > 1 {
                        *linear = false;
                    }
                }
            }
            Node::Sum(ts) => {
                for t in ts {
                    for f in &t.factors {
                        f.leaf_stats(terms, deg, linear);
                    }
                }
            }
        }
    }

    /// Gates plus leaf monomials.
    pub fn size(&self) -> usize {
        match self {
            Node::Leaf(p) => p.len().max(1),
            Node::Sum(ts) => {
                1 + ts
                    .iter()
                    .map(|t| 1 + t.factors.iter().map(|f| f.size()).sum::<usize>())
                    .sum::<usize>()
            }
        }
    }
}

/// A set-depth formula with one variable partition per product layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetDepthFormula {
    pub n: usize,
    pub depth: usize,
    pub partitions: Vec<Partition>,
    pub root: Node,
}

impl SetDepthFormula {
    /// Build and validate. `depth` None means: infer from the leaves.
    pub fn new(
        n: usize,
        depth: Option<usize>,
        partitions: Vec<Partition>,
        root: Node,
    ) -> Result<Self> {
        let levels = root.levels();
        let (mut t, mut deg, mut linear) = (0, 0, true);
        root.leaf_stats(&mut t, &mut deg, &mut linear);
        let depth = match depth {
            Some(dp) => dp,
            None if linear => 2 * levels + 1,
            None => 2 * levels + 2,
        };
        let f = SetDepthFormula {
            n,
            depth,
            partitions,
            root,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn height(&self) -> usize {
        self.depth / 2
    }

    pub fn structural_levels(&self) -> usize {
        if self.depth % 2 == 1 {
            self.height()
        } else {
            self.height() - 1
        }
    }

    /// Parameters read off the formula itself.
    pub fn params(&self) -> ClassParams {
        let (mut lam, mut deg, mut linear) = (0, 0, true);
        self.root.leaf_stats(&mut lam, &mut deg, &mut linear);
        let k = self.root.max_sum_fanin().max(1);
        let d = self.root.max_prod_fanin().max(1);
        let lambda = lam.max(1);
        let s = self.root.size().max(k).max(d).max(lambda).max(deg as usize);
        ClassParams {
            n: self.n,
            k,
            d,
            lambda,
            height: self.height(),
            depth: self.depth,
            s,
            leaf_degree: if self.depth % 2 == 0 {
                Some(deg.max(1))
            } else {
                None
            },
        }
    }

    /// Checks the layering, leaf shapes, and partition discipline of every
    /// product gate.
    pub fn validate(&self) -> Result<()> {
        let levels = self.structural_levels();
        if self.depth < 2 {
            return Err(Error::SchemaError {
                path: "/depth".into(),
                msg: "depth must be at least 2".into(),
            });
        }
        if self.partitions.len() < levels {
            return Err(Error::SchemaError {
                path: "/partitions".into(),
                msg: format!(
                    "need {} partitions, found {}",
                    levels,
                    self.partitions.len()
                ),
            });
        }
        for (h, p) in self.partitions.iter().enumerate() {
            for b in p.blocks() {
                if let Some(&v) = b.iter().find(|&&v| v >= self.n) {
                    return Err(Error::SchemaError {
                        path: format!("/partitions/{h}"),
                        msg: format!("variable {} exceeds n = {}", v + 1, self.n),
                    });
                }
            }
        }
        if let Some(v) = self.root.vars().into_iter().find(|&v| v >= self.n) {
            return Err(Error::SchemaError {
                path: "/root".into(),
                msg: format!("variable {} exceeds n = {}", v + 1, self.n),
            });
        }
        self.validate_node(&self.root, 0, levels, "root")
    }

    fn validate_node(&self, node: &Node, layer: usize, levels: usize, path: &str) -> Result<()> {
        match node {
            Node::Leaf(p) => {
                if layer < levels && node.is_constant().is_none() {
                    return Err(Error::PartitionViolation {
                        gate: path.into(),
                        msg: format!(
                            "non-constant leaf above the bottom layer ({layer} < {levels})"
                        ),
                    });
                }
                if self.depth % 2 == 1 && p.total_degree() > 1 {
                    return Err(Error::SchemaError {
                        path: path.into(),
                        msg: "odd depth needs linear leaves".into(),
                    });
                }
                Ok(())
            }
            Node::Sum(ts) => {
                if layer >= levels {
                    return Err(Error::SchemaError {
                        path: path.into(),
                        msg: format!(
                            "sum gate below the last product layer (depth {})",
                            self.depth
                        ),
                    });
                }
                let part = &self.partitions[layer];
                for (i, t) in ts.iter().enumerate() {
                    let gate = format!("{path}/terms/{i}");
                    let mut used = BTreeSet::new();
                    for (j, f) in t.factors.iter().enumerate() {
                        let vars = f.vars();
                        let mut blocks = BTreeSet::new();
                        for &v in &vars {
                            let b = part.block_of(v).ok_or_else(|| Error::PartitionViolation {
                                gate: gate.clone(),
                                msg: format!(
                                    "variable {} lies in no block of layer {}",
                                    v + 1,
                                    layer + 1
                                ),
                            })?;
                            blocks.insert(b);
                        }
                        if blocks.len() > 1 {
                            return Err(Error::PartitionViolation {
                                gate: gate.clone(),
                                msg: format!(
                                    "factor {} spans blocks {:?} of layer {}",
                                    j + 1,
                                    blocks.iter().map(|b| b + 1).collect::<Vec<_>>(),
                                    layer + 1
                                ),
                            });
                        }
                        if let Some(&b) = blocks.iter().next() {
                            if !used.insert(b) {
                                return Err(Error::PartitionViolation {
                                    gate: gate.clone(),
                                    msg: format!(
                                        "two factors share block {} of layer {}",
                                        b + 1,
                                        layer + 1
                                    ),
                                });
                            }
                        }
                        self.validate_node(f, layer + 1, levels, &format!("{gate}/factors/{j}"))?;
                    }
                }
                Ok(())
            }
        }
    }

    pub fn evaluate(&self, pt: &[Fp]) -> Fp {
        assert_eq!(pt.len(), self.n, "point has the wrong length");
        self.root.evaluate(pt)
    }

    /// Pad every sum to fanin exactly `k` and align every product with the
    /// blocks of its layer (restricted to the enclosing block), inserting
    /// constant-one factors and weight-zero products. Semantics are kept.
    pub fn normalize_fanin(&self, k: usize) -> Result<Self> {
        let levels = self.structural_levels();
        let all: Vec<usize> = (0..self.n).collect();
        let root = if levels == 0 {
            self.root.clone()
        } else {
            self.normalize_node(&self.root, 0, levels, &all, k)?
        };
        Ok(SetDepthFormula {
            n: self.n,
            depth: self.depth,
            partitions: self.partitions.clone(),
            root,
        })
    }

    /// Blocks of layer `layer` restricted to `scope`, ordered by first variable.
    pub(crate) fn positions(&self, layer: usize, scope: &[usize]) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.partitions[layer]
            .blocks()
            .iter()
            .map(|b| {
                b.iter()
                    .copied()
                    .filter(|v| scope.contains(v))
                    .collect::<Vec<_>>()
            })
            .filter(|b| !b.is_empty())
            .collect();
        out.sort();
        out
    }

    fn normalize_node(
        &self,
        node: &Node,
        layer: usize,
        levels: usize,
        scope: &[usize],
        k: usize,
    ) -> Result<Node> {
        let positions = self.positions(layer, scope);
        let terms: Vec<Term> = match node {
            Node::Sum(ts) => ts.clone(),
            Node::Leaf(_) => {
                let c = node.is_constant().ok_or(Error::NotNormalized)?;
                vec![Term {
                    weight: c,
                    factors: Vec::new(),
                }]
            }
        };
        if terms.len() > k {
            return Err(Error::PreconditionViolated(format!(
                "sum gate of fanin {} exceeds k = {k}",
                terms.len()
            )));
        }
        let mut out = Vec::with_capacity(k);
        for t in terms.iter().chain(std::iter::repeat_n(
            &Term {
                weight: Fp::ZERO,
                factors: Vec::new(),
            },
            k - terms.len(),
        )) {
            let mut slots: Vec<Option<Node>> = vec![None; positions.len()];
            let mut scalar = t.weight;
            for f in &t.factors {
                let vars = f.vars();
                match vars.iter().next() {
                    None => {
                        // a constant factor folds into the weight
                        scalar *= f.evaluate(&vec![Fp::ZERO; self.n]);
                    }
                    Some(v) => {
                        let pos = positions
                            .iter()
                            .position(|b| b.contains(v))
                            .ok_or(Error::NotNormalized)?;
                        if slots[pos].is_some() {
                            return Err(Error::NotNormalized);
                        }
                        slots[pos] = Some(f.clone());
                    }
                }
            }
            let mut factors = Vec::with_capacity(positions.len());
            for (pos, slot) in slots.into_iter().enumerate() {
                let f = slot.unwrap_or_else(|| Node::constant(Fp::one()));
                factors.push(if layer + 1 == levels {
                    f
                } else {
                    self.normalize_node(&f, layer + 1, levels, &positions[pos], k)?
                });
            }
            out.push(Term {
                weight: scalar,
                factors,
            });
        }
        Ok(Node::Sum(out))
    }

    /// True when every sum has fanin k and every product is aligned with
    /// its layer blocks.
    pub fn is_normalized(&self, k: usize) -> bool {
        let levels = self.structural_levels();
        if levels == 0 {
            return true;
        }
        let all: Vec<usize> = (0..self.n).collect();
        self.check_normalized(&self.root, 0, levels, &all, k)
    }

    fn check_normalized(
        &self,
        node: &Node,
        layer: usize,
        levels: usize,
        scope: &[usize],
        k: usize,
    ) -> bool {
        let Node::Sum(ts) = node else { return false };
        let positions = self.positions(layer, scope);
        ts.len() == k
            && ts.iter().all(|t| {
                t.factors.len() == positions.len()
                    && t.factors.iter().zip(&positions).all(|(f, b)| {
                        f.vars().iter().all(|v| b.contains(v))
                            && (layer + 1 == levels
                                || self.check_normalized(f, layer + 1, levels, b, k))
                    })
            })
    }
}

/// Σ w_i f_i^d with affine forms f_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalCircuit {
    pub n: usize,
    pub power: u32,
    pub weights: Vec<Fp>,
    /// f_i as (constant, [coefficient of x_1, ..., x_n])
    pub forms: Vec<(Fp, Vec<Fp>)>,
}

impl DiagonalCircuit {
    pub fn k(&self) -> usize {
        self.forms.len()
    }

    pub fn form_value(&self, i: usize, pt: &[Fp]) -> Fp {
        let (c, a) = &self.forms[i];
        a.iter().zip(pt).fold(*c, |acc, (x, y)| acc + *x * *y)
    }

    pub fn evaluate(&self, pt: &[Fp]) -> Fp {
        (0..self.k()).fold(Fp::ZERO, |acc, i| {
            acc + self.weights[i] * self.form_value(i, pt).pow(self.power as u64)
        })
    }

    pub fn form_poly(&self, i: usize) -> MPoly<Fp> {
        let (c, a) = &self.forms[i];
        let mut p = MPoly::constant(*c);
        for (j, &x) in a.iter().enumerate() {
            p.add_term(Exponent::unit(j), x);
        }
        p
    }
}

/// Σ_i w_i Π_j g_{i,j}(x_j), each g a univariate polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualRepresentation {
    pub n: usize,
    /// (weight, [(variable, univariate)]) with distinct variables per product
    pub products: Vec<(Fp, Vec<(usize, UniPoly)>)>,
}

impl DualRepresentation {
    pub fn new(n: usize, products: Vec<(Fp, Vec<(usize, UniPoly)>)>) -> Result<Self> {
        for (i, (_, fs)) in products.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for (v, _) in fs {
                if *v >= n {
                    return Err(Error::NotADualForm(format!(
                        "product {} uses variable {} > n",
                        i + 1,
                        v + 1
                    )));
                }
                if !seen.insert(*v) {
                    return Err(Error::NotADualForm(format!(
                        "product {} has two factors in variable {}",
                        i + 1,
                        v + 1
                    )));
                }
            }
        }
        Ok(DualRepresentation { n, products })
    }

    pub fn evaluate(&self, pt: &[Fp]) -> Fp {
        self.products.iter().fold(Fp::ZERO, |acc, (w, fs)| {
            acc + fs.iter().fold(*w, |p, (v, g)| p * g.eval(pt[*v]))
        })
    }

    /// Largest degree of any g_{i,j} in x_j.
    pub fn var_degrees(&self) -> Vec<u32> {
        let mut deg = vec![0u32; self.n];
        for (_, fs) in &self.products {
            for (v, g) in fs {
                deg[*v] = deg[*v].max(g.degree().unwrap_or(0) as u32);
            }
        }
        deg
    }
}

/// Evaluation-only access. This is all a hitting-set test gets to see.
pub trait Blackbox: Sync {
    fn n(&self) -> usize;
    fn eval(&self, pt: &[Fp]) -> Fp;
}

impl Blackbox for SetDepthFormula {
    fn n(&self) -> usize {
        self.n
    }
    fn eval(&self, pt: &[Fp]) -> Fp {
        self.evaluate(pt)
    }
}

impl Blackbox for DiagonalCircuit {
    fn n(&self) -> usize {
        self.n
    }
    fn eval(&self, pt: &[Fp]) -> Fp {
        self.evaluate(pt)
    }
}

impl Blackbox for DualRepresentation {
    fn n(&self) -> usize {
        self.n
    }
    fn eval(&self, pt: &[Fp]) -> Fp {
        self.evaluate(pt)
    }
}

impl Blackbox for MPoly<Fp> {
    fn n(&self) -> usize {
        self.num_vars()
    }
    fn eval(&self, pt: &[Fp]) -> Fp {
        self.eval_fp(pt)
    }
}

/// A closure with a declared arity.
pub struct FnBlackbox<F> {
    pub n: usize,
    pub f: F,
}

impl<F: Fn(&[Fp]) -> Fp + Sync> Blackbox for FnBlackbox<F> {
    fn n(&self) -> usize {
        self.n
    }
    fn eval(&self, pt: &[Fp]) -> Fp {
        (self.f)(pt)
    }
}

/// Any parsed circuit document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Circuit {
    SetDepth(SetDepthFormula),
    Diagonal(DiagonalCircuit),
    Dual(DualRepresentation),
}

impl Circuit {
    pub fn n(&self) -> usize {
        match self {
            Circuit::SetDepth(f) => f.n,
            Circuit::Diagonal(c) => c.n,
            Circuit::Dual(c) => c.n,
        }
    }

    pub fn evaluate(&self, pt: &[Fp]) -> Fp {
        match self {
            Circuit::SetDepth(f) => f.evaluate(pt),
            Circuit::Diagonal(c) => c.evaluate(pt),
            Circuit::Dual(c) => c.evaluate(pt),
        }
    }
}

impl Blackbox for Circuit {
    fn n(&self) -> usize {
        Circuit::n(self)
    }
    fn eval(&self, pt: &[Fp]) -> Fp {
        self.evaluate(pt)
    }
}
