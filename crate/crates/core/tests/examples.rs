//! Small worked instances for every module, checked through the public API.

use pit_core::algebra::exponent::binomial_vec;
use pit_core::algebra::{with_prime, ExactMatrix, Exponent, Fp, MPoly, RatFunc, UniPoly};
use pit_core::concentrate::{
    preserve_invertibility_alpha, sparse_shift, sparse_shift_ell, verify_basis_change, EllSchedule,
};
use pit_core::formula::json::{parse_str, to_string};
use pit_core::formula::FnBlackbox;
use pit_core::formula::{
    diagonal_to_hadamard, to_hadamard_product, Blackbox, Circuit, DualRepresentation,
};
use pit_core::hadamard::{hv, is_l_concentrated, HadamardPoly, HadamardVec, Partition, Weighting};
use pit_core::hitgen::{
    hitting_set, hitting_set_diagonal, hitting_set_for_dual, test_blackbox, Verdict,
};
use pit_core::oracle::{
    concentration_oracle, conjecture_probe, expand, is_zero_bruteforce, ProbeShape,
};
use pit_core::sparsepit::{hitting_points, low_variate_hitting, SparseHittingSpec};
use pit_core::transfer::{
    build_weight_vector, greedy_basis_from_largest, minor_det, punctured_inverse,
    select_invertible_minor, separates, shift_normalize, transfer_matrix, verify_transfer_depth3,
    verify_transfer_mod, verify_transfer_primal, DEFAULT_MAX_WEIGHT,
};
use pit_core::Error;

fn e(v: &[u32]) -> Exponent {
    Exponent::from_slice(v)
}

fn m(rows: &[&[i64]]) -> ExactMatrix<Fp> {
    ExactMatrix::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&x| Fp::from_i64(x)).collect())
            .collect(),
    )
    .unwrap()
}

/// Scalar polynomial over H_1 from (exponent, coefficient) pairs.
fn h1(n: usize, terms: &[(&[u32], i64)]) -> HadamardPoly<Fp> {
    HadamardPoly::from_terms(n, 1, terms.iter().map(|(x, c)| (e(x), hv(&[*c]))))
}

fn circuit(json: &str) -> Circuit {
    parse_str(json).unwrap()
}

fn fps(v: &[i64]) -> Vec<Fp> {
    v.iter().map(|&x| Fp::from_i64(x)).collect()
}

#[test]
fn algebra_binomials() {
    assert_eq!(binomial_vec(&[1, 1], &[1, 0]), Fp::one());
    assert_eq!(binomial_vec(&[1], &[2]), Fp::ZERO);
    assert_eq!(binomial_vec(&[2, 3], &[1, 2]), Fp::new(6));
}

#[test]
fn algebra_rank_det_nullspace() {
    assert_eq!(m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).rank(), 3);
    assert_eq!(m(&[&[0, 0], &[0, 0]]).rank(), 0);
    assert_eq!(with_prime(7, || m(&[&[1, 2], &[2, 4]]).rank()), 1);
    assert_eq!(m(&[&[1, 0], &[0, 1]]).det().unwrap(), Fp::one());
    let pascal = transfer_matrix(&[e(&[0]), e(&[1]), e(&[2])]);
    assert_eq!(pascal.data, m(&[&[1, 0, 0], &[1, 1, 0], &[1, 2, 1]]).data);
    assert_eq!(pascal.det().unwrap(), Fp::one());
    let ns = m(&[&[1, 1]]).nullspace_basis();
    assert_eq!(ns.len(), 1);
    assert!(!ns[0][0].is_zero() && ns[0][0] + ns[0][1] == Fp::ZERO);
}

#[test]
fn algebra_strong_fullness_and_products() {
    assert!(m(&[&[1, 1]]).is_strongly_full().unwrap());
    assert!(!m(&[&[0, 1]]).is_strongly_full().unwrap());
    let tp = punctured_inverse(&[e(&[0]), e(&[1])]);
    assert_eq!(tp.data, m(&[&[-1, 1]]).data);
    assert!(tp.is_strongly_full().unwrap());
    let i2 = m(&[&[1, 0], &[0, 1]]);
    assert_eq!(
        i2.kron(&i2).data,
        m(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]).data
    );
    let prod = m(&[&[1], &[2]]).had_tensor(&m(&[&[3], &[4]])).unwrap();
    assert_eq!(prod.data, m(&[&[3], &[8]]).data);
}

#[test]
fn hadamard_vectors() {
    assert_eq!(hv(&[1, 2]).had_mul(&hv(&[3, 4])).unwrap(), hv(&[3, 8]));
    assert_eq!(
        HadamardVec::ones(2).had_mul(&hv(&[5, 6])).unwrap(),
        hv(&[5, 6])
    );
    assert_eq!(hv(&[0, 1]).had_mul(&hv(&[1, 0])).unwrap(), hv(&[0, 0]));
    with_prime(7, || {
        assert_eq!(hv(&[1, 2]).had_inverse().unwrap(), hv(&[1, 4]))
    });
    assert_eq!(
        HadamardVec::<Fp>::ones(3).had_inverse().unwrap(),
        HadamardVec::ones(3)
    );
    let err = hv(&[0, 1]).had_inverse().unwrap_err();
    assert_eq!(err, Error::NotAUnit { coord: 0 });
    assert_eq!(err.to_string(), "coordinate 1 is not a unit");
}

#[test]
fn hadamard_coefficients_and_shifts() {
    let f = h1(2, &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1), (&[1, 1], 1)]);
    assert_eq!(f.coeff(&e(&[1, 1])), hv(&[1]));
    assert_eq!(f.coeff(&e(&[2, 0])), hv(&[0]));
    let x1x2 = h1(2, &[(&[1, 1], 1)]);
    let (c1, c2) = (Fp::new(5), Fp::new(9));
    assert_eq!(
        x1x2.shift(&[c1, c2]).coeff(&e(&[1, 0])),
        HadamardVec::new(vec![c2])
    );
    assert_eq!(x1x2.shift(&[Fp::one(), Fp::one()]), f);
    assert_eq!(f.shift(&[Fp::ZERO, Fp::ZERO]), f);
    let sq = h1(1, &[(&[2], 1)]).map(|c| UniPoly::constant(*c));
    let shifted = sq.shift(&[UniPoly::t()]);
    assert_eq!(
        shifted.coeff(&e(&[1])).coords()[0],
        UniPoly::from_i64(&[0, 2])
    );
    assert_eq!(
        shifted.coeff(&e(&[0])).coords()[0],
        UniPoly::from_i64(&[0, 0, 1])
    );
}

#[test]
fn hadamard_supports_and_cones() {
    let x1x2 = h1(2, &[(&[1, 1], 1)]);
    assert_eq!(x1x2.cone_size(), 4);
    assert_eq!(h1(2, &[(&[0, 0], 3)]).mu().unwrap(), 0);
    assert_eq!(h1(2, &[(&[0, 0], 3)]).cone_size(), 1);
    let (s, sparsity, mu) = h1(2, &[(&[2, 0], 1), (&[0, 1], 1)])
        .support_stats()
        .unwrap();
    assert_eq!((s.len(), sparsity, mu), (2, 2, 1));
    let p = Partition::new(vec![vec![0, 1], vec![2, 3]]).unwrap();
    assert_eq!(p.block_weight(&e(&[1, 0, 1, 0])).unwrap(), 2);
    assert_eq!(p.block_weight(&Exponent::zero()).unwrap(), 0);
    assert_eq!(p.block_weight(&e(&[1, 1, 0, 0])).unwrap(), 1);
}

#[test]
fn hadamard_concentration_matches_oracle() {
    let cases = [
        (h1(3, &[(&[1, 1, 1], 1)]), 3, false),
        (h1(3, &[(&[0, 0, 0], 4)]), 1, true),
        (
            h1(2, &[(&[0, 0], 1), (&[1, 0], 1), (&[0, 1], 1), (&[1, 1], 1)]),
            1,
            true,
        ),
    ];
    for (f, ell, expected) in cases {
        let c = is_l_concentrated(&f, ell, Weighting::Support).unwrap();
        assert_eq!(c.concentrated, expected);
        assert_eq!(
            concentration_oracle(&f, ell, Weighting::Support).unwrap(),
            expected
        );
    }
}

const MINIMAL: &str = r#"{"version":1,"k":1,"terms":[{"factors":[{"linear":{"1":1}},{"linear":{"3":1}}]}],"partition":[[1,2],[3,4]]}"#;
const TWO_TERMS: &str = r#"{"version":1,"terms":[
    {"factors":[{"linear":{"1":1}},{"linear":{"3":1}}]},
    {"factors":[{"linear":{"2":1}},{"linear":{"4":1}}]}],"partition":[[1,2],[3,4]]}"#;
const ZERO: &str = r#"{"version":1,"terms":[
    {"weight":1,"factors":[{"linear":{"1":1}},{"linear":{"3":1}}]},
    {"weight":-1,"factors":[{"linear":{"1":1}},{"linear":{"3":1}}]}],"partition":[[1,2],[3,4]]}"#;

#[test]
fn formula_parse_and_evaluate() {
    let c = circuit(MINIMAL);
    assert_eq!(c.eval(&fps(&[2, 7, 3, 5])), Fp::new(6));
    assert_eq!(circuit(TWO_TERMS).eval(&fps(&[1, 1, 1, 1])), Fp::new(2));
    assert_eq!(circuit(ZERO).eval(&fps(&[4, 1, 9, 2])), Fp::ZERO);
    let bad = r#"{"version":1,"terms":[{"factors":[{"linear":{"1":1,"3":1}}]}],"partition":[[1,2],[3,4]]}"#;
    assert!(matches!(
        parse_str(bad),
        Err(Error::PartitionViolation { .. })
    ));
    assert!(matches!(
        parse_str(r#"{"terms":[]}"#),
        Err(Error::SchemaError { .. })
    ));
}

#[test]
fn formula_round_trip() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20);
    let c = Circuit::SetDepth(pit_core::formula::corpus::setdepth4(
        &mut rng, 6, 2, 2, 3, 2,
    ));
    let text = to_string(&c);
    assert_eq!(to_string(&parse_str(&text).unwrap()), text);
}

#[test]
fn formula_normalization_and_product_form() {
    let Circuit::SetDepth(f) = circuit(TWO_TERMS) else {
        unreachable!()
    };
    let g = f.normalize_fanin(3).unwrap();
    assert!(g.is_normalized(3));
    assert!(f.normalize_fanin(2).unwrap().is_normalized(2));
    let pts: Vec<Vec<Fp>> = (0..10)
        .map(|i| fps(&[i, 2 * i + 1, 3 - i, i * i]))
        .collect();
    for pt in &pts {
        assert_eq!(f.evaluate(pt), g.evaluate(pt));
    }
    let form = to_hadamard_product(&f.normalize_fanin(2).unwrap()).unwrap();
    assert_eq!(form.kappa(), 2);
    for pt in &pts {
        assert_eq!(form.evaluate(pt).coords()[0], f.evaluate(pt));
    }
}

const DIAGONAL_NONZERO: &str = r#"{"version":1,"kind":"diagonal","n":2,"power":2,"forms":[
    {"weight":1,"linear":{"1":1,"2":1}},{"weight":-1,"linear":{"1":1,"2":-1}}]}"#;
const DIAGONAL_ZERO: &str = r#"{"version":1,"kind":"diagonal","n":2,"power":2,"forms":[
    {"weight":1,"linear":{"1":1,"2":1}},{"weight":1,"linear":{"1":1,"2":-1}},
    {"weight":-2,"linear":{"1":1}},{"weight":-2,"linear":{"2":1}}]}"#;

#[test]
fn formula_diagonal_form() {
    let Circuit::Diagonal(c) = circuit(DIAGONAL_NONZERO) else {
        unreachable!()
    };
    let (w, f, d) = diagonal_to_hadamard(&c);
    for i in 0..5 {
        let pt = fps(&[i + 1, 2 * i - 3]);
        let fd = f
            .eval(&pt)
            .coords()
            .iter()
            .map(|v| v.pow(d as u64))
            .collect();
        assert_eq!(w.dot(&HadamardVec::new(fd)), Fp::new(4) * pt[0] * pt[1]);
    }
}

#[test]
fn transfer_weights_and_normalization() {
    let cones = vec![
        vec![Exponent::zero(), e(&[1])],
        vec![Exponent::zero(), e(&[0, 1])],
    ];
    let w = build_weight_vector(&cones, 2, DEFAULT_MAX_WEIGHT).unwrap();
    assert!(separates(&w, &cones));
    assert!(!separates(
        &[1, 1],
        &[vec![Exponent::zero(), e(&[1]), e(&[0, 1])]]
    ));
    let one_plus_x = h1(1, &[(&[0], 1), (&[1], 1)]);
    let (fp, at) = shift_normalize(&one_plus_x, &[1]).unwrap();
    assert_eq!(
        at.coords()[0],
        RatFunc::from_poly(UniPoly::from_i64(&[1, 1]))
    );
    let expected = RatFunc::new(UniPoly::from_i64(&[1]), UniPoly::from_i64(&[1, 1]));
    assert_eq!(fp.coeff(&e(&[1])).coords()[0], expected);
    assert_eq!(
        fp.coeff(&Exponent::zero()).coords()[0],
        RatFunc::from_poly(UniPoly::from_i64(&[1]))
    );
}

#[test]
fn transfer_equations_small() {
    let one_plus_x = h1(1, &[(&[0], 1), (&[1], 1)]);
    assert!(verify_transfer_primal(&one_plus_x, &[1]).unwrap());
    assert!(verify_transfer_mod(&one_plus_x, &[1]).unwrap());
    assert!(verify_transfer_depth3(&[one_plus_x], &[1]).unwrap());
    let x1x2 = h1(2, &[(&[1, 1], 1)]);
    let w = build_weight_vector(&[x1x2.cone()], 2, DEFAULT_MAX_WEIGHT).unwrap();
    assert!(verify_transfer_primal(&x1x2, &w).unwrap());
}

#[test]
fn transfer_marking_and_minor() {
    assert_eq!(greedy_basis_from_largest(&[fps(&[1, 1])], &[0, 1]), vec![1]);
    let t = punctured_inverse(&[Exponent::zero(), e(&[1])]);
    let factors = vec![t.clone(), t.clone(), t];
    let chosen = select_invertible_minor(&factors, &[], 1).unwrap();
    assert_eq!(chosen, vec![vec![1, 1, 1]]);
    assert_eq!(minor_det(&factors, &chosen), Fp::one());
    let chosen = select_invertible_minor(&factors, &[vec![1, 1, 1]], 2).unwrap();
    assert!(!chosen.contains(&vec![1, 1, 1]));
    assert!(!minor_det(&factors, &chosen).is_zero());
}

#[test]
fn concentrate_schedules() {
    let odd = EllSchedule::new(2, 3, 5, 5);
    assert_eq!(*odd.values.last().unwrap(), 2);
    assert_eq!(EllSchedule::new(2, 2, 4, 4).values, vec![97, 13]);
    for k in 1..=9usize {
        let lg = pit_core::util::ceil_log2(k as u128);
        assert_eq!(EllSchedule::new(1, k, 1, 3).ell0(), 2 * lg as u128 + 1);
    }
}

#[test]
fn concentrate_sparse_shift() {
    let univariates = h1(2, &[(&[2, 0], 1), (&[0, 1], 3), (&[1, 0], 1)]);
    assert_eq!(sparse_shift_ell(&univariates).unwrap(), 2);
    let monomial = h1(3, &[(&[1, 1, 1], 1)]);
    let (map, ell) = sparse_shift(&monomial, 1).unwrap();
    assert_eq!(ell, 1);
    let shifted = map.apply(&monomial, 1);
    assert!(!shifted.coeff(&Exponent::zero()).coords()[0].is_empty());
}

#[test]
fn concentrate_invertibility_alphas() {
    with_prime(7, || {
        let f = HadamardPoly::from_terms(
            2,
            2,
            [
                (Exponent::zero(), hv(&[1, 1])),
                (e(&[1]), hv(&[1, 0])),
                (e(&[0, 1]), hv(&[0, 1])),
            ],
        );
        assert_eq!(
            preserve_invertibility_alpha(&f, 2, 1).unwrap(),
            vec![Fp::ZERO; 2]
        );
        let f = HadamardPoly::from_terms(2, 2, [(e(&[1]), hv(&[1, 0])), (e(&[0, 1]), hv(&[0, 1]))]);
        let a = preserve_invertibility_alpha(&f, 2, 1).unwrap();
        assert!(a.iter().all(|x| !x.is_zero()));
        let f =
            HadamardPoly::from_terms(2, 2, [(e(&[1]), hv(&[1, 1])), (e(&[0, 1]), hv(&[-1, 1]))]);
        let a = preserve_invertibility_alpha(&f, 2, 1).unwrap();
        assert!(a[0] != a[1] && a[0] != -a[1]);
    });
}

#[test]
fn concentrate_basis_change_identity() {
    let f = HadamardPoly::from_terms(1, 1, [(Exponent::zero(), hv(&[1])), (e(&[1]), hv(&[1]))])
        .map(|c| MPoly::constant(*c));
    let shift = vec![MPoly::term(e(&[3]), Fp::new(2))];
    let check = verify_basis_change(&f, &f, &shift, 0).unwrap();
    assert!(check.holds());
    assert_eq!(check.full, check.truncated);
}

#[test]
fn sparsepit_points() {
    assert_eq!(
        hitting_points(&SparseHittingSpec::new(1, 2)).unwrap().len(),
        3
    );
    let pts = hitting_points(&SparseHittingSpec::new(2, 1)).unwrap();
    assert_eq!(pts.len(), 4);
    let f = |p: &[Fp]| p[0] * p[1] - Fp::one();
    assert!(pts.iter().any(|p| !f(p).is_zero()));
    assert!(pts.iter().all(|p| (p[0] - p[0]).is_zero()));
    assert!(low_variate_hitting(2, 2, |_| Fp::ZERO).unwrap().is_none());
    assert_eq!(
        low_variate_hitting(1, 0, |_| Fp::one()).unwrap(),
        Some(vec![Fp::ZERO])
    );
    assert!(low_variate_hitting(1, 3, |p| p[0].pow(3))
        .unwrap()
        .is_some());
}

#[test]
fn hitgen_small_classes() {
    // Two summands make ℓ₀ = 3 > n, so the whole space is one grid.
    let c = circuit(
        r#"{"version":1,"terms":[{"factors":[{"linear":{"1":1}},{"linear":{"2":1}}]},
        {"factors":[{"linear":{"1":1}},{"linear":{"2":1}}]}],"partition":[[1],[2]]}"#,
    );
    let Circuit::SetDepth(f) = &c else {
        unreachable!()
    };
    let hs = hitting_set(&f.params()).unwrap();
    assert!(hs.provenance.fast_path);
    assert!(!test_blackbox(&c, &hs).is_zero());
    let zero = circuit(ZERO);
    let Circuit::SetDepth(z) = &zero else {
        unreachable!()
    };
    let hs = hitting_set(&z.params()).unwrap();
    assert_eq!(test_blackbox(&zero, &hs), Verdict::Zero);
    let one = FnBlackbox {
        n: 4,
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
fn hitgen_ignores_partitions() {
    let a = circuit(TWO_TERMS);
    let b = circuit(
        r#"{"version":1,"terms":[
        {"factors":[{"linear":{"1":1}},{"linear":{"2":1}}]},
        {"factors":[{"linear":{"3":1}},{"linear":{"4":1}}]}],"partition":[[1,3],[2,4]]}"#,
    );
    let (Circuit::SetDepth(fa), Circuit::SetDepth(fb)) = (&a, &b) else {
        unreachable!()
    };
    assert_ne!(fa.partitions, fb.partitions);
    assert_eq!(fa.params(), fb.params());
    let hs = hitting_set(&fa.params()).unwrap();
    assert_eq!(hs, hitting_set(&fb.params()).unwrap());
    for c in [&a, &b] {
        let Verdict::Nonzero { witness } = test_blackbox(c, &hs) else {
            panic!("missed a nonzero formula")
        };
        assert!(!c.eval(&witness).is_zero());
    }
}

#[test]
fn hitgen_diagonal_identities() {
    let zero = circuit(DIAGONAL_ZERO);
    let hs = hitting_set_diagonal(4, 2, 2).unwrap();
    assert_eq!(test_blackbox(&zero, &hs), Verdict::Zero);
    let nz = circuit(DIAGONAL_NONZERO);
    let hs = hitting_set_diagonal(2, 2, 2).unwrap();
    let Verdict::Nonzero { witness } = test_blackbox(&nz, &hs) else {
        panic!("4 x1 x2 was missed")
    };
    assert_eq!(nz.eval(&witness), Fp::new(4) * witness[0] * witness[1]);
    assert!(!nz.eval(&witness).is_zero());
}

#[test]
fn hitgen_dual_forms() {
    let g = UniPoly::from_i64(&[1, 2, 1]);
    let single =
        DualRepresentation::new(2, vec![(Fp::one(), vec![(0, g.clone()), (1, g.clone())])])
            .unwrap();
    assert!(!test_blackbox(&single, &hitting_set_for_dual(&single).unwrap()).is_zero());
    let zero = DualRepresentation::new(
        2,
        vec![
            (Fp::one(), vec![(0, g.clone())]),
            (-Fp::one(), vec![(0, g)]),
        ],
    )
    .unwrap();
    assert_eq!(
        test_blackbox(&zero, &hitting_set_for_dual(&zero).unwrap()),
        Verdict::Zero
    );
}

#[test]
fn oracle_examples() {
    assert_eq!(expand(&circuit(TWO_TERMS), 1000).unwrap().len(), 2);
    assert!(expand(&circuit(ZERO), 1000).unwrap().is_empty());
    assert!(is_zero_bruteforce(&circuit(ZERO)).unwrap());
    let x1 =
        circuit(r#"{"version":1,"terms":[{"factors":[{"linear":{"1":1}}]}],"partition":[[1]]}"#);
    assert!(!is_zero_bruteforce(&x1).unwrap());
    let rows = conjecture_probe(ProbeShape::Monomial { n: 3 }, Some(3), false, 1, 0).unwrap();
    assert!(!rows[0].pass);
    let rows = conjecture_probe(ProbeShape::Monomial { n: 3 }, Some(1), true, 1, 0).unwrap();
    assert!(rows[0].pass);
}
