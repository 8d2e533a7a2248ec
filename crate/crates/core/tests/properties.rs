use pit_core::algebra::{Exponent, Fp, MPoly};
use pit_core::concentrate::{EllSchedule, ShiftMap};
use pit_core::formula::corpus::{setdepth4, setml3, setml3_zero};
use pit_core::formula::{Blackbox, Circuit};
use pit_core::hadamard::{is_l_concentrated, HadamardPoly, HadamardVec, Weighting};
use pit_core::hitgen::{hitting_set, test_blackbox, Verdict};
use pit_core::oracle::{concentration_oracle, expand, is_zero_bruteforce, DEFAULT_LIMIT};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fp() -> impl Strategy<Value = Fp> {
    (0u64..50).prop_map(Fp::new)
}

/// Hadamard polynomial over H_κ in `n` variables, exponents up to 2.
fn hadamard_poly(n: usize, kappa: usize) -> impl Strategy<Value = HadamardPoly<Fp>> {
    prop::collection::vec(
        (
            prop::collection::vec(0u32..3, n),
            prop::collection::vec(fp(), kappa),
        ),
        1..8,
    )
    .prop_map(move |terms| {
        HadamardPoly::from_terms(
            n,
            kappa,
            terms
                .into_iter()
                .map(|(e, c)| (Exponent::new(e), HadamardVec::new(c))),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn verdict_matches_expansion(seed in any::<u64>(), n in 2usize..6, k in 1usize..4, zero in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 1 + (seed as usize % n.min(3));
        let f = if zero && k >= 2 { setml3_zero(&mut rng, n, k, d, seed as usize) } else { setml3(&mut rng, n, k, d) };
        let c = Circuit::SetDepth(f.clone());
        let hs = hitting_set(&f.params()).unwrap();
        let v = test_blackbox(&c, &hs);
        prop_assert_eq!(v.is_zero(), is_zero_bruteforce(&c).unwrap());
        if let Verdict::Nonzero { witness } = v {
            prop_assert!(!c.eval(&witness).is_zero());
        }
    }

    #[test]
    fn expansion_agrees_with_evaluation(seed in any::<u64>(), pt in prop::collection::vec(fp(), 5)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Circuit::SetDepth(setdepth4(&mut rng, 5, 2, 2, 2, 2));
        let p = expand(&c, DEFAULT_LIMIT).unwrap();
        prop_assert_eq!(p.eval_fp(&pt), c.eval(&pt));
    }

    #[test]
    fn schedule_recurrence(h in 1usize..7, k in 1usize..64, lambda in 1usize..64, odd in any::<bool>()) {
        let s = EllSchedule::new(h, k, lambda, 2 * h + odd as usize);
        prop_assert!(s.recurrence_holds());
        prop_assert_eq!(s.ell0(), s.values[0]);
    }

    #[test]
    fn shift_layers_are_monotone(
        a1 in prop::collection::vec(fp(), 3),
        a0 in prop::collection::vec(fp(), 3),
        e1 in prop::collection::vec(0u64..4, 3),
        e0 in prop::collection::vec(1u64..4, 3),
        x in prop::collection::vec(fp(), 3),
        t in prop::collection::vec(fp(), 2),
    ) {
        let top = ShiftMap::identity(3).extend(1, &a1, &e1).unwrap();
        let both = top.extend(0, &a0, &e0).unwrap();
        prop_assert_eq!(both.restrict_above(0), top.clone());
        prop_assert!(both.extend(1, &a0, &e0).is_err());
        // With positive exponents, layer 0 vanishes at t_0 = 0.
        prop_assert_eq!(both.translate(&x, &[Fp::ZERO, t[1]]), top.translate(&x, &[Fp::ZERO, t[1]]));
    }

    #[test]
    fn shift_map_commutes_with_evaluation(
        f in hadamard_poly(3, 2),
        alphas in prop::collection::vec(fp(), 3),
        exps in prop::collection::vec(0u64..3, 3),
        x in prop::collection::vec(fp(), 3),
        t in fp(),
    ) {
        let map = ShiftMap::identity(3).extend(0, &alphas, &exps).unwrap();
        let shifted = map.apply(&f, 1);
        let pt: Vec<_> = x.iter().map(|v| MPoly::constant(*v)).collect();
        let lhs: Vec<Fp> = shifted.eval(&pt).coords().iter().map(|c| c.eval_fp(&[t])).collect();
        prop_assert_eq!(lhs, f.eval(&map.translate(&x, &[t])).coords().to_vec());
    }

    #[test]
    fn concentrated_above_max_support(f in hadamard_poly(4, 3)) {
        prop_assume!(!f.is_zero());
        let mu = f.mu().unwrap();
        prop_assert!(is_l_concentrated(&f, mu + 1, Weighting::Support).unwrap().concentrated);
    }

    #[test]
    fn rank_check_matches_oracle(f in hadamard_poly(3, 3), ell in 0usize..4) {
        let c = is_l_concentrated(&f, ell, Weighting::Support).unwrap();
        prop_assert_eq!(c.concentrated, concentration_oracle(&f, ell, Weighting::Support).unwrap());
        prop_assert!(c.rank_low <= c.rank_full);
    }
}
