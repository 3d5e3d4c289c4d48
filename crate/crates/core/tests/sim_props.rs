use std::collections::HashMap;
use std::sync::Arc;

use ldgm_sm::gf::{BitVec, Gf4, PauliVec};
use ldgm_sm::peg::builtin_fixtures;
use ldgm_sm::sim::{
    binomial_weight, build_systems, combine_pr, estimate_pl, run_trial, sample_pauli_error,
    sample_weighted_error, substream, NoiseModel, PlTable, SimSystem, SmDecoderKind, Stratum,
};
use ldgm_sm::sm_code::{encode_stabilizers, repetition_sm_code, SmCode};
use ldgm_sm::stabilizer::{build_rotated_surface_code, QuantumLookupDecoder};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn fixture_code(name: &str) -> SmCode {
    let f = builtin_fixtures().unwrap().into_iter().find(|(n, _)| *n == name).unwrap().1;
    SmCode::new(f.lift.expand()).unwrap()
}

fn systems() -> Vec<SimSystem> {
    build_systems(
        build_rotated_surface_code(5).unwrap(),
        2,
        vec![
            ("h6x15".into(), fixture_code("h6x15")),
            ("rep".into(), repetition_sm_code(24, 5).unwrap()),
        ],
        SmDecoderKind::Bounded,
    )
    .unwrap()
}

#[test]
fn subsets_are_uniform() {
    let mut rng = substream(2024, 7);
    let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
    let draws = 100_000u64;
    for _ in 0..draws {
        *counts.entry(sample_weighted_error(6, 2, &mut rng).unwrap()).or_default() += 1;
    }
    assert_eq!(counts.len(), 15);
    let expected = draws as f64 / 15.0;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p_value = 1.0 - ChiSquared::new(14.0).unwrap().cdf(chi2);
    assert!(p_value > 0.001, "chi2 {chi2}, p {p_value}");
}

#[test]
fn pauli_labels_are_uniform() {
    let mut rng = substream(5, 1);
    let mut counts = [0u64; 4];
    for _ in 0..30_000 {
        let e = sample_pauli_error(1, 1, &mut rng).unwrap();
        counts[e.symbol(0) as usize] += 1;
    }
    assert_eq!(counts[0], 0);
    let chi2: f64 = counts[1..].iter().map(|&c| (c as f64 - 10_000.0).powi(2) / 10_000.0).sum();
    assert!(1.0 - ChiSquared::new(2.0).unwrap().cdf(chi2) > 0.001);
}

#[test]
fn binomial_weight_matches_exact_rational() {
    let p = BigRational::new(BigInt::from(1), BigInt::from(100));
    let q = BigRational::one() - &p;
    let c = BigRational::from_integer(BigInt::from(120 * 119 / 2));
    let mut exact = c * &p * &p;
    for _ in 0..118 {
        exact *= &q;
    }
    let exact = exact.to_f64().unwrap();
    let got = binomial_weight(120, 2, 0.01);
    assert!(((got - exact) / exact).abs() < 1e-12, "{got} vs {exact}");
    let total: f64 = (0..=120).map(|w| binomial_weight(120, w, 0.01)).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let clean = 0.99f64.powi(120);
    assert!((binomial_weight(120, 0, 0.01) - clean).abs() < 1e-12 * clean);
}

#[test]
fn single_measurement_flip_never_fails_on_ldgm() {
    let sys = &systems()[0];
    let e = PauliVec::identity(25);
    for k in 0..60 {
        assert!(!run_trial(sys, &e, &BitVec::unit(60, k)).unwrap());
    }
}

#[test]
fn three_flips_in_one_repetition_block_flip_that_bit() {
    let sys = &systems()[1];
    let code = build_rotated_surface_code(5).unwrap();
    let q_dec = QuantumLookupDecoder::build(&code, 2).unwrap();
    let e = PauliVec::identity(25);
    for block in 0..24 {
        for trio in combos3() {
            let idx: Vec<usize> = trio.iter().map(|&c| block * 5 + c).collect();
            let m = BitVec::from_indices(120, &idx);
            let decoded = sys.sm_decoder().decode(sys.sm(), &m);
            assert_eq!(decoded.syndrome, BitVec::unit(24, block));
            let expect = match q_dec.decode(&decoded.syndrome) {
                None => true,
                Some(c) => !code.in_stabilizer_group(&(&e + c)),
            };
            assert_eq!(run_trial(sys, &e, &m).unwrap(), expect);
        }
    }
}

fn combos3() -> Vec<[usize; 3]> {
    let mut v = Vec::new();
    for a in 0..5 {
        for b in a + 1..5 {
            for c in b + 1..5 {
                v.push([a, b, c]);
            }
        }
    }
    v
}

#[test]
fn correctable_strata_have_zero_failure() {
    let sys = systems();
    let mut rng = substream(1, 1);
    for w in 0..=3 {
        let s = estimate_pl(&sys[0], 0, w, 100, &mut rng, 1_000_000).unwrap();
        assert!(s.exact);
        assert_eq!(s.failures, 0, "w_m = {w}");
    }
    let s = estimate_pl(&sys[1], 0, 2, 100, &mut rng, 1_000_000).unwrap();
    assert_eq!((s.failures, s.exact), (0, true));
}

#[test]
fn sampled_weight_four_on_ldgm_is_small_but_bounded() {
    let sys = systems();
    let mut rng = substream(3, 3);
    let s = estimate_pl(&sys[0], 0, 4, 2_000, &mut rng, 0).unwrap();
    assert!(!s.exact);
    assert_eq!(s.trials, 2_000);
    assert!(s.p_l() <= 1.0);
}

#[test]
fn combining_all_ones_gives_complement_of_clean_probability() {
    let mut t = PlTable::new(25, 60);
    for w in 0..=60 {
        t.insert(Stratum { w_q: 0, w_m: w, trials: 1, failures: u64::from(w > 0), exact: true });
    }
    for p in [0.001, 0.05, 0.3] {
        let e = combine_pr(&t, &NoiseModel::measurement_only(p)).unwrap();
        assert!((e.pr - (1.0 - (1.0 - p).powi(60))).abs() < 1e-12);
    }
    let zero = PlTable { strata: t.strata.iter().map(|(k, s)| (*k, Stratum { failures: 0, ..*s })).collect(), ..t };
    assert_eq!(combine_pr(&zero, &NoiseModel::measurement_only(0.2)).unwrap().pr, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Measuring products of generators is the SM encoding of the plain syndrome.
    #[test]
    fn measured_syndrome_is_encoded_syndrome(
        picks in prop::collection::vec((0usize..25, 1usize..4), 0..6),
        name in prop::sample::select(vec!["h2x5_1", "h4x10_2", "h8x20"]),
    ) {
        let code = Arc::new(build_rotated_surface_code(5).unwrap());
        let sm = fixture_code(name);
        let ms = encode_stabilizers(&code, &sm).unwrap();
        let mut e = PauliVec::identity(25);
        for (q, s) in picks {
            e.set(q, Gf4::ALL[s]);
        }
        let measured = ms.measured_syndrome(&e, &BitVec::zeros(60)).unwrap();
        prop_assert_eq!(measured, sm.encode(&code.syndrome(&e).unwrap()).unwrap());
    }
}
