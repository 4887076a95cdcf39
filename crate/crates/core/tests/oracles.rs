//! Exact reference computations by enumeration, checked against the library.

use polar_workbench::construction::{min_distance, rm_code, z_profile_bec};
use polar_workbench::sc::sc_decode_genie;
use polar_workbench::{BitBlock, CodeSpec, Observation, Orientation, RuleTag, SoftBlock};

mod common;
use common::*;

#[test]
fn z_profile_matches_enumeration() {
    for n in 0..=4u32 {
        let len = 1usize << n;
        let primal: Vec<u32> = (0..len).map(|i| primal_row(i, len)).collect();
        let dual: Vec<u32> = (0..len).map(|i| dual_row(i, len)).collect();
        let order = standard_order(n);
        let reversed: Vec<usize> = order.iter().rev().copied().collect();
        for step in 1..=9 {
            let eps = step as f64 / 10.0;
            let exact = enumerate_profile(n, eps, &primal, &order);
            let z = z_profile_bec(eps, n, Orientation::Primal).unwrap();
            for (a, b) in z.values().iter().zip(&exact) {
                assert!((a - b).abs() <= 1e-12, "n={n} eps={eps}: {a} vs {b}");
            }
            let exact = enumerate_profile(n, eps, &dual, &reversed);
            let z = z_profile_bec(eps, n, Orientation::Dual).unwrap();
            for (a, b) in z.values().iter().zip(&exact) {
                assert!((a - b).abs() <= 1e-12, "dual n={n} eps={eps}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn genie_sc_flags_match_span_criterion() {
    let n = 3u32;
    let len = 8;
    let rows: Vec<u32> = (0..len).map(|i| primal_row(i, len)).collect();
    let order = standard_order(n);
    let code = CodeSpec::from_information_set(n, &(0..len).collect::<Vec<_>>(), RuleTag::Explicit).unwrap();
    let truth = BitBlock::from_bits(&[1, 0, 1, 1, 0, 0, 1, 0]).unwrap();
    let x = code.codeword_of(&truth);
    for erased in 0u32..1 << len {
        let obs = SoftBlock::new(
            (0..len)
                .map(|j| {
                    if erased >> j & 1 == 1 {
                        Observation::Erasure
                    } else {
                        Observation::Llr(if x.get(j) == 0 { f64::INFINITY } else { f64::NEG_INFINITY })
                    }
                })
                .collect(),
        )
        .unwrap();
        let report = sc_decode_genie(&code, &obs, &truth).unwrap();
        let mut basis = Basis::default();
        let mut lost = vec![false; len];
        for &i in order.iter().rev() {
            lost[i] = !basis.insert(rows[i] & !erased & 0xff);
        }
        assert_eq!(report.flags, lost, "pattern {erased:08b}");
    }
}

#[test]
fn minimum_distance_formula_is_exact_for_small_codes() {
    for n in 0..=4u32 {
        let len = 1usize << n;
        let rows: Vec<u32> = (0..len).map(|i| primal_row(i, len)).collect();
        for subset in 1u32..((1u64 << len) as u32) {
            if subset.count_ones() > 12 {
                continue;
            }
            let info: Vec<usize> = (0..len).filter(|&i| subset >> i & 1 == 1).collect();
            let code = CodeSpec::from_information_set(n, &info, RuleTag::Explicit).unwrap();
            let chosen: Vec<u32> = info.iter().map(|&i| rows[i]).collect();
            assert_eq!(min_distance(&code).unwrap() as u32, exhaustive_min_weight(&chosen), "n={n} I={info:?}");
        }
    }
}

#[test]
fn reed_muller_distance() {
    for n in 1..=10u32 {
        for r in 0..=n {
            let code = rm_code(n, r).unwrap();
            assert_eq!(min_distance(&code).unwrap(), 1 << (n - r), "RM({r},{n})");
            if n <= 4 && code.information_len() <= 12 {
                let len = 1usize << n;
                let chosen: Vec<u32> = code.information().iter().map(|&i| primal_row(i, len)).collect();
                assert_eq!(exhaustive_min_weight(&chosen), 1 << (n - r));
            }
        }
    }
}

#[test]
fn dual_codewords_follow_transposed_rows() {
    let n = 3u32;
    let len = 8;
    let code = CodeSpec::from_information_set(n, &[3, 5, 6, 7], RuleTag::Explicit).unwrap().dual();
    for (c, &i) in code.information().iter().enumerate() {
        let mut info = vec![0u8; code.information_len()];
        info[c] = 1;
        let x = code.encode(&info).unwrap();
        let mask = (0..len).filter(|&j| x.get(j) == 1).fold(0u32, |m, j| m | 1 << j);
        assert_eq!(mask, dual_row(i, len));
    }
}
