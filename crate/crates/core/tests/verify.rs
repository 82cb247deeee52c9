mod common;

use common::{brute_min_distance, elems, random_points};
use mds_selfdual::construct::{construct_extended, construct_subfield_points};
use mds_selfdual::gf::{make_field_of_order, Felt, FieldCtx};
use mds_selfdual::grs::GrsCode;
use mds_selfdual::linalg::Matrix;
use mds_selfdual::par::Strategy;
use mds_selfdual::verify::{
    binomial, check_character_sum_bound, check_character_sum_bound_with, check_dual_identity,
    check_mds, check_mds_matrix, check_mds_with, check_self_dual, min_distance_by_enumeration,
    verify_code, CheckMode, MdsMode, Status, VerifyOptions,
};
use mds_selfdual::Error;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_code<R: Rng>(f: &std::sync::Arc<FieldCtx>, rng: &mut R) -> Matrix {
    let rows = rng.gen_range(1..=3);
    let cols = rng.gen_range(rows..=6);
    let entries = (0..rows * cols)
        .map(|_| common::random_elem(f, rng))
        .collect();
    Matrix::new(f.clone(), rows, cols, entries).unwrap()
}

#[test]
fn exact_mds_agrees_with_minimum_distance() {
    // Random (often non-MDS) full-rank matrices: MDS iff d = N - k + 1.
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for q in [2u64, 3, 4, 5] {
        let f = make_field_of_order(q).unwrap();
        let mut seen = [0usize; 2];
        for _ in 0..150 {
            let g = random_code(&f, &mut rng);
            if g.rank() < g.rows() {
                continue;
            }
            let (k, len) = (g.rows(), g.cols());
            let d = brute_min_distance(&f, &g.row_vecs());
            assert_eq!(
                min_distance_by_enumeration(&g, 100_000, Strategy::Sequential).unwrap(),
                d
            );
            assert_eq!(
                min_distance_by_enumeration(&g, 100_000, Strategy::Parallel).unwrap(),
                d
            );
            for s in [Strategy::Sequential, Strategy::Parallel] {
                let res = check_mds_matrix(&g, MdsMode::default(), s).unwrap();
                assert_eq!(res.passed(), d == len - k + 1, "{g:?}");
                seen[res.passed() as usize] += 1;
            }
        }
        assert!(
            seen[0] > 0 && seen[1] > 0,
            "both verdicts exercised for q = {q}"
        );
    }
}

#[test]
fn mds_failure_reports_the_first_dependent_subset() {
    let f = make_field_of_order(7).unwrap();
    // column 3 repeats column 1
    let rows = vec![elems(&f, &[1, 1, 1, 1, 1]), elems(&f, &[0, 1, 2, 1, 4])];
    let g = Matrix::from_rows(f.clone(), &rows).unwrap();
    for s in [Strategy::Sequential, Strategy::Parallel] {
        let res = check_mds_matrix(&g, MdsMode::default(), s).unwrap();
        assert_eq!(res.status, Status::Fail);
        assert_eq!(res.detail, "columns [1, 3] are dependent");
    }
}

#[test]
fn randomized_mds_is_reproducible_and_catches_defects() {
    let code = construct_extended(13).unwrap().code;
    let g = code.generator_matrix();
    let mode = MdsMode::Randomized {
        samples: 500,
        seed: 7,
    };
    let a = check_mds_matrix(&g, mode, Strategy::Sequential).unwrap();
    let b = check_mds_matrix(&g, mode, Strategy::Parallel).unwrap();
    assert_eq!(a, b);
    assert!(a.passed());
    assert_eq!(a.mode, CheckMode::Randomized);
    assert_eq!(a.seed, Some(7));

    // zero out a column: most k-subsets containing it become singular
    let mut bad = g.clone();
    for i in 0..bad.rows() {
        bad.set(i, 0, Felt::ZERO);
    }
    let res = check_mds_matrix(
        &bad,
        MdsMode::Randomized {
            samples: 500,
            seed: 7,
        },
        Strategy::Parallel,
    )
    .unwrap();
    assert_eq!(res.status, Status::Fail);
    assert!(res.detail.starts_with("columns [0,"));
}

#[test]
fn exact_mode_refuses_over_budget() {
    let g = construct_extended(13).unwrap().code.generator_matrix();
    let needed = binomial(14, 7);
    let err =
        check_mds_matrix(&g, MdsMode::Exact { budget: 100 }, Strategy::default()).unwrap_err();
    assert_eq!(
        err,
        Error::BudgetExceeded {
            needed,
            budget: 100
        }
    );
    assert_eq!(MdsMode::auto(14, 7, 0), MdsMode::default());
    assert!(matches!(
        MdsMode::auto(42, 21, 3),
        MdsMode::Randomized {
            samples: 10_000,
            seed: 3
        }
    ));
}

#[test]
fn structural_mode_uses_parameters_only() {
    let code = construct_subfield_points(5, 4).unwrap().code;
    let res = check_mds(&code, MdsMode::Structural).unwrap();
    assert!(res.passed());
    assert_eq!(res.mode, CheckMode::Structural);
    let g = code.generator_matrix();
    let skipped = check_mds_matrix(&g, MdsMode::Structural, Strategy::default()).unwrap();
    assert_eq!(skipped.status, Status::Skipped);
    assert!(
        check_mds_with(&code, &g, MdsMode::Structural, Strategy::default())
            .unwrap()
            .passed()
    );
}

#[test]
fn self_dual_check_rejects_wrong_shapes_and_nonzero_products() {
    let f = make_field_of_order(5).unwrap();
    let ok = Matrix::from_rows(f.clone(), &[elems(&f, &[1, 2])]).unwrap();
    assert!(check_self_dual(&ok).passed());
    let not = Matrix::from_rows(f.clone(), &[elems(&f, &[1, 1])]).unwrap();
    assert_eq!(check_self_dual(&not).status, Status::Fail);
    let odd = Matrix::from_rows(f.clone(), &[elems(&f, &[1, 2, 0])]).unwrap();
    assert_eq!(check_self_dual(&odd).status, Status::Fail);
    let rank_deficient = Matrix::from_rows(
        f.clone(),
        &[elems(&f, &[1, 2, 0, 0]), elems(&f, &[2, 4, 0, 0])],
    )
    .unwrap();
    assert_eq!(check_self_dual(&rank_deficient).status, Status::Fail);
}

/// Count of β with every β - α a nonzero square, from a table of squares.
fn brute_count(f: &FieldCtx, t: &[Felt]) -> u64 {
    let mut square = vec![false; f.q() as usize];
    for x in f.elements().skip(1) {
        square[f.mul(x, x).index() as usize] = true;
    }
    f.elements()
        .filter(|&b| t.iter().all(|&a| square[f.sub(b, a).index() as usize]))
        .count() as u64
}

fn float_bound(q: u64, m: usize) -> f64 {
    let m = m as f64;
    ((m - 2.0) / 2.0 + 1.0 / 2f64.powf(m)) * (q as f64).sqrt() + m / 2.0
}

#[test]
fn character_sum_bound_on_all_small_sets() {
    for q in [13u64, 17, 25, 29] {
        let f = make_field_of_order(q).unwrap();
        let all: Vec<Felt> = f.elements().collect();
        let mut sets: Vec<Vec<Felt>> = Vec::new();
        for i in 0..all.len() {
            sets.push(vec![all[i]]);
            for j in i + 1..all.len() {
                sets.push(vec![all[i], all[j]]);
                for k in j + 1..all.len() {
                    sets.push(vec![all[i], all[j], all[k]]);
                }
            }
        }
        for t in sets {
            let res = check_character_sum_bound(&f, &t).unwrap();
            let n = brute_count(&f, &t);
            assert_eq!(res.count, n);
            let dev = (n as f64 - q as f64 / 2f64.powi(t.len() as i32)).abs();
            assert!((res.deviation - dev).abs() < 1e-12);
            assert!((res.bound - float_bound(q, t.len())).abs() < 1e-12);
            assert!(
                res.result.passed(),
                "q = {q}, T = {t:?}: {}",
                res.result.detail
            );
            assert!(dev <= res.bound + 1e-9);
        }
    }
}

#[test]
fn character_sum_bound_on_random_larger_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for q in [29u64, 37] {
        let f = make_field_of_order(q).unwrap();
        for _ in 0..50 {
            let m = rng.gen_range(4..=5);
            let t = random_points(&f, m, &mut rng);
            let seq = check_character_sum_bound_with(&f, &t, Strategy::Sequential).unwrap();
            let par = check_character_sum_bound_with(&f, &t, Strategy::Parallel).unwrap();
            assert_eq!(seq, par);
            assert_eq!(seq.count, brute_count(&f, &t));
            assert!(seq.result.passed(), "{}", seq.result.detail);
        }
    }
}

#[test]
fn character_sum_bound_tight_case_passes() {
    // T = {0}: N = (q-1)/2, deviation exactly 1/2 = bound
    let f = make_field_of_order(13).unwrap();
    let res = check_character_sum_bound(&f, &[Felt::ZERO]).unwrap();
    assert_eq!(res.count, 6);
    assert_eq!(res.deviation, 0.5);
    assert_eq!(res.bound, 0.5);
    assert!(res.result.passed());
    let f8 = make_field_of_order(8).unwrap();
    assert_eq!(
        check_character_sum_bound(&f8, &[Felt::ZERO]).unwrap_err(),
        Error::EvenCharacteristic
    );
}

#[test]
fn dual_identity_exhaustive_over_gf9() {
    let f = make_field_of_order(9).unwrap();
    let all: Vec<Felt> = f.elements().collect();
    for n in 2..=5usize {
        for mask in 0u32..1 << 9 {
            if mask.count_ones() as usize != n {
                continue;
            }
            let a: Vec<Felt> = (0..9)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| all[i])
                .collect();
            for k in 1..n {
                let res = check_dual_identity(&f, &a, k).unwrap();
                assert!(res.passed(), "{}", res.detail);
            }
            assert_eq!(
                check_dual_identity(&f, &a, n).unwrap().status,
                Status::Skipped
            );
        }
    }
}

#[test]
fn dual_identity_random_over_gf25() {
    let f = make_field_of_order(25).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..500 {
        let n = rng.gen_range(2..=12);
        let a = random_points(&f, n, &mut rng);
        let k = rng.gen_range(1..n);
        assert!(check_dual_identity(&f, &a, k).unwrap().passed());
    }
}

#[test]
fn verify_code_flags_a_tampered_generator() {
    let code = construct_extended(7).unwrap().code;
    let g = code.generator_matrix();
    let opts = VerifyOptions {
        dual_identity: true,
        ..Default::default()
    };
    let report = verify_code(&code, &g, opts).unwrap();
    assert!(report.overall);
    for name in ["generator_matches_parameters", "self_dual", "mds"] {
        assert!(report.get(name).unwrap().passed(), "{name}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let i = rng.gen_range(0..g.rows());
    let j = sample(&mut rng, g.cols(), 1).index(0);
    let mut bad = g.clone();
    bad.set(i, j, code.field().add(g.get(i, j), Felt::ONE));
    let report = verify_code(&code, &bad, opts).unwrap();
    assert!(!report.overall);
    assert!(!report.get("generator_matches_parameters").unwrap().passed());
    assert!(!report.get("self_dual").unwrap().passed());
}

#[test]
fn verify_code_on_plain_grs() {
    let f = make_field_of_order(11).unwrap();
    let a: Vec<Felt> = (0..6).map(|i| f.constant(i)).collect();
    let code = GrsCode::with_unit_multipliers(f, a, 3, false).unwrap();
    let g = code.generator_matrix();
    let report = verify_code(
        &code,
        &g,
        VerifyOptions {
            dual_identity: true,
            ..Default::default()
        },
    )
    .unwrap();
    // MDS but not self-dual with unit multipliers
    assert!(report.get("mds").unwrap().passed());
    assert!(report.get("dual_identity").unwrap().passed());
    assert!(!report.get("self_dual").unwrap().passed());
    assert!(!report.overall);
}
