mod common;

use std::sync::Arc;

use common::{elems, idx, random_points};
use mds_selfdual::construct::{
    construct, construct_auto, construct_coset_union, construct_even_char, construct_extended,
    construct_roots_of_unity, construct_square_set, construct_subfield_points,
    find_subfield_scaling, has_subfield_solution, search_square_difference_set, selfdualize,
    ConstructionResult,
};
use mds_selfdual::gf::{make_field_of_order, Felt, FieldCtx};
use mds_selfdual::grs::dual_coefficients;
use mds_selfdual::linalg::vandermonde_system;
use mds_selfdual::{ConstructionRequest, Error, Family};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// G·Gᵀ = 0 and rank k, with inner products written out by hand.
fn is_self_dual(res: &ConstructionResult) -> bool {
    let f = res.code.field();
    let g = res.code.generator_matrix();
    let rows = g.row_vecs();
    let orthogonal = rows.iter().all(|x| {
        rows.iter()
            .all(|y| f.sum(x.iter().zip(y).map(|(&a, &b)| f.mul(a, b))).is_zero())
    });
    orthogonal && g.cols() == 2 * g.rows() && g.rank() == g.rows()
}

/// Some λ ≠ 0 makes every λ·u_i a nonzero square.
fn common_square_class(f: &FieldCtx, u: &[Felt]) -> bool {
    let squares: Vec<Felt> = f.elements().skip(1).map(|x| f.mul(x, x)).collect();
    f.elements()
        .skip(1)
        .any(|l| u.iter().all(|&x| squares.contains(&f.mul(l, x))))
}

/// A nonzero x over GF(r) with A_a·x = 0, by enumerating GF(r)^n.
fn brute_subfield_kernel(f: &Arc<FieldCtx>, a: &[Felt], r: u64) -> bool {
    let sub = f.subfield_elements(r).unwrap();
    let m = vandermonde_system(f, a).unwrap();
    let n = a.len();
    (1..r.pow(n as u32)).any(|c| {
        let mut rest = c;
        let x: Vec<Felt> = (0..n)
            .map(|_| {
                let e = sub[(rest % r) as usize];
                rest /= r;
                e
            })
            .collect();
        m.mul_vec(&x).unwrap().iter().all(|y| y.is_zero())
    })
}

fn subsets(q: u64, size: usize) -> Vec<Vec<u64>> {
    fn go(start: u64, q: u64, size: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for x in start..q {
            cur.push(x);
            go(x + 1, q, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, q, size, &mut Vec::new(), &mut out);
    out
}

#[test]
fn subfield_scaling_matches_row_equivalence_in_gf9() {
    let f = make_field_of_order(9).unwrap();
    for size in 2..=5 {
        for s in subsets(9, size) {
            let a = elems(&f, &s);
            let u = dual_coefficients(&f, &a).unwrap();
            let scaled = find_subfield_scaling(&f, &u).is_ok();
            assert_eq!(scaled, has_subfield_solution(&f, &a).unwrap(), "a = {s:?}");
            assert_eq!(scaled, brute_subfield_kernel(&f, &a, 3), "a = {s:?}");
            // GF(r)* lies inside the squares, so a subfield solution gives a square class
            assert!(!scaled || common_square_class(&f, &u));
        }
    }
}

#[test]
fn subfield_scaling_matches_row_equivalence_in_gf25() {
    let f = make_field_of_order(25).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..500 {
        let n = rng.gen_range(2..=8);
        let a = random_points(&f, n, &mut rng);
        let u = dual_coefficients(&f, &a).unwrap();
        let scaled = find_subfield_scaling(&f, &u).is_ok();
        assert_eq!(
            scaled,
            has_subfield_solution(&f, &a).unwrap(),
            "a = {:?}",
            idx(&a)
        );
        if n <= 4 {
            assert_eq!(scaled, brute_subfield_kernel(&f, &a, 5));
        }
        assert!(!scaled || common_square_class(&f, &u));
    }
}

#[test]
fn selfdualize_succeeds_exactly_on_a_common_square_class() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for q in [7u64, 9, 11, 13, 25, 27] {
        let f = make_field_of_order(q).unwrap();
        for _ in 0..80 {
            let n = 2 * rng.gen_range(1..=(q as usize / 2).min(5));
            let a = random_points(&f, n, &mut rng);
            let u = dual_coefficients(&f, &a).unwrap();
            match selfdualize(&f, &a) {
                Ok((code, cert)) => {
                    assert!(common_square_class(&f, &u));
                    let g = code.generator_matrix();
                    assert!(g.gram().is_zero());
                    // v_i² = λ·u_i
                    let lambda = cert.lambda.unwrap();
                    for (&vi, &ui) in code.v().iter().zip(&u) {
                        assert_eq!(f.mul(vi, vi), f.mul(lambda, ui));
                    }
                }
                Err(e) => {
                    assert_eq!(e, Error::NotSelfDualizable);
                    assert!(!common_square_class(&f, &u), "q = {q}, a = {:?}", idx(&a));
                }
            }
        }
    }
}

/// Every v in (GF(13)*)^4 for the given points, checking G·Gᵀ = 0 directly.
fn self_dual_multipliers_exist(points: &[i64]) -> bool {
    let f = make_field_of_order(13).unwrap();
    let a: Vec<Felt> = points.iter().map(|&x| f.constant(x)).collect();
    let nonzero: Vec<Felt> = f.elements().skip(1).collect();
    let n = a.len();
    (0..12u64.pow(n as u32)).any(|c| {
        let mut rest = c;
        let v: Vec<Felt> = (0..n)
            .map(|_| {
                let x = nonzero[(rest % 12) as usize];
                rest /= 12;
                x
            })
            .collect();
        // rows are v·a^i for i < 2; inner products need Σ v² a^(i+j) = 0 for i + j <= 2
        (0..=2u64).all(|s| {
            f.sum(
                a.iter()
                    .zip(&v)
                    .map(|(&x, &y)| f.mul(f.mul(y, y), f.pow_u(x, s))),
            )
            .is_zero()
        })
    })
}

#[test]
fn not_self_dualizable_agrees_with_exhaustive_multipliers() {
    let f = make_field_of_order(13).unwrap();
    let mixed = [0, 1, 2, 4];
    assert!(!self_dual_multipliers_exist(&mixed));
    let a: Vec<Felt> = mixed.iter().map(|&x| f.constant(x)).collect();
    assert_eq!(selfdualize(&f, &a).unwrap_err(), Error::NotSelfDualizable);

    let uniform = [0, 1, 2, 3];
    assert!(self_dual_multipliers_exist(&uniform));
    let a: Vec<Felt> = uniform.iter().map(|&x| f.constant(x)).collect();
    assert!(selfdualize(&f, &a).is_ok());
}

/// First n-subset in lexicographic order whose pairwise differences are all
/// nonzero squares.
fn brute_square_set(q: u64, n: usize) -> Option<Vec<u64>> {
    let f = make_field_of_order(q).unwrap();
    let mut square = vec![false; q as usize];
    for x in f.elements().skip(1) {
        square[f.mul(x, x).index() as usize] = true;
    }
    subsets(q, n).into_iter().find(|s| {
        s.iter().all(|&x| {
            s.iter().filter(|&&y| y != x).all(|&y| {
                let d = f.sub(f.elem(x).unwrap(), f.elem(y).unwrap());
                square[d.index() as usize]
            })
        })
    })
}

#[test]
fn square_difference_search_matches_exhaustive_search() {
    for (q, n) in [
        (5u64, 2usize),
        (13, 3),
        (13, 4),
        (17, 3),
        (17, 4),
        (25, 4),
        (29, 4),
        (37, 4),
    ] {
        let f = make_field_of_order(q).unwrap();
        let got = search_square_difference_set(&f, n, None);
        match brute_square_set(q, n) {
            Some(s) => assert_eq!(idx(&got.unwrap()), s, "q = {q}, n = {n}"),
            None => assert_eq!(got.unwrap_err(), Error::NotFound { q, n }),
        }
    }
    let f = make_field_of_order(29).unwrap();
    assert_eq!(
        idx(&search_square_difference_set(&f, 4, None).unwrap()),
        vec![0, 1, 5, 6]
    );
    assert_eq!(
        idx(&search_square_difference_set(&f, 4, Some(1_000_000)).unwrap()),
        vec![0, 1, 5, 6]
    );
    assert_eq!(
        search_square_difference_set(&f, 6, Some(3)).unwrap_err(),
        Error::BudgetExhausted(3)
    );
    let f = make_field_of_order(11).unwrap();
    assert_eq!(
        search_square_difference_set(&f, 4, None).unwrap_err(),
        Error::BadResidueClass(11)
    );
}

#[test]
fn every_family_yields_self_dual_codes() {
    let mut results = Vec::new();
    for q in [4u64, 8, 16] {
        for n in (2..=q as usize).step_by(2) {
            results.push(construct_even_char(q, n).unwrap());
        }
    }
    for q in [3u64, 5, 7, 9, 11, 13, 25, 27] {
        results.push(construct_extended(q).unwrap());
    }
    for r in [3u64, 4, 5, 7, 8, 9] {
        for n in (2..=r as usize).step_by(2) {
            results.push(construct_subfield_points(r, n).unwrap());
        }
    }
    for (q, n) in [
        (9u64, 2usize),
        (25, 2),
        (25, 4),
        (49, 2),
        (49, 4),
        (81, 2),
        (81, 6),
    ] {
        results.push(construct_roots_of_unity(q, n).unwrap());
    }
    for (r, t) in [(3u64, 1u64), (7, 1), (7, 2), (7, 3), (11, 1)] {
        results.push(construct_coset_union(r, t).unwrap());
    }
    for (q, n) in [(13u64, 2usize), (29, 4), (37, 4)] {
        results.push(construct_square_set(q, n).unwrap());
    }
    for res in &results {
        assert!(
            is_self_dual(res),
            "{} over GF({})",
            res.family,
            res.code.field().q()
        );
    }
}

#[test]
fn coset_union_points_follow_the_definition() {
    for (r, t) in [(3u64, 1u64), (7, 1), (7, 2), (7, 3)] {
        let res = construct_coset_union(r, t).unwrap();
        let f = res.code.field().clone();
        let gamma = f.primitive_element();
        assert_eq!(f.order(gamma).unwrap(), r * r - 1);
        let beta = f.pow_u(gamma, r.div_ceil(2));
        assert_eq!(res.certificate.beta, Some(beta));
        // β^(r-1) = -1, so β ∉ GF(r)
        assert_eq!(f.pow_u(beta, r - 1), f.constant(-1));
        let sub = f.subfield_elements(r).unwrap();
        let mut expected = Vec::new();
        for l in 0..2 * t as usize {
            for &k in &sub {
                expected.push(f.add(f.mul(sub[l], beta), k));
            }
        }
        assert_eq!(res.code.alpha(), &expected[..]);
        let mut distinct = expected.clone();
        distinct.sort();
        distinct.dedup();
        assert_eq!(distinct.len() as u64, 2 * t * r);
        assert_eq!(res.code.k() as u64, t * r);
    }
}

#[test]
fn family_preconditions() {
    assert_eq!(
        construct_coset_union(5, 1).unwrap_err(),
        Error::BadResidueClass(5)
    );
    assert!(matches!(
        construct_coset_union(7, 4).unwrap_err(),
        Error::RangeError(_)
    ));
    assert!(matches!(
        construct_coset_union(7, 0).unwrap_err(),
        Error::RangeError(_)
    ));
    assert_eq!(
        construct_extended(8).unwrap_err(),
        Error::EvenCharacteristic
    );
    assert_eq!(
        construct_square_set(11, 4).unwrap_err(),
        Error::BadResidueClass(11)
    );
    assert_eq!(
        construct_square_set(13, 4).unwrap_err(),
        Error::NotFound { q: 13, n: 4 }
    );
    assert_eq!(construct_even_char(8, 3).unwrap_err(), Error::OddLength(3));
    assert_eq!(
        construct_even_char(8, 10).unwrap_err(),
        Error::LengthTooLong { n: 10, max: 8 }
    );
    assert!(matches!(
        construct_even_char(9, 4).unwrap_err(),
        Error::RangeError(_)
    ));
    assert_eq!(
        construct_subfield_points(5, 6).unwrap_err(),
        Error::LengthTooLong { n: 6, max: 5 }
    );
    assert_eq!(
        construct_roots_of_unity(25, 6).unwrap_err(),
        Error::BadOrder { m: 5, q: 25 }
    );
    assert!(matches!(
        construct_roots_of_unity(27, 2).unwrap_err(),
        Error::RangeError(_)
    ));
    for e in [
        Error::NotFound { q: 13, n: 4 },
        Error::OddLength(3),
        Error::BadResidueClass(5),
    ] {
        assert!(e.is_construction_failure());
    }
}

#[test]
fn request_dispatch() {
    let req = ConstructionRequest {
        family: Some(Family::CosetUnion),
        r: Some(3),
        t: Some(1),
        ..Default::default()
    };
    let res = construct(&req).unwrap();
    assert_eq!(res.family, Family::CosetUnion);
    assert_eq!(res.code.len(), 6);

    let req = ConstructionRequest {
        family: Some(Family::SubfieldPoints),
        q: Some(49),
        n: Some(4),
        ..Default::default()
    };
    assert_eq!(construct(&req).unwrap().code.field().q(), 49);

    let req = ConstructionRequest {
        family: Some(Family::Extended),
        p: Some(3),
        e: Some(2),
        ..Default::default()
    };
    assert_eq!(construct(&req).unwrap().code.len(), 10);

    let req = ConstructionRequest {
        family: Some(Family::SquareSet),
        q: Some(29),
        ..Default::default()
    };
    assert!(matches!(construct(&req).unwrap_err(), Error::Parse(_)));
}

#[test]
fn auto_picks_an_applicable_family() {
    for (q, n) in [
        (49u64, 14usize),
        (49, 4),
        (25, 4),
        (13, 14),
        (29, 4),
        (16, 8),
        (9, 2),
    ] {
        let res = construct_auto(q, n).unwrap();
        assert_eq!(res.code.field().q(), q);
        assert_eq!(res.code.len(), n);
        assert!(is_self_dual(&res));
    }
    assert_eq!(construct_auto(49, 14).unwrap().family, Family::CosetUnion);
    assert_eq!(
        construct_auto(13, 4).unwrap_err(),
        Error::NotFound { q: 13, n: 4 }
    );
    // GF(9) has no 4-element square-difference set and no other family fits
    assert_eq!(
        construct_auto(9, 4).unwrap_err(),
        Error::NotFound { q: 9, n: 4 }
    );
    assert_eq!(construct_auto(12, 4).unwrap_err(), Error::NotPrimePower(12));
}

#[test]
fn construction_json_carries_the_certificate() {
    let res = construct_coset_union(3, 1).unwrap();
    let json = res.to_json();
    assert_eq!(json.family, "theorem-3-5");
    assert_eq!(json.code.n, 6);
    assert_eq!(json.code.k, 3);
    assert_eq!(json.certificate.alpha_set, json.code.alpha);
    assert_eq!(json.certificate.gamma, Some(vec![1, 1]));
    assert_eq!(json.certificate.beta, Some(vec![0, 2]));
    let text = serde_json::to_string(&json).unwrap();
    let back: mds_selfdual::construct::ConstructionJson = serde_json::from_str(&text).unwrap();
    assert_eq!(back, json);
}
