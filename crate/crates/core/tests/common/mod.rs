#![allow(dead_code)]

use std::sync::Arc;

use mds_selfdual::gf::{Felt, FieldCtx};
use rand::seq::index::sample;
use rand::Rng;

pub fn elems(f: &FieldCtx, idx: &[u64]) -> Vec<Felt> {
    idx.iter().map(|&i| f.elem(i).unwrap()).collect()
}

pub fn idx(xs: &[Felt]) -> Vec<u64> {
    xs.iter().map(|x| x.index()).collect()
}

/// `n` distinct random elements.
pub fn random_points<R: Rng>(f: &FieldCtx, n: usize, rng: &mut R) -> Vec<Felt> {
    sample(rng, f.q() as usize, n)
        .into_iter()
        .map(|i| f.elem(i as u64).unwrap())
        .collect()
}

pub fn random_elem<R: Rng>(f: &FieldCtx, rng: &mut R) -> Felt {
    f.elem(rng.gen_range(0..f.q())).unwrap()
}

pub fn random_nonzero<R: Rng>(f: &FieldCtx, rng: &mut R) -> Felt {
    f.elem(rng.gen_range(1..f.q())).unwrap()
}

/// Schoolbook arithmetic on coefficient vectors modulo the field's modulus,
/// independent of the log tables.
pub struct RefField {
    pub p: u64,
    pub modulus: Vec<u64>,
}

impl RefField {
    pub fn of(f: &Arc<FieldCtx>) -> Self {
        RefField {
            p: f.p(),
            modulus: f.modulus().to_vec(),
        }
    }

    fn e(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let (p, e) = (self.p, self.e());
        if e == 1 {
            return vec![a[0] * b[0] % p];
        }
        let mut prod = vec![0u64; 2 * e - 1];
        for i in 0..e {
            for j in 0..e {
                prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
            }
        }
        // Long division by the monic modulus.
        for d in (e..prod.len()).rev() {
            let c = prod[d];
            for i in 0..=e {
                let k = d - e + i;
                prod[k] = (prod[k] + (p - c) * self.modulus[i] % p) % p;
            }
        }
        prod.truncate(e);
        prod
    }
}

/// Brute-force check that a monic polynomial over GF(p) has no monic factor
/// of degree 1..=deg/2.
pub fn irreducible_by_trial_division(f: &[u64], p: u64) -> bool {
    let n = f.len() - 1;
    for d in 1..=n / 2 {
        let count = p.pow(d as u32);
        for lower in 0..count {
            let mut g: Vec<u64> = (0..d).map(|i| lower / p.pow(i as u32) % p).collect();
            g.push(1);
            if poly_divides(&g, f, p) {
                return false;
            }
        }
    }
    true
}

fn poly_divides(g: &[u64], f: &[u64], p: u64) -> bool {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        for (i, &gi) in g.iter().enumerate() {
            r[shift + i] = (r[shift + i] + (p - c) * gi % p) % p;
        }
        r.pop();
    }
    r.iter().all(|&x| x == 0)
}

/// Minimum distance of the code spanned by `rows` by enumerating every
/// message, using only the field's add/mul.
pub fn brute_min_distance(f: &FieldCtx, rows: &[Vec<Felt>]) -> usize {
    let k = rows.len();
    let len = rows[0].len();
    let q = f.q();
    let mut best = usize::MAX;
    for m in 1..q.pow(k as u32) {
        let mut word = vec![Felt::ZERO; len];
        let mut rest = m;
        for row in rows {
            let c = f.elem(rest % q).unwrap();
            rest /= q;
            for (w, &g) in word.iter_mut().zip(row) {
                *w = f.add(*w, f.mul(c, g));
            }
        }
        best = best.min(word.iter().filter(|x| !x.is_zero()).count());
    }
    best
}
