//! Arithmetic in GF(p^e).
//!
//! Elements are stored as their index `Σ c_i p^i`, where `c_i` is the
//! coefficient of `x^i` in the polynomial-basis representation modulo the
//! field's defining polynomial. Index 0 is zero and index 1 is one.
//!
//! Multiplication and addition go through logarithm tables built once per
//! field: `exp`/`log` for the cyclic group generated by the canonical
//! primitive element, and a Zech logarithm table for addition. The tables are
//! built with a plain polynomial-arithmetic path, which also serves as the
//! reference implementation in tests.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 20;

const NO_LOG: u32 = u32::MAX;

/// The JSON-visible description of a field: characteristic, degree and the
/// monic defining polynomial (constant term first).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub e: u32,
    pub modulus: Vec<u64>,
}

/// A field element, identified by its index in `[0, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Felt(u32);

impl Felt {
    pub const ZERO: Felt = Felt(0);
    pub const ONE: Felt = Felt(1);

    pub fn index(self) -> u64 {
        self.0 as u64
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub(crate) fn from_index(index: u32) -> Felt {
        Felt(index)
    }
}

impl fmt::Display for Felt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

pub struct FieldCtx {
    spec: FieldSpec,
    p: u32,
    q: u32,
    /// `exp[i] = g^i` for `i` in `[0, 2(q-1))`.
    exp: Vec<u32>,
    /// `log[x]` for nonzero `x`; `log[0]` is unused.
    log: Vec<u32>,
    /// `zech[k] = log(1 + g^k)`, or `NO_LOG` when `1 + g^k = 0`.
    zech: Vec<u32>,
    primitive: Felt,
    nonresidue: Option<Felt>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.spec.p)
            .field("e", &self.spec.e)
            .field("modulus", &self.spec.modulus)
            .finish()
    }
}

/// Builds GF(p^e) with the canonical modulus: the monic irreducible
/// polynomial whose coefficient vector (constant term first) is
/// lexicographically smallest. For `e = 1` the modulus is `x`.
pub fn make_field(p: u64, e: u32) -> Result<Arc<FieldCtx>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if e == 0 {
        return Err(Error::RangeError(
            "extension degree must be at least 1".into(),
        ));
    }
    checked_order(p, e)?;
    let modulus = canonical_modulus(p, e);
    FieldCtx::build(p, e, modulus).map(Arc::new)
}

/// Builds GF(q) for a prime power `q`.
pub fn make_field_of_order(q: u64) -> Result<Arc<FieldCtx>> {
    let (p, e) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
    make_field(p, e)
}

/// Builds a field from an explicit spec, checking that the modulus is monic
/// and irreducible.
pub fn field_from_spec(spec: &FieldSpec) -> Result<Arc<FieldCtx>> {
    let FieldSpec { p, e, ref modulus } = *spec;
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if e == 0 {
        return Err(Error::RangeError(
            "extension degree must be at least 1".into(),
        ));
    }
    checked_order(p, e)?;
    if modulus.len() != e as usize + 1
        || modulus[e as usize] != 1
        || modulus.iter().any(|&c| c >= p)
    {
        return Err(Error::Parse(format!(
            "modulus {modulus:?} is not a monic degree-{e} polynomial over GF({p})"
        )));
    }
    if e == 1 {
        if modulus[0] != 0 {
            return Err(Error::Parse("prime fields use the modulus x".into()));
        }
    } else if !is_irreducible(modulus, p) {
        return Err(Error::Parse(format!(
            "modulus {modulus:?} is reducible over GF({p})"
        )));
    }
    FieldCtx::build(p, e, modulus.clone()).map(Arc::new)
}

fn checked_order(p: u64, e: u32) -> Result<u64> {
    let mut q: u64 = 1;
    for _ in 0..e {
        q = q.saturating_mul(p);
        if q > MAX_ORDER {
            return Err(Error::TooLarge { p, e });
        }
    }
    Ok(q)
}

impl FieldCtx {
    fn build(p: u64, e: u32, modulus: Vec<u64>) -> Result<FieldCtx> {
        let q = checked_order(p, e)?;
        let slow = SlowField::new(p, e, &modulus);

        let primitive = (1..q)
            .find(|&x| slow.has_full_order(x))
            .expect("the multiplicative group of a finite field is cyclic");

        let n = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![NO_LOG; q as usize];
        let mut cur = 1u64;
        for (i, slot) in exp[..n].iter_mut().enumerate() {
            *slot = cur as u32;
            log[cur as usize] = i as u32;
            cur = slow.mul(cur, primitive);
        }
        debug_assert_eq!(cur, 1);
        exp.copy_within(..n, n);

        let zech = (0..n)
            .map(|k| {
                let x = exp[k] as u64;
                let c0 = x % p;
                let plus_one = x - c0 + (c0 + 1) % p;
                if plus_one == 0 {
                    NO_LOG
                } else {
                    log[plus_one as usize]
                }
            })
            .collect();

        let mut ctx = FieldCtx {
            spec: FieldSpec { p, e, modulus },
            p: p as u32,
            q: q as u32,
            exp,
            log,
            zech,
            primitive: Felt(primitive as u32),
            nonresidue: None,
        };
        if p != 2 {
            ctx.nonresidue = (1..q as u32).map(Felt).find(|&x| ctx.legendre(x) == -1);
        }
        Ok(ctx)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn p(&self) -> u64 {
        self.p as u64
    }

    pub fn e(&self) -> u32 {
        self.spec.e
    }

    pub fn q(&self) -> u64 {
        self.q as u64
    }

    pub fn modulus(&self) -> &[u64] {
        &self.spec.modulus
    }

    pub fn is_odd(&self) -> bool {
        self.p != 2
    }

    pub fn zero(&self) -> Felt {
        Felt::ZERO
    }

    pub fn one(&self) -> Felt {
        Felt::ONE
    }

    /// The element with the given index.
    pub fn elem(&self, index: u64) -> Result<Felt> {
        if index < self.q as u64 {
            Ok(Felt(index as u32))
        } else {
            Err(Error::InvalidElement(vec![index]))
        }
    }

    /// The image of an integer in the prime subfield.
    pub fn constant(&self, n: i64) -> Felt {
        Felt(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<Felt> {
        if coeffs.len() != self.spec.e as usize || coeffs.iter().any(|&c| c >= self.p as u64) {
            return Err(Error::InvalidElement(coeffs.to_vec()));
        }
        let idx = coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p as u64 + c);
        Ok(Felt(idx as u32))
    }

    pub fn coeffs(&self, x: Felt) -> Vec<u64> {
        let mut idx = x.0 as u64;
        (0..self.spec.e)
            .map(|_| {
                let c = idx % self.p as u64;
                idx /= self.p as u64;
                c
            })
            .collect()
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = Felt> + '_ {
        (0..self.q).map(Felt)
    }

    pub fn add(&self, x: Felt, y: Felt) -> Felt {
        if x.0 == 0 {
            return y;
        }
        if y.0 == 0 {
            return x;
        }
        let n = self.q - 1;
        let (i, j) = (self.log[x.0 as usize], self.log[y.0 as usize]);
        let d = if j >= i { j - i } else { j + n - i };
        match self.zech[d as usize] {
            NO_LOG => Felt::ZERO,
            z => Felt(self.exp[(i + z) as usize]),
        }
    }

    pub fn neg(&self, x: Felt) -> Felt {
        if x.0 == 0 || self.p == 2 {
            return x;
        }
        let half = (self.q - 1) / 2;
        Felt(self.exp[(self.log[x.0 as usize] + half) as usize])
    }

    pub fn sub(&self, x: Felt, y: Felt) -> Felt {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: Felt, y: Felt) -> Felt {
        if x.0 == 0 || y.0 == 0 {
            return Felt::ZERO;
        }
        Felt(self.exp[(self.log[x.0 as usize] + self.log[y.0 as usize]) as usize])
    }

    pub fn inv(&self, x: Felt) -> Result<Felt> {
        if x.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.q - 1;
        let l = self.log[x.0 as usize];
        Ok(Felt(self.exp[((n - l) % n.max(1)) as usize]))
    }

    pub fn div(&self, x: Felt, y: Felt) -> Result<Felt> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// `x^k` by square-and-multiply. Negative exponents invert first.
    pub fn pow(&self, x: Felt, k: i64) -> Result<Felt> {
        let base = if k < 0 { self.inv(x)? } else { x };
        Ok(self.pow_u(base, k.unsigned_abs()))
    }

    pub fn pow_u(&self, mut base: Felt, mut k: u64) -> Felt {
        let mut acc = Felt::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// The Frobenius map `x ↦ x^p` applied `times` times.
    pub fn frobenius(&self, x: Felt, times: u32) -> Felt {
        let mut y = x;
        for _ in 0..times % self.spec.e {
            y = self.pow_u(y, self.p as u64);
        }
        y
    }

    /// Degree `d` of the subfield GF(r), `r = p^d`, `d | e`.
    pub fn subfield_degree(&self, r: u64) -> Result<u32> {
        let bad = || Error::BadSubfield {
            r,
            q: self.q as u64,
        };
        let mut d = 0u32;
        let mut acc = 1u64;
        while acc < r {
            acc *= self.p as u64;
            d += 1;
        }
        if acc != r || d == 0 || !self.spec.e.is_multiple_of(d) {
            return Err(bad());
        }
        Ok(d)
    }

    /// Whether `x` lies in the subfield GF(r), i.e. `x^r = x`.
    pub fn in_subfield(&self, x: Felt, r: u64) -> Result<bool> {
        self.subfield_degree(r)?;
        Ok(self.pow_u(x, r) == x)
    }

    /// Elements of GF(r) in index order.
    pub fn subfield_elements(&self, r: u64) -> Result<Vec<Felt>> {
        self.subfield_degree(r)?;
        Ok(self.elements().filter(|&x| self.pow_u(x, r) == x).collect())
    }

    /// The primitive element of smallest index.
    pub fn primitive_element(&self) -> Felt {
        self.primitive
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, x: Felt) -> Result<u64> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut ord = self.q as u64 - 1;
        for (ell, _) in factorize(ord) {
            while ord.is_multiple_of(ell) && self.pow_u(x, ord / ell) == Felt::ONE {
                ord /= ell;
            }
        }
        Ok(ord)
    }

    /// χ(x) ∈ {-1, 0, 1}, computed as `x^((q-1)/2)`.
    pub fn quadratic_character(&self, x: Felt) -> Result<i8> {
        if self.p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        Ok(self.legendre(x))
    }

    fn legendre(&self, x: Felt) -> i8 {
        if x.is_zero() {
            return 0;
        }
        let t = self.pow_u(x, (self.q as u64 - 1) / 2);
        if t == Felt::ONE {
            1
        } else {
            -1
        }
    }

    /// Whether `x` is a square (always true in characteristic 2).
    pub fn is_square(&self, x: Felt) -> bool {
        self.p == 2 || self.legendre(x) >= 0
    }

    /// The nonresidue of smallest index (odd characteristic only).
    pub fn canonical_nonresidue(&self) -> Result<Felt> {
        self.nonresidue.ok_or(Error::EvenCharacteristic)
    }

    /// Square root, choosing the root of smaller index.
    pub fn sqrt(&self, x: Felt) -> Result<Felt> {
        if x.is_zero() {
            return Ok(x);
        }
        if self.p == 2 {
            return Ok(self.pow_u(x, self.q as u64 / 2));
        }
        if self.legendre(x) != 1 {
            return Err(Error::NonResidue);
        }
        // Tonelli-Shanks with q - 1 = 2^s * t, t odd.
        let mut t = self.q as u64 - 1;
        let mut s = 0u32;
        while t.is_multiple_of(2) {
            t /= 2;
            s += 1;
        }
        let z = self.nonresidue.expect("odd field has a nonresidue");
        let mut m = s;
        let mut c = self.pow_u(z, t);
        let mut b = self.pow_u(x, t);
        let mut y = self.pow_u(x, t.div_ceil(2));
        while b != Felt::ONE {
            let mut i = 0u32;
            let mut b2 = b;
            while b2 != Felt::ONE {
                b2 = self.mul(b2, b2);
                i += 1;
            }
            let mut f = c;
            for _ in 0..m - i - 1 {
                f = self.mul(f, f);
            }
            y = self.mul(y, f);
            c = self.mul(f, f);
            b = self.mul(b, c);
            m = i;
        }
        let other = self.neg(y);
        Ok(y.min(other))
    }

    /// The `m`-th roots of unity sorted by index.
    pub fn roots_of_unity(&self, m: u64) -> Result<Vec<Felt>> {
        let n = self.q as u64 - 1;
        if m == 0 || !n.is_multiple_of(m) {
            return Err(Error::BadOrder {
                m,
                q: self.q as u64,
            });
        }
        let zeta = self.pow_u(self.primitive, n / m);
        let mut roots: Vec<Felt> =
            std::iter::successors(Some(Felt::ONE), |&z| Some(self.mul(z, zeta)))
                .take(m as usize)
                .collect();
        roots.sort();
        Ok(roots)
    }

    /// Sum of a slice of elements.
    pub fn sum(&self, xs: impl IntoIterator<Item = Felt>) -> Felt {
        xs.into_iter().fold(Felt::ZERO, |acc, x| self.add(acc, x))
    }

    pub fn product(&self, xs: impl IntoIterator<Item = Felt>) -> Felt {
        xs.into_iter().fold(Felt::ONE, |acc, x| self.mul(acc, x))
    }

    /// Polynomial evaluation, coefficients constant first.
    pub fn eval_poly(&self, coeffs: &[Felt], x: Felt) -> Felt {
        coeffs
            .iter()
            .rev()
            .fold(Felt::ZERO, |acc, &c| self.add(self.mul(acc, x), c))
    }

    pub fn same_field(&self, other: &FieldCtx) -> bool {
        self.spec == other.spec
    }
}

/// Reference arithmetic straight on coefficient vectors. Used to build the
/// log tables.
struct SlowField<'a> {
    p: u64,
    e: usize,
    modulus: &'a [u64],
    q: u64,
}

impl<'a> SlowField<'a> {
    fn new(p: u64, e: u32, modulus: &'a [u64]) -> Self {
        SlowField {
            p,
            e: e as usize,
            modulus,
            q: p.pow(e),
        }
    }

    fn digits(&self, mut x: u64) -> Vec<u64> {
        (0..self.e)
            .map(|_| {
                let c = x % self.p;
                x /= self.p;
                c
            })
            .collect()
    }

    fn mul(&self, x: u64, y: u64) -> u64 {
        let (p, e) = (self.p, self.e);
        if e == 1 {
            return x * y % p;
        }
        let (a, b) = (self.digits(x), self.digits(y));
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj) % p;
            }
        }
        // x^e = -(m_0 + ... + m_{e-1} x^{e-1})
        for d in (e..2 * e - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (i, &m) in self.modulus[..e].iter().enumerate() {
                let idx = d - e + i;
                prod[idx] = (prod[idx] + (p - c) * m) % p;
            }
        }
        prod[..e].iter().rev().fold(0, |acc, &c| acc * p + c)
    }

    fn pow(&self, mut base: u64, mut k: u64) -> u64 {
        let mut acc = 1;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    fn has_full_order(&self, x: u64) -> bool {
        let n = self.q - 1;
        if n == 1 {
            return x == 1;
        }
        factorize(n)
            .into_iter()
            .all(|(ell, _)| self.pow(x, n / ell) != 1)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization by trial division.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut k = 0;
            while n.is_multiple_of(d) {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// `q = p^e` with `p` prime, if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    match factorize(q).as_slice() {
        [(p, e)] => Some((*p, *e)),
        _ => None,
    }
}

// Polynomials over GF(p), coefficient vectors constant first, no trailing zeros.

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let df = f.len() - 1;
    let lead_inv = mod_inv(f[df], p);
    while r.len() > df {
        let d = r.len() - 1;
        let c = r[d] * lead_inv % p;
        for (i, &fi) in f.iter().enumerate() {
            let idx = d - df + i;
            r[idx] = (r[idx] + (p - c) * fi) % p;
        }
        trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    poly_rem(&prod, f, p)
}

fn poly_powmod(base: &[u64], mut k: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1];
    let mut b = poly_rem(base, f, p);
    while k > 0 {
        if k & 1 == 1 {
            acc = poly_mulmod(&acc, &b, f, p);
        }
        b = poly_mulmod(&b, &b, f, p);
        k >>= 1;
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(&mut out);
    out
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p is prime
    let mut acc = 1u64;
    let mut b = a % p;
    let mut k = p - 2;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        k >>= 1;
    }
    acc
}

/// x^(p^k) mod f.
fn frobenius_power_of_x(k: u32, f: &[u64], p: u64) -> Vec<u64> {
    let mut t = vec![0, 1];
    for _ in 0..k {
        t = poly_powmod(&t, p, f, p);
    }
    t
}

/// Rabin's irreducibility test for a monic polynomial of degree >= 1.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let n = (f.len() - 1) as u32;
    if n == 1 {
        return true;
    }
    let x = vec![0, 1];
    if !poly_sub(&frobenius_power_of_x(n, f, p), &x, p).is_empty() {
        return false;
    }
    factorize(n as u64).into_iter().all(|(ell, _)| {
        let h = poly_sub(&frobenius_power_of_x(n / ell as u32, f, p), &x, p);
        poly_gcd(f, &h, p).len() == 1
    })
}

fn canonical_modulus(p: u64, e: u32) -> Vec<u64> {
    if e == 1 {
        return vec![0, 1];
    }
    let e = e as usize;
    // Lexicographic order with the constant term most significant.
    let mut coeffs = vec![0u64; e];
    loop {
        if coeffs[0] != 0 {
            let mut f = coeffs.clone();
            f.push(1);
            if is_irreducible(&f, p) {
                return f;
            }
        }
        let mut i = e;
        loop {
            i -= 1;
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            assert!(i > 0, "an irreducible polynomial of every degree exists");
        }
    }
}
