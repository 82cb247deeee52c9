//! Constructions of MDS self-dual GRS codes.
//!
//! Every family reduces to the same step: choose evaluation points `a` of
//! even length `n`, compute `u_i = ∏_{j≠i}(a_i - a_j)^{-1}`, and find `λ ≠ 0`
//! with every `λ·u_i` a square `v_i²`. Then `GRS_{n/2}(a, v)` is self-dual.
//! The families differ in how they guarantee that `λ` exists:
//!
//! * characteristic 2: every element is a square;
//! * square-difference sets: all pairwise differences are squares, so every
//!   `u_i` is a square;
//! * `q = r²`: when the kernel of the Vandermonde system contains a vector
//!   over GF(r), that vector is `λ·u` and its entries are squares in GF(q);
//! * unions of additive cosets of GF(r) in GF(r²) when `r ≡ 3 (mod 4)`.
//!
//! The extended family instead uses `GRS_{(q+1)/2}(F_q, 1, ∞)`, which is
//! self-dual for every odd `q`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{make_field, make_field_of_order, prime_power, Felt, FieldCtx};
use crate::grs::{dual_coefficients, CodeJson, GrsCode};
use crate::linalg::vandermonde_system;
use crate::par::{self, Strategy};
use crate::verify::check_self_dual;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    EvenChar,
    Extended,
    SquareSet,
    SubfieldPoints,
    RootsOfUnity,
    CosetUnion,
    Auto,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::EvenChar,
        Family::Extended,
        Family::SquareSet,
        Family::SubfieldPoints,
        Family::RootsOfUnity,
        Family::CosetUnion,
        Family::Auto,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::EvenChar => "even-char",
            Family::Extended => "extended",
            Family::SquareSet => "square-set",
            Family::SubfieldPoints => "subfield-points",
            Family::RootsOfUnity => "roots-of-unity",
            Family::CosetUnion => "theorem-3-5",
            Family::Auto => "auto",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown family {s:?}")))
    }
}

/// Witnesses collected while building a code.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Certificate {
    pub u: Vec<Felt>,
    pub lambda: Option<Felt>,
    pub w: Option<Vec<Felt>>,
    pub beta: Option<Felt>,
    pub gamma: Option<Felt>,
    pub alpha_set: Vec<Felt>,
}

#[derive(Debug, Clone)]
pub struct ConstructionResult {
    pub code: GrsCode,
    pub family: Family,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub u: Vec<Vec<u64>>,
    pub lambda: Option<Vec<u64>>,
    pub w: Option<Vec<Vec<u64>>>,
    pub beta: Option<Vec<u64>>,
    pub gamma: Option<Vec<u64>>,
    pub alpha_set: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionJson {
    #[serde(flatten)]
    pub code: CodeJson,
    pub family: String,
    pub certificate: CertificateJson,
}

impl ConstructionResult {
    pub fn to_json(&self) -> ConstructionJson {
        let f = self.code.field();
        let c = &self.certificate;
        let list = |xs: &[Felt]| xs.iter().map(|&x| f.coeffs(x)).collect::<Vec<_>>();
        ConstructionJson {
            code: self.code.to_json(),
            family: self.family.name().to_string(),
            certificate: CertificateJson {
                u: list(&c.u),
                lambda: c.lambda.map(|x| f.coeffs(x)),
                w: c.w.as_deref().map(list),
                beta: c.beta.map(|x| f.coeffs(x)),
                gamma: c.gamma.map(|x| f.coeffs(x)),
                alpha_set: list(&c.alpha_set),
            },
        }
    }
}

/// Parameters for [`construct`]. The field is given either by `q` or by
/// `(p, e)`; the subfield and coset-union families take `r` instead.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstructionRequest {
    pub family: Option<Family>,
    pub p: Option<u64>,
    pub e: Option<u32>,
    pub q: Option<u64>,
    pub r: Option<u64>,
    pub t: Option<u64>,
    pub n: Option<usize>,
}

impl ConstructionRequest {
    fn field_order(&self) -> Result<u64> {
        match (self.q, self.p, self.e, self.r) {
            (Some(q), ..) => Ok(q),
            (None, Some(p), Some(e), _) => p
                .checked_pow(e)
                .ok_or_else(|| Error::RangeError(format!("{p}^{e} overflows"))),
            (None, _, _, Some(r)) => Ok(r * r),
            _ => Err(Error::Parse(
                "field order required: pass q, or p and e".into(),
            )),
        }
    }

    fn subfield_order(&self) -> Result<u64> {
        if let Some(r) = self.r {
            return Ok(r);
        }
        let q = self.field_order()?;
        square_root_order(q)
            .ok_or_else(|| Error::RangeError(format!("{q} is not the square of a prime power")))
    }

    fn length(&self) -> Result<usize> {
        self.n
            .ok_or_else(|| Error::Parse("length n required".into()))
    }
}

/// `r` with `r² = q` when `q` is an even power of a prime.
fn square_root_order(q: u64) -> Option<u64> {
    let (p, e) = prime_power(q)?;
    (e % 2 == 0).then(|| p.pow(e / 2))
}

pub fn construct(req: &ConstructionRequest) -> Result<ConstructionResult> {
    let family = req
        .family
        .ok_or_else(|| Error::Parse("family required".into()))?;
    match family {
        Family::EvenChar => construct_even_char(req.field_order()?, req.length()?),
        Family::Extended => construct_extended(req.field_order()?),
        Family::SquareSet => construct_square_set(req.field_order()?, req.length()?),
        Family::SubfieldPoints => construct_subfield_points(req.subfield_order()?, req.length()?),
        Family::RootsOfUnity => construct_roots_of_unity(req.field_order()?, req.length()?),
        Family::CosetUnion => {
            let t = req.t.ok_or_else(|| Error::Parse("t required".into()))?;
            construct_coset_union(req.subfield_order()?, t)
        }
        Family::Auto => construct_auto(req.field_order()?, req.length()?),
    }
}

/// Tries each family that applies to `(q, n)` in a fixed order and returns
/// the first success.
pub fn construct_auto(q: u64, n: usize) -> Result<ConstructionResult> {
    let (p, e) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
    let r = (e % 2 == 0).then(|| p.pow(e / 2));
    let mut attempts: Vec<Box<dyn Fn() -> Result<ConstructionResult>>> = Vec::new();
    if let Some(r) = r {
        let block = 2 * r as usize;
        if r % 4 == 3 && n.is_multiple_of(block) && n > 0 {
            let t = (n / block) as u64;
            attempts.push(Box::new(move || construct_coset_union(r, t)));
        }
        attempts.push(Box::new(move || construct_roots_of_unity(q, n)));
        attempts.push(Box::new(move || construct_subfield_points(r, n)));
    }
    attempts.push(Box::new(move || construct_square_set(q, n)));
    if p != 2 && n as u64 == q + 1 {
        attempts.push(Box::new(move || construct_extended(q)));
    }
    attempts.push(Box::new(move || construct_even_char(q, n)));

    let mut search_failure = None;
    for attempt in attempts {
        match attempt() {
            Ok(res) => return Ok(res),
            Err(e @ (Error::NotFound { .. } | Error::BudgetExhausted(_))) => {
                search_failure = search_failure.or(Some(e))
            }
            Err(e) if e.is_construction_failure() => {}
            Err(e) => return Err(e),
        }
    }
    Err(search_failure.unwrap_or(Error::NotSelfDualizable))
}

/// `w = u / u_1`, provided every entry lies in GF(r) where `q = r²`.
pub fn find_subfield_scaling(field: &FieldCtx, u: &[Felt]) -> Result<Vec<Felt>> {
    let r = half_order(field)?;
    let first = *u
        .first()
        .ok_or_else(|| Error::RangeError("empty vector".into()))?;
    let inv = field.inv(first)?;
    let w: Vec<Felt> = u.iter().map(|&x| field.mul(x, inv)).collect();
    if w.iter().any(|x| x.is_zero()) {
        return Err(Error::DivisionByZero);
    }
    for &x in &w {
        if !field.in_subfield(x, r)? {
            return Err(Error::NoSubfieldSolution);
        }
    }
    Ok(w)
}

/// Whether `A_a` and `A_a^{(r)}` are row equivalent, `q = r²`.
pub fn has_subfield_solution(field: &Arc<FieldCtx>, a: &[Felt]) -> Result<bool> {
    let r = half_order(field)?;
    let m = vandermonde_system(field, a)?;
    m.row_equivalent(&m.entrywise_power(r))
}

fn half_order(field: &FieldCtx) -> Result<u64> {
    if !field.e().is_multiple_of(2) {
        return Err(Error::BadSubfield { r: 0, q: field.q() });
    }
    Ok(field.p().pow(field.e() / 2))
}

/// Chooses multipliers making `GRS_{n/2}(a, v)` self-dual, if the points
/// allow it.
pub fn selfdualize(field: &Arc<FieldCtx>, a: &[Felt]) -> Result<(GrsCode, Certificate)> {
    let n = a.len();
    if !n.is_multiple_of(2) {
        return Err(Error::OddLength(n));
    }
    let u = dual_coefficients(field, a)?;
    let scaled_roots = |lambda: Felt, base: &[Felt]| -> Result<Vec<Felt>> {
        base.iter()
            .map(|&x| field.sqrt(field.mul(lambda, x)))
            .collect()
    };

    let (v, lambda, w) = if !field.is_odd() {
        (scaled_roots(Felt::ONE, &u)?, Felt::ONE, None)
    } else {
        let chars: Vec<i8> = u
            .iter()
            .map(|&x| field.quadratic_character(x))
            .collect::<Result<_>>()?;
        if chars.iter().all(|&c| c == 1) {
            (scaled_roots(Felt::ONE, &u)?, Felt::ONE, None)
        } else if chars.iter().all(|&c| c == -1) {
            let lambda = field.canonical_nonresidue()?;
            (scaled_roots(lambda, &u)?, lambda, None)
        } else if field.e().is_multiple_of(2) {
            let w = match find_subfield_scaling(field, &u) {
                Ok(w) => w,
                Err(Error::NoSubfieldSolution) => return Err(Error::NotSelfDualizable),
                Err(e) => return Err(e),
            };
            let v = scaled_roots(Felt::ONE, &w)?;
            (v, field.inv(u[0])?, Some(w))
        } else {
            return Err(Error::NotSelfDualizable);
        }
    };
    let code = GrsCode::new(field.clone(), a.to_vec(), v, n / 2, false)?;
    let cert = Certificate {
        u,
        lambda: Some(lambda),
        w,
        alpha_set: a.to_vec(),
        ..Default::default()
    };
    Ok((code, cert))
}

fn finish(code: GrsCode, family: Family, certificate: Certificate) -> Result<ConstructionResult> {
    let check = check_self_dual(&code.generator_matrix());
    if !check.passed() {
        return Err(Error::CertificateViolation(check.detail));
    }
    Ok(ConstructionResult {
        code,
        family,
        certificate,
    })
}

fn check_even_length(n: usize) -> Result<()> {
    if !n.is_multiple_of(2) {
        return Err(Error::OddLength(n));
    }
    if n == 0 {
        return Err(Error::RangeError("length must be positive".into()));
    }
    Ok(())
}

/// `[n, n/2]` code over GF(q), `q` a power of two, on the first `n` elements.
pub fn construct_even_char(q: u64, n: usize) -> Result<ConstructionResult> {
    let field = make_field_of_order(q)?;
    if field.is_odd() {
        return Err(Error::RangeError(format!("{q} is not a power of 2")));
    }
    check_even_length(n)?;
    if n as u64 > q {
        return Err(Error::LengthTooLong { n, max: q });
    }
    let a: Vec<Felt> = field.elements().take(n).collect();
    let (code, cert) = selfdualize(&field, &a)?;
    finish(code, Family::EvenChar, cert)
}

/// `GRS_{(q+1)/2}(F_q, 1, ∞)`, a `[q+1, (q+1)/2]` code for odd `q`.
pub fn construct_extended(q: u64) -> Result<ConstructionResult> {
    let field = make_field_of_order(q)?;
    if !field.is_odd() {
        return Err(Error::EvenCharacteristic);
    }
    let a: Vec<Felt> = field.elements().collect();
    let k = (q as usize).div_ceil(2);
    let code = GrsCode::with_unit_multipliers(field.clone(), a.clone(), k, true)?;
    let cert = Certificate {
        alpha_set: a,
        ..Default::default()
    };
    finish(code, Family::Extended, cert)
}

/// Lexicographically first set of `n` elements whose pairwise differences
/// are all nonzero squares, by depth-first search. `q ≡ 1 (mod 4)` so that
/// the condition is symmetric.
///
/// Any such set can be translated and rescaled by a square to contain 0 and
/// 1, so the search starts from `{0, 1}`. With a node budget the search runs
/// sequentially and gives up after visiting that many nodes.
pub fn search_square_difference_set(
    field: &FieldCtx,
    n: usize,
    node_budget: Option<u64>,
) -> Result<Vec<Felt>> {
    search_square_difference_set_with(field, n, node_budget, Strategy::default())
}

pub fn search_square_difference_set_with(
    field: &FieldCtx,
    n: usize,
    node_budget: Option<u64>,
    strategy: Strategy,
) -> Result<Vec<Felt>> {
    let q = field.q();
    if !field.is_odd() || q % 4 != 1 {
        return Err(Error::BadResidueClass(q));
    }
    if n < 2 {
        return Err(Error::RangeError(format!("set size {n} below 2")));
    }
    let not_found = Error::NotFound { q, n };
    if n as u64 > q {
        return Err(not_found);
    }
    let square: Vec<bool> = field
        .elements()
        .map(|x| field.quadratic_character(x) == Ok(1))
        .collect();
    let ok = |set: &[u32], c: u32| {
        set.iter()
            .all(|&s| square[field.sub(Felt::from_index(c), Felt::from_index(s)).index() as usize])
    };
    let start = [0u32, 1];
    if n == 2 {
        return Ok(vec![Felt::ZERO, Felt::ONE]);
    }

    let found = match (node_budget, strategy) {
        (Some(budget), _) => {
            let mut nodes = 0u64;
            let mut set = start.to_vec();
            match dfs(&mut set, n, q as u32, &ok, &mut nodes, Some(budget)) {
                Dfs::Found => Some(set),
                Dfs::Exhausted => None,
                Dfs::OutOfBudget => return Err(Error::BudgetExhausted(budget)),
            }
        }
        (None, strategy) => par::find_map_first(strategy, 2..q, |c| {
            let c = c as u32;
            if !ok(&start, c) {
                return None;
            }
            let mut set = vec![0, 1, c];
            let mut nodes = 0;
            matches!(
                dfs(&mut set, n, q as u32, &ok, &mut nodes, None),
                Dfs::Found
            )
            .then_some(set)
        }),
    };
    found
        .map(|s| s.into_iter().map(Felt::from_index).collect())
        .ok_or(not_found)
}

enum Dfs {
    Found,
    Exhausted,
    OutOfBudget,
}

fn dfs(
    set: &mut Vec<u32>,
    n: usize,
    q: u32,
    ok: &impl Fn(&[u32], u32) -> bool,
    nodes: &mut u64,
    budget: Option<u64>,
) -> Dfs {
    if set.len() == n {
        return Dfs::Found;
    }
    let last = *set.last().expect("search starts nonempty");
    // Not enough candidates left to complete the set.
    let need = (n - set.len()) as u32;
    for c in last + 1..=q - need {
        *nodes += 1;
        if budget.is_some_and(|b| *nodes > b) {
            return Dfs::OutOfBudget;
        }
        if ok(set, c) {
            set.push(c);
            match dfs(set, n, q, ok, nodes, budget) {
                Dfs::Exhausted => {
                    set.pop();
                }
                other => return other,
            }
        }
    }
    Dfs::Exhausted
}

/// `[n, n/2]` code over GF(q), `q ≡ 1 (mod 4)`, on a square-difference set.
pub fn construct_square_set(q: u64, n: usize) -> Result<ConstructionResult> {
    let field = make_field_of_order(q)?;
    if !field.is_odd() || q % 4 != 1 {
        return Err(Error::BadResidueClass(q));
    }
    check_even_length(n)?;
    let a = search_square_difference_set(&field, n, None)?;
    let (code, cert) = selfdualize(&field, &a)?;
    if cert.lambda != Some(Felt::ONE) {
        return Err(Error::CertificateViolation(
            "dual coefficients of a square-difference set are not all squares".into(),
        ));
    }
    finish(code, Family::SquareSet, cert)
}

/// `[n, n/2]` code over GF(r²) on the first `n` elements of GF(r).
pub fn construct_subfield_points(r: u64, n: usize) -> Result<ConstructionResult> {
    let (p, d) = prime_power(r).ok_or(Error::NotPrimePower(r))?;
    let field = make_field(p, 2 * d)?;
    check_even_length(n)?;
    if n as u64 > r {
        return Err(Error::LengthTooLong { n, max: r });
    }
    let a: Vec<Felt> = field.subfield_elements(r)?.into_iter().take(n).collect();
    let u = dual_coefficients(&field, &a)?;
    for &x in &u {
        if !field.in_subfield(x, r)? {
            return Err(Error::CertificateViolation(
                "dual coefficient outside the subfield".into(),
            ));
        }
    }
    let v = u
        .iter()
        .map(|&x| field.sqrt(x))
        .collect::<Result<Vec<_>>>()
        .map_err(|_| {
            Error::CertificateViolation("subfield element without a square root".into())
        })?;
    let code = GrsCode::new(field.clone(), a.clone(), v, n / 2, false)?;
    let cert = Certificate {
        w: Some(u.clone()),
        u,
        lambda: Some(Felt::ONE),
        alpha_set: a,
        ..Default::default()
    };
    finish(code, Family::SubfieldPoints, cert)
}

/// `[n, n/2]` code over GF(q), `q = r²` odd, on 0 and the `(n-1)`-th roots of
/// unity.
pub fn construct_roots_of_unity(q: u64, n: usize) -> Result<ConstructionResult> {
    let field = make_field_of_order(q)?;
    if !field.is_odd() {
        return Err(Error::EvenCharacteristic);
    }
    if field.e() % 2 != 0 {
        return Err(Error::RangeError(format!(
            "{q} is not an even power of a prime"
        )));
    }
    check_even_length(n)?;
    let m = n as u64 - 1;
    let mut a = vec![Felt::ZERO];
    a.extend(field.roots_of_unity(m)?);
    if !has_subfield_solution(&field, &a)? {
        return Err(Error::CertificateViolation(
            "Vandermonde system not stable under Frobenius".into(),
        ));
    }
    let u = dual_coefficients(&field, &a)?;
    let w = find_subfield_scaling(&field, &u)?;
    let v = w
        .iter()
        .map(|&x| field.sqrt(x))
        .collect::<Result<Vec<_>>>()
        .map_err(|_| {
            Error::CertificateViolation("subfield element without a square root".into())
        })?;
    let code = GrsCode::new(field.clone(), a.clone(), v, n / 2, false)?;
    let lambda = field.inv(u[0])?;
    let cert = Certificate {
        u,
        lambda: Some(lambda),
        w: Some(w),
        alpha_set: a,
        ..Default::default()
    };
    finish(code, Family::RootsOfUnity, cert)
}

/// `[2tr, tr]` code over GF(r²), `r ≡ 3 (mod 4)`, on the union of the cosets
/// `a_ℓ·β + GF(r)` for the first `2t` subfield elements `a_ℓ`, where
/// `β = γ^((r+1)/2)` for the primitive element `γ`.
pub fn construct_coset_union(r: u64, t: u64) -> Result<ConstructionResult> {
    let (p, d) = prime_power(r).ok_or(Error::NotPrimePower(r))?;
    if r % 4 != 3 {
        return Err(Error::BadResidueClass(r));
    }
    if t == 0 || t > (r - 1) / 2 {
        return Err(Error::RangeError(format!(
            "t = {t} outside 1..={}",
            (r - 1) / 2
        )));
    }
    let field = make_field(p, 2 * d)?;
    let f = &field;
    let gamma = f.primitive_element();
    let beta = f.pow_u(gamma, r.div_ceil(2));
    let labels = f.subfield_elements(r)?;
    let r_us = r as usize;
    let blocks = 2 * t as usize;

    let alpha: Vec<Felt> = (0..blocks)
        .flat_map(|l| {
            let offset = f.mul(labels[l], beta);
            labels.iter().map(move |&ak| f.add(offset, ak))
        })
        .collect();

    let violation = |msg: String| Err(Error::CertificateViolation(msg));
    let beta_term = f.sub(f.pow_u(beta, r - 1), Felt::ONE);
    if beta_term != f.constant(-2) {
        return violation("β^(r-1) - 1 ≠ -2".into());
    }
    for l0 in 0..blocks {
        for k0 in 0..r_us {
            let x = alpha[l0 * r_us + k0];
            for l in 0..blocks {
                let block = &alpha[l * r_us..(l + 1) * r_us];
                if l == l0 {
                    let within = f.product(
                        block
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| j != k0)
                            .map(|(_, &y)| f.sub(x, y)),
                    );
                    let expected = f.product(
                        (0..r_us)
                            .filter(|&j| j != k0)
                            .map(|j| f.sub(labels[k0], labels[j])),
                    );
                    if within != expected || !f.in_subfield(within, r)? {
                        return violation(format!(
                            "within-block product at block {l0}, point {k0}"
                        ));
                    }
                } else {
                    let cross = f.product(block.iter().map(|&y| f.sub(x, y)));
                    let expected = f.mul(f.mul(f.sub(labels[l0], labels[l]), beta), beta_term);
                    if cross != expected {
                        return violation(format!(
                            "cross-block product between blocks {l0} and {l}"
                        ));
                    }
                }
            }
        }
    }

    let u = dual_coefficients(f, &alpha)?;
    let v = u
        .iter()
        .map(|&x| f.sqrt(x))
        .collect::<Result<Vec<_>>>()
        .map_err(|_| Error::CertificateViolation("dual coefficient is not a square".into()))?;
    let code = GrsCode::new(field.clone(), alpha.clone(), v, alpha.len() / 2, false)?;
    let cert = Certificate {
        u,
        lambda: Some(Felt::ONE),
        w: None,
        beta: Some(beta),
        gamma: Some(gamma),
        alpha_set: alpha,
    };
    finish(code, Family::CosetUnion, cert)
}
