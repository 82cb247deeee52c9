//! Brute-force checks: self-duality, MDS, dual identities and the
//! character-sum bound.
//!
//! Nothing here relies on the algebra that produced a code. Self-duality is
//! `G·Gᵀ = 0` plus a rank count, MDS-ness is nonsingularity of every
//! `k`-subset of generator columns, and minimum distance can be cross-checked
//! by enumerating all codewords.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Felt, FieldCtx};
use crate::grs::{dual_coefficients, GrsCode};
use crate::linalg::{check_distinct, rank_of, Matrix};
use crate::par::{self, Strategy};

pub const DEFAULT_MDS_BUDGET: u128 = 1_000_000;
pub const DEFAULT_MDS_SAMPLES: u64 = 10_000;

/// Subsets checked per parallel work item in the exact MDS loop.
const CHUNK: u64 = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    Exact,
    Randomized,
    Structural,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub mode: CheckMode,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

impl CheckResult {
    fn new(name: &str, status: Status, mode: CheckMode, detail: String) -> Self {
        CheckResult {
            name: name.to_string(),
            status,
            mode,
            detail,
            seed: None,
        }
    }

    fn verdict(name: &str, ok: bool, mode: CheckMode, detail: String) -> Self {
        Self::new(
            name,
            if ok { Status::Pass } else { Status::Fail },
            mode,
            detail,
        )
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub overall: bool,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn new(checks: Vec<CheckResult>) -> Self {
        let overall = checks.iter().all(|c| c.status != Status::Fail);
        VerificationReport { overall, checks }
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdsMode {
    /// Every `k`-subset of columns, refusing to start above `budget` subsets.
    Exact { budget: u128 },
    /// `samples` uniformly random `k`-subsets drawn from a seeded generator.
    Randomized { samples: u64, seed: u64 },
    /// Distinct evaluation points and nonzero multipliers.
    Structural,
}

impl Default for MdsMode {
    fn default() -> Self {
        MdsMode::Exact {
            budget: DEFAULT_MDS_BUDGET,
        }
    }
}

impl MdsMode {
    /// Exact when `C(N, k)` fits the default budget, otherwise randomized.
    pub fn auto(len: usize, k: usize, seed: u64) -> Self {
        if binomial(len as u64, k as u64) <= DEFAULT_MDS_BUDGET {
            MdsMode::default()
        } else {
            MdsMode::Randomized {
                samples: DEFAULT_MDS_SAMPLES,
                seed,
            }
        }
    }
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Passes iff `N = 2k`, `rank(G) = k` and `G·Gᵀ = 0`.
pub fn check_self_dual(g: &Matrix) -> CheckResult {
    let (k, len) = (g.rows(), g.cols());
    let name = "self_dual";
    if len != 2 * k {
        return CheckResult::verdict(
            name,
            false,
            CheckMode::Exact,
            format!("length {len} is not twice the dimension {k}"),
        );
    }
    let rank = g.rank();
    if rank != k {
        return CheckResult::verdict(
            name,
            false,
            CheckMode::Exact,
            format!("generator has rank {rank}, expected {k}"),
        );
    }
    let gram = g.gram();
    let bad = (0..k)
        .flat_map(|i| (i..k).map(move |j| (i, j)))
        .find(|&(i, j)| !gram.get(i, j).is_zero());
    match bad {
        None => CheckResult::verdict(
            name,
            true,
            CheckMode::Exact,
            format!("[{len},{k}] generator satisfies G·Gᵀ = 0"),
        ),
        Some((i, j)) => CheckResult::verdict(
            name,
            false,
            CheckMode::Exact,
            format!("rows {i} and {j} have inner product {}", gram.get(i, j)),
        ),
    }
}

pub fn check_mds(code: &GrsCode, mode: MdsMode) -> Result<CheckResult> {
    check_mds_with(code, &code.generator_matrix(), mode, Strategy::default())
}

/// MDS check against an explicit generator matrix. Structural mode looks only
/// at the code parameters.
pub fn check_mds_with(
    code: &GrsCode,
    g: &Matrix,
    mode: MdsMode,
    strategy: Strategy,
) -> Result<CheckResult> {
    match mode {
        MdsMode::Structural => {
            let distinct = check_distinct(code.alpha()).is_ok();
            let nonzero = code.v().iter().all(|x| !x.is_zero());
            let ok = distinct && nonzero;
            let detail = if ok {
                format!(
                    "GRS code with distinct points and nonzero multipliers: [{}, {}, {}]",
                    code.len(),
                    code.k(),
                    code.designed_distance()
                )
            } else {
                "evaluation points repeat or a multiplier is zero".to_string()
            };
            Ok(CheckResult::verdict(
                "mds",
                ok,
                CheckMode::Structural,
                detail,
            ))
        }
        _ => check_mds_matrix(g, mode, strategy),
    }
}

/// MDS check of a generator matrix: every set of `k` columns must be
/// independent. Structural mode is reported as skipped.
pub fn check_mds_matrix(g: &Matrix, mode: MdsMode, strategy: Strategy) -> Result<CheckResult> {
    let (k, len) = (g.rows(), g.cols());
    let name = "mds";
    if k == 0 || k > len {
        let m = match mode {
            MdsMode::Randomized { .. } => CheckMode::Randomized,
            _ => CheckMode::Exact,
        };
        return Ok(CheckResult::verdict(
            name,
            false,
            m,
            format!("degenerate {k}x{len} generator"),
        ));
    }
    match mode {
        MdsMode::Structural => Ok(CheckResult::new(
            name,
            Status::Skipped,
            CheckMode::Structural,
            "structural mode needs code parameters".into(),
        )),
        MdsMode::Exact { budget } => {
            let total = binomial(len as u64, k as u64);
            if total > budget {
                return Err(Error::BudgetExceeded {
                    needed: total,
                    budget,
                });
            }
            let total = total as u64;
            let chunks = total.div_ceil(CHUNK);
            let f = g.field();
            let singular = par::find_map_first(strategy, 0..chunks, |c| {
                let start = c * CHUNK;
                let end = (start + CHUNK).min(total);
                let mut subset = unrank_combination(len, k, start);
                let mut buf = vec![Felt::ZERO; k * k];
                for idx in start..end {
                    if idx > start {
                        next_combination(&mut subset, len);
                    }
                    if !columns_independent(f, g, &subset, &mut buf) {
                        return Some(subset);
                    }
                }
                None
            });
            Ok(match singular {
                None => CheckResult::verdict(
                    name,
                    true,
                    CheckMode::Exact,
                    format!(
                        "all {total} column subsets of size {k} are nonsingular; d = {}",
                        len - k + 1
                    ),
                ),
                Some(s) => CheckResult::verdict(
                    name,
                    false,
                    CheckMode::Exact,
                    format!("columns {s:?} are dependent"),
                ),
            })
        }
        MdsMode::Randomized { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let subsets: Vec<Vec<usize>> = (0..samples)
                .map(|_| {
                    let mut s = sample(&mut rng, len, k).into_vec();
                    s.sort_unstable();
                    s
                })
                .collect();
            let f = g.field();
            let singular = par::find_map_first(strategy, 0..samples, |i| {
                let mut buf = vec![Felt::ZERO; k * k];
                let s = &subsets[i as usize];
                (!columns_independent(f, g, s, &mut buf)).then(|| s.clone())
            });
            let mut result = match singular {
                None => CheckResult::verdict(
                    name,
                    true,
                    CheckMode::Randomized,
                    format!("{samples} sampled column subsets of size {k} are nonsingular"),
                ),
                Some(s) => CheckResult::verdict(
                    name,
                    false,
                    CheckMode::Randomized,
                    format!("columns {s:?} are dependent"),
                ),
            };
            result.seed = Some(seed);
            Ok(result)
        }
    }
}

fn columns_independent(f: &FieldCtx, g: &Matrix, cols: &[usize], buf: &mut [Felt]) -> bool {
    let k = g.rows();
    for i in 0..k {
        for (j, &c) in cols.iter().enumerate() {
            buf[i * k + j] = g.get(i, c);
        }
    }
    rank_of(f, buf, k, k) == k
}

/// The `rank`-th `k`-subset of `0..n` in lexicographic order.
fn unrank_combination(n: usize, k: usize, mut rank: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let mut x = next;
        loop {
            let rest = binomial((n - x - 1) as u64, (k - slot - 1) as u64) as u64;
            if rank < rest {
                break;
            }
            rank -= rest;
            x += 1;
        }
        out.push(x);
        next = x + 1;
    }
    out
}

fn next_combination(s: &mut [usize], n: usize) {
    let k = s.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if s[i] < n - k + i {
            s[i] += 1;
            for j in i + 1..k {
                s[j] = s[j - 1] + 1;
            }
            return;
        }
    }
}

/// Minimum Hamming weight over all nonzero codewords of the row space of `g`.
/// Refuses when there are more than `limit` messages.
pub fn min_distance_by_enumeration(g: &Matrix, limit: u64, strategy: Strategy) -> Result<usize> {
    let f = g.field();
    let q = f.q();
    let k = g.rows();
    let total = (0..k).try_fold(1u64, |acc, _| acc.checked_mul(q).filter(|&t| t <= limit));
    let Some(total) = total else {
        return Err(Error::BudgetExceeded {
            needed: (q as u128).pow(k as u32),
            budget: limit as u128,
        });
    };
    let d = par::min_by_key(strategy, 1..total, |mut m| {
        let msg: Vec<Felt> = (0..k)
            .map(|_| {
                let d = m % q;
                m /= q;
                f.elem(d).expect("digit below q")
            })
            .collect();
        let word = g.left_mul_vec(&msg).expect("message length matches");
        Some(word.iter().filter(|x| !x.is_zero()).count() as u64)
    });
    Ok(d.unwrap_or(0) as usize)
}

/// Checks that `GRS_{n-k}(a, u)` spans exactly the dual of `GRS_k(a, 1)`.
pub fn check_dual_identity(field: &Arc<FieldCtx>, a: &[Felt], k: usize) -> Result<CheckResult> {
    let n = a.len();
    let name = "dual_identity";
    if k == 0 || k >= n {
        return Ok(CheckResult::new(
            name,
            Status::Skipped,
            CheckMode::Exact,
            format!("k = {k} outside 1..={}", n.saturating_sub(1)),
        ));
    }
    let u = dual_coefficients(field, a)?;
    let code = GrsCode::with_unit_multipliers(field.clone(), a.to_vec(), k, false)?;
    let dual = GrsCode::new(field.clone(), a.to_vec(), u.clone(), n - k, false)?;
    let g = code.generator_matrix();
    let h = dual.generator_matrix();
    let orthogonal = g.mul(&h.transpose())?.is_zero();
    let nullity = n - g.rank();
    let rank_h = h.rank();
    let ok = orthogonal && rank_h == n - k && nullity == n - k;
    let sum_u = field.sum(u.iter().copied());
    Ok(CheckResult::verdict(
        name,
        ok,
        CheckMode::Exact,
        format!(
            "orthogonal = {orthogonal}, rank of dual generator = {rank_h}, nullity = {nullity}, expected {}; Σu_i = {}",
            n - k,
            field.coeffs(sum_u).iter().map(u64::to_string).collect::<Vec<_>>().join(",")
        ),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterSumCheck {
    /// Number of `β` with `χ(β - α) = 1` for every `α` in the set.
    pub count: u64,
    /// `|N - q / 2^(n-1)|`.
    pub deviation: f64,
    /// `((n-3)/2 + 1/2^(n-1))·√q + (n-1)/2`.
    pub bound: f64,
    pub result: CheckResult,
}

/// Counts the common quadratic-residue translates of `t` and compares the
/// count with `q / 2^(n-1)` where `n - 1 = |t|`.
///
/// The comparison is done in integers after scaling by `2^(n-1)` and
/// squaring, so it is exact. Sets larger than 24 fall back to floating point
/// with the tolerance `1e-9` subtracted from the bound.
pub fn check_character_sum_bound(field: &FieldCtx, t: &[Felt]) -> Result<CharacterSumCheck> {
    check_character_sum_bound_with(field, t, Strategy::default())
}

pub fn check_character_sum_bound_with(
    field: &FieldCtx,
    t: &[Felt],
    strategy: Strategy,
) -> Result<CharacterSumCheck> {
    if !field.is_odd() {
        return Err(Error::EvenCharacteristic);
    }
    if t.is_empty() {
        return Err(Error::RangeError("the set must be nonempty".into()));
    }
    check_distinct(t)?;
    let q = field.q();
    let m = t.len() as u64;
    let count = par::count(strategy, 0..q, |b| {
        let beta = field.elem(b).expect("index below q");
        t.iter()
            .all(|&a| field.quadratic_character(field.sub(beta, a)) == Ok(1))
    });

    let scale = 2f64.powi(m as i32);
    let deviation = (count as f64 - q as f64 / scale).abs();
    let coeff = (m as f64 - 2.0) / 2.0 + 1.0 / scale;
    let bound = coeff * (q as f64).sqrt() + m as f64 / 2.0;

    let ok = if m <= 24 {
        // Multiply through by D = 2^m.
        let d = 1i128 << m;
        let dev_scaled = (d * count as i128 - q as i128).abs() - (d / 2) * m as i128;
        let coeff_scaled = (d / 2) * (m as i128 - 2) + 1;
        dev_scaled <= 0 || dev_scaled * dev_scaled <= coeff_scaled * coeff_scaled * q as i128
    } else {
        deviation <= bound - 1e-9
    };
    let result = CheckResult::verdict(
        "character_sum_bound",
        ok,
        CheckMode::Exact,
        format!("N = {count}, |N - q/2^{m}| = {deviation:.6}, bound = {bound:.6}"),
    );
    Ok(CharacterSumCheck {
        count,
        deviation,
        bound,
        result,
    })
}

/// Options for [`verify_code`].
#[derive(Debug, Clone, Copy)]
#[derive(Default)]
pub struct VerifyOptions {
    pub mds: MdsMode,
    pub dual_identity: bool,
    pub strategy: Strategy,
}


/// Runs the standard checks against `g`, which is normally the code's own
/// generator matrix but may come from a file.
pub fn verify_code(code: &GrsCode, g: &Matrix, opts: VerifyOptions) -> Result<VerificationReport> {
    let mut checks = Vec::new();
    let expected = code.generator_matrix();
    checks.push(CheckResult::verdict(
        "generator_matches_parameters",
        expected == *g,
        CheckMode::Exact,
        if expected == *g {
            "generator equals the matrix defined by alpha, v, k".into()
        } else {
            "generator differs from the matrix defined by alpha, v, k".into()
        },
    ));
    checks.push(check_self_dual(g));
    checks.push(check_mds_with(code, g, opts.mds, opts.strategy)?);
    if opts.dual_identity {
        let c = if code.is_extended() {
            CheckResult::new(
                "dual_identity",
                Status::Skipped,
                CheckMode::Exact,
                "not defined for extended codes".into(),
            )
        } else {
            check_dual_identity(code.field(), code.alpha(), code.k()).unwrap_or_else(|e| {
                CheckResult::verdict("dual_identity", false, CheckMode::Exact, e.to_string())
            })
        };
        checks.push(c);
    }
    Ok(VerificationReport::new(checks))
}
