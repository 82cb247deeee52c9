//! Generalized Reed–Solomon codes and their extensions.
//!
//! `GRS_k(a, v)` is the set of words `(v_1 f(a_1), …, v_n f(a_n))` over all
//! polynomials `f` of degree below `k`. The extended code appends the
//! coefficient of `x^(k-1)` as a final coordinate.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{field_from_spec, Felt, FieldCtx, FieldSpec};
use crate::linalg::{check_distinct, Matrix, MatrixJson};

#[derive(Debug, Clone)]
pub struct GrsCode {
    field: Arc<FieldCtx>,
    alpha: Vec<Felt>,
    v: Vec<Felt>,
    k: usize,
    extended: bool,
}

impl PartialEq for GrsCode {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_field(&other.field)
            && self.alpha == other.alpha
            && self.v == other.v
            && self.k == other.k
            && self.extended == other.extended
    }
}

impl Eq for GrsCode {}

/// Interchange format for a code and its generator matrix.
///
/// `n` is the number of evaluation points; the block length is `n + 1` for
/// extended codes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeJson {
    pub field: FieldSpec,
    pub n: usize,
    pub k: usize,
    pub extended: bool,
    pub alpha: Vec<Vec<u64>>,
    pub v: Vec<Vec<u64>>,
    pub generator: MatrixJson,
}

impl GrsCode {
    pub fn new(
        field: Arc<FieldCtx>,
        alpha: Vec<Felt>,
        v: Vec<Felt>,
        k: usize,
        extended: bool,
    ) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidCode("no evaluation points".into()));
        }
        if v.len() != alpha.len() {
            return Err(Error::LengthMismatch {
                expected: alpha.len(),
                actual: v.len(),
            });
        }
        if let Some(bad) = alpha.iter().chain(&v).find(|x| x.index() >= field.q()) {
            return Err(Error::InvalidElement(vec![bad.index()]));
        }
        check_distinct(&alpha)?;
        if v.iter().any(|x| x.is_zero()) {
            return Err(Error::InvalidCode(
                "column multipliers must be nonzero".into(),
            ));
        }
        let len = alpha.len() + extended as usize;
        if k == 0 || k > len {
            return Err(Error::InvalidCode(format!(
                "dimension {k} outside 1..={len}"
            )));
        }
        Ok(GrsCode {
            field,
            alpha,
            v,
            k,
            extended,
        })
    }

    /// `GRS_k(a, 1)`.
    pub fn with_unit_multipliers(
        field: Arc<FieldCtx>,
        alpha: Vec<Felt>,
        k: usize,
        extended: bool,
    ) -> Result<Self> {
        let v = vec![Felt::ONE; alpha.len()];
        Self::new(field, alpha, v, k, extended)
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn alpha(&self) -> &[Felt] {
        &self.alpha
    }

    pub fn v(&self) -> &[Felt] {
        &self.v
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_extended(&self) -> bool {
        self.extended
    }

    /// Number of evaluation points.
    pub fn num_points(&self) -> usize {
        self.alpha.len()
    }

    /// Block length.
    pub fn len(&self) -> usize {
        self.alpha.len() + self.extended as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Designed minimum distance `N - k + 1`.
    pub fn designed_distance(&self) -> usize {
        self.len() - self.k + 1
    }

    pub fn generator_matrix(&self) -> Matrix {
        let f = &self.field;
        let (k, len) = (self.k, self.len());
        let mut g = Matrix::zeros(f.clone(), k, len);
        for (j, (&a, &v)) in self.alpha.iter().zip(&self.v).enumerate() {
            let mut entry = v;
            for i in 0..k {
                g.set(i, j, entry);
                entry = f.mul(entry, a);
            }
        }
        if self.extended {
            g.set(k - 1, len - 1, Felt::ONE);
        }
        g
    }

    /// Codeword of the message polynomial `msg` (constant term first, length k).
    pub fn encode(&self, msg: &[Felt]) -> Result<Vec<Felt>> {
        if msg.len() != self.k {
            return Err(Error::LengthMismatch {
                expected: self.k,
                actual: msg.len(),
            });
        }
        let f = &self.field;
        let mut word: Vec<Felt> = self
            .alpha
            .iter()
            .zip(&self.v)
            .map(|(&a, &v)| f.mul(v, f.eval_poly(msg, a)))
            .collect();
        if self.extended {
            word.push(msg[self.k - 1]);
        }
        Ok(word)
    }

    /// The dual code.
    ///
    /// Plain codes: `GRS_{n-k}(a, u ⊘ v)` with `u` from [`dual_coefficients`].
    /// Extended codes: only `GRS_k(F_q, 1, ∞)` with `1 <= k <= q - 1`, whose
    /// dual is `GRS_{q-k+1}(F_q, 1, ∞)`.
    pub fn dual_code(&self) -> Result<GrsCode> {
        let f = &self.field;
        if self.extended {
            let q = f.q() as usize;
            let mut sorted = self.alpha.clone();
            sorted.sort_unstable();
            let all_points = sorted.len() == q
                && sorted
                    .iter()
                    .enumerate()
                    .all(|(i, x)| x.index() == i as u64);
            if !all_points || self.v.iter().any(|&x| x != Felt::ONE) || self.k >= q {
                return Err(Error::ExtendedDualUnsupported);
            }
            return GrsCode::with_unit_multipliers(
                f.clone(),
                self.alpha.clone(),
                q - self.k + 1,
                true,
            );
        }
        let n = self.alpha.len();
        if self.k >= n {
            return Err(Error::InvalidCode(
                "the dual of a full-length code is zero".into(),
            ));
        }
        let u = dual_coefficients(f, &self.alpha)?;
        let w = u
            .iter()
            .zip(&self.v)
            .map(|(&ui, &vi)| f.div(ui, vi))
            .collect::<Result<Vec<_>>>()?;
        GrsCode::new(f.clone(), self.alpha.clone(), w, n - self.k, false)
    }

    pub fn to_json(&self) -> CodeJson {
        let f = &self.field;
        CodeJson {
            field: f.spec().clone(),
            n: self.alpha.len(),
            k: self.k,
            extended: self.extended,
            alpha: self.alpha.iter().map(|&x| f.coeffs(x)).collect(),
            v: self.v.iter().map(|&x| f.coeffs(x)).collect(),
            generator: self.generator_matrix().to_json(),
        }
    }

    /// Parses a code, returning it with the generator matrix exactly as
    /// stored (which may disagree with the parameters).
    pub fn from_json(json: &CodeJson) -> Result<(GrsCode, Matrix)> {
        let field = field_from_spec(&json.field)?;
        let parse = |what: &str, list: &[Vec<u64>]| -> Result<Vec<Felt>> {
            list.iter()
                .enumerate()
                .map(|(i, c)| {
                    field.from_coeffs(c).map_err(|_| {
                        Error::Parse(format!("{what}[{i}] = {c:?} is not a field element"))
                    })
                })
                .collect()
        };
        let alpha = parse("alpha", &json.alpha)?;
        let v = parse("v", &json.v)?;
        if alpha.len() != json.n {
            return Err(Error::Parse(format!(
                "n = {} but alpha has {} entries",
                json.n,
                alpha.len()
            )));
        }
        let code = GrsCode::new(field.clone(), alpha, v, json.k, json.extended)?;
        let g = Matrix::from_json(field, &json.generator)?;
        Ok((code, g))
    }
}

/// `u_i = ∏_{j≠i} (a_i - a_j)^{-1}`, the kernel vector of the Vandermonde
/// system of the points.
pub fn dual_coefficients(field: &FieldCtx, a: &[Felt]) -> Result<Vec<Felt>> {
    if a.len() < 2 {
        return Err(Error::RangeError(format!(
            "need at least 2 points, got {}",
            a.len()
        )));
    }
    check_distinct(a)?;
    a.iter()
        .enumerate()
        .map(|(i, &ai)| {
            let prod = field.product(
                a.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &aj)| field.sub(ai, aj)),
            );
            field.inv(prod)
        })
        .collect()
}
