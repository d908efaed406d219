//! Left production matrices, reconstruction, the `M_{n,r}` product, and
//! executable checks of the production-matrix total positivity theorems.
//!
//! For lower-triangular `A` with nonzero diagonal, `Q(A) = A * diag(1, A^{-1})`,
//! equivalently `A = Q(A) * diag(1, A)`. Conversely any lower-triangular `Q`
//! determines `A` by the finite products computed in [`reconstruct`].

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{is_real_rooted, serde_scalar, Poly, Scalar};
use crate::trimat::{
    finmul, is_tp_to_order, leading_principal, lower_inverse, reversal, toeplitz, FiniteMatrix, TpVerdict,
    TriMatrix,
};

/// `Q(A)_r = A_r * diag(1, A_{r-1}^{-1})`.
///
/// Only `a_{0,0}..a_{r-1,r-1}` must be nonzero; `a_{r,r}` never gets inverted.
pub fn left_production(a: &TriMatrix, r: usize) -> Result<FiniteMatrix> {
    let a_r = leading_principal(a, r)?;
    if r == 0 {
        return Ok(a_r);
    }
    let inv = lower_inverse(&a_r.leading(r))?;
    finmul(
        &a_r,
        &FiniteMatrix::block_diag(&[&FiniteMatrix::identity(1), &inv]),
    )
}

/// `Q(A)` as a lazy triangle. Row `n` is taken from `Q(A)_n`, which agrees with
/// every larger window because all factors are lower triangular.
pub fn left_production_matrix(a: &TriMatrix) -> TriMatrix {
    let inner = a.clone();
    let q = TriMatrix::new(format!("Q({})", a.name()), move |n, _| {
        Ok(left_production(&inner, n)?.row(n)[..=n].to_vec())
    });
    match a.row_limit() {
        Some(limit) => q.with_row_limit(limit),
        None => q,
    }
}

fn require_size(q: &FiniteMatrix, size: usize) -> Result<()> {
    if !q.is_square() || q.rows() < size {
        return Err(Error::DimensionMismatch(format!(
            "need a square block of order at least {size}, got {}x{}",
            q.rows(),
            q.cols()
        )));
    }
    Ok(())
}

/// `diag(I_before, block, I_after)`.
fn padded(before: usize, block: &FiniteMatrix, after: usize) -> FiniteMatrix {
    FiniteMatrix::block_diag(&[
        &FiniteMatrix::identity(before),
        block,
        &FiniteMatrix::identity(after),
    ])
}

/// `A_m = Q_m * diag(I_1, Q_{m-1}) * ... * diag(I_m, Q_0)`, reading the blocks
/// `Q_k` off the leading part of `q` (which needs at least `m + 1` rows).
pub fn reconstruct_finite(q: &FiniteMatrix, m: usize) -> Result<FiniteMatrix> {
    require_size(q, m + 1)?;
    (0..=m).try_fold(FiniteMatrix::identity(m + 1), |acc, i| {
        finmul(&acc, &padded(i, &q.leading(m + 1 - i), 0))
    })
}

/// [`reconstruct_finite`] for a lazily generated `Q`.
pub fn reconstruct(q: &TriMatrix, m: usize) -> Result<FiniteMatrix> {
    reconstruct_finite(&leading_principal(q, m)?, m)
}

/// `M_{n,r} = prod_{i=0..r} diag(I_i, Q_n, I_{r-i})` from a block holding `Q_n`.
pub fn build_mnr_finite(q: &FiniteMatrix, n: usize, r: usize) -> Result<FiniteMatrix> {
    require_size(q, n + 1)?;
    let q_n = q.leading(n + 1);
    (0..=r).try_fold(FiniteMatrix::identity(n + r + 1), |acc, i| {
        finmul(&acc, &padded(i, &q_n, r - i))
    })
}

pub fn build_mnr(q: &TriMatrix, n: usize, r: usize) -> Result<FiniteMatrix> {
    build_mnr_finite(&leading_principal(q, n)?, n, r)
}

/// `M_{n,r}[n..=n+r | 0..=r]`, which should equal `T_r(alpha_n)^T`.
pub fn toeplitz_via_mnr(a: &TriMatrix, n: usize, r: usize) -> Result<FiniteMatrix> {
    let m = build_mnr_finite(&left_production(a, n)?, n, r)?;
    let rows: Vec<usize> = (n..=n + r).collect();
    let cols: Vec<usize> = (0..=r).collect();
    Ok(m.select(&rows, &cols))
}

/// First failing check in a theorem report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum Witness {
    /// Negative minor of `Q(A)_m`.
    Hypothesis {
        rows: Vec<usize>,
        cols: Vec<usize>,
        #[serde(with = "serde_scalar")]
        value: Scalar,
    },
    /// Negative minor of `A_m`.
    Matrix {
        rows: Vec<usize>,
        cols: Vec<usize>,
        #[serde(with = "serde_scalar")]
        value: Scalar,
    },
    /// Negative minor of the reversal.
    Reversal {
        rows: Vec<usize>,
        cols: Vec<usize>,
        #[serde(with = "serde_scalar")]
        value: Scalar,
    },
    /// A row generating polynomial with a non-real zero.
    Roots { row: usize },
}

/// Overall verdict of a theorem check, mapped to CLI exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    Counterexample,
    HypothesisFailed,
}

/// Outcome of checking: if `Q(A)_m` is TP then `A_m` and its reversal are TP
/// and the row polynomials through row `m` are real-rooted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThmMainReport {
    pub triangle: String,
    pub order: usize,
    pub minor_cap: usize,
    pub hypothesis_tp: bool,
    #[serde(rename = "A_tp")]
    pub a_tp: bool,
    pub rev_tp: bool,
    pub rows_real_rooted: bool,
    pub hypothesis_failed: bool,
    pub witness: Option<Witness>,
}

impl ThmMainReport {
    pub fn status(&self) -> Status {
        if !self.hypothesis_tp {
            Status::HypothesisFailed
        } else if self.a_tp && self.rev_tp && self.rows_real_rooted {
            Status::Verified
        } else {
            Status::Counterexample
        }
    }
}

/// The three conclusions checked independently of any hypothesis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conclusions {
    pub a: TpVerdict,
    pub rev: TpVerdict,
    pub first_non_real_rooted: Option<usize>,
}

/// TP of `A_m`, TP of the reversal block, and real-rootedness of rows `0..=m`.
pub fn conclusions(a: &TriMatrix, m: usize, minor_cap: usize) -> Result<Conclusions> {
    let a_m = leading_principal(a, m)?;
    let rev_m = leading_principal(&reversal(a), m)?;
    let rows = a.rows(m + 1)?;
    let first_non_real_rooted = rows
        .par_iter()
        .position_first(|row| !is_real_rooted(&Poly::new(row.clone())));
    Ok(Conclusions {
        a: is_tp_to_order(&a_m, minor_cap),
        rev: is_tp_to_order(&rev_m, minor_cap),
        first_non_real_rooted,
    })
}

fn minor_witness(v: &TpVerdict, wrap: fn(Vec<usize>, Vec<usize>, Scalar) -> Witness) -> Option<Witness> {
    match v {
        TpVerdict::CertifiedTp { .. } => None,
        TpVerdict::Counterexample { rows, cols, value } => {
            Some(wrap(rows.clone(), cols.clone(), value.clone()))
        }
    }
}

/// Theorem check with an explicitly supplied production block `q_m`
/// (used when `Q` is known in closed form and `A` has zero diagonal entries).
pub fn verify_thm_main_given(
    q_m: &FiniteMatrix,
    a: &TriMatrix,
    m: usize,
    minor_cap: usize,
) -> Result<ThmMainReport> {
    require_size(q_m, m + 1)?;
    let hyp = is_tp_to_order(&q_m.leading(m + 1), minor_cap);
    let c = conclusions(a, m, minor_cap)?;
    let witness = minor_witness(&hyp, |rows, cols, value| Witness::Hypothesis {
        rows,
        cols,
        value,
    })
    .or_else(|| minor_witness(&c.a, |rows, cols, value| Witness::Matrix { rows, cols, value }))
    .or_else(|| {
        minor_witness(&c.rev, |rows, cols, value| Witness::Reversal {
            rows,
            cols,
            value,
        })
    })
    .or(c.first_non_real_rooted.map(|row| Witness::Roots { row }));
    Ok(ThmMainReport {
        triangle: a.name().to_string(),
        order: m,
        minor_cap: minor_cap.min(m + 1),
        hypothesis_tp: hyp.is_tp(),
        a_tp: c.a.is_tp(),
        rev_tp: c.rev.is_tp(),
        rows_real_rooted: c.first_non_real_rooted.is_none(),
        hypothesis_failed: !hyp.is_tp(),
        witness,
    })
}

/// Theorem check with `Q(A)_m` computed from `A`.
pub fn verify_thm_main(a: &TriMatrix, m: usize, minor_cap: usize) -> Result<ThmMainReport> {
    verify_thm_main_given(&left_production(a, m)?, a, m, minor_cap)
}

/// A cell where the two sides of the Toeplitz identity differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToeplitzMismatch {
    pub n: usize,
    pub r: usize,
    pub row: usize,
    pub col: usize,
    #[serde(with = "serde_scalar")]
    pub expected: Scalar,
    #[serde(with = "serde_scalar")]
    pub found: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThmTReport {
    pub triangle: String,
    pub n_max: usize,
    pub r_max: usize,
    pub pass: bool,
    pub cases_checked: usize,
    pub mismatch: Option<ToeplitzMismatch>,
}

impl ThmTReport {
    pub fn status(&self) -> Status {
        if self.pass {
            Status::Verified
        } else {
            Status::Counterexample
        }
    }
}

fn first_difference(n: usize, r: usize, lhs: &FiniteMatrix, rhs: &FiniteMatrix) -> Option<ToeplitzMismatch> {
    (0..lhs.rows()).find_map(|i| {
        (0..lhs.cols()).find_map(|j| {
            (lhs.get(i, j) != rhs.get(i, j)).then(|| ToeplitzMismatch {
                n,
                r,
                row: i,
                col: j,
                expected: lhs.get(i, j).clone(),
                found: rhs.get(i, j).clone(),
            })
        })
    })
}

/// Checks `T_r(alpha_n)^T = M_{n,r}[n..=n+r | 0..=r]` for all `n <= n_max`,
/// `r <= r_max`, where `alpha_n` is row `n` of `A`.
pub fn verify_thm_t(a: &TriMatrix, n_max: usize, r_max: usize) -> Result<ThmTReport> {
    let q = left_production(a, n_max)?;
    let rows = a.rows(n_max + 1)?;
    let grid: Vec<(usize, usize)> = (0..=n_max)
        .flat_map(|n| (0..=r_max).map(move |r| (n, r)))
        .collect();
    let outcomes: Vec<Result<Option<ToeplitzMismatch>>> = grid
        .par_iter()
        .map(|&(n, r)| {
            let lhs = toeplitz(&crate::trimat::RowSequence::new(rows[n].clone()), r).transpose();
            let m = build_mnr_finite(&q, n, r)?;
            let rows_sel: Vec<usize> = (n..=n + r).collect();
            let cols_sel: Vec<usize> = (0..=r).collect();
            Ok(first_difference(n, r, &lhs, &m.select(&rows_sel, &cols_sel)))
        })
        .collect();
    let mut mismatch = None;
    for outcome in outcomes {
        if let Some(found) = outcome? {
            mismatch = Some(found);
            break;
        }
    }
    Ok(ThmTReport {
        triangle: a.name().to_string(),
        n_max,
        r_max,
        pass: mismatch.is_none(),
        cases_checked: grid.len(),
        mismatch,
    })
}

/// `Q_r` equals the leading block of `Q_{r+1}`.
pub fn production_is_coherent(a: &TriMatrix, r: usize) -> Result<bool> {
    let small = left_production(a, r)?;
    let big = left_production(a, r + 1)?;
    Ok(big.leading(r + 1) == small)
}

/// Diagonal of a square matrix.
pub fn diagonal(m: &FiniteMatrix) -> Vec<Scalar> {
    (0..m.rows().min(m.cols())).map(|i| m.get(i, i).clone()).collect()
}

/// True when `m` is the all-ones lower-triangular matrix.
pub fn is_all_ones_lower(m: &FiniteMatrix) -> bool {
    (0..m.rows()).all(|i| {
        (0..m.cols()).all(|j| {
            let v = m.get(i, j);
            if j <= i {
                v.is_one()
            } else {
                v.is_zero()
            }
        })
    })
}
