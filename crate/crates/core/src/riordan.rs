//! Ordinary and exponential Riordan arrays, iteration matrices (partial Bell
//! polynomials), the multiplier-sequence bridge and Whitney matrices.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{factorial, int, Scalar};
use crate::production::{self, ThmMainReport};
use crate::series::{ps_comp_inverse, ps_compose, ps_derive, ps_inv_mul, ps_mul, PowerSeries};
use crate::trimat::{finmul, is_tp_to_order, toeplitz, FiniteMatrix, RowSequence, TriMatrix};

fn check_pair(first: &PowerSeries, second: &PowerSeries) -> Result<()> {
    if first.coeff(0).is_zero() {
        return Err(Error::NotAdmissible("first series has zero constant term".into()));
    }
    if !second.coeff(0).is_zero() {
        return Err(Error::NotAdmissible(
            "second series has nonzero constant term".into(),
        ));
    }
    if second.coeff(1).is_zero() {
        return Err(Error::NotAdmissible("second series has zero linear term".into()));
    }
    Ok(())
}

/// Columns `c_k = first * second^k` for `k < rows`, returned as rows.
fn column_rows(first: &PowerSeries, second: &PowerSeries, rows: usize) -> Vec<Vec<Scalar>> {
    let mut out: Vec<Vec<Scalar>> = (0..rows).map(|n| vec![Scalar::zero(); n + 1]).collect();
    let mut column = first.clone();
    for k in 0..rows {
        for (n, row) in out.iter_mut().enumerate().skip(k) {
            row[k] = column.coeff(n);
        }
        column = ps_mul(&column, second);
    }
    out
}

fn check_rows(order: usize, rows: usize) -> Result<()> {
    if rows > order + 1 {
        return Err(Error::TruncationTooSmall { order, rows });
    }
    Ok(())
}

/// `R(d, h)`: entry `(n, k)` is `[t^n] d h^k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinaryRiordan {
    pub d: PowerSeries,
    pub h: PowerSeries,
}

impl OrdinaryRiordan {
    pub fn new(d: PowerSeries, h: PowerSeries) -> Result<Self> {
        check_pair(&d, &h)?;
        Ok(OrdinaryRiordan { d, h })
    }

    pub fn order(&self) -> usize {
        self.d.order().min(self.h.order())
    }

    /// Rows `0..rows`; requires `rows <= order + 1`.
    pub fn to_matrix(&self, rows: usize) -> Result<TriMatrix> {
        check_rows(self.order(), rows)?;
        Ok(TriMatrix::from_rows(
            "ordinary_riordan",
            column_rows(&self.d, &self.h, rows),
        ))
    }

    pub fn to_finite(&self, rows: usize) -> Result<FiniteMatrix> {
        check_rows(self.order(), rows)?;
        Ok(FiniteMatrix::from_lower_rows(&column_rows(
            &self.d, &self.h, rows,
        )))
    }
}

/// `R[g, f]`: entry `(n, k)` is `(n!/k!) [t^n] g f^k`. Series hold plain
/// coefficients of `t^n`; the factorials enter only here.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentialRiordan {
    pub g: PowerSeries,
    pub f: PowerSeries,
}

impl ExponentialRiordan {
    pub fn new(g: PowerSeries, f: PowerSeries) -> Result<Self> {
        check_pair(&g, &f)?;
        Ok(ExponentialRiordan { g, f })
    }

    pub fn identity(order: usize) -> Self {
        ExponentialRiordan {
            g: PowerSeries::one(order),
            f: PowerSeries::t(order),
        }
    }

    pub fn order(&self) -> usize {
        self.g.order().min(self.f.order())
    }

    fn rows_exact(&self, rows: usize) -> Vec<Vec<Scalar>> {
        let mut out = column_rows(&self.g, &self.f, rows);
        for (n, row) in out.iter_mut().enumerate() {
            let nf = factorial(n);
            for (k, v) in row.iter_mut().enumerate() {
                *v = &*v * Scalar::from_integer(&nf / factorial(k));
            }
        }
        out
    }

    pub fn to_matrix(&self, rows: usize) -> Result<TriMatrix> {
        check_rows(self.order(), rows)?;
        Ok(TriMatrix::from_rows("exponential_riordan", self.rows_exact(rows)))
    }

    pub fn to_finite(&self, rows: usize) -> Result<FiniteMatrix> {
        check_rows(self.order(), rows)?;
        Ok(FiniteMatrix::from_lower_rows(&self.rows_exact(rows)))
    }
}

/// `R[g1, f1] R[g2, f2] = R[g1 (g2 o f1), f2 o f1]`.
pub fn riordan_mul(a: &ExponentialRiordan, b: &ExponentialRiordan) -> Result<ExponentialRiordan> {
    let g = ps_mul(&a.g, &ps_compose(&b.g, &a.f)?);
    let f = ps_compose(&b.f, &a.f)?;
    Ok(ExponentialRiordan { g, f })
}

/// `R[g, f]^{-1} = R[1 / (g o fbar), fbar]`.
pub fn riordan_inverse(a: &ExponentialRiordan) -> Result<ExponentialRiordan> {
    let fbar = ps_comp_inverse(&a.f)?;
    let g = ps_inv_mul(&ps_compose(&a.g, &fbar)?)?;
    Ok(ExponentialRiordan { g, f: fbar })
}

/// `R[f', f]`.
pub fn derivative_subgroup_member(f: &PowerSeries) -> Result<ExponentialRiordan> {
    if !f.coeff(0).is_zero() || f.coeff(1).is_zero() {
        return Err(Error::NotAdmissible("need f(0) = 0 and f'(0) != 0".into()));
    }
    Ok(ExponentialRiordan {
        g: ps_derive(f),
        f: f.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EraReport {
    pub order: usize,
    /// Toeplitz matrix of the coefficients of `f'` is TP through the order.
    pub derivative_pf: bool,
    /// `R[f', f] = R[f', t] diag(1, R[f', f])` through the order.
    pub production_identity: bool,
    pub theorem: ThmMainReport,
}

impl EraReport {
    pub fn pass(&self) -> bool {
        self.derivative_pf
            && self.production_identity
            && self.theorem.status() == production::Status::Verified
    }
}

/// Derivative-subgroup check: if `f'` is PF then `R[f', f]` and its reversal
/// are TP, via the left production matrix `R[f', t]`.
pub fn verify_thm_era(f: &PowerSeries, m: usize, minor_cap: usize) -> Result<EraReport> {
    let member = derivative_subgroup_member(f)?;
    let rows = m + 1;
    let fp = &member.g;
    let derivative_pf = is_tp_to_order(
        &toeplitz(
            &RowSequence::new(fp.coeffs()[..fp.order().min(m) + 1].to_vec()),
            m,
        ),
        minor_cap,
    )
    .is_tp();
    let r = member.to_finite(rows)?;
    let q = ExponentialRiordan {
        g: fp.clone(),
        f: PowerSeries::t(fp.order()),
    }
    .to_finite(rows)?;
    let shifted = FiniteMatrix::block_diag(&[&FiniteMatrix::identity(1), &r.leading(m)]);
    let production_identity = finmul(&q, &shifted)? == r;
    let a = member.to_matrix(rows)?.renamed("derivative_subgroup");
    let theorem = production::verify_thm_main_given(&q, &a, m, minor_cap)?;
    Ok(EraReport {
        order: m,
        derivative_pf,
        production_identity,
        theorem,
    })
}

/// Iteration matrix `R[1, f]` with `f = sum_{m>=1} x_m t^m / m!`; entry
/// `(n, k)` is the partial Bell polynomial `B_{n,k}(x_1, x_2, ...)`.
/// `x[0]` holds `x_1`.
pub fn iteration_matrix(x: &[Scalar], rows: usize) -> Result<TriMatrix> {
    let needed = rows.saturating_sub(1);
    if x.len() < needed {
        return Err(Error::InsufficientSequence {
            needed,
            have: x.len(),
        });
    }
    let order = needed;
    let mut coeffs = vec![Scalar::zero(); order + 1];
    for m in 1..=order {
        coeffs[m] = &x[m - 1] / Scalar::from_integer(factorial(m));
    }
    let r = ExponentialRiordan {
        g: PowerSeries::one(order),
        f: PowerSeries::new(coeffs, order),
    };
    Ok(TriMatrix::from_rows("iteration", r.rows_exact(rows)))
}

/// `(gamma_k / k!)`.
pub fn multiplier_to_pf(gamma: &[Scalar]) -> Result<RowSequence> {
    if let Some(k) = gamma.iter().position(Signed::is_negative) {
        return Err(Error::NegativeEntry(k));
    }
    Ok(RowSequence::new(
        gamma
            .iter()
            .enumerate()
            .map(|(k, g)| g / Scalar::from_integer(factorial(k)))
            .collect(),
    ))
}

/// `(gamma_{k+1})`.
pub fn multiplier_shift(gamma: &[Scalar]) -> Vec<Scalar> {
    gamma.iter().skip(1).cloned().collect()
}

/// `W_{m,r}` by its recurrence
/// `W(n,k) = W(n-1,k-1) + (r + m k) W(n-1,k)`, `W(0,k) = [k = 0]`.
pub fn whitney_matrix(m: i64, r: i64) -> TriMatrix {
    TriMatrix::new(format!("whitney({m},{r})"), move |n, prev| {
        if n == 0 {
            return Ok(vec![Scalar::one()]);
        }
        let last = &prev[n - 1];
        Ok((0..=n)
            .map(|k| {
                let diag = if k >= 1 {
                    last[k - 1].clone()
                } else {
                    Scalar::zero()
                };
                let stay = last.get(k).cloned().unwrap_or_else(Scalar::zero);
                diag + stay * int(r + m * k as i64)
            })
            .collect())
    })
}

/// `W_{m,r}` as `R[e^{rt}, (e^{mt} - 1)/m]`, with `f = t` at `m = 0`.
pub fn whitney_riordan(m: i64, r: i64, rows: usize) -> Result<TriMatrix> {
    let order = rows.saturating_sub(1);
    let e = ExponentialRiordan::new(
        PowerSeries::exp(&int(r), order),
        PowerSeries::expm1(&int(m), order),
    )?;
    Ok(e.to_matrix(rows)?.renamed(format!("whitney({m},{r})")))
}

/// Leading `(order+1) x (order+1)` block of `R(1/(1-t), t/(1-mt))`, the
/// left production matrix of `W_{m,1}`.
pub fn whitney_left_production(m: i64, order: usize) -> FiniteMatrix {
    whitney_left_production_r(m, 1, order)
}

/// Leading block of `R(1/(1-rt), t/(1-mt))`, the left production matrix of
/// `W_{m,r}` for every `r`. Column 0 must equal the first column `(r^n)` of
/// `W_{m,r}` itself, which is why the `d` series depends on `r`.
pub fn whitney_left_production_r(m: i64, r: i64, order: usize) -> FiniteMatrix {
    let h: Vec<Scalar> = (0..=order)
        .map(|n| {
            if n == 0 {
                Scalar::zero()
            } else {
                int(m).pow((n - 1) as i32)
            }
        })
        .collect();
    let d: Vec<Scalar> = (0..=order).map(|n| int(r).pow(n as i32)).collect();
    OrdinaryRiordan {
        d: PowerSeries::new(d, order),
        h: PowerSeries::new(h, order),
    }
    .to_finite(order + 1)
    .expect("rows match the order")
}

/// `Q_{0,k} = [k = 0]`, `Q_{n,0} = r Q_{n-1,0}`,
/// `Q_{n,k} = Q_{n-1,k-1} + m Q_{n-1,k}`.
pub fn satisfies_whitney_q_recurrence(q: &FiniteMatrix, m: i64, r: i64) -> bool {
    if q.rows() == 0 {
        return true;
    }
    if !q.get(0, 0).is_one() || (1..q.cols()).any(|k| !q.get(0, k).is_zero()) {
        return false;
    }
    let (mm, rr) = (int(m), int(r));
    (1..q.rows()).all(|n| {
        (0..q.cols()).all(|k| {
            let expected = if k == 0 {
                &rr * q.get(n - 1, 0)
            } else {
                q.get(n - 1, k - 1) + &mm * q.get(n - 1, k)
            };
            q.get(n, k) == &expected
        })
    })
}

/// Factorials `(0!, 1!, 2!, ...)`, length `len`.
pub fn factorials(len: usize) -> Vec<Scalar> {
    (0..len).map(|k| Scalar::from_integer(factorial(k))).collect()
}

/// `(1, 2, 3, ...)`, length `len`.
pub fn naturals_from_one(len: usize) -> Vec<Scalar> {
    (1..=len).map(|k| Scalar::from_integer(BigInt::from(k))).collect()
}
