//! Truncated formal power series over exact rationals.
//!
//! A series of order `N` stores the coefficients of `t^0..t^N`. Binary
//! operations on series of different orders truncate to the smaller one.
//! Exponential-type series (like `e^t`) are stored with plain coefficients;
//! factorial reweighting happens only when a Riordan matrix is extracted.

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{factorial, int, serde_scalar, Scalar};

pub const DEFAULT_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PowerSeries {
    order: usize,
    coeffs: Vec<Scalar>,
}

impl PowerSeries {
    /// Pads with zeros or truncates so that exactly `order + 1` terms remain.
    pub fn new(mut coeffs: Vec<Scalar>, order: usize) -> Self {
        coeffs.resize(order + 1, Scalar::zero());
        PowerSeries { order, coeffs }
    }

    pub fn from_ints(coeffs: &[i64], order: usize) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect(), order)
    }

    pub fn zero(order: usize) -> Self {
        Self::new(Vec::new(), order)
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Scalar::one(), order)
    }

    pub fn constant(c: Scalar, order: usize) -> Self {
        Self::new(vec![c], order)
    }

    /// The series `t`.
    pub fn t(order: usize) -> Self {
        Self::new(vec![Scalar::zero(), Scalar::one()], order)
    }

    /// `e^{mt}`, coefficients `m^n / n!`.
    pub fn exp(m: &Scalar, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut power = Scalar::one();
        for n in 0..=order {
            coeffs.push(&power / Scalar::from_integer(factorial(n)));
            power *= m;
        }
        Self::new(coeffs, order)
    }

    /// `(e^{mt} - 1) / m`, with the limit `t` at `m = 0`.
    pub fn expm1(m: &Scalar, order: usize) -> Self {
        if m.is_zero() {
            return Self::t(order);
        }
        let mut coeffs = Self::exp(m, order).coeffs;
        coeffs[0] = Scalar::zero();
        let inv = m.recip();
        Self::new(coeffs.into_iter().map(|c| c * &inv).collect(), order)
    }

    /// `1 / (1 - t)`.
    pub fn geom(order: usize) -> Self {
        Self::new(vec![Scalar::one(); order + 1], order)
    }

    /// `t / (1 - t)`.
    pub fn lah_f(order: usize) -> Self {
        let mut coeffs = vec![Scalar::one(); order + 1];
        coeffs[0] = Scalar::zero();
        Self::new(coeffs, order)
    }

    /// `log(1 + t)`.
    pub fn log1p(order: usize) -> Self {
        let coeffs = (0..=order)
            .map(|n| {
                if n == 0 {
                    Scalar::zero()
                } else {
                    let sign = if n % 2 == 1 { 1 } else { -1 };
                    Scalar::new(sign.into(), n.into())
                }
            })
            .collect();
        Self::new(coeffs, order)
    }

    /// Named constructor used by the command line: `exp`, `expm1`, `geom`,
    /// `lah_f`, `log1p`, `t`, `one`.
    pub fn named(name: &str, order: usize) -> Result<Self> {
        Ok(match name {
            "exp" => Self::exp(&Scalar::one(), order),
            "expm1" => Self::expm1(&Scalar::one(), order),
            "geom" => Self::geom(order),
            "lah_f" => Self::lah_f(order),
            "log1p" => Self::log1p(order),
            "t" => Self::t(order),
            "one" => Self::one(order),
            other => return Err(Error::Parse(format!("unknown series `{other}`"))),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// `[t^n]`, zero beyond the truncation order.
    pub fn coeff(&self, n: usize) -> Scalar {
        self.coeffs.get(n).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(self.coeffs.clone(), order.min(self.order))
    }

    /// Coefficientwise equality through the smaller of the two orders.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let n = self.order.min(other.order);
        self.coeffs[..=n] == other.coeffs[..=n]
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order.min(other.order);
        Self::new((0..=n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect(), n)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect(), self.order)
    }

    pub fn mul(&self, other: &Self) -> Self {
        ps_mul(self, other)
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::one(self.order), |acc, _| acc.mul(self))
    }
}

/// Cauchy product truncated to the smaller order.
pub fn ps_mul(a: &PowerSeries, b: &PowerSeries) -> PowerSeries {
    let n = a.order.min(b.order);
    let mut out = vec![Scalar::zero(); n + 1];
    for (i, x) in a.coeffs.iter().take(n + 1).enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs.iter().take(n + 1 - i).enumerate() {
            out[i + j] += x * y;
        }
    }
    PowerSeries::new(out, n)
}

/// Multiplicative inverse.
pub fn ps_inv_mul(a: &PowerSeries) -> Result<PowerSeries> {
    let a0 = &a.coeffs[0];
    if a0.is_zero() {
        return Err(Error::NotInvertible);
    }
    let inv0 = a0.recip();
    let mut out: Vec<Scalar> = Vec::with_capacity(a.order + 1);
    out.push(inv0.clone());
    for n in 1..=a.order {
        let s: Scalar = (1..=n).map(|k| &a.coeffs[k] * &out[n - k]).sum();
        out.push(-s * &inv0);
    }
    Ok(PowerSeries::new(out, a.order))
}

/// `a(b(t))` by Horner's rule over powers of `b`.
pub fn ps_compose(a: &PowerSeries, b: &PowerSeries) -> Result<PowerSeries> {
    if !b.coeffs[0].is_zero() {
        return Err(Error::CompositionRequiresZeroConstant);
    }
    let n = a.order.min(b.order);
    let b = b.truncate(n);
    let mut acc = PowerSeries::constant(a.coeffs[n].clone(), n);
    for i in (0..n).rev() {
        acc = ps_mul(&acc, &b);
        acc.coeffs[0] += &a.coeffs[i];
    }
    Ok(acc)
}

/// Compositional inverse `g` with `f(g(t)) = t`, solved one coefficient at a
/// time: `g_n = -[t^n] f(g_{<n}) / f_1`.
pub fn ps_comp_inverse(f: &PowerSeries) -> Result<PowerSeries> {
    let order = f.order;
    if !f.coeffs[0].is_zero() || order == 0 || f.coeffs[1].is_zero() {
        return Err(Error::NotCompositionallyInvertible);
    }
    let f1_inv = f.coeffs[1].recip();
    let mut g = PowerSeries::new(vec![Scalar::zero(), f1_inv.clone()], order);
    for n in 2..=order {
        let partial = ps_compose(&f.truncate(n), &g.truncate(n))?;
        g.coeffs[n] = -partial.coeffs[n].clone() * &f1_inv;
    }
    Ok(g)
}

/// Termwise derivative; the order drops by one (saturating at zero).
pub fn ps_derive(f: &PowerSeries) -> PowerSeries {
    let order = f.order.saturating_sub(1);
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * int(i as i64))
        .collect();
    PowerSeries::new(coeffs, order)
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    order: usize,
    #[serde(with = "serde_scalar::vec")]
    coeffs: Vec<Scalar>,
}

impl Serialize for PowerSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson {
            order: self.order,
            coeffs: self.coeffs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PowerSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SeriesJson::deserialize(d)?;
        if raw.coeffs.len() > raw.order + 1 {
            return Err(serde::de::Error::custom(format!(
                "{} coefficients exceed order {}",
                raw.coeffs.len(),
                raw.order
            )));
        }
        Ok(PowerSeries::new(raw.coeffs, raw.order))
    }
}
