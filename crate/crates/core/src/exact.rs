//! Exact rational scalars, dense univariate polynomials and a Sturm-chain
//! decision procedure for real-rootedness.
//!
//! Every number in the crate is a [`Scalar`]: an arbitrary-precision rational
//! kept in lowest terms with a positive denominator. Nothing here ever rounds.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision rational number; all matrix, series and weight entries.
pub type Scalar = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("the zero polynomial has no finite root count")]
    ZeroPolynomial,
    #[error("cannot parse `{0}` as an exact rational")]
    BadScalar(String),
}

/// Integer literal as a scalar.
pub fn int(v: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> Scalar {
    Scalar::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p"`, `"-p"` or `"p/q"`. Decimal points are rejected.
pub fn parse_scalar(text: &str) -> Result<Scalar, ExactError> {
    let bad = || ExactError::BadScalar(text.to_string());
    let trimmed = text.trim();
    let (num, den) = match trimmed.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (trimmed, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Scalar::new(num, den))
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn format_scalar(x: &Scalar) -> String {
    x.to_string()
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Serde adapters that write scalars as exact rational strings.
pub mod serde_scalar {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_scalar(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let text = ScalarText::deserialize(d)?;
        text.into_scalar().map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(xs: &[Scalar], s: S) -> Result<S::Ok, S::Error> {
            let texts: Vec<String> = xs.iter().map(format_scalar).collect();
            texts.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Scalar>, D::Error> {
            let texts = Vec::<ScalarText>::deserialize(d)?;
            texts
                .into_iter()
                .map(|t| t.into_scalar().map_err(serde::de::Error::custom))
                .collect()
        }
    }

    pub mod grid {
        use super::*;

        pub fn serialize<S: Serializer>(rows: &[Vec<Scalar>], s: S) -> Result<S::Ok, S::Error> {
            let texts: Vec<Vec<String>> = rows
                .iter()
                .map(|r| r.iter().map(format_scalar).collect())
                .collect();
            texts.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Scalar>>, D::Error> {
            let rows = Vec::<Vec<ScalarText>>::deserialize(d)?;
            rows.into_iter()
                .map(|r| {
                    r.into_iter()
                        .map(|t| t.into_scalar().map_err(serde::de::Error::custom))
                        .collect()
                })
                .collect()
        }
    }

    /// Accepts either a rational string or a bare JSON integer.
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum ScalarText {
        Text(String),
        Int(i64),
    }

    impl ScalarText {
        fn into_scalar(self) -> Result<Scalar, ExactError> {
            match self {
                ScalarText::Text(t) => parse_scalar(&t),
                ScalarText::Int(v) => Ok(int(v)),
            }
        }
    }
}

/// Dense polynomial over the rationals; `coeffs[i]` multiplies `x^i`.
///
/// Normalized: either empty (the zero polynomial) or with a nonzero leading
/// coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::new(vec![c])
    }

    /// `x - root`
    pub fn linear_root(root: Scalar) -> Self {
        Poly::new(vec![-root, Scalar::one()])
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(Scalar::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = Scalar::zero();
        Poly::new(
            (0..len)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        Poly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let lead = divisor.leading().expect("division by the zero polynomial");
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Scalar::zero(); rem.len() - dd];
        for shift in (0..quot.len()).rev() {
            let c = &rem[shift + dd] / lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[shift + j] -= &c * d;
                }
            }
            quot[shift] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(lead) => {
                let inv = lead.recip();
                self.scale(&inv)
            }
        }
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`: same roots, each simple.
    pub fn square_free_part(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }

    /// Yun's decomposition: returns `(f_1, f_2, ...)` with `p = c * prod f_i^i`,
    /// each `f_i` monic and square-free. Trailing constant factors are dropped.
    pub fn square_free_decomposition(&self) -> Vec<Poly> {
        let mut factors = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return factors;
        }
        let d = self.derivative();
        let a0 = self.gcd(&d);
        let mut b = self.div_rem(&a0).0;
        let mut c = d.div_rem(&a0).0;
        let mut dd = c.sub(&b.derivative());
        while b.degree().unwrap_or(0) > 0 {
            let a = b.gcd(&dd);
            factors.push(a.clone());
            b = b.div_rem(&a).0;
            c = dd.div_rem(&a).0;
            dd = c.sub(&b.derivative());
        }
        while factors.last().is_some_and(|f| f.degree() == Some(0)) {
            factors.pop();
        }
        factors
    }

    /// Standard Sturm chain `p, p', -rem(p, p'), ...`.
    pub fn sturm_chain(&self) -> Vec<Poly> {
        let mut chain = vec![self.clone()];
        let d = self.derivative();
        if d.is_zero() {
            return chain;
        }
        chain.push(d);
        loop {
            let n = chain.len();
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.neg());
        }
        chain
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde_scalar::vec::serialize(&self.coeffs, s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        serde_scalar::vec::deserialize(d).map(Poly::new)
    }
}

/// Interval endpoint for root counting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    NegInfinity,
    Finite(Scalar),
    PosInfinity,
}

/// Real roots of a polynomial inside `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootCount {
    pub distinct: usize,
    pub with_multiplicity: usize,
}

fn sign_at(p: &Poly, at: &Endpoint) -> i8 {
    let sign_of = |x: &Scalar| {
        if x.is_positive() {
            1
        } else if x.is_negative() {
            -1
        } else {
            0
        }
    };
    match at {
        Endpoint::Finite(x) => sign_of(&p.eval(x)),
        Endpoint::PosInfinity => p.leading().map_or(0, sign_of),
        Endpoint::NegInfinity => match (p.leading(), p.degree()) {
            (Some(l), Some(d)) => {
                let s = sign_of(l);
                if d % 2 == 1 {
                    -s
                } else {
                    s
                }
            }
            _ => 0,
        },
    }
}

fn sign_variations(chain: &[Poly], at: &Endpoint) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in chain {
        let s = sign_at(p, at);
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn distinct_in(square_free: &Poly, lo: &Endpoint, hi: &Endpoint) -> usize {
    let chain = square_free.sturm_chain();
    let vlo = sign_variations(&chain, lo);
    let vhi = sign_variations(&chain, hi);
    vlo.saturating_sub(vhi)
}

/// Counts the real roots of `p` in the half-open interval `(lo, hi]`.
///
/// The Sturm chain is built on the square-free part, so `distinct` is exact;
/// `with_multiplicity` comes from the square-free decomposition.
pub fn sturm_real_root_count(p: &Poly, lo: &Endpoint, hi: &Endpoint) -> Result<RootCount, ExactError> {
    if p.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    if p.degree() == Some(0) {
        return Ok(RootCount {
            distinct: 0,
            with_multiplicity: 0,
        });
    }
    let distinct = distinct_in(&p.square_free_part(), lo, hi);
    let with_multiplicity = p
        .square_free_decomposition()
        .iter()
        .enumerate()
        .map(|(i, f)| (i + 1) * distinct_in(f, lo, hi))
        .sum();
    Ok(RootCount {
        distinct,
        with_multiplicity,
    })
}

/// True when `p` is constant (the zero polynomial included) or has only real
/// zeros, counted with multiplicity.
pub fn is_real_rooted(p: &Poly) -> bool {
    match p.degree() {
        None | Some(0) => true,
        Some(_) => {
            let sf = p.square_free_part();
            let deg = sf.degree().unwrap_or(0);
            distinct_in(&sf, &Endpoint::NegInfinity, &Endpoint::PosInfinity) == deg
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(p: &Poly) -> RootCount {
        sturm_real_root_count(p, &Endpoint::NegInfinity, &Endpoint::PosInfinity).unwrap()
    }

    #[test]
    fn horner_examples() {
        let p = Poly::from_ints(&[1, 3, 1]);
        assert_eq!(p.eval(&int(0)), int(1));
        assert_eq!(p.eval(&int(-1)), int(-1));
        assert_eq!(Poly::zero().eval(&int(5)), int(0));
    }

    #[test]
    fn normalization_strips_trailing_zeros() {
        let p = Poly::from_ints(&[1, 2, 0, 0]);
        assert_eq!(p.degree(), Some(1));
        assert!(Poly::from_ints(&[0, 0]).is_zero());
    }

    #[test]
    fn sturm_examples() {
        assert_eq!(full(&Poly::from_ints(&[-1, 0, 1])).distinct, 2);
        assert_eq!(full(&Poly::from_ints(&[1, 0, 1])).distinct, 0);
        assert_eq!(full(&Poly::from_ints(&[0, 1, 3, 1])).distinct, 3);
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        assert_eq!(
            sturm_real_root_count(&Poly::zero(), &Endpoint::NegInfinity, &Endpoint::PosInfinity),
            Err(ExactError::ZeroPolynomial)
        );
    }

    #[test]
    fn half_open_interval_convention() {
        // roots at -1 and 1
        let p = Poly::from_ints(&[-1, 0, 1]);
        let count = |lo: i64, hi: i64| {
            sturm_real_root_count(&p, &Endpoint::Finite(int(lo)), &Endpoint::Finite(int(hi)))
                .unwrap()
                .distinct
        };
        assert_eq!(count(-1, 1), 1);
        assert_eq!(count(-2, 1), 2);
        assert_eq!(count(-2, 0), 1);
        assert_eq!(count(1, 3), 0);
    }

    #[test]
    fn multiplicity_bookkeeping() {
        // (x+1)^3 (x-2) (x^2+1)
        let p = Poly::from_ints(&[1, 1])
            .mul(&Poly::from_ints(&[1, 1]))
            .mul(&Poly::from_ints(&[1, 1]))
            .mul(&Poly::from_ints(&[-2, 1]))
            .mul(&Poly::from_ints(&[1, 0, 1]));
        let c = full(&p);
        assert_eq!(c.distinct, 2);
        assert_eq!(c.with_multiplicity, 4);
        assert!(!is_real_rooted(&p));
    }

    #[test]
    fn real_rooted_examples() {
        assert!(is_real_rooted(&Poly::from_ints(&[7])));
        assert!(is_real_rooted(&Poly::from_ints(&[1, 2, 1])));
        assert!(!is_real_rooted(&Poly::from_ints(&[1, 1, 1])));
        assert!(is_real_rooted(&Poly::zero()));
    }

    #[test]
    fn square_free_decomposition_reassembles() {
        let p = Poly::from_ints(&[0, 0, 1])
            .mul(&Poly::from_ints(&[3, 1]))
            .mul(&Poly::from_ints(&[3, 1]))
            .mul(&Poly::from_ints(&[3, 1]));
        let parts = p.square_free_decomposition();
        let mut rebuilt = Poly::constant(int(1));
        for (i, f) in parts.iter().enumerate() {
            for _ in 0..=i {
                rebuilt = rebuilt.mul(f);
            }
        }
        assert_eq!(rebuilt.monic(), p.monic());
    }

    #[test]
    fn scalar_text_round_trip() {
        for s in ["0", "-3", "7/2", "-1/6"] {
            assert_eq!(format_scalar(&parse_scalar(s).unwrap()), s);
        }
        assert_eq!(parse_scalar("4/8").unwrap(), ratio(1, 2));
        assert!(parse_scalar("0.5").is_err());
        assert!(parse_scalar("1/0").is_err());
    }
}
