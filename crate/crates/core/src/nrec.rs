//! n-recursive triangles `t_{n,k} = a_n t_{n-1,k-1} + b_n t_{n-1,k} + c_n t_{n-2,k-1}`
//! and their closed-form left production matrices.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::exact::{int, serde_scalar, Scalar};
use crate::production::{left_production, reconstruct_finite};
use crate::trimat::{finmul, leading_principal, reversal, FiniteMatrix, TriMatrix};

pub use crate::network::nrec_network;

/// Coefficient sequences: `a[0]` is `a_1`, `b[0]` is `b_1`, `c[0]` is `c_2`.
/// `c = None` declares an identically zero third term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NRecSpec {
    #[serde(with = "serde_scalar::vec")]
    pub a: Vec<Scalar>,
    #[serde(with = "serde_scalar::vec")]
    pub b: Vec<Scalar>,
    #[serde(serialize_with = "serialize_c", deserialize_with = "deserialize_c")]
    pub c: Option<Vec<Scalar>>,
}

fn serialize_c<S: serde::Serializer>(c: &Option<Vec<Scalar>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match c {
        None => s.serialize_none(),
        Some(v) => serde_scalar::vec::serialize(v, s),
    }
}

fn deserialize_c<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<Scalar>>, D::Error> {
    #[derive(Deserialize)]
    struct Wrapper(#[serde(with = "serde_scalar::vec")] Vec<Scalar>);
    Ok(Option::<Wrapper>::deserialize(d)?.map(|w| w.0))
}

/// Named specs for the six standard n-recursive triangles.
pub const PRESETS: [&str; 6] = [
    "pascal",
    "stirling1",
    "stirling1_B",
    "delannoy",
    "derangement_A",
    "derangement_B",
];

impl NRecSpec {
    /// Builds sequences of length `len` from closed forms in `n >= 1`.
    pub fn from_fns(
        len: usize,
        a: impl Fn(i64) -> i64,
        b: impl Fn(i64) -> i64,
        c: Option<&dyn Fn(i64) -> i64>,
    ) -> Self {
        let seq = |f: &dyn Fn(i64) -> i64, start: i64| -> Vec<Scalar> {
            (0..len as i64).map(|i| int(f(i + start))).collect()
        };
        NRecSpec {
            a: seq(&a, 1),
            b: seq(&b, 1),
            c: c.map(|f| seq(f, 2)),
        }
    }

    /// `pascal`, `stirling1` (unshifted, `c(0,0) = 1`), `stirling1_B`,
    /// `delannoy`, `derangement_A` (`a_n = 0`), `derangement_B`; sequences
    /// long enough for `len` rows.
    pub fn preset(name: &str, len: usize) -> Result<Self> {
        let one = |_: i64| 1;
        Ok(match name {
            "pascal" => Self::from_fns(len, one, one, None),
            "stirling1" => Self::from_fns(len, one, |n| n - 1, None),
            "stirling1_B" => Self::from_fns(len, one, |n| 2 * n - 1, None),
            "delannoy" => Self::from_fns(len, one, one, Some(&one)),
            "derangement_A" => Self::from_fns(len, |_| 0, |n| n - 1, Some(&|n| n - 1)),
            "derangement_B" => Self::from_fns(len, one, |n| 2 * (n - 1), Some(&|n| 2 * (n - 1))),
            other => return Err(Error::UnknownTriangle(other.to_string())),
        })
    }

    /// `a_n`, `n >= 1`.
    pub fn a(&self, n: usize) -> Scalar {
        self.a.get(n - 1).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn b(&self, n: usize) -> Scalar {
        self.b.get(n - 1).cloned().unwrap_or_else(Scalar::zero)
    }

    /// `c_n`, `n >= 2`.
    pub fn c(&self, n: usize) -> Scalar {
        match &self.c {
            None => Scalar::zero(),
            Some(c) => c.get(n - 2).cloned().unwrap_or_else(Scalar::zero),
        }
    }

    /// The dual spec with `a` and `b` interchanged.
    pub fn swapped(&self) -> Self {
        NRecSpec {
            a: self.b.clone(),
            b: self.a.clone(),
            c: self.c.clone(),
        }
    }

    /// Errors unless coefficients through index `max_n` are present.
    pub fn require(&self, max_n: usize) -> Result<()> {
        let short = |have: usize, needed: usize| {
            (have < needed).then_some(Error::InsufficientSequence { needed, have })
        };
        if let Some(e) = short(self.a.len(), max_n).or_else(|| short(self.b.len(), max_n)) {
            return Err(e);
        }
        if let Some(c) = &self.c {
            if let Some(e) = short(c.len(), max_n.saturating_sub(1)) {
                return Err(e);
            }
        }
        Ok(())
    }
}

/// Rows `0..rows` of the triangle.
pub fn nrec_matrix(spec: &NRecSpec, rows: usize) -> Result<TriMatrix> {
    spec.require(rows.saturating_sub(1))?;
    let spec = Arc::new(spec.clone());
    Ok(TriMatrix::new("nrec", move |n, prev| {
        if n == 0 {
            return Ok(vec![Scalar::one()]);
        }
        let (a, b) = (spec.a(n), spec.b(n));
        let c = if n >= 2 { spec.c(n) } else { Scalar::zero() };
        let get = |r: usize, k: usize| prev[r].get(k).cloned().unwrap_or_else(Scalar::zero);
        Ok((0..=n)
            .map(|k| {
                let mut v = &b * get(n - 1, k);
                if k >= 1 {
                    v += &a * get(n - 1, k - 1);
                    if n >= 2 && !c.is_zero() {
                        v += &c * get(n - 2, k - 1);
                    }
                }
                v
            })
            .collect())
    })
    .with_row_limit(rows))
}

/// `L(beta)`: entry `(n, k)` is `b_{k+1} ... b_n` for `n >= k`. Built from
/// explicit products so zero coefficients need no division.
pub fn l_matrix(b: impl Fn(usize) -> Scalar, size: usize) -> FiniteMatrix {
    let mut m = FiniteMatrix::zeros(size, size);
    for k in 0..size {
        let mut p = Scalar::one();
        m.set(k, k, p.clone());
        for n in k + 1..size {
            p *= b(n);
            m.set(n, k, p.clone());
        }
    }
    m
}

/// Lower bidiagonal `D(alpha, gamma)` of order `size`: diagonal `a_1, a_2, ...`
/// and subdiagonal `c_2, c_3, ...`.
pub fn d_matrix(a: impl Fn(usize) -> Scalar, c: impl Fn(usize) -> Scalar, size: usize) -> FiniteMatrix {
    let mut m = FiniteMatrix::zeros(size, size);
    for i in 0..size {
        m.set(i, i, a(i + 1));
        if i + 1 < size {
            m.set(i + 1, i, c(i + 2));
        }
    }
    m
}

fn closed_form(
    b: impl Fn(usize) -> Scalar,
    a: impl Fn(usize) -> Scalar,
    c: impl Fn(usize) -> Scalar,
    order: usize,
) -> Result<FiniteMatrix> {
    let size = order + 1;
    let l = l_matrix(b, size);
    let d = FiniteMatrix::block_diag(&[&FiniteMatrix::identity(1), &d_matrix(a, c, order)]);
    finmul(&l, &d)
}

/// `Q(T)_order = L(beta) diag(1, D(alpha, gamma))`.
pub fn nrec_left_production(spec: &NRecSpec, order: usize) -> Result<FiniteMatrix> {
    spec.require(order)?;
    closed_form(|n| spec.b(n), |n| spec.a(n), |n| spec.c(n), order)
}

/// Production matrix of the reversal: the same formula with `a` and `b`
/// interchanged.
pub fn nrec_reversal_left_production(spec: &NRecSpec, order: usize) -> Result<FiniteMatrix> {
    nrec_left_production(&spec.swapped(), order)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop52Report {
    pub order: usize,
    /// `T = L(beta) diag(1, D) diag(1, T)` through the order.
    pub identity_holds: bool,
    /// Closed form equals `A diag(1, A^{-1})`; `None` when a diagonal entry
    /// of `T` vanishes and that product is undefined.
    pub matches_left_production: Option<bool>,
    pub reconstructs_matrix: bool,
    pub reconstructs_reversal: bool,
}

impl Prop52Report {
    pub fn pass(&self) -> bool {
        self.identity_holds
            && self.matches_left_production != Some(false)
            && self.reconstructs_matrix
            && self.reconstructs_reversal
    }
}

pub fn verify_prop52(spec: &NRecSpec, order: usize) -> Result<Prop52Report> {
    let t = nrec_matrix(spec, order + 1)?;
    let t_m = leading_principal(&t, order)?;
    let q = nrec_left_production(spec, order)?;
    let shifted = FiniteMatrix::block_diag(&[&FiniteMatrix::identity(1), &t_m.leading(order)]);
    let identity_holds = finmul(&q, &shifted)? == t_m;
    let diag_nonzero = (0..order).all(|i| !t_m.get(i, i).is_zero());
    let matches_left_production = if diag_nonzero {
        Some(left_production(&t, order)? == q)
    } else {
        None
    };
    let reconstructs_matrix = reconstruct_finite(&q, order)? == t_m;
    let rev = leading_principal(&reversal(&t), order)?;
    let reconstructs_reversal =
        reconstruct_finite(&nrec_reversal_left_production(spec, order)?, order)? == rev;
    Ok(Prop52Report {
        order,
        identity_holds,
        matches_left_production,
        reconstructs_matrix,
        reconstructs_reversal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::production::is_all_ones_lower;
    use crate::trimat::lower_inverse;

    fn rows_of(spec: &NRecSpec, rows: usize) -> Vec<Vec<Scalar>> {
        nrec_matrix(spec, rows).unwrap().rows(rows).unwrap()
    }

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn preset_rows() {
        let p = |name| NRecSpec::preset(name, 8).unwrap();
        assert_eq!(
            rows_of(&p("pascal"), 4),
            ints(&[&[1], &[1, 1], &[1, 2, 1], &[1, 3, 3, 1]])
        );
        assert_eq!(
            rows_of(&p("stirling1"), 5),
            ints(&[&[1], &[0, 1], &[0, 1, 1], &[0, 2, 3, 1], &[0, 6, 11, 6, 1]])
        );
        assert_eq!(
            rows_of(&p("delannoy"), 4),
            ints(&[&[1], &[1, 1], &[1, 3, 1], &[1, 5, 5, 1]])
        );
        assert_eq!(
            rows_of(&p("stirling1_B"), 4),
            ints(&[&[1], &[1, 1], &[3, 4, 1], &[15, 23, 9, 1]])
        );
        let sums: Vec<Scalar> = rows_of(&p("derangement_A"), 6)
            .iter()
            .map(|r| r.iter().sum())
            .collect();
        assert_eq!(sums, [1, 0, 1, 2, 9, 44].map(int));
        assert!(NRecSpec::preset("nope", 3).is_err());
    }

    #[test]
    fn insufficient_sequences() {
        let spec = NRecSpec::preset("pascal", 3).unwrap();
        assert!(nrec_matrix(&spec, 4).is_ok());
        assert_eq!(
            nrec_matrix(&spec, 5).unwrap_err(),
            Error::InsufficientSequence { needed: 4, have: 3 }
        );
    }

    #[test]
    fn closed_form_examples() {
        let pascal = NRecSpec::preset("pascal", 6).unwrap();
        assert!(is_all_ones_lower(&nrec_left_production(&pascal, 6).unwrap()));
        assert!(is_all_ones_lower(
            &nrec_reversal_left_production(&pascal, 6).unwrap()
        ));
        let sym = NRecSpec::preset("delannoy", 6).unwrap();
        assert_eq!(
            nrec_left_production(&sym, 5).unwrap(),
            nrec_reversal_left_production(&sym, 5).unwrap()
        );
    }

    #[test]
    fn nrec_identity_on_presets() {
        for name in PRESETS {
            let spec = NRecSpec::preset(name, 8).unwrap();
            let rep = verify_prop52(&spec, 7).unwrap();
            assert!(rep.pass(), "{name}: {rep:?}");
            assert_eq!(rep.matches_left_production.is_none(), name == "derangement_A");
        }
    }

    #[test]
    fn zero_b_is_well_defined() {
        let spec = NRecSpec {
            a: [2, 1, 3, 1].map(int).to_vec(),
            b: [1, 0, 2, 5].map(int).to_vec(),
            c: Some([1, 4, 0].map(int).to_vec()),
        };
        assert!(verify_prop52(&spec, 4).unwrap().pass());
    }

    #[test]
    fn l_inverse_is_signed_bidiagonal() {
        let b = |n: usize| int(n as i64 + 2);
        let inv = lower_inverse(&l_matrix(b, 5)).unwrap();
        let expected = d_matrix(|_| int(1), |n| -b(n - 1), 5);
        assert_eq!(inv, expected);
    }

    #[test]
    fn spec_json_requires_c() {
        let spec = NRecSpec::preset("delannoy", 2).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"a":["1","1"],"b":["1","1"],"c":["1","1"]}"#);
        assert_eq!(serde_json::from_str::<NRecSpec>(&text).unwrap(), spec);
        let zero: NRecSpec = serde_json::from_str(r#"{"a":["1"],"b":[2],"c":null}"#).unwrap();
        assert_eq!(zero.c, None);
        assert!(serde_json::from_str::<NRecSpec>(r#"{"a":["1"],"b":["1"]}"#).is_err());
    }
}
