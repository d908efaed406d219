//! Registry of named triangles, each with a construction route and bundled
//! reference rows.
//!
//! Triangles whose combinatorial indexing starts at `(1, 1)` (Stirling of
//! both kinds, Lah) are stored shifted to start at `(0, 0)`; the entry
//! records the shift. Parametrized names are `whitney(m,r)` and
//! `bell_iteration(x)`, where `x` is `ones`, `naturals`, `factorials`,
//! `shifted_factorials` or an explicit list such as `1,2,3/2`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{format_scalar, int, parse_scalar, serde_scalar, Scalar};
use crate::nrec::{nrec_left_production, nrec_matrix, NRecSpec};
use crate::riordan::{factorials, iteration_matrix, naturals_from_one, whitney_matrix, ExponentialRiordan};
use crate::series::{PowerSeries, DEFAULT_ORDER};
use crate::trimat::{reversal, FiniteMatrix, TriMatrix};

/// Rows built by finite-route constructors when no count is given.
pub const DEFAULT_ROWS: usize = DEFAULT_ORDER + 1;

/// Plain names; `whitney(m,r)` and `bell_iteration(x)` are accepted too.
pub const NAMES: [&str; 12] = [
    "pascal",
    "stirling1",
    "stirling1_B",
    "stirling2",
    "stirling2_reversed",
    "lah",
    "idempotent",
    "delannoy",
    "derangement_A",
    "derangement_B",
    "eulerian",
    "whitney",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Riordan,
    Nrec,
    Recurrence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleEntry {
    pub name: String,
    pub route: Route,
    pub index_shift: (usize, usize),
    pub notes: String,
    /// Bundled reference rows, when a fixture file exists for this name.
    #[serde(with = "serde_scalar::grid")]
    pub fixture_rows: Vec<Vec<Scalar>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub index_shift: (usize, usize),
    pub notes: String,
    #[serde(with = "serde_scalar::grid")]
    pub rows: Vec<Vec<Scalar>>,
}

const FIXTURES: [(&str, &str); 17] = [
    ("pascal", include_str!("../fixtures/pascal.json")),
    ("stirling1", include_str!("../fixtures/stirling1.json")),
    ("stirling1_B", include_str!("../fixtures/stirling1_B.json")),
    ("stirling2", include_str!("../fixtures/stirling2.json")),
    (
        "stirling2_reversed",
        include_str!("../fixtures/stirling2_reversed.json"),
    ),
    ("lah", include_str!("../fixtures/lah.json")),
    ("idempotent", include_str!("../fixtures/idempotent.json")),
    ("whitney(1,1)", include_str!("../fixtures/whitney_1_1.json")),
    ("whitney(2,1)", include_str!("../fixtures/whitney_2_1.json")),
    ("whitney(2,2)", include_str!("../fixtures/whitney_2_2.json")),
    ("delannoy", include_str!("../fixtures/delannoy.json")),
    ("derangement_A", include_str!("../fixtures/derangement_A.json")),
    ("derangement_B", include_str!("../fixtures/derangement_B.json")),
    ("eulerian", include_str!("../fixtures/eulerian.json")),
    (
        "bell_iteration(ones)",
        include_str!("../fixtures/bell_iteration_ones.json"),
    ),
    (
        "bell_iteration(naturals)",
        include_str!("../fixtures/bell_iteration_naturals.json"),
    ),
    (
        "bell_iteration(factorials)",
        include_str!("../fixtures/bell_iteration_factorials.json"),
    ),
];

/// Names that have a bundled fixture.
pub fn fixture_names() -> Vec<&'static str> {
    FIXTURES.iter().map(|(n, _)| *n).collect()
}

pub fn fixture(name: &str) -> Result<Fixture> {
    let key = canonical(name);
    let (_, text) = FIXTURES
        .iter()
        .find(|(n, _)| *n == key)
        .ok_or_else(|| Error::MissingFixture(name.to_string()))?;
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("fixture {key}: {e}")))
}

fn canonical(name: &str) -> String {
    name.chars().filter(|c| !c.is_whitespace()).collect()
}

enum Parsed {
    Plain(&'static str),
    Whitney(i64, i64),
    Bell(BellSeq),
}

#[derive(Clone)]
enum BellSeq {
    Ones,
    Naturals,
    Factorials,
    ShiftedFactorials,
    Explicit(Vec<Scalar>),
}

impl BellSeq {
    fn take(&self, len: usize) -> Result<Vec<Scalar>> {
        Ok(match self {
            BellSeq::Ones => vec![Scalar::one(); len],
            BellSeq::Naturals => naturals_from_one(len),
            BellSeq::Factorials => factorials(len + 1).split_off(1),
            BellSeq::ShiftedFactorials => factorials(len),
            BellSeq::Explicit(x) => {
                if x.len() < len {
                    return Err(Error::InsufficientSequence {
                        needed: len,
                        have: x.len(),
                    });
                }
                x[..len].to_vec()
            }
        })
    }
}

fn parse_args<'a>(name: &'a str, head: &str) -> Option<&'a str> {
    name.strip_prefix(head)?.strip_prefix('(')?.strip_suffix(')')
}

fn parse_name(name: &str) -> Result<Parsed> {
    let unknown = || Error::UnknownTriangle(name.to_string());
    if let Some(plain) = NAMES.iter().find(|n| **n == name && **n != "whitney") {
        return Ok(Parsed::Plain(plain));
    }
    if let Some(args) = parse_args(name, "whitney") {
        let parts: Vec<&str> = args.split(',').collect();
        let [m, r] = parts[..] else { return Err(unknown()) };
        let m: i64 = m.parse().map_err(|_| unknown())?;
        let r: i64 = r.parse().map_err(|_| unknown())?;
        return Ok(Parsed::Whitney(m, r));
    }
    if let Some(args) = parse_args(name, "bell_iteration") {
        let seq = match args {
            "ones" => BellSeq::Ones,
            "naturals" => BellSeq::Naturals,
            "factorials" => BellSeq::Factorials,
            "shifted_factorials" => BellSeq::ShiftedFactorials,
            list => BellSeq::Explicit(
                list.split(',')
                    .map(parse_scalar)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| unknown())?,
            ),
        };
        return Ok(Parsed::Bell(seq));
    }
    Err(unknown())
}

fn exponential(g: PowerSeries, f: PowerSeries, rows: usize) -> Result<TriMatrix> {
    ExponentialRiordan::new(g, f)?.to_matrix(rows)
}

fn eulerian() -> TriMatrix {
    TriMatrix::new("eulerian", |n, prev| {
        if n == 0 {
            return Ok(vec![Scalar::one()]);
        }
        let last = &prev[n - 1];
        let at = |k: usize| last.get(k).cloned().unwrap_or_else(Scalar::zero);
        Ok((0..=n)
            .map(|k| {
                let left = if k == 0 {
                    Scalar::zero()
                } else {
                    int((n - k + 1) as i64) * at(k - 1)
                };
                left + int(k as i64 + 1) * at(k)
            })
            .collect())
    })
}

fn build(parsed: &Parsed, rows: usize) -> Result<TriMatrix> {
    let order = rows.saturating_sub(1);
    let preset = |name: &str| nrec_matrix(&NRecSpec::preset(name, rows)?, rows);
    match parsed {
        Parsed::Whitney(m, r) => Ok(whitney_matrix(*m, *r)),
        Parsed::Bell(seq) => iteration_matrix(&seq.take(order)?, rows),
        Parsed::Plain(name) => match *name {
            "pascal" | "stirling1_B" | "delannoy" | "derangement_A" | "derangement_B" => preset(name),
            "stirling1" => {
                let f = (0..=order)
                    .map(|n| {
                        if n == 0 {
                            Scalar::zero()
                        } else {
                            Scalar::new(1.into(), n.into())
                        }
                    })
                    .collect();
                exponential(PowerSeries::geom(order), PowerSeries::new(f, order), rows)
            }
            "stirling2" => exponential(
                PowerSeries::exp(&Scalar::one(), order),
                PowerSeries::expm1(&Scalar::one(), order),
                rows,
            ),
            "stirling2_reversed" => Ok(reversal(&build(&Parsed::Plain("stirling2"), rows)?)),
            "lah" => {
                let g = (0..=order).map(|n| int(n as i64 + 1)).collect();
                exponential(PowerSeries::new(g, order), PowerSeries::lah_f(order), rows)
            }
            "idempotent" => iteration_matrix(&naturals_from_one(order), rows),
            "eulerian" => Ok(eulerian()),
            other => Err(Error::UnknownTriangle(other.to_string())),
        },
    }
}

/// The triangle, with finite-route constructions sized for `rows` rows
/// (recurrence routes are unbounded).
pub fn get_triangle_rows(name: &str, rows: usize) -> Result<TriMatrix> {
    let key = canonical(name);
    Ok(build(&parse_name(&key)?, rows.max(1))?.renamed(key))
}

pub fn get_triangle(name: &str) -> Result<TriMatrix> {
    get_triangle_rows(name, DEFAULT_ROWS)
}

pub fn entry(name: &str) -> Result<TriangleEntry> {
    let key = canonical(name);
    let parsed = parse_name(&key)?;
    let (route, shift, notes) = match &parsed {
        Parsed::Whitney(m, r) => (
            Route::Recurrence,
            (0, 0),
            format!("r-Whitney numbers of the second kind, m={m}, r={r}"),
        ),
        Parsed::Bell(_) => (
            Route::Riordan,
            (0, 0),
            "partial Bell polynomials B_{n,k}(x)".to_string(),
        ),
        Parsed::Plain(p) => match *p {
            "pascal" | "stirling1_B" | "delannoy" | "derangement_A" | "derangement_B" => {
                (Route::Nrec, (0, 0), format!("n-recursive preset `{p}`"))
            }
            "stirling1" => (Route::Riordan, (1, 1), "R[1/(1-t), -log(1-t)], c(n+1,k+1)".into()),
            "stirling2" => (Route::Riordan, (1, 1), "R[e^t, e^t-1], S(n+1,k+1)".into()),
            "stirling2_reversed" => (Route::Riordan, (1, 1), "row reversal of S(n+1,k+1)".into()),
            "lah" => (Route::Riordan, (1, 1), "R[1/(1-t)^2, t/(1-t)], L(n+1,k+1)".into()),
            "idempotent" => (
                Route::Riordan,
                (0, 0),
                "B_{n,k}(1,2,3,...) = C(n,k) k^(n-k)".into(),
            ),
            _ => (
                Route::Recurrence,
                (0, 0),
                "A(n,k) = (n-k+1) A(n-1,k-1) + (k+1) A(n-1,k)".into(),
            ),
        },
    };
    let fixture_rows = fixture(&key).map(|f| f.rows).unwrap_or_default();
    Ok(TriangleEntry {
        name: key,
        route,
        index_shift: shift,
        notes,
        fixture_rows,
    })
}

/// Closed-form left production matrix for triangles whose diagonal has
/// zeros, where the usual quotient is undefined.
pub fn production_for(name: &str, order: usize) -> Result<Option<FiniteMatrix>> {
    if canonical(name) == "derangement_A" {
        let spec = NRecSpec::preset("derangement_A", order + 1)?;
        return Ok(Some(nrec_left_production(&spec, order)?));
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellMismatch {
    pub row: usize,
    pub col: usize,
    #[serde(with = "serde_scalar")]
    pub expected: Scalar,
    #[serde(with = "serde_scalar")]
    pub actual: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub name: String,
    pub rows_compared: usize,
    pub pass: bool,
    pub first_mismatch: Option<CellMismatch>,
}

/// Compares the constructor against the bundled fixture on the first
/// `rows` rows (capped at the fixture length), reporting the first
/// differing cell.
pub fn crosscheck(name: &str, rows: usize) -> Result<CrosscheckReport> {
    let fx = fixture(name)?;
    let rows = rows.min(fx.rows.len());
    let built = get_triangle_rows(name, rows)?.rows(rows)?;
    let first_mismatch = fx
        .rows
        .iter()
        .zip(&built)
        .enumerate()
        .find_map(|(n, (want, got))| {
            (0..want.len().max(got.len())).find_map(|k| {
                let zero = Scalar::zero();
                let (e, a) = (want.get(k).unwrap_or(&zero), got.get(k).unwrap_or(&zero));
                (e != a).then(|| CellMismatch {
                    row: n,
                    col: k,
                    expected: e.clone(),
                    actual: a.clone(),
                })
            })
        });
    Ok(CrosscheckReport {
        name: canonical(name),
        rows_compared: rows,
        pass: first_mismatch.is_none(),
        first_mismatch,
    })
}

/// Rows as space-separated `p/q` text, one row per line.
pub fn format_rows(rows: &[Vec<Scalar>]) -> String {
    rows.iter()
        .map(|r| r.iter().map(format_scalar).collect::<Vec<_>>().join(" ") + "\n")
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(rows: &[Vec<Scalar>]) -> Vec<Vec<i64>> {
        rows.iter()
            .map(|r| r.iter().map(|v| v.to_integer().try_into().unwrap()).collect())
            .collect()
    }

    #[test]
    fn displayed_triangles() {
        let e = get_triangle("eulerian").unwrap().rows(5).unwrap();
        assert_eq!(
            ints(&e),
            vec![
                vec![1],
                vec![1, 1],
                vec![1, 4, 1],
                vec![1, 11, 11, 1],
                vec![1, 26, 66, 26, 1]
            ]
        );
        let s = get_triangle("stirling2_reversed").unwrap().rows(5).unwrap();
        assert_eq!(ints(&s)[3], vec![1, 6, 7, 1]);
        assert_eq!(ints(&s)[4], vec![1, 10, 25, 15, 1]);
        let b = get_triangle("stirling1_B").unwrap().rows(4).unwrap();
        assert_eq!(ints(&b)[3], vec![15, 23, 9, 1]);
    }

    #[test]
    fn derangement_row_sums() {
        let rows = get_triangle("derangement_A").unwrap().rows(6).unwrap();
        let sums: Vec<Scalar> = rows.iter().map(|r| r.iter().sum()).collect();
        let expected: Vec<Scalar> = [1, 0, 1, 2, 9, 44].into_iter().map(int).collect();
        assert_eq!(sums, expected);
    }

    #[test]
    fn every_fixture_crosschecks() {
        for name in fixture_names() {
            let report = crosscheck(name, 9).unwrap();
            assert!(report.pass, "{name}: {:?}", report.first_mismatch);
            assert_eq!(report.rows_compared, 9);
        }
    }

    #[test]
    fn lookup_errors() {
        assert!(matches!(get_triangle("catalan"), Err(Error::UnknownTriangle(_))));
        assert!(matches!(get_triangle("whitney"), Err(Error::UnknownTriangle(_))));
        assert!(matches!(
            get_triangle("whitney(1)"),
            Err(Error::UnknownTriangle(_))
        ));
        assert!(matches!(
            crosscheck("whitney(3,3)", 4),
            Err(Error::MissingFixture(_))
        ));
        assert!(matches!(
            get_triangle_rows("bell_iteration(1,2)", 6),
            Err(Error::InsufficientSequence { needed: 5, have: 2 })
        ));
    }

    #[test]
    fn parametrized_names() {
        let w = get_triangle("whitney( 2, 2 )").unwrap();
        assert_eq!(w.name(), "whitney(2,2)");
        let b = get_triangle_rows("bell_iteration(1,1,1,1)", 5).unwrap();
        assert_eq!(
            b.rows(5).unwrap(),
            get_triangle_rows("bell_iteration(ones)", 5)
                .unwrap()
                .rows(5)
                .unwrap()
        );
        let e = entry("lah").unwrap();
        assert_eq!((e.route, e.index_shift), (Route::Riordan, (1, 1)));
        assert_eq!(e.fixture_rows.len(), 9);
        assert!(entry("whitney(5,5)").unwrap().fixture_rows.is_empty());
    }

    #[test]
    fn derangement_production_reconstructs() {
        let q = production_for("derangement_A", 6).unwrap().unwrap();
        let a = crate::production::reconstruct_finite(&q, 6).unwrap();
        let t = crate::trimat::leading_principal(&get_triangle("derangement_A").unwrap(), 6).unwrap();
        assert_eq!(a, t);
        assert!(production_for("pascal", 3).unwrap().is_none());
    }

    #[test]
    fn text_rows() {
        let rows = get_triangle("pascal").unwrap().rows(3).unwrap();
        assert_eq!(format_rows(&rows), "1\n1 1\n1 2 1\n");
    }
}
