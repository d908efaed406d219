//! Lower-triangular matrices as lazy row generators, dense finite matrices,
//! exact minors and total-positivity certification.

use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{format_scalar, int, serde_scalar, Poly, Scalar};

type RowGenerator = dyn Fn(usize, &[Vec<Scalar>]) -> Result<Vec<Scalar>> + Send + Sync;

/// Infinite lower-triangular matrix whose row `n` is produced on demand.
///
/// The generator receives `n` and all previously generated rows `0..n`, and
/// returns `(a_{n,0}, ..., a_{n,n})`; shorter outputs are zero-padded. Rows are
/// cached behind a lock, so clones share work and concurrent readers are safe.
#[derive(Clone)]
pub struct TriMatrix {
    name: String,
    generator: Arc<RowGenerator>,
    cache: Arc<RwLock<Vec<Vec<Scalar>>>>,
    limit: Option<usize>,
}

impl fmt::Debug for TriMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TriMatrix")
            .field("name", &self.name)
            .field("limit", &self.limit)
            .finish()
    }
}

impl TriMatrix {
    pub fn new<F>(name: impl Into<String>, generator: F) -> Self
    where
        F: Fn(usize, &[Vec<Scalar>]) -> Result<Vec<Scalar>> + Send + Sync + 'static,
    {
        TriMatrix {
            name: name.into(),
            generator: Arc::new(generator),
            cache: Arc::new(RwLock::new(Vec::new())),
            limit: None,
        }
    }

    /// Triangle given by a closed-form entry rule.
    pub fn from_entry<F>(name: impl Into<String>, entry: F) -> Self
    where
        F: Fn(usize, usize) -> Scalar + Send + Sync + 'static,
    {
        Self::new(name, move |n, _| Ok((0..=n).map(|k| entry(n, k)).collect()))
    }

    /// Triangle defined only through the given rows.
    pub fn from_rows(name: impl Into<String>, rows: Vec<Vec<Scalar>>) -> Self {
        let limit = rows.len();
        let rows = Arc::new(rows);
        Self::new(name, move |n, _| Ok(rows[n].clone())).with_row_limit(limit)
    }

    /// Lower-triangular part of a square matrix, rows `0..size`.
    pub fn from_finite(name: impl Into<String>, m: &FiniteMatrix) -> Self {
        let rows = (0..m.rows())
            .map(|n| m.row(n)[..=n.min(m.cols().saturating_sub(1))].to_vec())
            .collect();
        Self::from_rows(name, rows)
    }

    pub fn identity() -> Self {
        Self::from_entry("identity", |n, k| int((n == k) as i64))
    }

    /// The all-ones lower-triangular matrix `J`.
    pub fn ones() -> Self {
        Self::from_entry("ones", |_, _| int(1))
    }

    /// Restricts availability to rows `0..limit`.
    pub fn with_row_limit(mut self, limit: usize) -> Self {
        self.limit = Some(self.limit.map_or(limit, |l| l.min(limit)));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn row_limit(&self) -> Option<usize> {
        self.limit
    }

    /// Row `n`, exactly `n + 1` entries.
    pub fn row(&self, n: usize) -> Result<Vec<Scalar>> {
        if let Some(limit) = self.limit {
            if n >= limit {
                return Err(Error::RowUnavailable {
                    name: self.name.clone(),
                    row: n,
                    limit: limit.saturating_sub(1),
                });
            }
        }
        if let Some(row) = self.cache.read().expect("row cache poisoned").get(n) {
            return Ok(row.clone());
        }
        let mut cache = self.cache.write().expect("row cache poisoned");
        while cache.len() <= n {
            let next = cache.len();
            let mut row = (self.generator)(next, &cache)?;
            row.resize(next + 1, Scalar::zero());
            cache.push(row);
        }
        Ok(cache[n].clone())
    }

    /// Rows `0..count`.
    pub fn rows(&self, count: usize) -> Result<Vec<Vec<Scalar>>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        self.row(count - 1)?;
        let cache = self.cache.read().expect("row cache poisoned");
        Ok(cache[..count].to_vec())
    }

    /// `a_{n,k}`, zero above the diagonal.
    pub fn entry(&self, n: usize, k: usize) -> Result<Scalar> {
        if k > n {
            return Ok(Scalar::zero());
        }
        Ok(self.row(n)?.swap_remove(k))
    }

    pub fn row_sequence(&self, n: usize) -> Result<RowSequence> {
        Ok(RowSequence::new(self.row(n)?))
    }

    pub fn row_poly(&self, n: usize) -> Result<Poly> {
        Ok(Poly::new(self.row(n)?))
    }
}

/// Finite sequence identified with its zero-padded infinite extension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RowSequence {
    #[serde(with = "serde_scalar::vec")]
    entries: Vec<Scalar>,
}

impl RowSequence {
    pub fn new(mut entries: Vec<Scalar>) -> Self {
        while entries.last().is_some_and(Zero::is_zero) {
            entries.pop();
        }
        RowSequence { entries }
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        Self::new(xs.iter().map(|&x| int(x)).collect())
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> Scalar {
        self.entries.get(i).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Generating polynomial `sum s_i x^i`.
    pub fn poly(&self) -> Poly {
        Poly::new(self.entries.clone())
    }

    /// The sequence with its leading zeros removed.
    pub fn without_leading_zeros(&self) -> Self {
        let start = self
            .entries
            .iter()
            .position(|x| !x.is_zero())
            .unwrap_or(self.entries.len());
        RowSequence {
            entries: self.entries[start..].to_vec(),
        }
    }
}

/// Dense rectangular matrix of exact rationals, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Scalar>>,
}

impl FiniteMatrix {
    pub fn new(entries: Vec<Vec<Scalar>>) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        if let Some(bad) = entries.iter().position(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row {bad} has {} entries, expected {cols}",
                entries[bad].len()
            )));
        }
        Ok(FiniteMatrix { rows, cols, entries })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::new(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
            .expect("rectangular literal")
    }

    /// Square matrix from ragged lower-triangular rows (zero-padded).
    pub fn from_lower_rows(rows: &[Vec<Scalar>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n, n);
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate().take(n) {
                m.entries[i][j] = v.clone();
            }
        }
        m
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        FiniteMatrix {
            rows,
            cols,
            entries: vec![vec![Scalar::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i][i] = Scalar::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Vec<Scalar>] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i]
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) {
        self.entries[i][j] = value;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (i, row) in self.entries.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                t.entries[j][i] = v.clone();
            }
        }
        t
    }

    /// Submatrix on the given row and column indices (any order, no checks
    /// beyond bounds).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        FiniteMatrix {
            rows: rows.len(),
            cols: cols.len(),
            entries: rows
                .iter()
                .map(|&i| cols.iter().map(|&j| self.entries[i][j].clone()).collect())
                .collect(),
        }
    }

    /// Leading `size x size` block.
    pub fn leading(&self, size: usize) -> Self {
        let idx: Vec<usize> = (0..size).collect();
        self.select(&idx, &idx)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// First nonzero entry strictly above the diagonal, if any.
    pub fn first_above_diagonal(&self) -> Option<(usize, usize)> {
        (0..self.rows).find_map(|i| {
            (i + 1..self.cols)
                .find(|&j| !self.entries[i][j].is_zero())
                .map(|j| (i, j))
        })
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.first_above_diagonal().is_none()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().flatten().all(|v| !v.is_negative())
    }

    /// Block-diagonal matrix `diag(blocks...)`.
    pub fn block_diag(blocks: &[&FiniteMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.entries[r0 + i][c0 + j] = b.entries[i][j].clone();
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    /// Lower-triangular rows, trimming the zeros above the diagonal.
    pub fn lower_rows(&self) -> Vec<Vec<Scalar>> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, r)| r[..=i.min(self.cols.saturating_sub(1))].to_vec())
            .collect()
    }

    /// Comma-separated exact rationals, one matrix row per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(format_scalar).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    #[serde(with = "serde_scalar::grid")]
    entries: Vec<Vec<Scalar>>,
}

impl Serialize for FiniteMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        let m = if raw.rows == 0 {
            FiniteMatrix::zeros(0, raw.cols)
        } else {
            FiniteMatrix::new(raw.entries).map_err(serde::de::Error::custom)?
        };
        if m.rows != raw.rows || m.cols != raw.cols {
            return Err(serde::de::Error::custom("declared shape does not match entries"));
        }
        Ok(m)
    }
}

/// `A_r`: the `(r+1) x (r+1)` leading principal submatrix.
pub fn leading_principal(a: &TriMatrix, r: usize) -> Result<FiniteMatrix> {
    Ok(FiniteMatrix::from_lower_rows(&a.rows(r + 1)?))
}

/// Row-reversed triangle `[a_{n, n-k}]`.
pub fn reversal(a: &TriMatrix) -> TriMatrix {
    let inner = a.clone();
    let rev = TriMatrix::new(format!("{}_reversed", a.name()), move |n, _| {
        let mut row = inner.row(n)?;
        row.reverse();
        Ok(row)
    });
    match a.row_limit() {
        Some(limit) => rev.with_row_limit(limit),
        None => rev,
    }
}

/// PF certificate through `order`: the Toeplitz matrix `T_order` of the
/// sequence, after dropping leading zeros, is TP up to minors of size
/// `max_minor`. Shifting the index does not change PF-ness, but it would push
/// the witnessing minors out of a fixed-size block.
pub fn is_pf_to_order(s: &RowSequence, order: usize, max_minor: usize) -> TpVerdict {
    is_tp_to_order(&toeplitz(&s.without_leading_zeros(), order), max_minor)
}

/// `T_r(s)`: entry `(i, j)` is `s_{i-j}`.
pub fn toeplitz(s: &RowSequence, r: usize) -> FiniteMatrix {
    let mut m = FiniteMatrix::zeros(r + 1, r + 1);
    for i in 0..=r {
        for j in 0..=i {
            m.entries[i][j] = s.get(i - j);
        }
    }
    m
}

/// Exact product.
pub fn finmul(a: &FiniteMatrix, b: &FiniteMatrix) -> Result<FiniteMatrix> {
    if a.cols != b.rows {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} times {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let mut out = FiniteMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let x = &a.entries[i][k];
            if x.is_zero() {
                continue;
            }
            for j in 0..b.cols {
                let y = &b.entries[k][j];
                if !y.is_zero() {
                    out.entries[i][j] += x * y;
                }
            }
        }
    }
    Ok(out)
}

/// Inverse of a square lower-triangular matrix by forward substitution.
pub fn lower_inverse(a: &FiniteMatrix) -> Result<FiniteMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "inverse of a {}x{} matrix",
            a.rows, a.cols
        )));
    }
    if let Some((i, j)) = a.first_above_diagonal() {
        return Err(Error::NotLowerTriangular(i, j));
    }
    let n = a.rows;
    if let Some(i) = (0..n).find(|&i| a.entries[i][i].is_zero()) {
        return Err(Error::SingularDiagonal(i));
    }
    let mut inv = FiniteMatrix::zeros(n, n);
    for j in 0..n {
        inv.entries[j][j] = a.entries[j][j].recip();
        for i in j + 1..n {
            let s: Scalar = (j..i).map(|k| &a.entries[i][k] * &inv.entries[k][j]).sum();
            inv.entries[i][j] = -s / &a.entries[i][i];
        }
    }
    Ok(inv)
}

/// `(A_r)^{-1}`.
pub fn tri_inverse(a: &TriMatrix, r: usize) -> Result<FiniteMatrix> {
    lower_inverse(&leading_principal(a, r)?)
}

/// Determinant by fraction-free Bareiss elimination after clearing row
/// denominators.
pub fn determinant(m: &FiniteMatrix) -> Scalar {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows;
    if n == 0 {
        return Scalar::one();
    }
    if n == 1 {
        return m.entries[0][0].clone();
    }
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = m
        .entries
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            let out = row.iter().map(|v| v.numer() * (&l / v.denom())).collect();
            scale *= &l;
            out
        })
        .collect();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    negate = !negate;
                }
                None => return Scalar::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    let det = if negate { -det } else { det };
    Scalar::new(det, scale)
}

fn check_index_list(list: &[usize], bound: usize, what: &str) -> Result<()> {
    if let Some(&bad) = list.iter().find(|&&i| i >= bound) {
        return Err(Error::BadIndexSet(format!(
            "{what} index {bad} out of range 0..{bound}"
        )));
    }
    if list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadIndexSet(format!(
            "{what} indices {list:?} are not strictly increasing"
        )));
    }
    Ok(())
}

/// The minor `det M[rows | cols]`.
pub fn minor(m: &FiniteMatrix, rows: &[usize], cols: &[usize]) -> Result<Scalar> {
    if rows.len() != cols.len() {
        return Err(Error::BadIndexSet(format!(
            "{} rows against {} columns",
            rows.len(),
            cols.len()
        )));
    }
    check_index_list(rows, m.rows, "row")?;
    check_index_list(cols, m.cols, "column")?;
    Ok(determinant(&m.select(rows, cols)))
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            break;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

/// Outcome of an exhaustive minor sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TpVerdict {
    CertifiedTp {
        max_minor: usize,
        minors_checked: u64,
    },
    Counterexample {
        rows: Vec<usize>,
        cols: Vec<usize>,
        #[serde(with = "serde_scalar")]
        value: Scalar,
    },
}

impl TpVerdict {
    pub fn is_tp(&self) -> bool {
        matches!(self, TpVerdict::CertifiedTp { .. })
    }
}

/// Checks every minor of size `1..=max_minor` (clamped to the matrix size)
/// and returns the lexicographically first negative one by
/// `(size, rows, cols)`, or a certificate.
///
/// For lower-triangular input, minors with `rows[i] < cols[i]` for some `i`
/// vanish structurally and are not evaluated.
pub fn is_tp_to_order(m: &FiniteMatrix, max_minor: usize) -> TpVerdict {
    let max_minor = max_minor.min(m.rows).min(m.cols);
    let lower = m.is_lower_triangular();
    let mut checked = 0u64;
    for k in 1..=max_minor {
        let row_sets = combinations(m.rows, k);
        let col_sets = combinations(m.cols, k);
        let found = row_sets.par_iter().find_map_first(|rows| {
            col_sets.iter().find_map(|cols| {
                if lower && rows.iter().zip(cols).any(|(r, c)| r < c) {
                    return None;
                }
                let value = determinant(&m.select(rows, cols));
                value.is_negative().then(|| TpVerdict::Counterexample {
                    rows: rows.clone(),
                    cols: cols.clone(),
                    value,
                })
            })
        });
        if let Some(witness) = found {
            return witness;
        }
        checked += (row_sets.len() * col_sets.len()) as u64;
    }
    TpVerdict::CertifiedTp {
        max_minor,
        minors_checked: checked,
    }
}

/// Bidiagonal factorization `L = R_1 R_2 ... R_n` of an `(n+1) x (n+1)`
/// totally positive lower-triangular matrix.
///
/// Weights use network coordinates: `x[i-1][j]` and `y[i-1][j]` sit on the
/// vertex `(i, i+j)` of the standard binomial-like grid, for `1 <= i <= n`
/// and `0 <= j <= n-i`. `sigma[h]` is an extra diagonal scale at height `h`
/// used to absorb zero rows and the `(0,0)` entry; it is `1` when the matrix
/// is realizable by the plain grid network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BidiagonalFactorization {
    pub factors: Vec<FiniteMatrix>,
    #[serde(with = "serde_scalar::vec")]
    pub sigma: Vec<Scalar>,
    #[serde(with = "serde_scalar::grid")]
    pub x: Vec<Vec<Scalar>>,
    #[serde(with = "serde_scalar::grid")]
    pub y: Vec<Vec<Scalar>>,
}

impl BidiagonalFactorization {
    /// True when every row scale is 1.
    pub fn unit_scales(&self) -> bool {
        self.sigma.iter().all(One::is_one)
    }
}

/// Where elimination broke down.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotTpEvidence {
    pub stage: usize,
    pub row: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Factorization {
    Factored(BidiagonalFactorization),
    NotTp(NotTpEvidence),
}

fn unit(n: usize, k: usize) -> Vec<Scalar> {
    let mut v = vec![Scalar::zero(); n];
    v[k] = Scalar::one();
    v
}

/// Assembles the factor acting at network column `i` (1-based): diagonal
/// `x` and subdiagonal `y` at heights `h >= i`, the scale `sigma[i-1]` at
/// height `i-1`, identity below.
fn column_factor(size: usize, i: usize, fx: &BidiagonalFactorization) -> FiniteMatrix {
    let mut s = FiniteMatrix::identity(size);
    s.entries[i - 1][i - 1] = fx.sigma[i - 1].clone();
    for h in i..size {
        s.entries[h][h] = fx.x[i - 1][h - i].clone();
        s.entries[h][h - 1] = fx.y[i - 1][h - i].clone();
    }
    s
}

/// Neville-style elimination producing nonnegative bidiagonal factors, or
/// the step at which a negative quantity was forced.
pub fn bidiagonal_factorization(l: &FiniteMatrix) -> Result<Factorization> {
    factorize(l, false)
}

/// Same elimination without sign checks; negative weights are allowed and the
/// only failure is a vanishing pivot above a nonzero entry.
pub fn signed_bidiagonal_factorization(l: &FiniteMatrix) -> Result<Factorization> {
    factorize(l, true)
}

fn factorize(l: &FiniteMatrix, signed: bool) -> Result<Factorization> {
    if !l.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "factorization of a {}x{} matrix",
            l.rows, l.cols
        )));
    }
    if let Some((i, j)) = l.first_above_diagonal() {
        return Err(Error::NotLowerTriangular(i, j));
    }
    let size = l.rows;
    let fail = |stage: usize, row: usize, reason: String| {
        Ok(Factorization::NotTp(NotTpEvidence { stage, row, reason }))
    };
    if let Some((i, j)) = (0..size)
        .flat_map(|i| (0..=i).map(move |j| (i, j)))
        .find(|&(i, j)| !signed && l.entries[i][j].is_negative())
    {
        return fail(0, i, format!("negative entry at ({i}, {j})"));
    }
    if size <= 1 {
        let sigma = l.entries.first().map(|r| r[0].clone()).into_iter().collect();
        return Ok(Factorization::Factored(BidiagonalFactorization {
            factors: if size == 1 { vec![l.clone()] } else { Vec::new() },
            sigma,
            x: Vec::new(),
            y: Vec::new(),
        }));
    }
    let n = size - 1;
    let mut sigma = vec![Scalar::one(); size];
    let mut x: Vec<Vec<Scalar>> = (1..=n).map(|i| vec![Scalar::one(); n - i + 1]).collect();
    let mut y: Vec<Vec<Scalar>> = (1..=n).map(|i| vec![Scalar::zero(); n - i + 1]).collect();

    // Stage 0: working rows, with zero rows passed through below the top.
    let mut w: Vec<Vec<Scalar>> = Vec::with_capacity(size);
    let mut dead_top = false;
    for g in 0..size {
        let row = l.entries[g].clone();
        let zero_row = row.iter().all(Zero::is_zero);
        if g == 0 {
            sigma[0] = row[0].clone();
            w.push(unit(size, 0));
        } else if zero_row && g < n {
            sigma[g] = Scalar::zero();
            let prev = w[g - 1].clone();
            w.push(prev);
        } else if zero_row {
            dead_top = true;
            w.push(vec![Scalar::zero(); size]);
        } else {
            w.push(row);
        }
    }
    if dead_top {
        x[n - 1][0] = Scalar::zero();
        y[n - 1][0] = Scalar::zero();
    }

    for c in 0..n {
        let mut next = w.clone();
        next[c + 1] = unit(size, c + 1);
        for g in c + 1..size {
            if g == n && dead_top {
                continue;
            }
            let i = g - c;
            let (p, q) = (&w[g - 1][c], &w[g][c]);
            let ratio = if p.is_positive() || (signed && !p.is_zero()) {
                q / p
            } else if q.is_zero() {
                Scalar::zero()
            } else {
                return fail(
                    c,
                    g,
                    format!("pivot above row {g} vanishes at column {c} while the row does not"),
                );
            };
            let residual: Vec<Scalar> = (0..size).map(|k| &w[g][k] - &ratio * &w[g - 1][k]).collect();
            if let Some(k) = residual.iter().position(|v| !signed && v.is_negative()) {
                return fail(c, g, format!("elimination leaves a negative entry in column {k}"));
            }
            let (weight, carried) = if residual.iter().all(Zero::is_zero) {
                let carried = if g > c + 1 {
                    next[g - 1].clone()
                } else {
                    unit(size, g)
                };
                (Scalar::zero(), carried)
            } else if g == c + 1 {
                (residual[g].clone(), unit(size, g))
            } else {
                (Scalar::one(), residual)
            };
            x[i - 1][g - i] = weight;
            y[i - 1][g - i] = ratio;
            next[g] = carried;
        }
        w = next;
    }

    let mut fx = BidiagonalFactorization {
        factors: Vec::new(),
        sigma,
        x,
        y,
    };
    fx.factors = (1..=n).rev().map(|i| column_factor(size, i, &fx)).collect();
    let product = fx
        .factors
        .iter()
        .try_fold(FiniteMatrix::identity(size), |acc, f| finmul(&acc, f))?;
    if &product != l {
        return fail(n, n, "factors do not reproduce the matrix".to_string());
    }
    Ok(Factorization::Factored(fx))
}
