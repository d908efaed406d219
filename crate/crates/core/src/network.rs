//! Weighted planar acyclic networks, path matrices, the LGV enumeration
//! oracle, and the composite network that carries `A_m`, its reversal and the
//! Toeplitz blocks of its rows on a single digraph.
//!
//! Vertices are integer `(column, height)` pairs. Every edge steps from some
//! column to the next lower one, either horizontally or one height down.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{format_scalar, int, serde_scalar, Scalar};
use crate::nrec::NRecSpec;
use crate::trimat::{
    bidiagonal_factorization, combinations, leading_principal, signed_bidiagonal_factorization,
    BidiagonalFactorization, Factorization, FiniteMatrix, TriMatrix,
};

pub type Vertex = (i64, i64);

/// Default edge cap for exhaustive path-family enumeration.
pub const ORACLE_EDGE_CAP: usize = 60;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: Vertex,
    pub to: Vertex,
    #[serde(with = "serde_scalar")]
    pub weight: Scalar,
}

/// Construction that produced a network; the views of the composite depend
/// on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NetworkKind {
    Generic,
    BinomialLike { m: usize },
    Composite { m: usize },
    Reversal { m: usize },
    Toeplitz { n: usize, r: usize },
    Pruned { n: usize, r: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanarNetwork {
    pub kind: NetworkKind,
    pub vertices: BTreeSet<Vertex>,
    pub edges: Vec<Edge>,
    pub sources: Vec<Vertex>,
    pub sinks: Vec<Vertex>,
}

impl PlanarNetwork {
    /// Collects vertices from the edge list and the terminals. Zero-weight
    /// edges are dropped.
    pub fn new(
        kind: NetworkKind,
        extra_vertices: impl IntoIterator<Item = Vertex>,
        edges: Vec<Edge>,
        sources: Vec<Vertex>,
        sinks: Vec<Vertex>,
    ) -> Self {
        let mut edges: Vec<Edge> = edges.into_iter().filter(|e| !e.weight.is_zero()).collect();
        edges.sort_by_key(|e| (e.from, e.to));
        let mut vertices: BTreeSet<Vertex> = extra_vertices.into_iter().collect();
        vertices.extend(edges.iter().flat_map(|e| [e.from, e.to]));
        vertices.extend(sources.iter().copied());
        vertices.extend(sinks.iter().copied());
        PlanarNetwork {
            kind,
            vertices,
            edges,
            sources,
            sinks,
        }
    }

    pub fn empty() -> Self {
        Self::new(NetworkKind::Generic, [], Vec::new(), Vec::new(), Vec::new())
    }

    /// Every edge goes from column `c` to column `c - 1` and drops at most one
    /// height.
    pub fn is_layered(&self) -> bool {
        self.edges
            .iter()
            .all(|e| e.to.0 == e.from.0 - 1 && (e.to.1 == e.from.1 || e.to.1 == e.from.1 - 1))
    }

    pub fn has_negative_weights(&self) -> bool {
        self.edges.iter().any(|e| e.weight.is_negative())
    }

    pub fn with_terminals(&self, kind: NetworkKind, sources: Vec<Vertex>, sinks: Vec<Vertex>) -> Self {
        PlanarNetwork {
            kind,
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            sources,
            sinks,
        }
    }

    fn adjacency(&self) -> HashMap<Vertex, Vec<(Vertex, &Scalar)>> {
        let mut adj: HashMap<Vertex, Vec<(Vertex, &Scalar)>> = HashMap::new();
        for e in &self.edges {
            adj.entry(e.from).or_default().push((e.to, &e.weight));
        }
        adj
    }

    fn topological_order(&self) -> Result<Vec<Vertex>> {
        let mut indegree: BTreeMap<Vertex, usize> = self.vertices.iter().map(|&v| (v, 0)).collect();
        for e in &self.edges {
            *indegree.entry(e.to).or_insert(0) += 1;
            indegree.entry(e.from).or_insert(0);
        }
        let adj = self.adjacency();
        let mut ready: Vec<Vertex> = indegree
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&v, _)| v)
            .collect();
        let mut order = Vec::with_capacity(indegree.len());
        while let Some(v) = ready.pop() {
            order.push(v);
            for (w, _) in adj.get(&v).into_iter().flatten() {
                let d = indegree.get_mut(w).expect("edge endpoint registered");
                *d -= 1;
                if *d == 0 {
                    ready.push(*w);
                }
            }
        }
        if order.len() != indegree.len() {
            return Err(Error::CyclicGraph);
        }
        Ok(order)
    }
}

/// Entry `(i, j)` is the weighted number of paths from source `i` to sink `j`
/// (a vertex reaches itself by the empty path with weight 1).
pub fn path_matrix(net: &PlanarNetwork) -> Result<FiniteMatrix> {
    let order = net.topological_order()?;
    let adj = net.adjacency();
    let rows: Vec<Vec<Scalar>> = net
        .sources
        .par_iter()
        .map(|&u| {
            let mut weight: HashMap<Vertex, Scalar> = HashMap::new();
            weight.insert(u, Scalar::one());
            for v in &order {
                let Some(wv) = weight.get(v).cloned() else {
                    continue;
                };
                for (to, w) in adj.get(v).into_iter().flatten() {
                    *weight.entry(*to).or_insert_with(Scalar::zero) += &wv * *w;
                }
            }
            net.sinks
                .iter()
                .map(|s| weight.get(s).cloned().unwrap_or_else(Scalar::zero))
                .collect()
        })
        .collect();
    if rows.is_empty() {
        return Ok(FiniteMatrix::zeros(0, net.sinks.len()));
    }
    FiniteMatrix::new(rows)
}

struct Path {
    vertices: Vec<Vertex>,
    weight: Scalar,
}

fn all_paths(adj: &HashMap<Vertex, Vec<(Vertex, &Scalar)>>, from: Vertex, to: Vertex) -> Vec<Path> {
    fn walk(
        adj: &HashMap<Vertex, Vec<(Vertex, &Scalar)>>,
        at: Vertex,
        to: Vertex,
        trail: &mut Vec<Vertex>,
        weight: Scalar,
        out: &mut Vec<Path>,
    ) {
        if at == to {
            out.push(Path {
                vertices: trail.clone(),
                weight: weight.clone(),
            });
        }
        for (next, w) in adj.get(&at).into_iter().flatten() {
            trail.push(*next);
            walk(adj, *next, to, trail, &weight * *w, out);
            trail.pop();
        }
    }
    let mut out = Vec::new();
    walk(adj, from, to, &mut vec![from], Scalar::one(), &mut out);
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn sign(perm: &[usize]) -> i64 {
    let inversions = (0..perm.len())
        .flat_map(|i| (i + 1..perm.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| perm[i] > perm[j])
        .count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sum of weights of vertex-disjoint families routing `sources[i]` to
/// `sinks[perm[i]]`.
fn disjoint_family_weight(paths: &[Vec<Vec<Path>>], perm: &[usize], stop_at_first: bool) -> (Scalar, bool) {
    #[allow(clippy::too_many_arguments)]
    fn go(
        paths: &[Vec<Vec<Path>>],
        perm: &[usize],
        i: usize,
        used: &mut HashSet<Vertex>,
        acc: Scalar,
        total: &mut Scalar,
        found: &mut bool,
        stop: bool,
    ) {
        if stop && *found {
            return;
        }
        if i == perm.len() {
            *total += acc;
            *found = true;
            return;
        }
        for p in &paths[i][perm[i]] {
            if p.vertices.iter().any(|v| used.contains(v)) {
                continue;
            }
            used.extend(p.vertices.iter().copied());
            go(paths, perm, i + 1, used, &acc * &p.weight, total, found, stop);
            for v in &p.vertices {
                used.remove(v);
            }
        }
    }
    let mut total = Scalar::zero();
    let mut found = false;
    go(
        paths,
        perm,
        0,
        &mut HashSet::new(),
        Scalar::one(),
        &mut total,
        &mut found,
        stop_at_first,
    );
    (total, found)
}

fn check_oracle_size(net: &PlanarNetwork, cap: usize) -> Result<()> {
    if net.edges.len() > cap {
        return Err(Error::TooLargeForOracle {
            edges: net.edges.len(),
            cap,
        });
    }
    Ok(())
}

fn selected_paths(net: &PlanarNetwork, rows: &[usize], cols: &[usize]) -> Result<Vec<Vec<Vec<Path>>>> {
    let check = |list: &[usize], bound: usize| {
        list.iter().all(|&i| i < bound) && list.windows(2).all(|w| w[0] < w[1])
    };
    if rows.len() != cols.len() || !check(rows, net.sources.len()) || !check(cols, net.sinks.len()) {
        return Err(Error::BadIndexSet(format!(
            "rows {rows:?} against columns {cols:?}"
        )));
    }
    net.topological_order()?;
    let adj = net.adjacency();
    Ok(rows
        .iter()
        .map(|&i| {
            cols.iter()
                .map(|&j| all_paths(&adj, net.sources[i], net.sinks[j]))
                .collect()
        })
        .collect())
}

/// The minor of the path matrix on `rows x cols`, computed as the signed sum
/// over permutations and vertex-disjoint path families, by enumeration.
pub fn lgv_minor_oracle(
    net: &PlanarNetwork,
    rows: &[usize],
    cols: &[usize],
    edge_cap: usize,
) -> Result<Scalar> {
    check_oracle_size(net, edge_cap)?;
    let paths = selected_paths(net, rows, cols)?;
    Ok(permutations(rows.len())
        .iter()
        .map(|perm| disjoint_family_weight(&paths, perm, false).0 * int(sign(perm)))
        .sum())
}

/// True when, for every selection of at most `max_size` sources and sinks,
/// only the identity pairing admits a vertex-disjoint path family.
pub fn fully_compatible(net: &PlanarNetwork, max_size: usize, edge_cap: usize) -> Result<bool> {
    check_oracle_size(net, edge_cap)?;
    let max_size = max_size.min(net.sources.len()).min(net.sinks.len());
    for k in 2..=max_size {
        let perms: Vec<Vec<usize>> = permutations(k)
            .into_iter()
            .filter(|p| p.iter().enumerate().any(|(i, &j)| i != j))
            .collect();
        for rows in combinations(net.sources.len(), k) {
            for cols in combinations(net.sinks.len(), k) {
                let paths = selected_paths(net, &rows, &cols)?;
                if perms.iter().any(|p| disjoint_family_weight(&paths, p, true).1) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn edge(from: Vertex, to: Vertex, weight: Scalar) -> Edge {
    Edge { from, to, weight }
}

/// Grid network of size `m`: horizontal edge out of `(i, h)` weighted
/// `x[i-1][h-i]` for `i <= h` and `sigma[h]` for `h = i - 1` (1 below that),
/// diagonal edge out of `(i, h)` weighted `y[i-1][h-i]` for `i <= h`.
fn grid_network(
    m: usize,
    x: &[Vec<Scalar>],
    y: &[Vec<Scalar>],
    sigma: Option<&[Scalar]>,
) -> Result<PlanarNetwork> {
    let shape_ok = |g: &[Vec<Scalar>]| g.len() == m && g.iter().enumerate().all(|(k, r)| r.len() == m - k);
    if !shape_ok(x) || !shape_ok(y) {
        return Err(Error::DimensionMismatch(format!(
            "weight grids for size {m} need rows of lengths {m}, {}, ..., 1",
            m.saturating_sub(1)
        )));
    }
    let mi = m as i64;
    let mut edges = Vec::new();
    for i in 1..=m {
        for h in 0..=m {
            let (c, hh) = (i as i64, h as i64);
            let horizontal = if i <= h {
                x[i - 1][h - i].clone()
            } else if h + 1 == i {
                sigma.map_or_else(Scalar::one, |s| s[h].clone())
            } else {
                Scalar::one()
            };
            edges.push(edge((c, hh), (c - 1, hh), horizontal));
            if i <= h {
                edges.push(edge((c, hh), (c - 1, hh - 1), y[i - 1][h - i].clone()));
            }
        }
    }
    let all = (0..=mi).flat_map(|c| (0..=mi).map(move |h| (c, h)));
    Ok(PlanarNetwork::new(
        NetworkKind::BinomialLike { m },
        all,
        edges,
        (0..=mi).map(|h| (mi, h)).collect(),
        (0..=mi).map(|h| (0, h)).collect(),
    ))
}

/// Standard binomial-like network; `x[i-1][j]`, `y[i-1][j]` weight the edges
/// out of vertex `(i, i+j)`, for `1 <= i <= m`, `0 <= j <= m - i`.
pub fn build_binomial_like(m: usize, x: &[Vec<Scalar>], y: &[Vec<Scalar>]) -> Result<PlanarNetwork> {
    grid_network(m, x, y, None)
}

/// All-ones weights of the right shape; the path matrix is Pascal's triangle.
pub fn unit_grid(m: usize) -> Vec<Vec<Scalar>> {
    (1..=m).map(|i| vec![Scalar::one(); m - i + 1]).collect()
}

/// Grid network realizing a lower-triangular matrix from its bidiagonal
/// factorization. Row scales sit on the horizontal edges just below the
/// weighted region.
pub fn realize_factorization(fx: &BidiagonalFactorization, size: usize) -> Result<PlanarNetwork> {
    if size == 0 {
        return Ok(PlanarNetwork::empty());
    }
    grid_network(size - 1, &fx.x, &fx.y, Some(&fx.sigma))
}

/// Grid network whose path matrix is the lower-triangular `l`. With
/// `allow_negative` the factorization skips sign checks.
pub fn realize_lower_triangular(l: &FiniteMatrix, allow_negative: bool) -> Result<PlanarNetwork> {
    let outcome = if allow_negative {
        signed_bidiagonal_factorization(l)?
    } else {
        bidiagonal_factorization(l)?
    };
    match outcome {
        Factorization::Factored(fx) => {
            if l.rows() == 1 && !fx.sigma[0].is_one() {
                return Err(Error::NotRealizable(
                    "a 1x1 block needs a carrier edge; use it inside a composite".into(),
                ));
            }
            realize_factorization(&fx, l.rows())
        }
        Factorization::NotTp(e) => Err(Error::NotRealizable(format!(
            "elimination failed at stage {}, row {}: {}",
            e.stage, e.row, e.reason
        ))),
    }
}

fn column_slice(net: &PlanarNetwork, top: i64, heights: i64) -> PlanarNetwork {
    let edges = net.edges.iter().filter(|e| e.from.0 == top).cloned().collect();
    PlanarNetwork::new(
        NetworkKind::Generic,
        (0..=heights).flat_map(|h| [(top, h), (top - 1, h)]),
        edges,
        (0..=heights).map(|h| (top, h)).collect(),
        (0..=heights).map(|h| (top - 1, h)).collect(),
    )
}

/// One-column slices of a binomial-like network, from the source side. Their
/// path matrices are the bidiagonal factors, and gluing them in order gives
/// the whole network back. Size 0 yields a single trivial segment.
pub fn vertical_segments(net: &PlanarNetwork) -> Result<Vec<PlanarNetwork>> {
    let NetworkKind::BinomialLike { m } = net.kind else {
        return Err(Error::NotBinomialLike(format!("kind is {:?}", net.kind)));
    };
    let mi = m as i64;
    if m == 0 {
        return Ok(vec![PlanarNetwork::new(
            NetworkKind::Generic,
            [(0, 0)],
            Vec::new(),
            vec![(0, 0)],
            vec![(0, 0)],
        )]);
    }
    Ok((1..=mi).rev().map(|c| column_slice(net, c, mi)).collect())
}

fn min_column(net: &PlanarNetwork) -> i64 {
    net.vertices.iter().map(|v| v.0).min().unwrap_or(0)
}

/// Places `a` to the left of `b` (in source-to-sink order) and identifies the
/// sinks of `a` with the sources of `b`, in order. The sinks of `a` should lie
/// in its lowest column and the sources of `b` in its highest one.
pub fn glue_networks(a: &PlanarNetwork, b: &PlanarNetwork) -> Result<PlanarNetwork> {
    if a.sinks.len() != b.sources.len() {
        return Err(Error::ArityMismatch {
            sinks: a.sinks.len(),
            sources: b.sources.len(),
        });
    }
    let b_top = b.vertices.iter().map(|v| v.0).max().unwrap_or(0);
    let shift = b_top - min_column(a);
    let identify: HashMap<Vertex, Vertex> = a
        .sinks
        .iter()
        .map(|&(c, h)| (c + shift, h))
        .zip(b.sources.iter().copied())
        .collect();
    let place = |v: Vertex| {
        let moved = (v.0 + shift, v.1);
        identify.get(&moved).copied().unwrap_or(moved)
    };
    let mut edges: Vec<Edge> = a
        .edges
        .iter()
        .map(|e| edge(place(e.from), place(e.to), e.weight.clone()))
        .collect();
    edges.extend(b.edges.iter().cloned());
    let vertices: Vec<Vertex> = a
        .vertices
        .iter()
        .map(|&v| place(v))
        .chain(b.vertices.iter().copied())
        .collect();
    Ok(PlanarNetwork::new(
        NetworkKind::Generic,
        vertices,
        edges,
        a.sources.iter().map(|&v| place(v)).collect(),
        b.sinks.clone(),
    ))
}

fn choose2(n: usize) -> i64 {
    (n * n.saturating_sub(1) / 2) as i64
}

/// Block of the composite realizing `diag(I_{m-i}, Q_i)`: the grid network of
/// `Q_i` lifted by `m - i`, with weight-1 horizontal lines underneath.
fn lifted_block(q_i: &FiniteMatrix, m: usize, allow_negative: bool) -> Result<PlanarNetwork> {
    let i = q_i.rows() - 1;
    let lift = (m - i) as i64;
    let grid = realize_lower_triangular(q_i, allow_negative)?;
    let mut edges: Vec<Edge> = grid
        .edges
        .iter()
        .map(|e| {
            edge(
                (e.from.0, e.from.1 + lift),
                (e.to.0, e.to.1 + lift),
                e.weight.clone(),
            )
        })
        .collect();
    for c in 1..=i as i64 {
        for h in 0..lift {
            edges.push(edge((c, h), (c - 1, h), Scalar::one()));
        }
    }
    let (ii, mi) = (i as i64, m as i64);
    Ok(PlanarNetwork::new(
        NetworkKind::Generic,
        (0..=ii).flat_map(|c| (0..=mi).map(move |h| (c, h))),
        edges,
        (0..=mi).map(|h| (ii, h)).collect(),
        (0..=mi).map(|h| (0, h)).collect(),
    ))
}

/// Final one-column block `diag(I_m, q_00)`.
fn closing_block(q00: &Scalar, m: usize) -> PlanarNetwork {
    let mi = m as i64;
    let edges = (0..=mi)
        .map(|h| edge((1, h), (0, h), if h == mi { q00.clone() } else { Scalar::one() }))
        .collect();
    PlanarNetwork::new(
        NetworkKind::Generic,
        (0..=mi).flat_map(|h| [(1, h), (0, h)]),
        edges,
        (0..=mi).map(|h| (1, h)).collect(),
        (0..=mi).map(|h| (0, h)).collect(),
    )
}

/// Composite network for `A_m`: blocks for `Q_m, Q_{m-1}, ..., Q_0` glued in
/// source-to-sink order. Sources are `(1 + C(m+1, 2), i)`, sinks `(0, i)`.
/// For `m = 0` and `q_00 = 1` this is the single vertex `(0, 0)`.
pub fn composite_for_a(q: &TriMatrix, m: usize, allow_negative: bool) -> Result<PlanarNetwork> {
    let q_m = leading_principal(q, m)?;
    composite_from_block(&q_m, m, allow_negative)
}

/// [`composite_for_a`] from an explicit `(m+1) x (m+1)` block of `Q`.
pub fn composite_from_block(q_m: &FiniteMatrix, m: usize, allow_negative: bool) -> Result<PlanarNetwork> {
    if q_m.rows() < m + 1 || !q_m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "need Q_{m}, got {}x{}",
            q_m.rows(),
            q_m.cols()
        )));
    }
    if m == 0 && q_m.get(0, 0).is_one() {
        return Ok(PlanarNetwork::new(
            NetworkKind::Composite { m },
            [(0, 0)],
            Vec::new(),
            vec![(0, 0)],
            vec![(0, 0)],
        ));
    }
    let mut net = closing_block(q_m.get(0, 0), m);
    for i in 1..=m {
        let block = lifted_block(&q_m.leading(i + 1), m, allow_negative)?;
        net = glue_networks(&block, &net)?;
    }
    let mi = m as i64;
    let top = 1 + choose2(m + 1);
    Ok(net.with_terminals(
        NetworkKind::Composite { m },
        (0..=mi).map(|h| (top, h)).collect(),
        (0..=mi).map(|h| (0, h)).collect(),
    ))
}

/// Same digraph, sources `w_i = (1 + C(i+1, 2), m)` and sinks `(0, m - i)`;
/// the path matrix is the reversal of `A_m`.
pub fn reversal_view(net: &PlanarNetwork, m: usize) -> Result<PlanarNetwork> {
    let NetworkKind::Composite { m: built } = net.kind else {
        return Err(Error::NotComposite);
    };
    if m != built {
        return Err(Error::IndexOutOfRange(format!(
            "composite was built for m = {built}, not {m}"
        )));
    }
    if m == 0 {
        return Ok(net.with_terminals(
            NetworkKind::Reversal { m },
            net.sources.clone(),
            net.sinks.clone(),
        ));
    }
    let mi = m as i64;
    Ok(net.with_terminals(
        NetworkKind::Reversal { m },
        (0..=m).map(|i| (1 + choose2(i + 1), mi)).collect(),
        (0..=mi).map(|i| (0, mi - i)).collect(),
    ))
}

/// Same digraph as the composite for `A_{n+r}`, sources
/// `s_i = (1 + n + C(n+r-i, 2), n + i)` and sinks `t_i = (1 + C(n+r-i, 2), i)`;
/// the path matrix is the transposed Toeplitz block `T_r(alpha_n)^T`.
pub fn toeplitz_view(net: &PlanarNetwork, n: usize, r: usize) -> Result<PlanarNetwork> {
    let NetworkKind::Composite { m } = net.kind else {
        return Err(Error::NotComposite);
    };
    if n + r != m {
        return Err(Error::IndexOutOfRange(format!(
            "n + r = {} but the composite has m = {m}",
            n + r
        )));
    }
    if m == 0 {
        return Ok(net.with_terminals(
            NetworkKind::Toeplitz { n, r },
            net.sources.clone(),
            net.sinks.clone(),
        ));
    }
    let ni = n as i64;
    Ok(net.with_terminals(
        NetworkKind::Toeplitz { n, r },
        (0..=r)
            .map(|i| (1 + ni + choose2(m - i), ni + i as i64))
            .collect(),
        (0..=r).map(|i| (1 + choose2(m - i), i as i64)).collect(),
    ))
}

/// Block index `j` owning the edges that leave column `c` (`j = 0` is the
/// closing column).
fn block_of_column(c: i64, m: usize) -> usize {
    (0..=m)
        .find(|&j| c > choose2(j) && c <= 1 + choose2(j + 1) && (j == 0 || c > 1 + choose2(j)))
        .unwrap_or(0)
}

/// Equivalent network for a Toeplitz view: inside block `B_{m-i}` (`i <= r`)
/// only diagonals leaving local heights `1..=n` survive and horizontals above
/// local height `n` become 1; blocks below `B_n` become identity. Sources move
/// to `u_n..u_{n+r}` and sinks to `v_0..v_r`, and the path matrix is unchanged.
pub fn prune_equivalent(net: &PlanarNetwork) -> Result<PlanarNetwork> {
    let NetworkKind::Toeplitz { n, r } = net.kind else {
        return Err(Error::NotComposite);
    };
    let m = n + r;
    if m == 0 {
        return Ok(net.with_terminals(
            NetworkKind::Pruned { n, r },
            net.sources.clone(),
            net.sinks.clone(),
        ));
    }
    let mi = m as i64;
    let mut edges = Vec::new();
    let top = 1 + choose2(m + 1);
    for c in 1..=top {
        let j = block_of_column(c, m);
        let lift = (m - j) as i64;
        for h in 0..=mi {
            let local = h - lift;
            let keep_weights = j >= n && local <= n as i64;
            let original = |to: Vertex| net.edges.iter().find(|e| e.from == (c, h) && e.to == to);
            let horizontal = if keep_weights {
                original((c - 1, h))
                    .map(|e| e.weight.clone())
                    .unwrap_or_else(Scalar::zero)
            } else {
                Scalar::one()
            };
            edges.push(edge((c, h), (c - 1, h), horizontal));
            if keep_weights && local >= 1 {
                if let Some(e) = original((c - 1, h - 1)) {
                    edges.push(e.clone());
                }
            }
        }
    }
    Ok(PlanarNetwork::new(
        NetworkKind::Pruned { n, r },
        net.vertices.iter().copied(),
        edges,
        (n..=m).map(|h| (top, h as i64)).collect(),
        (0..=r).map(|h| (0, h as i64)).collect(),
    ))
}

/// The slices `H_0, ..., H_r` of a pruned network (block `B_{m-i}` each), with
/// all `m + 1` heights as terminals; `H_i` has path matrix
/// `diag(I_i, Q_n, I_{r-i})` and their product is `M_{n,r}`.
pub fn pruned_segments(net: &PlanarNetwork) -> Result<Vec<PlanarNetwork>> {
    let NetworkKind::Pruned { n, r } = net.kind else {
        return Err(Error::NotComposite);
    };
    let m = n + r;
    let mi = m as i64;
    Ok((0..=r)
        .map(|i| {
            let j = m - i;
            let (hi, lo) = (1 + choose2(j + 1), 1 + choose2(j));
            let edges = net
                .edges
                .iter()
                .filter(|e| e.from.0 <= hi && e.from.0 > lo)
                .cloned()
                .collect();
            PlanarNetwork::new(
                NetworkKind::Generic,
                (lo..=hi).flat_map(|c| (0..=mi).map(move |h| (c, h))),
                edges,
                (0..=mi).map(|h| (hi, h)).collect(),
                (0..=mi).map(|h| (lo, h)).collect(),
            )
        })
        .collect())
}

/// Block for the production matrix of an n-recursive triangle, size `i`:
/// columns `i+1..0`, unit horizontals except the last step at height
/// `h >= 1` (weight `a_h`), diagonals `b_h: (h+1, h) -> (h, h-1)` and
/// `c_h: (1, h) -> (0, h-1)` for `h >= 2`.
fn nrec_block(spec: &NRecSpec, i: usize, lift: i64, height: i64) -> PlanarNetwork {
    let ii = i as i64;
    let mut edges = Vec::new();
    for c in 1..=ii + 1 {
        for h in 0..=height {
            let local = h - lift;
            let w = if c == 1 && (1..=ii).contains(&local) {
                spec.a(local as usize)
            } else {
                Scalar::one()
            };
            edges.push(edge((c, h), (c - 1, h), w));
        }
    }
    for local in 1..=ii {
        edges.push(edge(
            (local + 1, local + lift),
            (local, local - 1 + lift),
            spec.b(local as usize),
        ));
        if local >= 2 {
            edges.push(edge(
                (1, local + lift),
                (0, local - 1 + lift),
                spec.c(local as usize),
            ));
        }
    }
    PlanarNetwork::new(
        NetworkKind::Generic,
        (0..=ii + 1).flat_map(|c| (0..=height).map(move |h| (c, h))),
        edges,
        (0..=height).map(|h| (ii + 1, h)).collect(),
        (0..=height).map(|h| (0, h)).collect(),
    )
}

/// Network whose path matrix is rows `0..rows` of the n-recursive triangle:
/// production blocks for `Q_m, Q_{m-1}, ..., Q_1`, each lifted one height
/// more than the previous. With `a` and `b` interchanged the same layout
/// carries the reversal.
pub fn nrec_network(spec: &NRecSpec, rows: usize) -> Result<PlanarNetwork> {
    spec.require(rows.saturating_sub(1))?;
    if rows == 0 {
        return Ok(PlanarNetwork::empty());
    }
    let m = rows - 1;
    let mi = m as i64;
    let mut net = PlanarNetwork::new(
        NetworkKind::Generic,
        (0..=mi).map(|h| (0, h)),
        Vec::new(),
        (0..=mi).map(|h| (0, h)).collect(),
        (0..=mi).map(|h| (0, h)).collect(),
    );
    for i in 1..=m {
        let block = nrec_block(spec, i, (m - i) as i64, mi);
        net = glue_networks(&block, &net)?;
    }
    Ok(net)
}

fn vertex_id(v: Vertex) -> String {
    format!("\"{},{}\"", v.0, v.1)
}

/// Graphviz DOT text: one `rank=same` group per column, exact `p/q` edge
/// labels, boxed sources and double-circled sinks, all in sorted order.
pub fn export_dot(net: &PlanarNetwork) -> String {
    let mut out = String::from("digraph {\n");
    if net.vertices.is_empty() {
        out.push_str("}\n");
        return out;
    }
    out.push_str("  rankdir=RL;\n  node [shape=circle, fontsize=10];\n");
    let sources: BTreeSet<Vertex> = net.sources.iter().copied().collect();
    let sinks: BTreeSet<Vertex> = net.sinks.iter().copied().collect();
    for &v in &net.vertices {
        let mut attrs = vec![format!("pos=\"{},{}!\"", v.0, v.1)];
        match (sources.contains(&v), sinks.contains(&v)) {
            (true, true) => attrs.push("shape=doubleoctagon".into()),
            (true, false) => attrs.push("shape=box, style=bold".into()),
            (false, true) => attrs.push("shape=doublecircle".into()),
            (false, false) => {}
        }
        let _ = writeln!(out, "  {} [{}];", vertex_id(v), attrs.join(", "));
    }
    let mut columns: BTreeMap<i64, Vec<Vertex>> = BTreeMap::new();
    for &v in &net.vertices {
        columns.entry(v.0).or_default().push(v);
    }
    for vs in columns.values() {
        let ids: Vec<String> = vs.iter().map(|&v| vertex_id(v)).collect();
        let _ = writeln!(out, "  {{ rank=same; {}; }}", ids.join("; "));
    }
    for e in &net.edges {
        let _ = writeln!(
            out,
            "  {} -> {} [label=\"{}\"];",
            vertex_id(e.from),
            vertex_id(e.to),
            format_scalar(&e.weight)
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::binomial;
    use crate::production::{build_mnr_finite, left_production};
    use crate::trimat::{finmul, minor, reversal};

    fn pascal_rows(m: usize) -> FiniteMatrix {
        FiniteMatrix::from_lower_rows(
            &(0..=m)
                .map(|n| (0..=n).map(|k| Scalar::from_integer(binomial(n, k))).collect())
                .collect::<Vec<_>>(),
        )
    }

    fn pascal() -> TriMatrix {
        TriMatrix::from_entry("pascal", |n, k| Scalar::from_integer(binomial(n, k)))
    }

    fn zero_grid(m: usize) -> Vec<Vec<Scalar>> {
        (1..=m).map(|i| vec![Scalar::zero(); m - i + 1]).collect()
    }

    #[test]
    fn binomial_network_gives_pascal() {
        for m in 0..=4 {
            let net = build_binomial_like(m, &unit_grid(m), &unit_grid(m)).unwrap();
            assert_eq!(path_matrix(&net).unwrap(), pascal_rows(m));
            assert!(net.is_layered());
        }
    }

    #[test]
    fn no_diagonals_gives_diagonal_matrix() {
        let m = 3;
        let mut x = unit_grid(m);
        x[0][1] = int(2); // vertex (1, 2)
        x[1][0] = int(3); // vertex (2, 2)
        let p = path_matrix(&build_binomial_like(m, &x, &zero_grid(m)).unwrap()).unwrap();
        let mut expected = FiniteMatrix::identity(4);
        expected.set(2, 2, int(6));
        assert_eq!(p, expected);
    }

    #[test]
    fn size_one_by_hand() {
        let x = vec![vec![int(5)]];
        let y = vec![vec![int(7)]];
        let p = path_matrix(&build_binomial_like(1, &x, &y).unwrap()).unwrap();
        assert_eq!(p, FiniteMatrix::from_ints(&[&[1, 0], &[7, 5]]));
    }

    #[test]
    fn edgeless_network_is_identity() {
        let vs: Vec<Vertex> = (0..3).map(|h| (0, h)).collect();
        let net = PlanarNetwork::new(NetworkKind::Generic, [], Vec::new(), vs.clone(), vs);
        assert_eq!(path_matrix(&net).unwrap(), FiniteMatrix::identity(3));
    }

    #[test]
    fn cycles_are_rejected() {
        let net = PlanarNetwork::new(
            NetworkKind::Generic,
            [],
            vec![edge((0, 0), (1, 0), int(1)), edge((1, 0), (0, 0), int(1))],
            vec![(0, 0)],
            vec![(1, 0)],
        );
        assert_eq!(path_matrix(&net), Err(Error::CyclicGraph));
    }

    #[test]
    fn lgv_examples() {
        let net = build_binomial_like(3, &unit_grid(3), &unit_grid(3)).unwrap();
        let p = path_matrix(&net).unwrap();
        assert_eq!(
            lgv_minor_oracle(&net, &[0, 1], &[0, 1], ORACLE_EDGE_CAP).unwrap(),
            int(1)
        );
        assert_eq!(
            lgv_minor_oracle(&net, &[3], &[1], ORACLE_EDGE_CAP).unwrap(),
            p.get(3, 1).clone()
        );
        for (rows, cols) in [(vec![1, 3], vec![0, 2]), (vec![1, 2, 3], vec![0, 1, 2])] {
            assert_eq!(
                lgv_minor_oracle(&net, &rows, &cols, ORACLE_EDGE_CAP).unwrap(),
                minor(&p, &rows, &cols).unwrap()
            );
        }
        assert!(fully_compatible(&net, 3, ORACLE_EDGE_CAP).unwrap());
        assert!(matches!(
            lgv_minor_oracle(&net, &[0], &[0], 3),
            Err(Error::TooLargeForOracle { cap: 3, .. })
        ));
    }

    #[test]
    fn crossing_selection_is_not_fully_compatible() {
        let net = build_binomial_like(2, &unit_grid(2), &unit_grid(2)).unwrap();
        let swapped = net.with_terminals(
            NetworkKind::Generic,
            net.sources.clone(),
            net.sinks.iter().rev().copied().collect(),
        );
        assert!(!fully_compatible(&swapped, 2, ORACLE_EDGE_CAP).unwrap());
    }

    #[test]
    fn segments_multiply_back() {
        let net = build_binomial_like(2, &unit_grid(2), &unit_grid(2)).unwrap();
        let segs = vertical_segments(&net).unwrap();
        assert_eq!(segs.len(), 2);
        let prod = segs
            .iter()
            .map(|s| path_matrix(s).unwrap())
            .fold(FiniteMatrix::identity(3), |acc, f| finmul(&acc, &f).unwrap());
        assert_eq!(prod, pascal_rows(2));
        let glued = glue_networks(&segs[0], &segs[1]).unwrap();
        assert_eq!(path_matrix(&glued).unwrap(), pascal_rows(2));
        let trivial = vertical_segments(&build_binomial_like(0, &[], &[]).unwrap()).unwrap();
        assert_eq!(path_matrix(&trivial[0]).unwrap(), FiniteMatrix::identity(1));
        assert!(matches!(
            vertical_segments(&PlanarNetwork::empty()),
            Err(Error::NotBinomialLike(_))
        ));
    }

    #[test]
    fn glue_multiplies() {
        let a = build_binomial_like(2, &unit_grid(2), &unit_grid(2)).unwrap();
        let g = glue_networks(&a, &a).unwrap();
        let p = pascal_rows(2);
        assert_eq!(path_matrix(&g).unwrap(), finmul(&p, &p).unwrap());
        let small = build_binomial_like(1, &unit_grid(1), &unit_grid(1)).unwrap();
        assert!(matches!(
            glue_networks(&a, &small),
            Err(Error::ArityMismatch { sinks: 3, sources: 2 })
        ));
    }

    #[test]
    fn realization_handles_scales() {
        let l = FiniteMatrix::from_ints(&[&[2, 0, 0], &[0, 0, 0], &[1, 3, 4]]);
        let net = realize_lower_triangular(&l, false).unwrap();
        assert_eq!(path_matrix(&net).unwrap(), l);
        let neg = FiniteMatrix::from_ints(&[&[1, 0], &[-1, 1]]);
        assert!(matches!(
            realize_lower_triangular(&neg, false),
            Err(Error::NotRealizable(_))
        ));
        let net = realize_lower_triangular(&neg, true).unwrap();
        assert!(net.has_negative_weights());
        assert_eq!(path_matrix(&net).unwrap(), neg);
    }

    #[test]
    fn composite_examples() {
        let p3 = pascal_rows(3);
        let net = composite_for_a(&TriMatrix::ones(), 3, false).unwrap();
        assert_eq!(path_matrix(&net).unwrap(), p3);
        assert!(net.is_layered());
        let id = composite_for_a(&TriMatrix::identity(), 3, false).unwrap();
        assert_eq!(path_matrix(&id).unwrap(), FiniteMatrix::identity(4));
        let rev = reversal_view(&net, 3).unwrap();
        assert_eq!(
            path_matrix(&rev).unwrap(),
            leading_principal(&reversal(&pascal()), 3).unwrap()
        );
        let zero = composite_for_a(&TriMatrix::ones(), 0, false).unwrap();
        assert_eq!(zero.vertices.len(), 1);
        let scaled = composite_from_block(&FiniteMatrix::from_ints(&[&[3]]), 0, false).unwrap();
        assert_eq!(
            path_matrix(&reversal_view(&scaled, 0).unwrap()).unwrap(),
            FiniteMatrix::from_ints(&[&[3]])
        );
        assert_eq!(
            path_matrix(&reversal_view(&zero, 0).unwrap()).unwrap(),
            FiniteMatrix::identity(1)
        );
        assert_eq!(
            reversal_view(&zero, 1),
            Err(Error::IndexOutOfRange(
                "composite was built for m = 0, not 1".into()
            ))
        );
        assert_eq!(
            reversal_view(&PlanarNetwork::empty(), 0),
            Err(Error::NotComposite)
        );
    }

    #[test]
    fn toeplitz_and_pruned_views() {
        let m = 4;
        let q = left_production(&pascal(), m).unwrap();
        let net = composite_from_block(&q, m, false).unwrap();
        for n in 0..=m {
            let r = m - n;
            let view = toeplitz_view(&net, n, r).unwrap();
            let row = crate::trimat::RowSequence::new(pascal().row(n).unwrap());
            let expected = crate::trimat::toeplitz(&row, r).transpose();
            assert_eq!(path_matrix(&view).unwrap(), expected, "n={n} r={r}");
            let pruned = prune_equivalent(&view).unwrap();
            assert_eq!(path_matrix(&pruned).unwrap(), expected, "pruned n={n} r={r}");
            let segs = pruned_segments(&pruned).unwrap();
            let q_n = q.leading(n + 1);
            let mut prod = FiniteMatrix::identity(m + 1);
            for (i, s) in segs.iter().enumerate() {
                let h = path_matrix(s).unwrap();
                let expected_h = FiniteMatrix::block_diag(&[
                    &FiniteMatrix::identity(i),
                    &q_n,
                    &FiniteMatrix::identity(r - i),
                ]);
                assert_eq!(h, expected_h, "H_{i} n={n} r={r}");
                prod = finmul(&prod, &h).unwrap();
            }
            assert_eq!(prod, build_mnr_finite(&q, n, r).unwrap());
        }
        assert!(matches!(
            toeplitz_view(&net, 1, 1),
            Err(Error::IndexOutOfRange(_))
        ));
    }

    #[test]
    fn nrec_network_gives_triangle_and_reversal() {
        for name in crate::nrec::PRESETS {
            let spec = NRecSpec::preset(name, 6).unwrap();
            let t = crate::nrec::nrec_matrix(&spec, 6).unwrap();
            let net = nrec_network(&spec, 6).unwrap();
            assert_eq!(
                path_matrix(&net).unwrap(),
                leading_principal(&t, 5).unwrap(),
                "{name}"
            );
            let dual = nrec_network(&spec.swapped(), 6).unwrap();
            assert_eq!(
                path_matrix(&dual).unwrap(),
                leading_principal(&reversal(&t), 5).unwrap(),
                "{name} reversal"
            );
        }
        let pascal_spec = NRecSpec::preset("pascal", 4).unwrap();
        let net = nrec_network(&pascal_spec, 4).unwrap();
        assert!(net.edges.iter().all(|e| e.weight.is_one()));
        assert!(net
            .edges
            .iter()
            .all(|e| e.to.1 == e.from.1 || e.to.0 != 0 || e.from.1 - e.to.1 == 1));
    }

    #[test]
    fn dot_export() {
        assert_eq!(export_dot(&PlanarNetwork::empty()), "digraph {\n}\n");
        let net = build_binomial_like(2, &unit_grid(2), &unit_grid(2)).unwrap();
        let dot = export_dot(&net);
        assert_eq!(dot.matches("pos=").count(), 9);
        assert_eq!(dot.matches("rank=same").count(), 3);
        assert_eq!(dot, export_dot(&net.clone()));
        let mut x = unit_grid(1);
        x[0][0] = Scalar::new(3.into(), 4.into());
        let dot = export_dot(&build_binomial_like(1, &x, &unit_grid(1)).unwrap());
        assert!(dot.contains("label=\"3/4\""));
    }

    #[test]
    fn json_round_trip() {
        let net = build_binomial_like(1, &unit_grid(1), &unit_grid(1)).unwrap();
        let text = serde_json::to_string(&net).unwrap();
        let back: PlanarNetwork = serde_json::from_str(&text).unwrap();
        assert_eq!(back, net);
        assert!(text.contains(r#""weight":"1""#));
    }
}
