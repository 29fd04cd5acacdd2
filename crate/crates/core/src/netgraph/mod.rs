//! Graph and matrix substrate plus dense oracle computations.
//!
//! Everything here is exact, desk-scale linear algebra: these values serve
//! as ground truth for the stochastic schemes, so they are computed by dense
//! solves rather than by simulation. Nodes are indexed `0..d` in the API;
//! the plain-text edge-list format uses 1-based labels (see [`io`]).

mod io;
mod oracle;
mod random;

pub use io::{read_dense_csv, read_edge_list, write_dense_csv, write_edge_list};
pub use oracle::{
    perron_eigenpair, second_eigenvalue_modulus, solve_poisson, stationary_distribution,
    PerronPair, PoissonSolution,
};
pub use random::{erdos_renyi_model, ErdosRenyiMeta};

use nalgebra::DMatrix;
use std::collections::BTreeSet;
use thiserror::Error;

/// Row sums of a stochastic matrix must match 1 to within this tolerance.
pub const ROW_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension must be at least 1")]
    EmptyDimension,
    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("row {row} sums to {sum}, expected 1 within {tol}")]
    RowSumViolation { row: usize, sum: f64, tol: f64 },
    #[error("row {row} has no positive entry")]
    ZeroRow { row: usize },
    #[error("matrix support is not irreducible (strongly connected)")]
    Reducible,
    #[error("weights must be strictly positive and sum to 1, got sum {sum}")]
    BadWeights { sum: f64 },
    #[error("edge ({i}, {j}) is out of bounds for {d} nodes")]
    EdgeOutOfBounds { i: usize, j: usize, d: usize },
    #[error("self-loop ({i}, {i}) is not a graph edge")]
    SelfLoop { i: usize },
    #[error("vector length {got} does not match dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("edge probability must lie in (0, 1], got {0}")]
    BadEdgeProbability(f64),
    #[error("could not sample a connected graph after {attempts} attempts")]
    DisconnectedSample { attempts: u32 },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Directed graph on nodes `0..d` with no self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    d: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(d: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, NetError> {
        if d == 0 {
            return Err(NetError::EmptyDimension);
        }
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if i >= d || j >= d {
                return Err(NetError::EdgeOutOfBounds { i, j, d });
            }
            if i == j {
                return Err(NetError::SelfLoop { i });
            }
            set.insert((i, j));
        }
        Ok(Self { d, edges: set })
    }

    pub fn node_count(&self) -> usize {
        self.d
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i, j))
    }

    /// Strong connectivity of the directed edge set.
    pub fn is_strongly_connected(&self) -> bool {
        let adj = adjacency_lists(self.d, self.edges.iter().copied());
        strongly_connected(&adj)
    }

    /// Connectivity when every edge is read as undirected.
    pub fn is_connected_undirected(&self) -> bool {
        let sym = self
            .edges
            .iter()
            .flat_map(|&(i, j)| [(i, j), (j, i)])
            .collect::<Vec<_>>();
        let adj = adjacency_lists(self.d, sym);
        reachable_from(&adj, 0).iter().all(|&r| r)
    }
}

/// Row-stochastic sampling matrix: the substrate of every pull/push scheme.
///
/// Construction validates nonnegativity and row sums; irreducibility and
/// aperiodicity are computed on demand from the support, never assumed.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    p: DMatrix<f64>,
}

impl StochasticMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, NetError> {
        let d = rows.len();
        if d == 0 {
            return Err(NetError::EmptyDimension);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(NetError::NotSquare { rows: d, cols: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                if v < 0.0 || !v.is_finite() {
                    return Err(NetError::NegativeEntry { row: i, col: j, value: v });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(NetError::RowSumViolation { row: i, sum, tol: ROW_SUM_TOL });
            }
        }
        let p = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
        Ok(Self { p })
    }

    pub fn from_matrix(p: DMatrix<f64>) -> Result<Self, NetError> {
        let rows: Vec<Vec<f64>> = (0..p.nrows()).map(|i| p.row(i).iter().copied().collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.p[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// Off-diagonal support as a directed graph.
    pub fn support_graph(&self) -> Graph {
        let d = self.dim();
        let edges = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && self.p[(i, j)] > 0.0);
        Graph::new(d, edges).expect("support edges are in bounds")
    }

    pub fn is_irreducible(&self) -> bool {
        self.dim() == 1 || self.support_graph().is_strongly_connected()
    }

    /// Period of the chain through node 0 (requires irreducibility).
    /// The chain is aperiodic iff this is 1.
    pub fn period(&self) -> usize {
        let d = self.dim();
        let edges: Vec<(usize, usize)> = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .filter(|&(i, j)| self.p[(i, j)] > 0.0)
            .collect();
        period_through_origin(d, &edges)
    }

    pub fn is_aperiodic(&self) -> bool {
        self.period() == 1
    }

    /// Sample an index from row `i` with a uniform draw `u` in `[0, 1)`.
    pub fn sample_row(&self, i: usize, u: f64) -> usize {
        let d = self.dim();
        let mut acc = 0.0;
        let mut last_positive = 0;
        for j in 0..d {
            let w = self.p[(i, j)];
            if w > 0.0 {
                last_positive = j;
                acc += w;
                if u < acc {
                    return j;
                }
            }
        }
        // Row sums to 1 within tolerance; u may exceed acc by <= ROW_SUM_TOL.
        last_positive
    }

    /// Average of row `i` against `x`: the exact one-step conditional mean.
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        (0..self.dim()).map(|j| self.p[(i, j)] * x[j]).sum()
    }

    /// Matrix-vector product `Px`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|i| self.row_dot(i, x)).collect()
    }
}

/// Nonnegative matrix with positive row sums, the ranking-side substrate.
#[derive(Debug, Clone, PartialEq)]
pub struct NonnegativeMatrix {
    q: DMatrix<f64>,
}

impl NonnegativeMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, NetError> {
        let d = rows.len();
        if d == 0 {
            return Err(NetError::EmptyDimension);
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(NetError::NotSquare { rows: d, cols: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                if v < 0.0 || !v.is_finite() {
                    return Err(NetError::NegativeEntry { row: i, col: j, value: v });
                }
            }
            if !row.iter().any(|&v| v > 0.0) {
                return Err(NetError::ZeroRow { row: i });
            }
        }
        let q = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
        Ok(Self { q })
    }

    pub fn from_matrix(q: DMatrix<f64>) -> Result<Self, NetError> {
        let rows: Vec<Vec<f64>> = (0..q.nrows()).map(|i| q.row(i).iter().copied().collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.q[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// Per-row sums, all strictly positive by construction.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.q.row(i).iter().sum()).collect()
    }

    pub fn is_irreducible(&self) -> bool {
        let d = self.dim();
        if d == 1 {
            return true;
        }
        let edges = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && self.q[(i, j)] > 0.0);
        let adj = adjacency_lists(d, edges);
        strongly_connected(&adj)
    }
}

fn adjacency_lists(d: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); d];
    for (i, j) in edges {
        adj[i].push(j);
    }
    adj
}

fn reachable_from(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen
}

/// Strong connectivity: every node reaches node 0 and is reached from it.
fn strongly_connected(adj: &[Vec<usize>]) -> bool {
    let d = adj.len();
    if !reachable_from(adj, 0).iter().all(|&r| r) {
        return false;
    }
    let mut rev = vec![Vec::new(); d];
    for (u, outs) in adj.iter().enumerate() {
        for &v in outs {
            rev[v].push(u);
        }
    }
    reachable_from(&rev, 0).iter().all(|&r| r)
}

/// Chain period via the BFS level trick: gcd over edges (u, v) of
/// |level(u) + 1 - level(v)|. Valid when all of `0..d` is reachable from 0.
fn period_through_origin(d: usize, edges: &[(usize, usize)]) -> usize {
    let adj = adjacency_lists(d, edges.iter().copied());
    let mut level = vec![i64::MIN; d];
    level[0] = 0;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if level[v] == i64::MIN {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let mut g: u64 = 0;
    for &(u, v) in edges {
        if level[u] != i64::MIN && level[v] != i64::MIN {
            let diff = (level[u] + 1 - level[v]).unsigned_abs();
            g = gcd(g, diff);
        }
    }
    g.max(1) as usize
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
