//! Finite metric spaces, probability measures and Markov kernels.
//!
//! A [`MetricSpace`] stores a dense distance matrix. Spaces are built either
//! from a weighted undirected graph (all-pairs shortest paths) or from an
//! explicit matrix that is validated as a metric. The canonical examples used
//! throughout the crate are available through [`build_example`].

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{check_len, Error, Result};

/// Slack allowed in the triangle inequality of a user-supplied matrix.
pub const TRIANGLE_TOL: f64 = 1e-9;
/// Slack allowed in the total mass of a probability vector.
pub const MASS_TOL: f64 = 1e-12;
/// Tolerance for detailed balance `μ(x)K(x,y) = μ(y)K(y,x)`.
pub const BALANCE_TOL: f64 = 1e-12;

/// First defect found while validating a distance matrix.
#[derive(Debug, Error, Clone, PartialEq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum MetricViolation {
    #[error("matrix is empty")]
    Empty,
    #[error("row {row} has length {len}, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("entry ({i}, {j}) is not finite")]
    NonFinite { i: usize, j: usize },
    #[error("diagonal entry ({i}, {i}) is {value}, expected 0")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("entry ({i}, {j}) is negative")]
    Negative { i: usize, j: usize },
    #[error("asymmetry at ({i}, {j}): {dij} vs {dji}")]
    Asymmetric { i: usize, j: usize, dij: f64, dji: f64 },
    #[error("distinct points {i} and {j} are at distance 0")]
    NotSeparated { i: usize, j: usize },
    #[error("triangle violation ({i}, {j}, {k}): d({i},{k}) = {direct} > {via}")]
    Triangle {
        i: usize,
        j: usize,
        k: usize,
        direct: f64,
        via: f64,
    },
}

/// A finite metric space with labelled points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
    n: usize,
}

impl MetricSpace {
    /// Validate `dist` as a metric and wrap it.
    pub fn from_matrix(dist: &[Vec<f64>], labels: Option<Vec<String>>) -> Result<Self> {
        validate_metric(dist)?;
        let n = dist.len();
        let labels = match labels {
            Some(l) => {
                check_len("labels", n, l.len())?;
                l
            }
            None => (0..n).map(|i| i.to_string()).collect(),
        };
        Ok(Self {
            labels,
            dist: dist.iter().flatten().copied().collect(),
            n,
        })
    }

    fn from_fn(labels: Vec<String>, d: impl Fn(usize, usize) -> f64) -> Self {
        let n = labels.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                dist[i * n + j] = d(i, j);
            }
        }
        Self { labels, dist, n }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn dist(&self, x: usize, y: usize) -> f64 {
        self.dist[x * self.n + y]
    }

    /// Distances from `x` to every point.
    #[inline]
    pub fn row(&self, x: usize) -> &[f64] {
        &self.dist[x * self.n..(x + 1) * self.n]
    }

    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Largest distance between two points of `support`.
    pub fn diameter_on(&self, support: &[usize]) -> f64 {
        let mut d: f64 = 0.0;
        for &x in support {
            for &y in support {
                d = d.max(self.dist(x, y));
            }
        }
        d
    }

    /// Points at distance exactly one from `x` (graph neighbours for unit graphs).
    pub fn unit_neighbours(&self, x: usize) -> Vec<usize> {
        (0..self.n).filter(|&y| (self.dist(x, y) - 1.0).abs() < 1e-12).collect()
    }
}

/// Check `dist` for squareness, finiteness, zero diagonal, non-negativity,
/// symmetry, separation and the triangle inequality, in that order.
///
/// The triangle defect is reported as `(i, j, k)` with
/// `d(i,k) > d(i,j) + d(j,k) + TRIANGLE_TOL`.
pub fn validate_metric(dist: &[Vec<f64>]) -> std::result::Result<(), MetricViolation> {
    let n = dist.len();
    if n == 0 {
        return Err(MetricViolation::Empty);
    }
    for (row, r) in dist.iter().enumerate() {
        if r.len() != n {
            return Err(MetricViolation::NotSquare { row, len: r.len(), n });
        }
    }
    for i in 0..n {
        for j in 0..n {
            if !dist[i][j].is_finite() {
                return Err(MetricViolation::NonFinite { i, j });
            }
        }
    }
    for i in 0..n {
        if dist[i][i] != 0.0 {
            return Err(MetricViolation::NonzeroDiagonal { i, value: dist[i][i] });
        }
    }
    for i in 0..n {
        for j in 0..n {
            if dist[i][j] < 0.0 {
                return Err(MetricViolation::Negative { i, j });
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if dist[i][j] != dist[j][i] {
                return Err(MetricViolation::Asymmetric {
                    i,
                    j,
                    dij: dist[i][j],
                    dji: dist[j][i],
                });
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if dist[i][j] == 0.0 {
                return Err(MetricViolation::NotSeparated { i, j });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let via = dist[i][j] + dist[j][k];
                if dist[i][k] > via + TRIANGLE_TOL {
                    return Err(MetricViolation::Triangle {
                        i,
                        j,
                        k,
                        direct: dist[i][k],
                        via,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Shortest-path metric of a connected weighted undirected graph.
///
/// Parallel edges keep the smallest weight. Weights must be finite and positive.
pub fn build_from_graph(n: usize, edges: &[(usize, usize, f64)]) -> Result<MetricSpace> {
    if n == 0 {
        return Err(Error::Range("graph must have at least one vertex".into()));
    }
    let mut d = vec![f64::INFINITY; n * n];
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    for &(a, b, w) in edges {
        let bad = |reason| Error::InvalidEdge {
            from: a,
            to: b,
            weight: w,
            reason,
        };
        if a >= n || b >= n {
            return Err(bad("vertex out of range"));
        }
        if a == b {
            return Err(bad("self-loop"));
        }
        if !(w.is_finite() && w > 0.0) {
            return Err(bad("weight must be finite and positive"));
        }
        if w < d[a * n + b] {
            d[a * n + b] = w;
            d[b * n + a] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if dik.is_infinite() {
                continue;
            }
            for j in 0..n {
                let via = dik + d[k * n + j];
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    if let Some(idx) = d.iter().position(|v| v.is_infinite()) {
        return Err(Error::Disconnected {
            from: idx / n,
            to: idx % n,
        });
    }
    Ok(MetricSpace {
        labels: (0..n).map(|i| i.to_string()).collect(),
        dist: d,
        n,
    })
}

/// Size limits for the canonical examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceLimits {
    pub hypercube_dim: usize,
    pub symmetric_group: usize,
    pub vertices: usize,
}

impl Default for SpaceLimits {
    fn default() -> Self {
        Self {
            hypercube_dim: 14,
            symmetric_group: 5,
            vertices: 4096,
        }
    }
}

/// Canonical example spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "n", rename_all = "snake_case")]
pub enum ExampleKind {
    TwoPoint,
    Hypercube(usize),
    Complete(usize),
    Path(usize),
    Cycle(usize),
    SymmetricGroup(usize),
}

impl fmt::Display for ExampleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExampleKind::TwoPoint => write!(f, "two-point"),
            ExampleKind::Hypercube(n) => write!(f, "hypercube({n})"),
            ExampleKind::Complete(n) => write!(f, "complete({n})"),
            ExampleKind::Path(n) => write!(f, "path({n})"),
            ExampleKind::Cycle(n) => write!(f, "cycle({n})"),
            ExampleKind::SymmetricGroup(n) => write!(f, "symmetric-group({n})"),
        }
    }
}

/// Accepts the display form (`hypercube(3)`) and `hypercube:3`.
impl std::str::FromStr for ExampleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if matches!(s.as_str(), "two-point" | "two_point" | "twopoint") {
            return Ok(ExampleKind::TwoPoint);
        }
        let (name, arg) = s
            .strip_suffix(')')
            .and_then(|r| r.split_once('('))
            .or_else(|| s.split_once(':'))
            .ok_or_else(|| Error::Range(format!("unknown example space '{s}'")))?;
        let n: usize = arg
            .trim()
            .parse()
            .map_err(|_| Error::Range(format!("bad size '{arg}' in '{s}'")))?;
        match name.trim() {
            "hypercube" => Ok(ExampleKind::Hypercube(n)),
            "complete" => Ok(ExampleKind::Complete(n)),
            "path" => Ok(ExampleKind::Path(n)),
            "cycle" => Ok(ExampleKind::Cycle(n)),
            "symmetric-group" | "symmetric_group" | "sym" => Ok(ExampleKind::SymmetricGroup(n)),
            other => Err(Error::Range(format!("unknown example space '{other}'"))),
        }
    }
}

pub fn build_example(kind: ExampleKind) -> Result<MetricSpace> {
    build_example_with_limits(kind, SpaceLimits::default())
}

pub fn build_example_with_limits(kind: ExampleKind, limits: SpaceLimits) -> Result<MetricSpace> {
    let cap = |kind: &'static str, requested: usize, limit: usize| {
        if requested > limit {
            Err(Error::Capacity { kind, requested, limit })
        } else {
            Ok(())
        }
    };
    let at_least = |what: &str, n: usize, min: usize| {
        if n < min {
            Err(Error::Range(format!("{what} needs n >= {min}, got {n}")))
        } else {
            Ok(())
        }
    };
    let numbered = |n: usize| (0..n).map(|i| i.to_string()).collect::<Vec<_>>();
    match kind {
        ExampleKind::TwoPoint => Ok(MetricSpace::from_fn(numbered(2), |i, j| if i == j { 0.0 } else { 1.0 })),
        ExampleKind::Hypercube(dim) => {
            at_least("hypercube", dim, 1)?;
            cap("hypercube", dim, limits.hypercube_dim)?;
            let labels = (0..1usize << dim).map(|v| format!("{v:0dim$b}")).collect();
            Ok(MetricSpace::from_fn(labels, |i, j| (i ^ j).count_ones() as f64))
        }
        ExampleKind::Complete(n) => {
            at_least("complete", n, 1)?;
            cap("complete", n, limits.vertices)?;
            Ok(MetricSpace::from_fn(numbered(n), |i, j| if i == j { 0.0 } else { 1.0 }))
        }
        ExampleKind::Path(n) => {
            at_least("path", n, 1)?;
            cap("path", n, limits.vertices)?;
            Ok(MetricSpace::from_fn(numbered(n), |i, j| i.abs_diff(j) as f64))
        }
        ExampleKind::Cycle(n) => {
            at_least("cycle", n, 3)?;
            cap("cycle", n, limits.vertices)?;
            Ok(MetricSpace::from_fn(numbered(n), |i, j| {
                let k = i.abs_diff(j);
                k.min(n - k) as f64
            }))
        }
        ExampleKind::SymmetricGroup(n) => {
            at_least("symmetric group", n, 1)?;
            cap("symmetric group", n, limits.symmetric_group)?;
            let perms = permutations(n);
            let labels = perms
                .iter()
                .map(|p| p.iter().map(|v| (v + 1).to_string()).collect::<String>())
                .collect();
            Ok(MetricSpace::from_fn(labels, |i, j| {
                cayley_distance(&perms[i], &perms[j]) as f64
            }))
        }
    }
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Minimal number of transpositions taking `a` to `b`.
pub fn cayley_distance(a: &[usize], b: &[usize]) -> usize {
    let n = a.len();
    let mut inv = vec![0; n];
    for (i, &v) in a.iter().enumerate() {
        inv[v] = i;
    }
    // σ = a⁻¹ ∘ b
    let sigma: Vec<usize> = b.iter().map(|&v| inv[v]).collect();
    let mut seen = vec![false; n];
    let mut cycles = 0;
    for s in 0..n {
        if !seen[s] {
            cycles += 1;
            let mut c = s;
            while !seen[c] {
                seen[c] = true;
                c = sigma[c];
            }
        }
    }
    n - cycles
}

/// A probability vector on the points of a space.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbMeasure {
    weights: Vec<f64>,
}

impl ProbMeasure {
    /// Non-negative finite weights summing to one within [`MASS_TOL`].
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidMeasure("empty weight vector".into()));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidMeasure(format!(
                "weight {i} is {} (must be finite and non-negative)",
                weights[i]
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(format!("total mass {total} != 1")));
        }
        Ok(Self { weights })
    }

    /// Rescale non-negative weights to unit mass.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total.is_finite() && total > 0.0) || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidMeasure(
                "weights must be non-negative with positive finite total".into(),
            ));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn dirac(n: usize, x: usize) -> Self {
        let mut weights = vec![0.0; n];
        weights[x] = 1.0;
        Self { weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&i| self.weights[i] > 0.0).collect()
    }

    /// `∫ f dμ`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, v)| w * v).sum()
    }

    pub(crate) fn check_space(&self, space: &MetricSpace) -> Result<()> {
        check_len("measure", space.len(), self.len())
    }
}

impl std::ops::Index<usize> for ProbMeasure {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.weights[i]
    }
}

/// A finite real function on the points of a space.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RealFunction(Vec<f64>);

impl RealFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction(format!("value {i} is not finite")));
        }
        Ok(Self(values))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for RealFunction {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn check_function(space: &MetricSpace, f: &[f64]) -> Result<()> {
    check_len("function", space.len(), f.len())?;
    if let Some(i) = f.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidFunction(format!("value {i} is not finite")));
    }
    Ok(())
}

/// A non-negative square matrix `K(x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelMatrix {
    entries: Vec<f64>,
    n: usize,
    row_stochastic: bool,
}

impl KernelMatrix {
    /// Non-negative finite entries; with `row_stochastic`, rows must sum to 1.
    pub fn new(entries: &[Vec<f64>], row_stochastic: bool) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::InvalidKernel("empty kernel".into()));
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidKernel(format!("row {i} is not of length {n}")));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidKernel(format!(
                    "entry ({i}, {j}) must be finite and non-negative"
                )));
            }
            if row_stochastic {
                let s: f64 = row.iter().sum();
                if (s - 1.0).abs() > MASS_TOL {
                    return Err(Error::InvalidKernel(format!("row {i} sums to {s}")));
                }
            }
        }
        Ok(Self {
            entries: entries.iter().flatten().copied().collect(),
            n,
            row_stochastic,
        })
    }

    /// Simple random walk on the unit-distance graph of `space`.
    pub fn nearest_neighbour(space: &MetricSpace) -> Result<Self> {
        let n = space.len();
        let mut rows = vec![vec![0.0; n]; n];
        for (x, row) in rows.iter_mut().enumerate() {
            let nb = space.unit_neighbours(x);
            if nb.is_empty() {
                return Err(Error::InvalidKernel(format!(
                    "point {x} has no neighbour at distance 1"
                )));
            }
            for y in &nb {
                row[*y] = 1.0 / nb.len() as f64;
            }
        }
        Self::new(&rows, true)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_row_stochastic(&self) -> bool {
        self.row_stochastic
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.entries[x * self.n + y]
    }
}

/// `L = max_x Σ_y d(x,y)² K(x,y)`.
pub fn kernel_moment_l(space: &MetricSpace, kernel: &KernelMatrix) -> Result<f64> {
    check_len("kernel", space.len(), kernel.len())?;
    let n = space.len();
    Ok((0..n)
        .map(|x| (0..n).map(|y| space.dist(x, y).powi(2) * kernel.get(x, y)).sum::<f64>())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetailedBalance {
    pub holds: bool,
    pub max_defect: f64,
    pub worst: Option<(usize, usize)>,
}

pub fn check_detailed_balance(mu: &ProbMeasure, kernel: &KernelMatrix) -> Result<DetailedBalance> {
    check_len("kernel", mu.len(), kernel.len())?;
    let n = mu.len();
    let mut max_defect = 0.0;
    let mut worst = None;
    for x in 0..n {
        for y in x + 1..n {
            let defect = (mu[x] * kernel.get(x, y) - mu[y] * kernel.get(y, x)).abs();
            if defect > max_defect {
                max_defect = defect;
                worst = Some((x, y));
            }
        }
    }
    Ok(DetailedBalance {
        holds: max_defect <= BALANCE_TOL,
        max_defect,
        worst,
    })
}

/// On-disk description of a space: a weighted edge list or a distance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceFile {
    Graph {
        n: usize,
        /// `[i, j]` or `[i, j, w]`; the weight defaults to 1.
        edges: Vec<Vec<f64>>,
    },
    Matrix {
        dist: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
}

impl SpaceFile {
    pub fn build(&self) -> Result<MetricSpace> {
        match self {
            SpaceFile::Graph { n, edges } => {
                let mut parsed = Vec::with_capacity(edges.len());
                for e in edges {
                    let index = |v: f64| {
                        if v >= 0.0 && v.fract() == 0.0 && v < usize::MAX as f64 {
                            Ok(v as usize)
                        } else {
                            Err(Error::Range(format!("edge endpoint {v} is not an index")))
                        }
                    };
                    let (a, b, w) = match e.as_slice() {
                        [a, b] => (index(*a)?, index(*b)?, 1.0),
                        [a, b, w] => (index(*a)?, index(*b)?, *w),
                        _ => {
                            return Err(Error::Range(format!(
                                "edge must be [i, j] or [i, j, w], got {} entries",
                                e.len()
                            )))
                        }
                    };
                    parsed.push((a, b, w));
                }
                build_from_graph(*n, &parsed)
            }
            SpaceFile::Matrix { dist, labels } => MetricSpace::from_matrix(dist, labels.clone()),
        }
    }
}
