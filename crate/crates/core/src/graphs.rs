//! Interaction matrices: storage, the random and deterministic ensembles used
//! in the experiments, and the plain-text edge-list format.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, domain};

/// How the raw couplings of a matrix were normalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingTag {
    Raw,
    AvgDegree,
    ByN,
    ByNp,
    Sk,
    Hopfield,
}

impl ScalingTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalingTag::Raw => "raw",
            ScalingTag::AvgDegree => "avg_degree",
            ScalingTag::ByN => "by_n",
            ScalingTag::ByNp => "by_np",
            ScalingTag::Sk => "sk",
            ScalingTag::Hopfield => "hopfield",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "raw" => ScalingTag::Raw,
            "avg_degree" => ScalingTag::AvgDegree,
            "by_n" => ScalingTag::ByN,
            "by_np" => ScalingTag::ByNp,
            "sk" => ScalingTag::Sk,
            "hopfield" => ScalingTag::Hopfield,
            _ => return None,
        })
    }
}

/// A sparse symmetric coupling matrix with zero diagonal.
///
/// Edges are kept once in canonical `i < j` order, sorted, and mirrored into a
/// compressed row layout so that neighbor traversal costs `O(deg)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionMatrix {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    offsets: Vec<usize>,
    columns: Vec<usize>,
    values: Vec<f64>,
    scaling: ScalingTag,
}

impl InteractionMatrix {
    /// An `n`-node matrix with no couplings.
    pub fn zeros(n: usize) -> Self {
        Self::from_canonical(n, Vec::new(), ScalingTag::Raw)
    }

    /// Assembles a matrix from `(i, j, weight)` triples given in either
    /// orientation. A pair listed twice must carry the same weight both times.
    pub fn from_edges<I>(n: usize, edges: I, scaling: ScalingTag) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err(Error::InvalidSpec("node count must be at least 1".into()));
        }
        let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (i, j, w) in edges {
            for index in [i, j] {
                if index >= n {
                    return Err(Error::IndexOutOfRange { index, n });
                }
            }
            if i == j {
                return Err(Error::InvalidSpec(format!("diagonal entry ({i}, {i})")));
            }
            if !w.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "non-finite weight on ({i}, {j})"
                )));
            }
            let key = (i.min(j), i.max(j));
            if let Some(&prev) = map.get(&key) {
                if prev != w {
                    return Err(Error::AsymmetryConflict {
                        i: key.0,
                        j: key.1,
                        first: prev,
                        second: w,
                    });
                }
            } else {
                map.insert(key, w);
            }
        }
        let edges = map.into_iter().map(|((i, j), w)| (i, j, w)).collect();
        Ok(Self::from_canonical(n, edges, scaling))
    }

    /// `edges` must be sorted, canonical and free of duplicates.
    fn from_canonical(n: usize, edges: Vec<(usize, usize, f64)>, scaling: ScalingTag) -> Self {
        let mut degree = vec![0usize; n];
        for &(i, j, _) in &edges {
            degree[i] += 1;
            degree[j] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let nnz = offsets[n];
        let mut columns = vec![0usize; nnz];
        let mut values = vec![0.0; nnz];
        let mut cursor = offsets[..n].to_vec();
        // Canonical order fills every row with increasing column indices:
        // row r first receives its lower neighbors (as j), then upper (as i).
        for &(i, j, w) in &edges {
            columns[cursor[j]] = i;
            values[cursor[j]] = w;
            cursor[j] += 1;
        }
        for &(i, j, w) in &edges {
            columns[cursor[i]] = j;
            values[cursor[i]] = w;
            cursor[i] += 1;
        }
        for r in 0..n {
            let (lo, hi) = (offsets[r], offsets[r + 1]);
            debug_assert!(columns[lo..hi].windows(2).all(|w| w[0] < w[1]));
        }
        Self {
            n,
            edges,
            offsets,
            columns,
            values,
            scaling,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scaling(&self) -> ScalingTag {
        self.scaling
    }

    /// Canonical `(i, j, weight)` triples with `i < j`.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Column indices and weights of row `i`, sorted by column.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.offsets[i], self.offsets[i + 1]);
        (&self.columns[lo..hi], &self.values[lo..hi])
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (cols, vals) = self.row(i);
        cols.iter().copied().zip(vals.iter().copied())
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Entry `J[i][j]` (zero when absent or on the diagonal).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map(|k| vals[k]).unwrap_or(0.0)
    }

    /// Every weight multiplied by `factor`, relabelled with `tag`.
    pub fn scaled(&self, factor: f64, tag: ScalingTag) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|&(i, j, w)| (i, j, w * factor))
            .collect();
        Self::from_canonical(self.n, edges, tag)
    }

    /// Mean number of neighbors per node.
    pub fn average_degree(&self) -> f64 {
        2.0 * self.edges.len() as f64 / self.n as f64
    }

    /// The principal submatrix with row and column `node` deleted. Nodes above
    /// `node` shift down by one. Requires at least two nodes.
    pub fn without_node(&self, node: usize) -> Self {
        assert!(
            self.n >= 2 && node < self.n,
            "cannot delete node {node} of {}",
            self.n
        );
        let shift = |k: usize| if k > node { k - 1 } else { k };
        let edges = self
            .edges
            .iter()
            .filter(|&&(i, j, _)| i != node && j != node)
            .map(|&(i, j, w)| (shift(i), shift(j), w))
            .collect();
        Self::from_canonical(self.n - 1, edges, self.scaling)
    }

    /// Maximum absolute row sum, an upper bound on the spectral norm.
    pub fn spectral_norm_upper_bound(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).1.iter().map(|w| w.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Dense row-major copy; only sensible for small `n`.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.n]; self.n];
        for &(i, j, w) in &self.edges {
            dense[i][j] = w;
            dense[j][i] = w;
        }
        dense
    }

    /// Renders the edge-list text format, including the node-count and
    /// scaling header comments.
    pub fn to_edge_list_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# nodes: {}", self.n);
        let _ = writeln!(out, "# scaling: {}", self.scaling.as_str());
        for &(i, j, w) in &self.edges {
            let _ = writeln!(out, "{i} {j} {w}");
        }
        out
    }

    pub fn save_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_edge_list_string()).map_err(|e| Error::io(path, e))
    }
}

/// Parses an edge list for a graph on `n` nodes.
pub fn load_edge_list(path: impl AsRef<Path>, n: usize) -> Result<InteractionMatrix> {
    let parsed = parse_edge_list_file(path.as_ref())?;
    if let Some(declared) = parsed.declared_nodes {
        if declared > n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: declared,
            });
        }
    }
    InteractionMatrix::from_edges(n, parsed.edges, parsed.scaling)
}

/// Parses an edge list whose node count comes from its `# nodes:` header, or
/// failing that from the largest index present.
pub fn read_edge_list(path: impl AsRef<Path>) -> Result<InteractionMatrix> {
    let parsed = parse_edge_list_file(path.as_ref())?;
    let n = parsed.declared_nodes.unwrap_or_else(|| {
        parsed
            .edges
            .iter()
            .map(|&(i, j, _)| i.max(j) + 1)
            .max()
            .unwrap_or(1)
    });
    InteractionMatrix::from_edges(n, parsed.edges, parsed.scaling)
}

#[derive(Debug)]
struct ParsedEdgeList {
    declared_nodes: Option<usize>,
    scaling: ScalingTag,
    edges: Vec<(usize, usize, f64)>,
}

fn parse_edge_list_file(path: &Path) -> Result<ParsedEdgeList> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, path)
}

fn parse_edge_list(text: &str, path: &Path) -> Result<ParsedEdgeList> {
    let err = |line: usize, message: String| Error::ParseError {
        path: PathBuf::from(path),
        line,
        message,
    };
    let mut parsed = ParsedEdgeList {
        declared_nodes: None,
        scaling: ScalingTag::Raw,
        edges: Vec::new(),
    };
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let (content, comment) = match raw.find('#') {
            Some(k) => (&raw[..k], Some(raw[k + 1..].trim())),
            None => (raw, None),
        };
        if let Some(comment) = comment {
            if let Some(v) = comment.strip_prefix("nodes:") {
                let v = v.trim();
                parsed.declared_nodes = Some(
                    v.parse()
                        .map_err(|_| err(lineno, format!("bad node count {v:?}")))?,
                );
            } else if let Some(v) = comment.strip_prefix("scaling:") {
                let v = v.trim();
                parsed.scaling = ScalingTag::parse(v)
                    .ok_or_else(|| err(lineno, format!("unknown scaling {v:?}")))?;
            }
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        match fields.len() {
            0 => continue,
            3 => {}
            k => {
                return Err(err(
                    lineno,
                    format!("expected 3 fields \"i j weight\", found {k}"),
                ))
            }
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| err(lineno, format!("bad index {:?}", fields[0])))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| err(lineno, format!("bad index {:?}", fields[1])))?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| err(lineno, format!("bad weight {:?}", fields[2])))?;
        if i == j {
            return Err(err(
                lineno,
                format!("diagonal entry ({i}, {j}) is not allowed"),
            ));
        }
        if !w.is_finite() {
            return Err(err(lineno, format!("non-finite weight {w}")));
        }
        if let Some(n) = parsed.declared_nodes {
            if i.max(j) >= n {
                return Err(Error::IndexOutOfRange { index: i.max(j), n });
            }
        }
        parsed.edges.push((i, j, w));
    }
    Ok(parsed)
}

/// Graph family and its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleKind {
    /// Open-boundary path `0 - 1 - ... - (n-1)`.
    PathLattice1d,
    /// Open-boundary `m x m` grid, `n = m^2`.
    Lattice2d,
    ErdosRenyi {
        p: f64,
    },
    /// Stochastic block model; consecutive blocks of the given sizes.
    Sbm {
        sizes: Vec<usize>,
        p_within: f64,
        q_between: f64,
    },
    SherringtonKirkpatrick,
    Hopfield {
        m_attractors: usize,
    },
    EdgeListFile {
        path: PathBuf,
    },
}

impl EnsembleKind {
    /// Whether building this ensemble consumes randomness.
    pub fn is_random(&self) -> bool {
        matches!(
            self,
            EnsembleKind::ErdosRenyi { .. }
                | EnsembleKind::Sbm { .. }
                | EnsembleKind::SherringtonKirkpatrick
                | EnsembleKind::Hopfield { .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    #[serde(flatten)]
    pub kind: EnsembleKind,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, n: usize, seed: u64) -> Self {
        Self { kind, n, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::InvalidSpec("node count must be at least 1".into()));
        }
        let prob = |name: &str, p: f64, allow_zero: bool| {
            let ok = if allow_zero {
                (0.0..=1.0).contains(&p)
            } else {
                p > 0.0 && p <= 1.0
            };
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidSpec(format!(
                    "{name} = {p} is outside the allowed range"
                )))
            }
        };
        match &self.kind {
            EnsembleKind::Lattice2d => {
                let m = integer_sqrt(n);
                if m * m != n {
                    return Err(Error::InvalidSpec(format!(
                        "2-D lattice needs a perfect square node count, got {n}"
                    )));
                }
            }
            EnsembleKind::ErdosRenyi { p } => prob("p", *p, false)?,
            EnsembleKind::Sbm {
                sizes,
                p_within,
                q_between,
            } => {
                if sizes.iter().sum::<usize>() != n {
                    return Err(Error::InvalidSpec(format!(
                        "community sizes sum to {}, not {n}",
                        sizes.iter().sum::<usize>()
                    )));
                }
                prob("p_within", *p_within, true)?;
                prob("q_between", *q_between, true)?;
            }
            EnsembleKind::Hopfield { m_attractors } if *m_attractors == 0 => {
                return Err(Error::InvalidSpec(
                    "Hopfield model needs at least one attractor".into(),
                ));
            }
            _ => {}
        }
        Ok(())
    }
}

fn integer_sqrt(n: usize) -> usize {
    let mut m = (n as f64).sqrt() as usize;
    while m * m > n {
        m -= 1;
    }
    while (m + 1) * (m + 1) <= n {
        m += 1;
    }
    m
}

fn unit_edges(n: usize, edges: Vec<(usize, usize)>) -> InteractionMatrix {
    let edges = edges.into_iter().map(|(i, j)| (i, j, 1.0)).collect();
    InteractionMatrix::from_canonical(n, edges, ScalingTag::Raw)
}

fn scale_by_average_degree(adjacency: InteractionMatrix) -> Result<InteractionMatrix> {
    if adjacency.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let d_avg = adjacency.average_degree();
    Ok(adjacency.scaled(1.0 / d_avg, ScalingTag::AvgDegree))
}

/// Unscaled adjacency of the open path.
pub fn path_adjacency(n: usize) -> InteractionMatrix {
    unit_edges(n, (1..n).map(|i| (i - 1, i)).collect())
}

/// Unscaled adjacency of the open `m x m` grid.
pub fn grid_adjacency(m: usize) -> InteractionMatrix {
    let mut edges = Vec::with_capacity(2 * m * m);
    for r in 0..m {
        for c in 0..m {
            let v = r * m + c;
            if c + 1 < m {
                edges.push((v, v + 1));
            }
            if r + 1 < m {
                edges.push((v, v + m));
            }
        }
    }
    edges.sort_unstable();
    unit_edges(m * m, edges)
}

/// Builds the scaled coupling matrix for `spec`; deterministic in `spec`.
pub fn build_ensemble(spec: &EnsembleSpec) -> Result<InteractionMatrix> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = rng::stream(spec.seed, domain::GRAPH, 0);
    match &spec.kind {
        EnsembleKind::PathLattice1d => scale_by_average_degree(path_adjacency(n)),
        EnsembleKind::Lattice2d => scale_by_average_degree(grid_adjacency(integer_sqrt(n))),
        EnsembleKind::ErdosRenyi { p } => {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random::<f64>() < *p {
                        edges.push((i, j));
                    }
                }
            }
            Ok(unit_edges(n, edges).scaled(1.0 / (n as f64 * p), ScalingTag::ByNp))
        }
        EnsembleKind::Sbm {
            sizes,
            p_within,
            q_between,
        } => {
            let block: Vec<usize> = sizes
                .iter()
                .enumerate()
                .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
                .collect();
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    let p = if block[i] == block[j] {
                        *p_within
                    } else {
                        *q_between
                    };
                    if rng.random::<f64>() < p {
                        edges.push((i, j));
                    }
                }
            }
            scale_by_average_degree(unit_edges(n, edges))
        }
        EnsembleKind::SherringtonKirkpatrick => {
            let scale = 1.0 / (n as f64).sqrt();
            let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
            for i in 0..n {
                for j in i + 1..n {
                    let g: f64 = rng.sample(StandardNormal);
                    edges.push((i, j, g * scale));
                }
            }
            Ok(InteractionMatrix::from_canonical(n, edges, ScalingTag::Sk))
        }
        EnsembleKind::Hopfield { m_attractors } => {
            let m = *m_attractors;
            let patterns: Vec<i32> = (0..n * m)
                .map(|_| if rng.random::<bool>() { 1 } else { -1 })
                .collect();
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    let overlap: i32 = (0..m)
                        .map(|k| patterns[i * m + k] * patterns[j * m + k])
                        .sum();
                    if overlap != 0 {
                        edges.push((i, j, overlap as f64 / n as f64));
                    }
                }
            }
            Ok(InteractionMatrix::from_canonical(
                n,
                edges,
                ScalingTag::Hopfield,
            ))
        }
        EnsembleKind::EdgeListFile { path } => load_edge_list(path, n),
    }
}
