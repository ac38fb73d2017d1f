//! Erdős–Rényi graph generation, Laplacian assembly, twin detection and trap
//! placement.
//!
//! Graphs are simple and undirected: no self-loops, no multi-edges. Nodes are
//! 0-based contiguous integers. All values are immutable after construction.

use std::io::{BufRead, Write};

use ndarray::Array2;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QwalkError, Result};
use crate::seeds;

/// Parameters of a G(N, p) ensemble draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErParams {
    pub n: usize,
    pub p: f64,
    pub seed: u64,
}

impl ErParams {
    pub fn new(n: usize, p: f64, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(QwalkError::Config(format!("n must be >= 2, got {n}")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(QwalkError::Config(format!("p must be in [0,1], got {p}")));
        }
        Ok(Self { n, p, seed })
    }

    /// Mean degree z̄ = pN used throughout for analytical comparisons.
    ///
    /// The exact finite-N binomial mean is p(N−1); at N = 40 the two differ
    /// by 2.5%. We use pN consistently so predicted quantities line up with
    /// the large-N formulas they come from.
    pub fn mean_degree(&self) -> f64 {
        self.p * self.n as f64
    }
}

/// Undirected simple graph stored as an edge list plus a dense adjacency
/// lookup. The working regime is N up to a couple thousand, dense is fine.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<bool>,
    degrees: Vec<usize>,
}

impl Graph {
    /// Build from an explicit edge list. Pairs are normalized to (min, max);
    /// duplicates and self-loops are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph {
            n,
            edges: Vec::with_capacity(edges.len()),
            adjacency: vec![false; n * n],
            degrees: vec![0; n],
        };
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        g.edges.sort_unstable();
        Ok(g)
    }

    fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        if a == b || a >= self.n || b >= self.n {
            return Err(QwalkError::Config(format!(
                "invalid edge ({a}, {b}) for n={}",
                self.n
            )));
        }
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        if self.adjacency[i * self.n + j] {
            return Err(QwalkError::Config(format!("duplicate edge ({i}, {j})")));
        }
        self.adjacency[i * self.n + j] = true;
        self.adjacency[j * self.n + i] = true;
        self.degrees[i] += 1;
        self.degrees[j] += 1;
        self.edges.push((i, j));
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as sorted (i, j) pairs with i < j.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.adjacency[i * self.n + j]
    }

    /// Dense adjacency matrix A with A_ij ∈ {0, 1} and zero diagonal.
    pub fn adjacency_matrix(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.n, self.n));
        for &(i, j) in &self.edges {
            a[[i, j]] = 1.0;
            a[[j, i]] = 1.0;
        }
        a
    }

    /// Graph Laplacian L = D − A: degree on the diagonal, −1 on edges.
    /// Symmetric with all row sums exactly zero.
    pub fn laplacian(&self) -> Array2<f64> {
        let mut l = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            l[[i, i]] = self.degrees[i] as f64;
        }
        for &(i, j) in &self.edges {
            l[[i, j]] = -1.0;
            l[[j, i]] = -1.0;
        }
        l
    }

    /// Breadth-first connectivity check. Returns (connected, component count).
    pub fn connectivity(&self) -> (bool, usize) {
        let mut seen = vec![false; self.n];
        let mut components = 0;
        let mut queue = std::collections::VecDeque::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for u in 0..self.n {
                    if !seen[u] && self.adjacency[v * self.n + u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
        }
        (components == 1, components)
    }

    pub fn is_connected(&self) -> bool {
        self.connectivity().0
    }

    /// All twin pairs (i, j): every other vertex is adjacent to both or to
    /// neither. For each pair the Laplacian eigenvalue of the associated
    /// Faria vector is z_i + 1 when (i, j) is an edge and z_i otherwise.
    pub fn find_twin_pairs(&self) -> TwinReport {
        let mut pairs = Vec::new();
        for i in 0..self.n {
            'next: for j in (i + 1)..self.n {
                for v in 0..self.n {
                    if v == i || v == j {
                        continue;
                    }
                    if self.adjacency[v * self.n + i] != self.adjacency[v * self.n + j] {
                        continue 'next;
                    }
                }
                let adjacent = self.has_edge(i, j);
                let eigenvalue = if adjacent {
                    self.degrees[i] as f64 + 1.0
                } else {
                    self.degrees[i] as f64
                };
                pairs.push(TwinPair {
                    i,
                    j,
                    adjacent,
                    eigenvalue,
                });
            }
        }
        // Greedy node-disjoint selection in lexicographic pair order. The
        // plateau estimate only needs n_F to modest precision, so a maximum
        // matching is not required.
        let mut used = vec![false; self.n];
        let mut disjoint_count = 0;
        for p in &pairs {
            if !used[p.i] && !used[p.j] {
                used[p.i] = true;
                used[p.j] = true;
                disjoint_count += 1;
            }
        }
        TwinReport {
            pairs,
            disjoint_count,
        }
    }

    /// Edge-list text format: header `# n=<N> p=<p> seed=<seed>`, then one
    /// `i j` pair per line.
    pub fn write_edge_list<W: Write>(&self, mut w: W, params: Option<&ErParams>) -> Result<()> {
        match params {
            Some(p) => writeln!(w, "# n={} p={} seed={}", self.n, p.p, p.seed)?,
            None => writeln!(w, "# n={}", self.n)?,
        }
        for &(i, j) in &self.edges {
            writeln!(w, "{i} {j}")?;
        }
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Self> {
        let mut n = None;
        let mut edges = Vec::new();
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                for tok in rest.split_whitespace() {
                    if let Some(v) = tok.strip_prefix("n=") {
                        n = Some(v.parse::<usize>().map_err(|e| {
                            QwalkError::Config(format!("bad n in edge list header: {e}"))
                        })?);
                    }
                }
                continue;
            }
            let mut it = line.split_whitespace();
            let (a, b) = (it.next(), it.next());
            match (a, b) {
                (Some(a), Some(b)) => {
                    let a = a
                        .parse()
                        .map_err(|e| QwalkError::Config(format!("bad edge line {line:?}: {e}")))?;
                    let b = b
                        .parse()
                        .map_err(|e| QwalkError::Config(format!("bad edge line {line:?}: {e}")))?;
                    edges.push((a, b));
                }
                _ => return Err(QwalkError::Config(format!("bad edge line {line:?}"))),
            }
        }
        let n = n.ok_or_else(|| QwalkError::Config("edge list missing `# n=` header".into()))?;
        Graph::from_edges(n, &edges)
    }
}

/// One twin pair plus the Laplacian eigenvalue of its Faria vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwinPair {
    pub i: usize,
    pub j: usize,
    pub adjacent: bool,
    pub eigenvalue: f64,
}

#[derive(Debug, Clone)]
pub struct TwinReport {
    pub pairs: Vec<TwinPair>,
    /// n_F: size of a maximal set of pairwise node-disjoint twin pairs
    /// (greedy selection in lexicographic order).
    pub disjoint_count: usize,
}

/// Outcome of a connected-graph draw: the graph and how many samples were
/// rejected as disconnected before it.
#[derive(Debug, Clone)]
pub struct ErDraw {
    pub graph: Graph,
    pub attempts: usize,
}

/// Sample G(n, p). Every unordered pair becomes an edge independently with
/// probability p under the seeded RNG.
pub fn sample_er(params: &ErParams, rng: &mut impl Rng) -> Graph {
    let n = params.n;
    let mut g = Graph {
        n,
        edges: Vec::new(),
        adjacency: vec![false; n * n],
        degrees: vec![0; n],
    };
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < params.p {
                g.adjacency[i * n + j] = true;
                g.adjacency[j * n + i] = true;
                g.degrees[i] += 1;
                g.degrees[j] += 1;
                g.edges.push((i, j));
            }
        }
    }
    g
}

/// Draw a G(n, p) graph; when `require_connected`, resample whole graphs
/// until one is connected, which preserves the conditional
/// G(n, p | connected) law. Fails after `max_attempts` rejections.
pub fn generate_er(
    params: &ErParams,
    require_connected: bool,
    max_attempts: usize,
) -> Result<ErDraw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive(params.seed, seeds::STREAM_GRAPH));
    let mut attempts = 0;
    loop {
        attempts += 1;
        let g = sample_er(params, &mut rng);
        if !require_connected || g.is_connected() {
            return Ok(ErDraw { graph: g, attempts });
        }
        if attempts >= max_attempts {
            return Err(QwalkError::ConnectivityExhausted {
                n: params.n,
                p: params.p,
                attempts,
            });
        }
    }
}

/// Default resampling budget for connected draws.
pub const DEFAULT_MAX_ATTEMPTS: usize = 1000;

/// M trap nodes sharing one capture strength Γ.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapConfig {
    trap_nodes: Vec<usize>,
    pub capture_strength: f64,
}

impl TrapConfig {
    /// Build from explicit node indices; stored sorted, must be distinct and
    /// leave at least one free node.
    pub fn new(n: usize, mut trap_nodes: Vec<usize>, capture_strength: f64) -> Result<Self> {
        if trap_nodes.len() >= n {
            return Err(QwalkError::TooManyTraps {
                m: trap_nodes.len(),
                n,
            });
        }
        trap_nodes.sort_unstable();
        trap_nodes.dedup();
        if trap_nodes.iter().any(|&m| m >= n) {
            return Err(QwalkError::Config("trap index out of range".into()));
        }
        Ok(Self {
            trap_nodes,
            capture_strength,
        })
    }

    pub fn trap_nodes(&self) -> &[usize] {
        &self.trap_nodes
    }

    pub fn trap_count(&self) -> usize {
        self.trap_nodes.len()
    }

    pub fn is_trap(&self, node: usize) -> bool {
        self.trap_nodes.binary_search(&node).is_ok()
    }
}

/// Place `m` distinct traps uniformly without replacement. The RNG stream is
/// independent of the graph stream so varying M keeps the topology fixed.
pub fn place_traps(g: &Graph, m: usize, gamma: f64, seed: u64) -> Result<TrapConfig> {
    let n = g.node_count();
    if m >= n {
        return Err(QwalkError::TooManyTraps { m, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive(seed, seeds::STREAM_TRAPS));
    let nodes = sample(&mut rng, n, m).into_vec();
    TrapConfig::new(n, nodes, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_one_gives_complete_graph() {
        let params = ErParams::new(5, 1.0, 123).unwrap();
        let draw = generate_er(&params, true, 10).unwrap();
        assert_eq!(draw.graph.edge_count(), 10);
        assert!(draw.graph.degrees().iter().all(|&z| z == 4));
        assert_eq!(draw.attempts, 1);
    }

    #[test]
    fn p_zero_exhausts_connectivity() {
        let params = ErParams::new(5, 0.0, 7).unwrap();
        let err = generate_er(&params, true, 20).unwrap_err();
        match err {
            QwalkError::ConnectivityExhausted { attempts, .. } => assert_eq!(attempts, 20),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn mean_degree_matches_binomial() {
        // 10 seeds at n=1000, p=0.1: sample mean within 3 standard errors of
        // p(N-1). The mean degree is 2E/N, so its variance per graph is
        // 4 Var(E)/N^2 = 2(N-1)p(1-p)/N.
        let n = 1000;
        let p = 0.1;
        let runs = 10;
        let mut total = 0usize;
        for seed in 0..runs as u64 {
            let params = ErParams::new(n, p, seed).unwrap();
            let draw = generate_er(&params, false, 1).unwrap();
            total += draw.graph.degrees().iter().sum::<usize>();
        }
        let mean = total as f64 / (n * runs) as f64;
        let expect = p * (n as f64 - 1.0);
        let se = (2.0 * (n as f64 - 1.0) * p * (1.0 - p) / (n * runs) as f64).sqrt();
        assert!(
            (mean - expect).abs() < 3.0 * se,
            "mean {mean} vs {expect} (se {se})"
        );
    }

    #[test]
    fn laplacian_single_edge() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let l = g.laplacian();
        assert_eq!(l, ndarray::array![[1.0, -1.0], [-1.0, 1.0]]);
    }

    #[test]
    fn laplacian_k3() {
        let g = Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let l = g.laplacian();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 2.0 } else { -1.0 };
                assert_eq!(l[[i, j]], expect);
            }
        }
    }

    #[test]
    fn laplacian_row_sums_and_symmetry() {
        let params = ErParams::new(20, 0.3, 99).unwrap();
        let g = generate_er(&params, false, 1).unwrap().graph;
        let l = g.laplacian();
        for i in 0..20 {
            let row_sum: f64 = (0..20).map(|j| l[[i, j]]).sum();
            assert_eq!(row_sum, 0.0);
            for j in 0..20 {
                assert_eq!(l[[i, j]], l[[j, i]]);
            }
        }
    }

    #[test]
    fn connectivity_counts_components() {
        let k5 = Graph::from_edges(
            5,
            &[
                (0, 1),
                (0, 2),
                (0, 3),
                (0, 4),
                (1, 2),
                (1, 3),
                (1, 4),
                (2, 3),
                (2, 4),
                (3, 4),
            ],
        )
        .unwrap();
        assert_eq!(k5.connectivity(), (true, 1));

        let isolated = Graph::from_edges(5, &[]).unwrap();
        assert_eq!(isolated.connectivity(), (false, 5));

        let two_triangles =
            Graph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]).unwrap();
        assert_eq!(two_triangles.connectivity(), (false, 2));
    }

    #[test]
    fn twins_in_k4() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let report = g.find_twin_pairs();
        assert_eq!(report.pairs.len(), 6);
        assert!(report.pairs.iter().all(|p| p.adjacent));
        assert!(report.pairs.iter().all(|p| p.eigenvalue == 4.0));
        assert_eq!(report.disjoint_count, 2);
    }

    #[test]
    fn twins_in_path() {
        // a - b - c: endpoints are non-adjacent twins with eigenvalue 1.
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let report = g.find_twin_pairs();
        assert_eq!(report.pairs.len(), 1);
        let p = report.pairs[0];
        assert_eq!((p.i, p.j, p.adjacent), (0, 2, false));
        assert_eq!(p.eigenvalue, 1.0);
        // Faria vector (1, 0, -1) must satisfy L xi = 1 * xi.
        let l = g.laplacian();
        let xi = ndarray::array![1.0, 0.0, -1.0];
        let lx = l.dot(&xi);
        for k in 0..3 {
            assert!((lx[k] - p.eigenvalue * xi[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn place_traps_contract() {
        let params = ErParams::new(40, 0.5, 11).unwrap();
        let g = generate_er(&params, true, 100).unwrap().graph;

        let empty = place_traps(&g, 0, 0.1, 1).unwrap();
        assert_eq!(empty.trap_count(), 0);

        let t = place_traps(&g, 16, 0.1, 5).unwrap();
        assert_eq!(t.trap_count(), 16);
        assert!(t.trap_nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(t.trap_nodes().iter().all(|&m| m < 40));

        let again = place_traps(&g, 16, 0.1, 5).unwrap();
        assert_eq!(t, again);

        assert!(matches!(
            place_traps(&g, 40, 0.1, 5),
            Err(QwalkError::TooManyTraps { .. })
        ));
    }

    #[test]
    fn edge_list_round_trip() {
        let params = ErParams::new(12, 0.4, 3).unwrap();
        let g = generate_er(&params, false, 1).unwrap().graph;
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf, Some(&params)).unwrap();
        let back = Graph::read_edge_list(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(g.edges(), back.edges());
        assert_eq!(g.node_count(), back.node_count());
    }
}
