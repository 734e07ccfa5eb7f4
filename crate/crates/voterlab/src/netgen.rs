//! Samplers for rank-one random graphs and structural analysis.
//!
//! Vertices are 0-indexed internally; the weight rank of vertex `v` is
//! `v + 1`, so low-index vertices are the hubs. With weight exponent
//! `gamma` and density `beta`, the pair intensity is
//! `lambda(i, j) = beta * N^(2 gamma - 1) * i^-gamma * j^-gamma`
//! (ranks `i`, `j`). The four samplers share that intensity:
//!
//! * soft norm ([`gen_snr`]): simple graph, edge probability `1 - exp(-lambda)`,
//! * multigraph ([`gen_mnr`]): `Pois(lambda)` parallel edges per pair,
//!   including loops at `i = j`,
//! * hard cap ([`gen_chung_lu`]): edge probability `min(1, lambda)`,
//! * uniform ([`gen_er`]): edge probability `min(1, beta / N)`.
//!
//! Every pair decision hashes (seed, i, j), so realizations are independent
//! of iteration order and monotone-coupled in `beta` at fixed seed. Above
//! [`NAIVE_CAP`] vertices the simple-graph samplers switch from the O(N^2)
//! pair scan to geometric skip-sampling under a decreasing envelope.

use std::io::{self, BufRead, Write};

use rand::RngCore;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::rng::{derive_seed, pair_unit, unit_f64, SplitMix64};
use crate::{Error, Result};

/// Which of the four shared-intensity graph laws to sample.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Simple graph, `P(edge) = 1 - exp(-lambda)`.
    #[default]
    Snr,
    /// Multigraph with `Pois(lambda)` edges per pair, loops included.
    Mnr,
    /// Simple graph, `P(edge) = min(1, lambda)`.
    ChungLu,
    /// Erdos-Renyi, `P(edge) = min(1, beta / N)`.
    Er,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Variant::Snr => "snr",
            Variant::Mnr => "mnr",
            Variant::ChungLu => "chung_lu",
            Variant::Er => "er",
        };
        f.write_str(s)
    }
}

/// Parameters of one graph draw.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NetworkParams {
    pub n: usize,
    pub beta: f64,
    pub gamma: f64,
    pub variant: Variant,
    pub seed: u64,
}

impl NetworkParams {
    pub fn new(n: usize, beta: f64, gamma: f64, variant: Variant, seed: u64) -> Self {
        NetworkParams {
            n,
            beta,
            gamma,
            variant,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "beta must be positive and finite, got {}",
                self.beta
            )));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::InvalidParams(format!(
                "gamma must lie in [0, 1), got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Number of vertices up to which the simple-graph samplers scan all pairs.
pub const NAIVE_CAP: usize = 20_000;

const EDGE_DOMAIN: u64 = 0x6f2d_11aa_03c4_9be7;
const MULT_DOMAIN: u64 = 0x41b9_c5d2_7788_f013;
const SKIP_DOMAIN: u64 = 0xd00f_3e21_55ab_6c48;

/// Undirected graph in compressed adjacency form. Multigraphs keep parallel
/// edges as repeated neighbor slots and each loop as two self-slots, so
/// `degree(v)` is the usual multigraph degree and `sum(degrees) = 2 * edges`.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    nbrs: Vec<u32>,
    eids: Vec<u32>,
    edges: Vec<(u32, u32)>,
    mult: Vec<u32>,
    loops: Vec<u32>,
    degrees: Vec<u32>,
}

/// Slot marker for loop entries, which have no undirected edge id.
pub const LOOP_SLOT: u32 = u32::MAX;

impl Graph {
    /// Builds a simple graph from undirected edges (any endpoint order).
    pub fn from_edges(n: usize, edge_list: &[(u32, u32)]) -> Result<Graph> {
        let weighted: Vec<(u32, u32, u32)> =
            edge_list.iter().map(|&(a, b)| (a, b, 1)).collect();
        Graph::build(n, weighted, vec![])
    }

    /// Builds a multigraph from (endpoint, endpoint, multiplicity) triples and
    /// per-vertex loop counts (`loops` may be empty or length `n`).
    pub fn multigraph(n: usize, edge_list: &[(u32, u32, u32)], loops: &[u32]) -> Result<Graph> {
        if !loops.is_empty() && loops.len() != n {
            return Err(Error::InvalidParams(
                "loop counts must be empty or one per vertex".into(),
            ));
        }
        let loops = if loops.iter().any(|&c| c > 0) {
            loops.to_vec()
        } else {
            vec![]
        };
        Graph::build(n, edge_list.to_vec(), loops)
    }

    fn build(n: usize, mut edge_list: Vec<(u32, u32, u32)>, loops: Vec<u32>) -> Result<Graph> {
        for e in edge_list.iter_mut() {
            let (a, b, m) = *e;
            if a as usize >= n || b as usize >= n {
                return Err(Error::InvalidParams(format!(
                    "edge ({a}, {b}) out of range for n = {n}"
                )));
            }
            if a == b {
                return Err(Error::InvalidParams(format!(
                    "loop at vertex {a} must go in the loop counts, not the edge list"
                )));
            }
            if m == 0 {
                return Err(Error::InvalidParams("zero edge multiplicity".into()));
            }
            *e = (a.min(b), a.max(b), m);
        }
        edge_list.sort_unstable();
        for w in edge_list.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::InvalidParams(format!(
                    "duplicate edge ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }

        let mut degrees = vec![0u32; n];
        for &(a, b, m) in &edge_list {
            degrees[a as usize] += m;
            degrees[b as usize] += m;
        }
        for (v, &c) in loops.iter().enumerate() {
            degrees[v] += 2 * c;
        }

        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degrees[v] as usize;
        }
        let slots = offsets[n];
        let mut nbrs = vec![0u32; slots];
        let mut eids = vec![0u32; slots];
        let mut cursor = offsets.clone();
        for (e, &(a, b, m)) in edge_list.iter().enumerate() {
            for _ in 0..m {
                nbrs[cursor[a as usize]] = b;
                eids[cursor[a as usize]] = e as u32;
                cursor[a as usize] += 1;
                nbrs[cursor[b as usize]] = a;
                eids[cursor[b as usize]] = e as u32;
                cursor[b as usize] += 1;
            }
        }
        for (v, &c) in loops.iter().enumerate() {
            for _ in 0..2 * c {
                nbrs[cursor[v]] = v as u32;
                eids[cursor[v]] = LOOP_SLOT;
                cursor[v] += 1;
            }
        }
        for v in 0..n {
            let (lo, hi) = (offsets[v], offsets[v + 1]);
            let mut zipped: Vec<(u32, u32)> = nbrs[lo..hi]
                .iter()
                .zip(&eids[lo..hi])
                .map(|(&x, &y)| (x, y))
                .collect();
            zipped.sort_unstable();
            for (k, (nb, id)) in zipped.into_iter().enumerate() {
                nbrs[lo + k] = nb;
                eids[lo + k] = id;
            }
        }

        let edges: Vec<(u32, u32)> = edge_list.iter().map(|&(a, b, _)| (a, b)).collect();
        let mult: Vec<u32> = edge_list.iter().map(|&(_, _, m)| m).collect();
        Ok(Graph {
            n,
            offsets,
            nbrs,
            eids,
            edges,
            mult,
            loops,
            degrees,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Count of distinct non-loop edges.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Distinct non-loop edges as (low, high) pairs, sorted.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Multiplicity of the k-th edge in [`edges`](Self::edges).
    pub fn multiplicity(&self, e: usize) -> u32 {
        self.mult[e]
    }

    /// Loop count at `v` (always 0 for simple graphs).
    pub fn loop_count(&self, v: usize) -> u32 {
        self.loops.get(v).copied().unwrap_or(0)
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.degrees[v]
    }

    /// Neighbor slots of `v`, one per incident edge end (parallel edges
    /// repeat, each loop appears twice).
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.nbrs[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Edge ids parallel to [`neighbors`](Self::neighbors); loops hold
    /// [`LOOP_SLOT`].
    pub fn edge_ids(&self, v: usize) -> &[u32] {
        &self.eids[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn is_simple(&self) -> bool {
        self.loops.is_empty() && self.mult.iter().all(|&m| m == 1)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors(a).binary_search(&(b as u32)).is_ok()
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Drops loops and collapses parallel edges, yielding the simple graph.
    pub fn flatten(&self) -> Graph {
        Graph::from_edges(self.n, &self.edges).expect("flattening preserves validity")
    }

    /// Subgraph induced by `verts` (deduplicated), with vertices renumbered
    /// in increasing original order.
    pub fn induced(&self, verts: &[u32]) -> Graph {
        let mut keep = verts.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut index = vec![u32::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            index[old as usize] = new as u32;
        }
        let mut edge_list = Vec::new();
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            let (ia, ib) = (index[a as usize], index[b as usize]);
            if ia != u32::MAX && ib != u32::MAX {
                edge_list.push((ia, ib, self.mult[e]));
            }
        }
        let loops: Vec<u32> = if self.loops.is_empty() {
            vec![]
        } else {
            keep.iter().map(|&old| self.loops[old as usize]).collect()
        };
        Graph::build(keep.len(), edge_list, loops).expect("induced subgraph is valid")
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for i in 0..n as u32 {
            for j in (i + 1)..n as u32 {
                edges.push((i, j));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn path(n: usize) -> Graph {
        let edges: Vec<(u32, u32)> = (1..n as u32).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let mut edges: Vec<(u32, u32)> = (1..n as u32).map(|i| (i - 1, i)).collect();
        edges.push((n as u32 - 1, 0));
        Graph::from_edges(n, &edges).unwrap()
    }

    /// Star with vertex 0 as the center and `leaves` pendant vertices.
    pub fn star(leaves: usize) -> Graph {
        let edges: Vec<(u32, u32)> = (1..=leaves as u32).map(|j| (0, j)).collect();
        Graph::from_edges(leaves + 1, &edges).unwrap()
    }

    /// Disjoint union; vertex blocks keep the argument order.
    pub fn disjoint_union(parts: &[&Graph]) -> Graph {
        let n: usize = parts.iter().map(|g| g.n).sum();
        let mut edge_list = Vec::new();
        let mut loops = vec![0u32; n];
        let mut base = 0u32;
        let mut any_loops = false;
        for g in parts {
            for (e, &(a, b)) in g.edges.iter().enumerate() {
                edge_list.push((base + a, base + b, g.mult[e]));
            }
            for v in 0..g.n {
                let c = g.loop_count(v);
                if c > 0 {
                    loops[(base as usize) + v] = c;
                    any_loops = true;
                }
            }
            base += g.n as u32;
        }
        let loops = if any_loops { loops } else { vec![] };
        Graph::build(n, edge_list, loops).expect("union of valid graphs is valid")
    }

    /// Writes `n lines` followed by one line per entry: `i j` for simple
    /// graphs, `i j count` for multigraphs (loops as `v v count`), vertices
    /// 1-indexed, sorted.
    pub fn write_edge_list<W: Write>(&self, out: &mut W) -> io::Result<()> {
        if self.is_simple() {
            writeln!(out, "{} {}", self.n, self.edges.len())?;
            for &(a, b) in &self.edges {
                writeln!(out, "{} {}", a + 1, b + 1)?;
            }
        } else {
            let mut entries: Vec<(u32, u32, u32)> = self
                .edges
                .iter()
                .zip(&self.mult)
                .map(|(&(a, b), &m)| (a, b, m))
                .collect();
            for (v, &c) in self.loops.iter().enumerate() {
                if c > 0 {
                    entries.push((v as u32, v as u32, c));
                }
            }
            entries.sort_unstable();
            writeln!(out, "{} {}", self.n, entries.len())?;
            for (a, b, m) in entries {
                writeln!(out, "{} {} {}", a + 1, b + 1, m)?;
            }
        }
        Ok(())
    }

    /// Parses the format written by [`write_edge_list`](Self::write_edge_list).
    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidParams("empty edge list".into()))??;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::InvalidParams("bad edge-list header".into()))?;
        let m: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::InvalidParams("bad edge-list header".into()))?;
        let mut edge_list = Vec::with_capacity(m);
        let mut loops = vec![0u32; n];
        let mut any_loops = false;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse = |s: &str| -> Result<u32> {
                s.parse::<u32>()
                    .map_err(|_| Error::InvalidParams(format!("bad edge-list line: {line}")))
            };
            let (a, b) = (parse(fields[0])? - 1, parse(fields[1])? - 1);
            let count = if fields.len() > 2 { parse(fields[2])? } else { 1 };
            if a == b {
                loops[a as usize] = count;
                any_loops = true;
            } else {
                edge_list.push((a, b, count));
            }
        }
        if edge_list.len() + loops.iter().filter(|&&c| c > 0).count() != m {
            return Err(Error::InvalidParams(
                "edge-list entry count does not match header".into(),
            ));
        }
        let loops = if any_loops { loops } else { vec![] };
        Graph::build(n, edge_list, loops)
    }
}

enum Law {
    SoftExp,
    HardCap,
}

impl Law {
    #[inline]
    fn prob(&self, lam: f64) -> f64 {
        match self {
            Law::SoftExp => -(-lam).exp_m1(),
            Law::HardCap => lam.min(1.0),
        }
    }
}

fn rank_pows(n: usize, gamma: f64) -> Vec<f64> {
    (1..=n).map(|r| (r as f64).powf(-gamma)).collect()
}

fn intensity_scale(n: usize, beta: f64, gamma: f64) -> f64 {
    beta * (n as f64).powf(2.0 * gamma - 1.0)
}

fn sample_simple(n: usize, beta: f64, gamma: f64, seed: u64, law: Law) -> Vec<(u32, u32)> {
    if n <= NAIVE_CAP {
        sample_simple_naive(n, beta, gamma, seed, law)
    } else {
        sample_simple_skipping(n, beta, gamma, seed, law)
    }
}

/// All-pairs scan. The uniform `u` is compared against `lambda` first: since
/// every law's probability is at most `lambda`, most pairs reject without
/// touching a transcendental.
fn sample_simple_naive(n: usize, beta: f64, gamma: f64, seed: u64, law: Law) -> Vec<(u32, u32)> {
    let dom = derive_seed(seed, EDGE_DOMAIN);
    let pw = rank_pows(n, gamma);
    let c = intensity_scale(n, beta, gamma);
    let mut edges = Vec::new();
    for i in 0..n {
        let ci = c * pw[i];
        let ri = (i + 1) as u32;
        for j in (i + 1)..n {
            let lam = ci * pw[j];
            let u = pair_unit(dom, ri, (j + 1) as u32);
            if u < lam && u < law.prob(lam) {
                edges.push((i as u32, j as u32));
            }
        }
    }
    edges
}

/// Geometric skip-sampling per row under the decreasing envelope
/// `min(1, lambda(i, j))`, thinned to the exact law at each candidate.
fn sample_simple_skipping(n: usize, beta: f64, gamma: f64, seed: u64, law: Law) -> Vec<(u32, u32)> {
    let dom = derive_seed(seed, SKIP_DOMAIN);
    let pw = rank_pows(n, gamma);
    let c = intensity_scale(n, beta, gamma);
    let mut edges = Vec::new();
    for i in 0..n {
        let ci = c * pw[i];
        let mut rng = SplitMix64::new(derive_seed(dom, (i + 1) as u64));
        let mut j = i + 1;
        while j < n {
            let p_env = (ci * pw[j]).min(1.0);
            if p_env <= 0.0 {
                break;
            }
            if p_env < 1.0 {
                let u = 1.0 - unit_f64(rng.next_u64());
                let skip = (u.ln() / (1.0 - p_env).ln()) as usize;
                j += skip;
                if j >= n {
                    break;
                }
            }
            let p_act = law.prob(ci * pw[j]);
            if unit_f64(rng.next_u64()) * p_env < p_act {
                edges.push((i as u32, j as u32));
            }
            j += 1;
        }
    }
    edges
}

/// Poisson draw conditioned on being at least 1, by inverse-CDF walk from the
/// conditional pmf. `u` selects the quantile; `tail_seed` feeds the unconditioned
/// sampler used when `lambda` is too large for the walk.
fn poisson_at_least_one(lam: f64, u: f64, tail_seed: u64) -> u32 {
    if lam > 600.0 {
        // P(Pois = 0) is below 1e-260 here; an unconditioned draw is exact
        // for all practical purposes.
        let mut rng = SplitMix64::new(tail_seed);
        let pois = rand_distr::Poisson::new(lam).expect("lambda positive");
        return (pois.sample(&mut rng) as u32).max(1);
    }
    let denom = lam.exp_m1();
    let mut m = 1u32;
    let mut term = lam / denom;
    let mut cum = term;
    let cap = (10.0 * lam) as u32 + 100;
    while cum <= u && m < cap {
        m += 1;
        term *= lam / m as f64;
        cum += term;
    }
    m
}

/// Soft-norm simple graph: `P(i ~ j) = 1 - exp(-lambda(i, j))`.
pub fn gen_snr(params: &NetworkParams) -> Result<Graph> {
    params.validate()?;
    expect_variant(params, Variant::Snr)?;
    let edges = sample_simple(params.n, params.beta, params.gamma, params.seed, Law::SoftExp);
    Graph::from_edges(params.n, &edges)
}

/// Hard-cap simple graph: `P(i ~ j) = min(1, lambda(i, j))`.
pub fn gen_chung_lu(params: &NetworkParams) -> Result<Graph> {
    params.validate()?;
    expect_variant(params, Variant::ChungLu)?;
    let edges = sample_simple(params.n, params.beta, params.gamma, params.seed, Law::HardCap);
    Graph::from_edges(params.n, &edges)
}

/// Erdos-Renyi graph with `P(i ~ j) = min(1, beta / N)`; `gamma` is ignored.
pub fn gen_er(params: &NetworkParams) -> Result<Graph> {
    params.validate()?;
    expect_variant(params, Variant::Er)?;
    let edges = sample_simple(params.n, params.beta, 0.0, params.seed, Law::HardCap);
    Graph::from_edges(params.n, &edges)
}

/// Multigraph with `Pois(lambda(i, j))` edges per pair, including loops.
/// This sampler scans all pairs regardless of size (it exists for exact
/// pair-law work, not large sweeps); [`Graph::flatten`] recovers the
/// soft-norm law exactly.
pub fn gen_mnr(params: &NetworkParams) -> Result<Graph> {
    params.validate()?;
    expect_variant(params, Variant::Mnr)?;
    let (n, beta, gamma, seed) = (params.n, params.beta, params.gamma, params.seed);
    let dom = derive_seed(seed, EDGE_DOMAIN);
    let dom2 = derive_seed(seed, MULT_DOMAIN);
    let pw = rank_pows(n, gamma);
    let c = intensity_scale(n, beta, gamma);
    let mut edge_list = Vec::new();
    let mut loops = vec![0u32; n];
    let mut any_loops = false;
    for i in 0..n {
        let ci = c * pw[i];
        let ri = (i + 1) as u32;
        for j in i..n {
            let lam = ci * pw[j];
            let rj = (j + 1) as u32;
            let u = pair_unit(dom, ri, rj);
            if u < lam && u < -(-lam).exp_m1() {
                let u2 = pair_unit(dom2, ri, rj);
                let tail_seed = derive_seed(dom2, ((ri as u64) << 32) | rj as u64);
                let count = poisson_at_least_one(lam, u2, tail_seed);
                if i == j {
                    loops[i] = count;
                    any_loops = true;
                } else {
                    edge_list.push((i as u32, j as u32, count));
                }
            }
        }
    }
    let loops = if any_loops { loops } else { vec![] };
    Graph::build(n, edge_list, loops)
}

/// Samples whichever law `params.variant` names.
pub fn generate(params: &NetworkParams) -> Result<Graph> {
    match params.variant {
        Variant::Snr => gen_snr(params),
        Variant::Mnr => gen_mnr(params),
        Variant::ChungLu => gen_chung_lu(params),
        Variant::Er => gen_er(params),
    }
}

fn expect_variant(params: &NetworkParams, want: Variant) -> Result<()> {
    if params.variant != want {
        return Err(Error::InvalidParams(format!(
            "params say variant {} but the {} sampler was called",
            params.variant, want
        )));
    }
    Ok(())
}

/// Connected-component labeling.
#[derive(Debug, Clone)]
pub struct ComponentDecomposition {
    labels: Vec<u32>,
    sizes: Vec<usize>,
    giant: u32,
}

impl ComponentDecomposition {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn label(&self, v: usize) -> u32 {
        self.labels[v]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn size(&self, c: u32) -> usize {
        self.sizes[c as usize]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Label of the largest component (lowest label on ties).
    pub fn giant_id(&self) -> u32 {
        self.giant
    }

    pub fn giant_size(&self) -> usize {
        self.sizes[self.giant as usize]
    }

    pub fn vertices_of(&self, c: u32) -> Vec<u32> {
        (0..self.labels.len() as u32)
            .filter(|&v| self.labels[v as usize] == c)
            .collect()
    }

    pub fn giant_vertices(&self) -> Vec<u32> {
        self.vertices_of(self.giant)
    }

    pub fn same_component(&self, a: usize, b: usize) -> bool {
        self.labels[a] == self.labels[b]
    }
}

/// Labels components by breadth-first search.
pub fn components(g: &Graph) -> ComponentDecomposition {
    let n = g.n();
    let mut labels = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    let mut queue = Vec::new();
    for start in 0..n {
        if labels[start] != u32::MAX {
            continue;
        }
        let c = sizes.len() as u32;
        let mut size = 0usize;
        labels[start] = c;
        queue.push(start as u32);
        while let Some(v) = queue.pop() {
            size += 1;
            for &w in g.neighbors(v as usize) {
                if labels[w as usize] == u32::MAX {
                    labels[w as usize] = c;
                    queue.push(w);
                }
            }
        }
        sizes.push(size);
    }
    let mut giant = 0u32;
    for (c, &s) in sizes.iter().enumerate() {
        if s > sizes[giant as usize] {
            giant = c as u32;
        }
    }
    ComponentDecomposition {
        labels,
        sizes,
        giant,
    }
}

/// Largest eccentricity within any single component (exact, breadth-first
/// search from every vertex; vertices in other components are unreachable by
/// construction so no infinite distances arise).
pub fn componentwise_diameter(g: &Graph) -> usize {
    let n = g.n();
    let mut best = 0usize;
    let mut dist = vec![0u32; n];
    let mut stamp = vec![u32::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for (round, start) in (0..n).enumerate() {
        let round = round as u32;
        stamp[start] = round;
        dist[start] = 0;
        queue.push_back(start as u32);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v as usize];
            if dv as usize > best {
                best = dv as usize;
            }
            for &w in g.neighbors(v as usize) {
                if stamp[w as usize] != round {
                    stamp[w as usize] = round;
                    dist[w as usize] = dv + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    best
}

/// Degree census of one realization.
#[derive(Debug, Clone, Serialize)]
pub struct DegreeSummary {
    pub max_degree: u32,
    pub mean_degree: f64,
    /// Survival-regression tail index; `None` when `gamma = 0` (no power
    /// tail) or when too few tail points exist.
    pub tail_exponent: Option<f64>,
    /// Distinct degree values the tail regression used.
    pub tail_points: usize,
    /// `max_v d(v) * (v / N)^gamma` over weight ranks `v`; order log N for
    /// rank-one graphs generated at this `gamma`.
    pub scaling_statistic: f64,
}

/// Fits the degree-tail index from the empirical survival function: simple
/// log-log regression of `P(D >= k)` over distinct `k >= 10`, after
/// discarding the top 1% of degree order statistics. Returns the index
/// estimate and the number of regression points.
pub fn tail_exponent_estimate(degrees: &[u32]) -> Result<(f64, usize)> {
    let n = degrees.len();
    if n == 0 {
        return Err(Error::TailFit("no degrees".into()));
    }
    let mut sorted = degrees.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let drop = n / 100;
    let kmax = sorted[drop.min(n - 1)];
    if kmax < 10 {
        return Err(Error::TailFit(format!(
            "largest usable degree {kmax} is below the fit floor 10"
        )));
    }
    // Survival counts over k = 10..=kmax; sorted is descending so
    // count(>= k) is a prefix length.
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut prev_count = usize::MAX;
    for k in 10..=kmax {
        let count = sorted.partition_point(|&d| d >= k);
        if count == 0 {
            break;
        }
        if count != prev_count || xs.is_empty() {
            xs.push((k as f64).ln());
            ys.push((count as f64 / n as f64).ln());
            prev_count = count;
        }
    }
    if xs.len() < 3 {
        return Err(Error::TailFit(format!(
            "only {} distinct tail points in [10, {kmax}]",
            xs.len()
        )));
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((1.0 - slope, xs.len()))
}

/// Degree census: extremes, tail index (when `gamma > 0` and enough tail
/// exists), and the hub scaling statistic at the generating `gamma`.
pub fn degree_summary(g: &Graph, gamma: f64) -> Result<DegreeSummary> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidParams(format!(
            "gamma must lie in [0, 1), got {gamma}"
        )));
    }
    let n = g.n();
    if n == 0 {
        return Err(Error::InvalidParams("empty graph".into()));
    }
    let degrees = g.degrees();
    let total: u64 = degrees.iter().map(|&d| d as u64).sum();
    let mean_degree = total as f64 / n as f64;
    let (tail_exponent, tail_points) = if gamma > 0.0 {
        match tail_exponent_estimate(degrees) {
            Ok((t, pts)) => (Some(t), pts),
            Err(_) => (None, 0),
        }
    } else {
        (None, 0)
    };
    let scaling_statistic = degrees
        .iter()
        .enumerate()
        .map(|(v, &d)| d as f64 * (((v + 1) as f64) / n as f64).powf(gamma))
        .fold(0.0f64, f64::max);
    Ok(DegreeSummary {
        max_degree: g.max_degree(),
        mean_degree,
        tail_exponent,
        tail_points,
        scaling_statistic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, beta: f64, gamma: f64, variant: Variant, seed: u64) -> NetworkParams {
        NetworkParams::new(n, beta, gamma, variant, seed)
    }

    #[test]
    fn params_validation() {
        assert!(params(0, 2.0, 0.3, Variant::Snr, 1).validate().is_err());
        assert!(params(10, 0.0, 0.3, Variant::Snr, 1).validate().is_err());
        assert!(params(10, -1.0, 0.3, Variant::Snr, 1).validate().is_err());
        assert!(params(10, f64::NAN, 0.3, Variant::Snr, 1).validate().is_err());
        assert!(params(10, 2.0, 1.0, Variant::Snr, 1).validate().is_err());
        assert!(params(10, 2.0, -0.1, Variant::Snr, 1).validate().is_err());
        assert!(params(10, 2.0, 0.99, Variant::Snr, 1).validate().is_ok());
        assert!(params(10, 2.0, 0.0, Variant::Er, 1).validate().is_ok());
    }

    #[test]
    fn variant_mismatch_rejected() {
        let p = params(10, 2.0, 0.3, Variant::Snr, 1);
        assert!(gen_er(&p).is_err());
        assert!(gen_snr(&p).is_ok());
    }

    #[test]
    fn graph_construction_and_accessors() {
        let g = Graph::from_edges(4, &[(2, 0), (0, 1), (2, 3)]).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.m(), 3);
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (2, 3)]);
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.neighbors(2), &[0, 3]);
        assert!(g.has_edge(0, 2));
        assert!(!g.has_edge(1, 3));
        assert!(g.is_simple());
        assert!(Graph::from_edges(3, &[(0, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 5)]).is_err());
    }

    #[test]
    fn multigraph_degrees_count_loops_twice() {
        let g = Graph::multigraph(3, &[(0, 1, 2), (1, 2, 1)], &[0, 0, 3]).unwrap();
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.degree(1), 3);
        assert_eq!(g.degree(2), 7);
        assert_eq!(g.loop_count(2), 3);
        assert!(!g.is_simple());
        assert_eq!(g.neighbors(2), &[1, 2, 2, 2, 2, 2, 2]);
        let sum: u32 = g.degrees().iter().sum();
        assert_eq!(sum, 2 * (2 + 1 + 3));
        let flat = g.flatten();
        assert!(flat.is_simple());
        assert_eq!(flat.edges(), &[(0, 1), (1, 2)]);
        assert_eq!(flat.degree(2), 1);
    }

    #[test]
    fn determinism_and_beta_monotone_coupling() {
        let p = params(400, 1.6, 0.4, Variant::Snr, 99);
        let g1 = gen_snr(&p).unwrap();
        let g2 = gen_snr(&p).unwrap();
        assert_eq!(g1.edges(), g2.edges());

        let lo = gen_snr(&params(400, 0.7, 0.4, Variant::Snr, 99)).unwrap();
        let hi = gen_snr(&params(400, 2.8, 0.4, Variant::Snr, 99)).unwrap();
        let hi_set: std::collections::HashSet<_> = hi.edges().iter().collect();
        assert!(lo.edges().iter().all(|e| hi_set.contains(e)));
        assert!(hi.m() > lo.m());
    }

    #[test]
    fn er_edge_count_near_mean() {
        let n = 2000;
        let beta = 4.0;
        let g = gen_er(&params(n, beta, 0.0, Variant::Er, 7)).unwrap();
        let pairs = (n * (n - 1) / 2) as f64;
        let p = beta / n as f64;
        let mean = pairs * p;
        let sd = (pairs * p * (1.0 - p)).sqrt();
        let got = g.m() as f64;
        assert!(
            (got - mean).abs() < 5.0 * sd,
            "edge count {got} vs mean {mean} (sd {sd})"
        );
    }

    #[test]
    fn skip_and_naive_paths_agree_in_law() {
        // Same law, different streams: compare realized edge counts across
        // seeds with a two-sample z-test on generous bounds.
        let n = 1200;
        let (beta, gamma) = (1.8, 0.55);
        let seeds = 60;
        let mut naive_counts = Vec::new();
        let mut skip_counts = Vec::new();
        for s in 0..seeds {
            naive_counts
                .push(sample_simple_naive(n, beta, gamma, s, Law::SoftExp).len() as f64);
            skip_counts
                .push(sample_simple_skipping(n, beta, gamma, s, Law::SoftExp).len() as f64);
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let var = |v: &[f64], m: f64| {
            v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
        };
        let (m1, m2) = (mean(&naive_counts), mean(&skip_counts));
        let se = ((var(&naive_counts, m1) + var(&skip_counts, m2)) / seeds as f64).sqrt();
        assert!(
            (m1 - m2).abs() < 5.0 * se,
            "naive mean {m1}, skip mean {m2}, se {se}"
        );
    }

    #[test]
    fn mnr_flatten_matches_snr_pair_law() {
        // Two-vertex graphs: P(edge) must match the soft-norm law; chi-square
        // on occupancy over many seeds.
        let (beta, gamma, n) = (1.3, 0.4, 2);
        let lam = intensity_scale(n, beta, gamma) * 1.0f64.powf(-gamma) * 2.0f64.powf(-gamma);
        let p = -(-lam).exp_m1();
        let trials = 4000usize;
        let mut hits = 0usize;
        for s in 0..trials {
            let g = gen_mnr(&params(n, beta, gamma, Variant::Mnr, s as u64)).unwrap();
            if g.flatten().m() == 1 {
                hits += 1;
            }
        }
        let expect = trials as f64 * p;
        let chi2 = {
            let miss = (trials - hits) as f64;
            let e0 = trials as f64 - expect;
            (hits as f64 - expect).powi(2) / expect + (miss - e0).powi(2) / e0
        };
        // 1 dof, alpha = 0.01 critical value.
        assert!(chi2 < 6.635, "chi2 {chi2}, hits {hits}, expect {expect}");
    }

    #[test]
    fn mnr_loop_mean_matches_intensity() {
        let (beta, gamma, n) = (2.0, 0.5, 4);
        let lam = intensity_scale(n, beta, gamma); // vertex rank 1: c * 1^{-2 gamma}
        let trials = 3000;
        let mut total = 0u64;
        for s in 0..trials {
            let g = gen_mnr(&params(n, beta, gamma, Variant::Mnr, 10_000 + s)).unwrap();
            total += g.loop_count(0) as u64;
        }
        let mean = total as f64 / trials as f64;
        let se = (lam / trials as f64).sqrt();
        assert!(
            (mean - lam).abs() < 4.0 * se,
            "loop mean {mean} vs {lam} (se {se})"
        );
    }

    #[test]
    fn components_and_giant_tiebreak() {
        let tri1 = Graph::cycle(3);
        let tri2 = Graph::cycle(3);
        let single = Graph::from_edges(1, &[]).unwrap();
        let g = Graph::disjoint_union(&[&tri1, &single, &tri2]);
        let comps = components(&g);
        assert_eq!(comps.count(), 3);
        assert_eq!(comps.giant_id(), 0);
        assert_eq!(comps.giant_size(), 3);
        assert_eq!(comps.vertices_of(1), vec![3]);
        assert!(comps.same_component(0, 2));
        assert!(!comps.same_component(0, 3));
    }

    #[test]
    fn diameters_of_known_graphs() {
        assert_eq!(componentwise_diameter(&Graph::path(5)), 4);
        assert_eq!(componentwise_diameter(&Graph::cycle(6)), 3);
        assert_eq!(componentwise_diameter(&Graph::star(7)), 2);
        assert_eq!(componentwise_diameter(&Graph::complete(4)), 1);
        let g = Graph::disjoint_union(&[&Graph::path(9), &Graph::cycle(4)]);
        assert_eq!(componentwise_diameter(&g), 8);
        let iso = Graph::from_edges(3, &[]).unwrap();
        assert_eq!(componentwise_diameter(&iso), 0);
    }

    #[test]
    fn er_giant_fraction_matches_survival_root() {
        // At beta = 2 the giant holds a 0.7968 fraction in the large-N limit.
        let n = 30_000;
        let g = gen_er(&params(n, 2.0, 0.0, Variant::Er, 31)).unwrap();
        let frac = components(&g).giant_size() as f64 / n as f64;
        assert!((frac - 0.79681).abs() < 0.02, "giant fraction {frac}");
    }

    #[test]
    fn subcritical_rank_one_has_no_giant() {
        // gamma = 0.3 needs beta > 1 - 2 gamma = 0.4 for a giant.
        let n = 20_000;
        let g = gen_snr(&params(n, 0.2, 0.3, Variant::Snr, 5)).unwrap();
        let frac = components(&g).giant_size() as f64 / n as f64;
        assert!(frac < 0.01, "unexpected giant fraction {frac}");
        let g = gen_snr(&params(n, 2.0, 0.3, Variant::Snr, 5)).unwrap();
        let frac = components(&g).giant_size() as f64 / n as f64;
        assert!(frac > 0.5, "missing giant, fraction {frac}");
    }

    #[test]
    fn tail_fit_recovers_synthetic_index() {
        // Exact power-law degrees d(v) = 5 (n/v)^0.6 give index 1 + 1/0.6.
        let n = 100_000usize;
        let gamma = 0.6f64;
        let degrees: Vec<u32> = (1..=n)
            .map(|v| (5.0 * (n as f64 / v as f64).powf(gamma)).round() as u32)
            .collect();
        let (tau, points) = tail_exponent_estimate(&degrees).unwrap();
        let expect = 1.0 + 1.0 / gamma;
        assert!(points > 20);
        assert!((tau - expect).abs() < 0.05, "tau {tau} vs {expect}");
    }

    #[test]
    fn tail_fit_rejects_flat_degrees() {
        let degrees = vec![3u32; 500];
        assert!(tail_exponent_estimate(&degrees).is_err());
    }

    #[test]
    fn scaling_statistic_normalizes_exact_profile() {
        // Degrees following d(v) = (n/v)^gamma normalize the hub statistic
        // to 1; integer rounding of low degrees can push the max up to
        // round(x)/x <= 1.5 but never below 1 at v = 1.
        let n = 5000usize;
        let gamma = 0.5f64;
        let degs: Vec<u32> = (1..=n)
            .map(|v| (n as f64 / v as f64).powf(gamma).round() as u32)
            .collect();
        let stat = degs
            .iter()
            .enumerate()
            .map(|(v, &d)| d as f64 * (((v + 1) as f64) / n as f64).powf(gamma))
            .fold(0.0f64, f64::max);
        assert!((0.99..1.5).contains(&stat), "stat {stat}");
    }

    #[test]
    fn summary_on_generated_graph() {
        let p = params(4000, 2.0, 0.5, Variant::Snr, 123);
        let g = gen_snr(&p).unwrap();
        let s = degree_summary(&g, p.gamma).unwrap();
        assert!(s.mean_degree > 2.0);
        assert!(s.max_degree > 30);
        let tau = s.tail_exponent.expect("tail should be fittable");
        assert!((tau - 3.0).abs() < 0.6, "tau {tau}");
        assert!(s.scaling_statistic > 1.0);
        assert!(s.scaling_statistic < 60.0);
    }

    #[test]
    fn gamma_zero_summary_has_no_tail_fit() {
        let g = gen_er(&params(3000, 3.0, 0.0, Variant::Er, 4)).unwrap();
        let s = degree_summary(&g, 0.0).unwrap();
        assert!(s.tail_exponent.is_none());
        assert_eq!(s.tail_points, 0);
        assert_eq!(s.scaling_statistic, g.max_degree() as f64);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = gen_snr(&params(60, 2.0, 0.4, Variant::Snr, 17)).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let h = Graph::read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(g.edges(), h.edges());
        assert_eq!(g.n(), h.n());

        let mg = Graph::multigraph(3, &[(0, 1, 2)], &[1, 0, 0]).unwrap();
        let mut buf = Vec::new();
        mg.write_edge_list(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("3 2\n"));
        assert!(text.contains("1 1 1"));
        assert!(text.contains("1 2 2"));
        let back = Graph::read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(back.loop_count(0), 1);
        assert_eq!(back.multiplicity(0), 2);
    }

    #[test]
    fn induced_subgraph_remaps() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let sub = g.induced(&[1, 2, 4]);
        assert_eq!(sub.n(), 3);
        assert_eq!(sub.edges(), &[(0, 1)]);
    }
}
