//! Event-driven continuous-time simulation of the discursive voter model,
//! its dual coalescing walkers, two-walker meeting, and partially observed
//! single-walker trajectories.
//!
//! The voter engine is discordant-edge driven: an edge {i, j} with unequal
//! opinions fires at rate `mult (d(i)^(theta-1) + d(j)^(theta-1))` and the
//! copy direction is uniform. Degrees never change during a run, so the
//! engine thins a proposal stream drawn from the fixed all-edges weight
//! distribution at its constant total rate, discarding proposals on
//! concordant edges; the accepted events are exactly the discordant-edge
//! chain and each costs O(1). This agrees in law with the per-vertex scheme
//! (vertex i fires at rate d(i)^theta, picks a uniform neighbor slot, the
//! pair resolves to a uniform shared opinion), which is also implemented
//! here as a reference for distributional tests.

use crate::netgen::{components, ComponentDecomposition, Graph, NetworkParams, LOOP_SLOT};
use crate::rng::{derive_seed, sample_exp, unit_f64, SplitMix64};
use crate::weighted::WeightTree;
use crate::{Error, Result};
use rand::RngCore;
use rand_distr::{Distribution, WeightedAliasIndex};
use rayon::prelude::*;

const INIT_DOMAIN: u64 = 0x766f_7465_7201;
const EVENT_DOMAIN: u64 = 0x766f_7465_7202;
const WALK_DOMAIN: u64 = 0x766f_7465_7203;
const REPLICA_GRAPH_DOMAIN: u64 = 0x766f_7465_7204;
const REPLICA_INIT_DOMAIN: u64 = 0x766f_7465_7205;

/// Parameters of a voter-model run.
#[derive(Debug, Clone, Copy)]
pub struct VoterParams {
    pub theta: f64,
    /// Initial Bernoulli density of opinion 1.
    pub u: f64,
    pub seed: u64,
    /// Record a (time, ones-count) trajectory point at every flip.
    pub sample_trajectory: bool,
    /// Deterministic censoring budget: a run exceeding this many events is
    /// returned as censored. `None` runs to absorption.
    pub max_events: Option<u64>,
    /// Deterministic time horizon: a run still unabsorbed at this time is
    /// returned as censored with `time` equal to the horizon.
    pub max_time: Option<f64>,
}

impl VoterParams {
    pub fn new(theta: f64, u: f64, seed: u64) -> Result<VoterParams> {
        check_theta(theta)?;
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::InvalidParams(format!(
                "initial density must lie strictly inside (0, 1), got {u}"
            )));
        }
        Ok(VoterParams {
            theta,
            u,
            seed,
            sample_trajectory: false,
            max_events: None,
            max_time: None,
        })
    }

    pub fn with_trajectory(mut self) -> VoterParams {
        self.sample_trajectory = true;
        self
    }

    pub fn with_event_cap(mut self, cap: u64) -> VoterParams {
        self.max_events = Some(cap);
        self
    }

    pub fn with_time_cap(mut self, horizon: f64) -> VoterParams {
        self.max_time = Some(horizon);
        self
    }
}

/// Exchange exponents above 2 are outside the analyzed range (consensus on
/// hubs degenerates there) and are rejected at every entry point.
fn check_theta(theta: f64) -> Result<()> {
    if !theta.is_finite() || theta > 2.0 {
        return Err(Error::InvalidParams(format!(
            "exchange exponent must be finite and at most 2, got {theta}"
        )));
    }
    Ok(())
}

/// Outcome of one simulated run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    /// Terminal time: absorption time, or elapsed time when censored.
    pub time: f64,
    pub events: u64,
    /// Sampled (time, statistic) pairs; the statistic is the ones count for
    /// voter runs and the live walker count for coalescing runs.
    pub trajectory: Option<Vec<(f64, f64)>>,
    pub censored: bool,
}

impl RunRecord {
    fn finished(time: f64, events: u64, trajectory: Option<Vec<(f64, f64)>>) -> RunRecord {
        RunRecord {
            time,
            events,
            trajectory,
            censored: false,
        }
    }

    /// Writes the trajectory as CSV rows `t,stat`.
    pub fn write_trajectory_csv<W: std::io::Write>(&self, out: &mut W) -> Result<()> {
        let traj = self
            .trajectory
            .as_ref()
            .ok_or_else(|| Error::InvalidParams("run has no sampled trajectory".into()))?;
        for &(t, stat) in traj {
            writeln!(out, "{t},{stat}")?;
        }
        Ok(())
    }
}

/// Opinion configuration plus the auxiliary structures the event engine
/// needs: per-component ones counts and the weighted set of discordant
/// edges.
#[derive(Debug, Clone)]
pub struct OpinionState {
    theta: f64,
    opinions: Vec<u8>,
    comp: ComponentDecomposition,
    ones_in_comp: Vec<u64>,
    ones_total: u64,
    /// Full firing rate of each edge when discordant.
    edge_weight: Vec<f64>,
    discordant: Vec<bool>,
    n_discordant: usize,
}

impl OpinionState {
    /// Builds the state from an explicit opinion vector (entries 0 or 1).
    pub fn from_opinions(g: &Graph, opinions: &[u8], theta: f64) -> Result<OpinionState> {
        check_theta(theta)?;
        if opinions.len() != g.n() {
            return Err(Error::InvalidParams(format!(
                "{} opinions for {} vertices",
                opinions.len(),
                g.n()
            )));
        }
        if opinions.iter().any(|&o| o > 1) {
            return Err(Error::InvalidParams("opinions must be 0 or 1".into()));
        }
        let comp = components(g);
        let mut ones_in_comp = vec![0u64; comp.count()];
        let mut ones_total = 0u64;
        for (v, &o) in opinions.iter().enumerate() {
            if o == 1 {
                ones_in_comp[comp.label(v) as usize] += 1;
                ones_total += 1;
            }
        }
        let edge_weight: Vec<f64> = (0..g.m())
            .map(|e| {
                let (a, b) = g.edges()[e];
                let (da, db) = (g.degree(a as usize) as f64, g.degree(b as usize) as f64);
                g.multiplicity(e) as f64 * (da.powf(theta - 1.0) + db.powf(theta - 1.0))
            })
            .collect();
        let mut discordant = vec![false; g.m()];
        let mut n_discordant = 0;
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            if opinions[a as usize] != opinions[b as usize] {
                discordant[e] = true;
                n_discordant += 1;
            }
        }
        Ok(OpinionState {
            theta,
            opinions: opinions.to_vec(),
            comp,
            ones_in_comp,
            ones_total,
            edge_weight,
            discordant,
            n_discordant,
        })
    }

    /// All-0 or all-1 start, absorbing immediately.
    pub fn constant(g: &Graph, opinion: u8, theta: f64) -> Result<OpinionState> {
        OpinionState::from_opinions(g, &vec![opinion & 1; g.n()], theta)
    }

    pub fn opinions(&self) -> &[u8] {
        &self.opinions
    }

    pub fn ones(&self) -> u64 {
        self.ones_total
    }

    pub fn ones_in_component(&self, c: u32) -> u64 {
        self.ones_in_comp[c as usize]
    }

    pub fn discordant_count(&self) -> usize {
        self.n_discordant
    }

    /// Absorbing exactly when every component is monochromatic.
    pub fn is_absorbed(&self) -> bool {
        self.n_discordant == 0
    }

    /// Recounts every auxiliary structure from the opinion vector; used by
    /// consistency tests.
    pub fn check_consistency(&self, g: &Graph) -> Result<()> {
        let rebuilt = OpinionState::from_opinions(g, &self.opinions, self.theta)?;
        if rebuilt.ones_in_comp != self.ones_in_comp || rebuilt.ones_total != self.ones_total {
            return Err(Error::InvariantViolated(
                "component ones counts disagree with recount".into(),
            ));
        }
        if rebuilt.discordant != self.discordant || rebuilt.n_discordant != self.n_discordant {
            return Err(Error::InvariantViolated(
                "discordant edge set disagrees with recount".into(),
            ));
        }
        let absorbed_by_counts = (0..self.comp.count() as u32).all(|c| {
            let k = self.ones_in_comp[c as usize];
            k == 0 || k == self.comp.size(c) as u64
        });
        if absorbed_by_counts != self.is_absorbed() {
            return Err(Error::InvariantViolated(
                "absorption flag disagrees with component counts".into(),
            ));
        }
        Ok(())
    }

    /// Flips vertex `v` and updates counts and the discordance flags of the
    /// incident edges.
    fn flip(&mut self, g: &Graph, v: usize) {
        let new = self.opinions[v] ^ 1;
        self.opinions[v] = new;
        let c = self.comp.label(v) as usize;
        if new == 1 {
            self.ones_in_comp[c] += 1;
            self.ones_total += 1;
        } else {
            self.ones_in_comp[c] -= 1;
            self.ones_total -= 1;
        }
        let nbrs = g.neighbors(v);
        let eids = g.edge_ids(v);
        for (k, &w) in nbrs.iter().enumerate() {
            let e = eids[k];
            if e == LOOP_SLOT {
                continue;
            }
            let e = e as usize;
            let now = new != self.opinions[w as usize];
            if now != self.discordant[e] {
                self.discordant[e] = now;
                if now {
                    self.n_discordant += 1;
                } else {
                    self.n_discordant -= 1;
                }
            }
        }
    }

    /// Recomputes the discordance flags from the opinion vector. The event
    /// loop in [`simulate_voter`] tracks only component counts, so the flags
    /// go stale during a run and are restored here before it returns.
    fn resync_discordant(&mut self, g: &Graph) {
        self.n_discordant = 0;
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            let now = self.opinions[a as usize] != self.opinions[b as usize];
            self.discordant[e] = now;
            self.n_discordant += now as usize;
        }
    }

    /// Number of components holding both opinions.
    fn mixed_components(&self) -> usize {
        (0..self.comp.count() as u32)
            .filter(|&c| {
                let k = self.ones_in_comp[c as usize];
                k > 0 && k < self.comp.size(c) as u64
            })
            .count()
    }
}

/// Draws i.i.d. Bernoulli(`u`) opinions from the run seed.
pub fn init_opinions(g: &Graph, params: &VoterParams) -> Result<OpinionState> {
    let mut rng = SplitMix64::new(derive_seed(params.seed, INIT_DOMAIN));
    let opinions: Vec<u8> = (0..g.n())
        .map(|_| (unit_f64(rng.next_u64()) < params.u) as u8)
        .collect();
    OpinionState::from_opinions(g, &opinions, params.theta)
}

/// Runs the discordant-edge jump chain to absorption (every component
/// monochromatic) and returns the consensus time.
///
/// Edge weights are fixed by the degrees, so proposals come from a constant
/// alias table over all edges at the constant total rate; proposals landing
/// on concordant edges advance the clock and change nothing. Thinning a
/// constant-rate stream this way reproduces the discordant-edge chain
/// exactly, and an accepted flip costs O(1): the loop keeps only the
/// per-component ones counts, and the discordance flags of the state are
/// rebuilt once on return.
pub fn simulate_voter(g: &Graph, state: &mut OpinionState, params: &VoterParams) -> Result<RunRecord> {
    if (state.theta - params.theta).abs() > 1e-15 {
        return Err(Error::InvalidParams(
            "state was initialized with a different theta".into(),
        ));
    }
    let mut rng = SplitMix64::new(derive_seed(params.seed, EVENT_DOMAIN));
    let mut events = 0u64;
    let mut traj = params
        .sample_trajectory
        .then(|| vec![(0.0, state.ones_total as f64)]);
    let mut mixed = state.mixed_components();
    if mixed == 0 {
        return Ok(RunRecord::finished(0.0, 0, traj));
    }
    let total: f64 = state.edge_weight.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::InvariantViolated(format!(
            "non-positive or non-finite total rate {total}"
        )));
    }
    let proposal = WeightedAliasIndex::new(state.edge_weight.clone())
        .map_err(|e| Error::InvariantViolated(format!("unusable edge weights: {e}")))?;
    let mut t = 0.0;
    loop {
        let dt = sample_exp(&mut rng, total);
        if params.max_time.is_some_and(|cap| t + dt > cap) {
            // Holding times are memoryless, so stopping the clock mid-wait
            // is an exact censoring at the horizon.
            state.resync_discordant(g);
            return Ok(RunRecord {
                time: params.max_time.unwrap(),
                events,
                trajectory: traj,
                censored: true,
            });
        }
        t += dt;
        let e = proposal.sample(&mut rng);
        let (a, b) = g.edges()[e];
        if state.opinions[a as usize] == state.opinions[b as usize] {
            continue;
        }
        // Uniform copy direction: one endpoint adopts the other's opinion.
        let v = (if unit_f64(rng.next_u64()) < 0.5 { a } else { b }) as usize;
        let new = state.opinions[v] ^ 1;
        state.opinions[v] = new;
        let c = state.comp.label(v);
        let size = state.comp.size(c) as u64;
        let k = &mut state.ones_in_comp[c as usize];
        if new == 1 {
            *k += 1;
            state.ones_total += 1;
        } else {
            *k -= 1;
            state.ones_total -= 1;
        }
        if *k == 0 || *k == size {
            mixed -= 1;
        }
        events += 1;
        if let Some(tr) = traj.as_mut() {
            tr.push((t, state.ones_total as f64));
        }
        if mixed == 0 {
            state.resync_discordant(g);
            return Ok(RunRecord::finished(t, events, traj));
        }
        if params.max_events.is_some_and(|cap| events >= cap) {
            state.resync_discordant(g);
            return Ok(RunRecord {
                time: t,
                events,
                trajectory: traj,
                censored: true,
            });
        }
    }
}

/// Reference per-vertex scheme: vertex i fires at rate d(i)^theta, picks a
/// uniform incident half-edge, and the pair adopts a uniform shared opinion.
/// Slower near absorption; exists to test that the edge-driven engine has
/// the same law.
pub fn simulate_voter_naive(
    g: &Graph,
    state: &mut OpinionState,
    params: &VoterParams,
) -> Result<RunRecord> {
    if (state.theta - params.theta).abs() > 1e-15 {
        return Err(Error::InvalidParams(
            "state was initialized with a different theta".into(),
        ));
    }
    let mut rng = SplitMix64::new(derive_seed(params.seed, EVENT_DOMAIN));
    let n = g.n();
    // Vertex firing rates are constant throughout the run.
    let mut cum = Vec::with_capacity(n);
    let mut total = 0.0;
    for v in 0..n {
        let d = g.degree(v) as f64;
        if d > 0.0 {
            total += d.powf(params.theta);
        }
        cum.push(total);
    }
    if !(total > 0.0) && !state.is_absorbed() {
        return Err(Error::InvariantViolated("zero total firing rate".into()));
    }
    let mut t = 0.0;
    let mut events = 0u64;
    while !state.is_absorbed() {
        t += sample_exp(&mut rng, total);
        let x = unit_f64(rng.next_u64()) * total;
        let i = cum.partition_point(|&c| c <= x).min(n - 1);
        let nbrs = g.neighbors(i);
        if nbrs.is_empty() {
            continue;
        }
        let k = (unit_f64(rng.next_u64()) * nbrs.len() as f64) as usize;
        let j = nbrs[k.min(nbrs.len() - 1)] as usize;
        if j == i {
            continue;
        }
        // Resolve to a uniform shared opinion.
        let keep_i = unit_f64(rng.next_u64()) < 0.5;
        let (winner, loser) = if keep_i { (i, j) } else { (j, i) };
        if state.opinions[winner] != state.opinions[loser] {
            state.flip(g, loser);
        }
        events += 1;
    }
    Ok(RunRecord::finished(t, events, None))
}

/// Positions of coalescing walkers; at most one live walker per vertex.
#[derive(Debug, Clone)]
pub struct WalkerSet {
    /// Walker index occupying each vertex, or -1.
    occupant: Vec<i64>,
    position: Vec<u32>,
    alive: Vec<bool>,
    alive_count: usize,
}

impl WalkerSet {
    /// Places one walker per listed vertex. Duplicate positions merge
    /// immediately (a shared vertex is a coalescence at time zero).
    pub fn new(g: &Graph, positions: &[u32]) -> Result<WalkerSet> {
        if positions.is_empty() {
            return Err(Error::InvalidParams("no walkers".into()));
        }
        let mut occupant = vec![-1i64; g.n()];
        let mut position = Vec::new();
        let mut alive = Vec::new();
        for &v in positions {
            if v as usize >= g.n() {
                return Err(Error::InvalidParams(format!(
                    "walker position {v} out of range"
                )));
            }
            if occupant[v as usize] < 0 {
                occupant[v as usize] = position.len() as i64;
                position.push(v);
                alive.push(true);
            }
        }
        let alive_count = position.len();
        Ok(WalkerSet {
            occupant,
            position,
            alive,
            alive_count,
        })
    }

    /// One walker on every vertex.
    pub fn full(g: &Graph) -> WalkerSet {
        let all: Vec<u32> = (0..g.n() as u32).collect();
        WalkerSet::new(g, &all).unwrap()
    }

    pub fn alive_count(&self) -> usize {
        self.alive_count
    }

    /// Vertices of the live walkers, ascending.
    pub fn live_positions(&self) -> Vec<u32> {
        let mut out: Vec<u32> = (0..self.position.len())
            .filter(|&w| self.alive[w])
            .map(|w| self.position[w])
            .collect();
        out.sort_unstable();
        out
    }
}

/// Per-vertex walker jump rates and cumulative half-edge weights for
/// neighbor selection. Loop slots get weight zero (a self-jump is
/// invisible).
struct WalkRates {
    rate: Vec<f64>,
    /// Cumulative slot weights, aligned with the CSR neighbor rows.
    cum: Vec<f64>,
    offsets: Vec<usize>,
}

impl WalkRates {
    fn new(g: &Graph, theta: f64) -> WalkRates {
        let n = g.n();
        let dpow: Vec<f64> = (0..n)
            .map(|v| {
                let d = g.degree(v) as f64;
                if d > 0.0 {
                    d.powf(theta - 1.0)
                } else {
                    0.0
                }
            })
            .collect();
        let mut rate = Vec::with_capacity(n);
        let mut cum = Vec::new();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for v in 0..n {
            let mut acc = 0.0;
            for &w in g.neighbors(v) {
                if w as usize != v {
                    acc += 0.5 * (dpow[v] + dpow[w as usize]);
                }
                cum.push(acc);
            }
            rate.push(acc);
            offsets.push(cum.len());
        }
        WalkRates { rate, cum, offsets }
    }

    /// Samples the landing vertex of a jump from `v`.
    fn pick_neighbor(&self, g: &Graph, v: usize, u: f64) -> usize {
        let row = &self.cum[self.offsets[v]..self.offsets[v + 1]];
        let x = u * self.rate[v];
        let k = row.partition_point(|&c| c <= x).min(row.len() - 1);
        g.neighbors(v)[k] as usize
    }
}

/// Runs independent dual walkers, merging on collision, until every occupied
/// component holds at most one walker; returns the coalescence time. The
/// trajectory statistic is the live walker count.
pub fn simulate_coalescing(
    g: &Graph,
    walkers: &mut WalkerSet,
    theta: f64,
    seed: u64,
) -> Result<RunRecord> {
    check_theta(theta)?;
    let comp = components(g);
    let mut walkers_in_comp = vec![0u64; comp.count()];
    for w in 0..walkers.position.len() {
        if walkers.alive[w] {
            walkers_in_comp[comp.label(walkers.position[w] as usize) as usize] += 1;
        }
    }
    let mut crowded = walkers_in_comp.iter().filter(|&&k| k > 1).count();
    let rates = WalkRates::new(g, theta);
    let mut tree = WeightTree::new(walkers.position.len());
    for w in 0..walkers.position.len() {
        if walkers.alive[w] {
            tree.set(w, rates.rate[walkers.position[w] as usize]);
        }
    }
    let mut rng = SplitMix64::new(derive_seed(seed, WALK_DOMAIN));
    let mut t = 0.0;
    let mut events = 0u64;
    let mut traj = vec![(0.0, walkers.alive_count as f64)];
    while crowded > 0 {
        let total = tree.total();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvariantViolated(format!(
                "walkers stuck with total rate {total}"
            )));
        }
        t += sample_exp(&mut rng, total);
        let w = tree.sample(unit_f64(rng.next_u64()));
        let from = walkers.position[w] as usize;
        let to = rates.pick_neighbor(g, from, unit_f64(rng.next_u64()));
        events += 1;
        walkers.occupant[from] = -1;
        if walkers.occupant[to] >= 0 {
            // Collision: the mover merges into the resident walker.
            walkers.alive[w] = false;
            walkers.alive_count -= 1;
            tree.set(w, 0.0);
            let c = comp.label(to) as usize;
            walkers_in_comp[c] -= 1;
            if walkers_in_comp[c] == 1 {
                crowded -= 1;
            }
            traj.push((t, walkers.alive_count as f64));
        } else {
            walkers.occupant[to] = w as i64;
            walkers.position[w] = to as u32;
            tree.set(w, rates.rate[to]);
        }
    }
    Ok(RunRecord::finished(t, events, Some(traj)))
}

/// Runs two dual walkers until they first share a vertex; returns the
/// meeting time. Cross-component pairs are rejected.
pub fn simulate_meeting(g: &Graph, x: u32, y: u32, theta: f64, seed: u64) -> Result<RunRecord> {
    check_theta(theta)?;
    let (xi, yi) = (x as usize, y as usize);
    if xi >= g.n() || yi >= g.n() {
        return Err(Error::InvalidParams("vertex out of range".into()));
    }
    if !components(g).same_component(xi, yi) {
        return Err(Error::CrossComponent(xi, yi));
    }
    if x == y {
        return Ok(RunRecord::finished(0.0, 0, None));
    }
    let rates = WalkRates::new(g, theta);
    let mut rng = SplitMix64::new(derive_seed(seed, WALK_DOMAIN));
    let (mut p, mut q) = (xi, yi);
    let mut t = 0.0;
    let mut events = 0u64;
    while p != q {
        let (rp, rq) = (rates.rate[p], rates.rate[q]);
        let total = rp + rq;
        if !(total > 0.0) {
            return Err(Error::InvariantViolated("walkers cannot move".into()));
        }
        t += sample_exp(&mut rng, total);
        events += 1;
        if unit_f64(rng.next_u64()) * total < rp {
            p = rates.pick_neighbor(g, p, unit_f64(rng.next_u64()));
        } else {
            q = rates.pick_neighbor(g, q, unit_f64(rng.next_u64()));
        }
    }
    Ok(RunRecord::finished(t, events, None))
}

/// Piecewise-constant single-walker path: position `positions[k]` holds on
/// `[times[k], times[k+1])`, with the final segment ending at `t_end`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkRecord {
    pub times: Vec<f64>,
    pub positions: Vec<u32>,
    pub t_end: f64,
    n: usize,
}

impl WalkRecord {
    pub fn position_at(&self, t: f64) -> Option<u32> {
        if !(0.0..=self.t_end).contains(&t) || self.times.is_empty() {
            return None;
        }
        let k = self.times.partition_point(|&s| s <= t);
        Some(self.positions[k - 1])
    }

    /// Fraction of `[0, t_end]` spent at each vertex.
    pub fn occupation_fractions(&self) -> Vec<f64> {
        let mut occ = vec![0.0; self.n];
        for (k, &p) in self.positions.iter().enumerate() {
            let stop = self.times.get(k + 1).copied().unwrap_or(self.t_end);
            occ[p as usize] += stop - self.times[k];
        }
        if self.t_end > 0.0 {
            occ.iter_mut().for_each(|o| *o /= self.t_end);
        }
        occ
    }
}

/// Runs one dual walker from `start` up to time `horizon`, recording every
/// jump.
pub fn simulate_walk(
    g: &Graph,
    start: u32,
    theta: f64,
    horizon: f64,
    seed: u64,
) -> Result<WalkRecord> {
    check_theta(theta)?;
    if start as usize >= g.n() {
        return Err(Error::InvalidParams("start vertex out of range".into()));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidParams(format!("bad horizon {horizon}")));
    }
    let rates = WalkRates::new(g, theta);
    let mut rng = SplitMix64::new(derive_seed(seed, WALK_DOMAIN));
    let mut times = vec![0.0];
    let mut positions = vec![start];
    let mut p = start as usize;
    let mut t = 0.0;
    loop {
        let r = rates.rate[p];
        if !(r > 0.0) {
            break;
        }
        t += sample_exp(&mut rng, r);
        if t >= horizon {
            break;
        }
        p = rates.pick_neighbor(g, p, unit_f64(rng.next_u64()));
        times.push(t);
        positions.push(p as u32);
    }
    Ok(WalkRecord {
        times,
        positions,
        t_end: horizon,
        n: g.n(),
    })
}

/// Reclocks a walker path to the additive functional `U(t)` = time spent in
/// `subset`, deleting excursions outside it. The observed path is the
/// partially observed chain on `subset`.
pub fn observe_on_subset(record: &WalkRecord, subset: &[u32]) -> Result<WalkRecord> {
    if subset.is_empty() {
        return Err(Error::InvalidParams("observed subset is empty".into()));
    }
    let mut member = vec![false; record.n];
    for &v in subset {
        if v as usize >= record.n {
            return Err(Error::InvalidParams(format!(
                "subset vertex {v} out of range"
            )));
        }
        member[v as usize] = true;
    }
    let mut times = Vec::new();
    let mut positions = Vec::new();
    let mut s = 0.0;
    for (k, &p) in record.positions.iter().enumerate() {
        if !member[p as usize] {
            continue;
        }
        let stop = record.times.get(k + 1).copied().unwrap_or(record.t_end);
        if positions.last() != Some(&p) {
            times.push(s);
            positions.push(p);
        }
        s += stop - record.times[k];
    }
    Ok(WalkRecord {
        times,
        positions,
        t_end: s,
        n: record.n,
    })
}

/// Monte Carlo consensus-time estimate.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Replicas contributing to the mean (censored runs excluded).
    pub replicas: usize,
    pub censored: usize,
}

/// Estimates the expected consensus time under Bernoulli(u) initial opinions
/// by `replicas` independent runs. Annealed by default: the graph is redrawn
/// each replica from fresh seeds. `quenched` fixes one graph and varies only
/// opinions and event noise.
pub fn estimate_consensus_mc(
    net: &NetworkParams,
    voter: &VoterParams,
    replicas: usize,
    quenched: bool,
) -> Result<McEstimate> {
    if replicas < 2 {
        return Err(Error::InvalidParams("need at least 2 replicas".into()));
    }
    net.validate()?;
    check_theta(voter.theta)?;
    let fixed = if quenched {
        Some(crate::netgen::generate(net)?)
    } else {
        None
    };
    // Replica index order fixes both the seeds and the aggregation order, so
    // the estimate is identical for any thread count.
    let outcomes: Vec<Result<(f64, bool)>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let run_graph;
            let g = if let Some(g) = fixed.as_ref() {
                g
            } else {
                let mut p = *net;
                p.seed = derive_seed(net.seed, REPLICA_GRAPH_DOMAIN ^ r as u64);
                run_graph = crate::netgen::generate(&p)?;
                &run_graph
            };
            let mut vp = *voter;
            vp.seed = derive_seed(voter.seed, REPLICA_INIT_DOMAIN ^ r as u64);
            let mut state = init_opinions(g, &vp)?;
            let rec = simulate_voter(g, &mut state, &vp)?;
            Ok((rec.time, rec.censored))
        })
        .collect();
    let mut times = Vec::with_capacity(replicas);
    let mut censored = 0usize;
    for outcome in outcomes {
        let (time, was_censored) = outcome?;
        if was_censored {
            censored += 1;
        } else {
            times.push(time);
        }
    }
    if times.len() < 2 {
        return Err(Error::DegenerateFit(
            "fewer than 2 uncensored replicas".into(),
        ));
    }
    let (mean, stderr) = crate::stats::mean_stderr(&times);
    Ok(McEstimate {
        mean,
        stderr,
        replicas: times.len(),
        censored,
    })
}
