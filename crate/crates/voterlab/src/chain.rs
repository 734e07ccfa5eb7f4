//! Exact finite-state machinery: generator matrices, spectral quantities,
//! conductance bounds, hitting/meeting solves, and small-graph absorption
//! solvers for voter and coalescing dynamics.
//!
//! Everything operates on explicit generators. Dense linear algebra is capped
//! at [`DENSE_CAP`] states ([`MEETING_CAP`] vertices for the product-chain
//! meeting solves); the sparse path for large graphs is
//! [`relaxation_time_iterative`], which never materializes a matrix.

use nalgebra::{DMatrix, DVector};

use crate::netgen::{components, Graph};
use crate::rng::{unit_f64, SplitMix64};
use crate::{Error, Result};
use rand::RngCore;

/// Largest state count the dense eigen/linear solvers accept.
pub const DENSE_CAP: usize = 2000;
/// Largest vertex count for product-chain meeting solves.
pub const MEETING_CAP: usize = 200;
/// Largest vertex count for the exhaustive Cheeger scan.
pub const CHEEGER_EXACT_CAP: usize = 24;

/// Continuous-time generator together with its stationary distribution.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    q: DMatrix<f64>,
    pi: DVector<f64>,
}

impl GeneratorMatrix {
    /// Wraps an explicit rate matrix: validates shape, nonnegative off-diagonal
    /// entries, zero row sums (the diagonal is recomputed exactly), and
    /// irreducibility, then solves for the stationary distribution.
    pub fn from_matrix(mut q: DMatrix<f64>) -> Result<GeneratorMatrix> {
        let n = q.nrows();
        if n == 0 || q.ncols() != n {
            return Err(Error::InvalidParams("generator must be square".into()));
        }
        if n > DENSE_CAP {
            return Err(Error::TooLarge {
                what: "dense generator",
                size: n,
                cap: DENSE_CAP,
            });
        }
        for i in 0..n {
            let mut off = 0.0;
            for j in 0..n {
                if i != j {
                    let v = q[(i, j)];
                    if !(v >= 0.0) || !v.is_finite() {
                        return Err(Error::InvalidParams(format!(
                            "negative or non-finite rate at ({i}, {j}): {v}"
                        )));
                    }
                    off += v;
                }
            }
            let drift = (q[(i, i)] + off).abs();
            if drift > 1e-9 * off.max(1.0) {
                return Err(Error::InvalidParams(format!(
                    "row {i} does not sum to zero (off by {drift})"
                )));
            }
            q[(i, i)] = -off;
        }
        if !support_connected(&q) {
            return Err(Error::Disconnected(
                "generator support is not irreducible".into(),
            ));
        }
        let pi = if n == 1 {
            DVector::from_element(1, 1.0)
        } else {
            // pi Q = 0 with sum(pi) = 1: replace the last column of Q^T by ones.
            let mut a = q.transpose();
            let mut b = DVector::zeros(n);
            for j in 0..n {
                a[(n - 1, j)] = 1.0;
            }
            b[n - 1] = 1.0;
            a.lu()
                .solve(&b)
                .ok_or_else(|| Error::InvalidParams("stationary solve failed".into()))?
        };
        if pi.iter().any(|&p| !(p > 0.0)) {
            return Err(Error::InvalidParams(
                "stationary distribution is not strictly positive".into(),
            ));
        }
        Ok(GeneratorMatrix { q, pi })
    }

    fn from_symmetric_rates(n: usize, entries: &[(usize, usize, f64)]) -> GeneratorMatrix {
        let mut q = DMatrix::zeros(n, n);
        for &(a, b, w) in entries {
            q[(a, b)] += w;
            q[(b, a)] += w;
            q[(a, a)] -= w;
            q[(b, b)] -= w;
        }
        let pi = DVector::from_element(n, 1.0 / n as f64);
        GeneratorMatrix { q, pi }
    }

    pub fn n(&self) -> usize {
        self.q.nrows()
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn pi(&self) -> &DVector<f64> {
        &self.pi
    }

    /// Total jump rate out of state `i`.
    pub fn rate(&self, i: usize) -> f64 {
        -self.q[(i, i)]
    }

    /// Same chain run at `c` times the speed.
    pub fn scaled(&self, c: f64) -> GeneratorMatrix {
        assert!(c > 0.0);
        GeneratorMatrix {
            q: &self.q * c,
            pi: self.pi.clone(),
        }
    }

    /// Detailed-balance check `pi_i Q(i,j) = pi_j Q(j,i)` within `tol`
    /// relative error.
    pub fn is_reversible(&self, tol: f64) -> bool {
        let n = self.n();
        for i in 0..n {
            for j in (i + 1)..n {
                let a = self.pi[i] * self.q[(i, j)];
                let b = self.pi[j] * self.q[(j, i)];
                if (a - b).abs() > tol * a.abs().max(b.abs()).max(1e-300) {
                    return false;
                }
            }
        }
        true
    }

    fn require_reversible(&self) -> Result<()> {
        if !self.is_reversible(1e-9) {
            return Err(Error::NonReversible(
                "detailed balance fails beyond tolerance".into(),
            ));
        }
        Ok(())
    }

    /// Dumps the rate matrix as CSV, row per line, full double precision.
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> Result<()> {
        for i in 0..self.n() {
            let row: Vec<String> = (0..self.n())
                .map(|j| format!("{:.16e}", self.q[(i, j)]))
                .collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn support_connected(q: &DMatrix<f64>) -> bool {
    let n = q.nrows();
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 0;
    while let Some(v) = stack.pop() {
        count += 1;
        for w in 0..n {
            if w != v && !seen[w] && (q[(v, w)] > 0.0 || q[(w, v)] > 0.0) {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    count == n
}

fn require_connected(g: &Graph) -> Result<()> {
    if components(g).count() != 1 {
        return Err(Error::Disconnected(
            "operation needs a connected graph".into(),
        ));
    }
    Ok(())
}

fn check_dense(n: usize, what: &'static str) -> Result<()> {
    if n > DENSE_CAP {
        return Err(Error::TooLarge {
            what,
            size: n,
            cap: DENSE_CAP,
        });
    }
    Ok(())
}

/// Per-edge jump rate of the degree-weighted walk: each end contributes
/// `d^(theta-1)`, and the opinion (or walker) crosses in either direction at
/// half the sum. Parallel edges multiply the rate.
fn dual_edge_rate(g: &Graph, e: usize, theta: f64) -> f64 {
    let (a, b) = g.edges()[e];
    let (da, db) = (g.degree(a as usize) as f64, g.degree(b as usize) as f64);
    g.multiplicity(e) as f64 * 0.5 * (da.powf(theta - 1.0) + db.powf(theta - 1.0))
}

/// Generator of one dual walker with opinion-exchange exponent `theta`:
/// `Q(i, j) = mult(i, j) (d(i)^(theta-1) + d(j)^(theta-1)) / 2` for `i ~ j`.
/// Symmetric, so the stationary distribution is uniform. Loops are dropped
/// (they only produce invisible self-jumps).
pub fn build_dual_generator(g: &Graph, theta: f64) -> Result<GeneratorMatrix> {
    require_connected(g)?;
    check_dense(g.n(), "dual generator")?;
    if !theta.is_finite() {
        return Err(Error::InvalidParams(format!("non-finite theta {theta}")));
    }
    let entries: Vec<(usize, usize, f64)> = (0..g.m())
        .map(|e| {
            let (a, b) = g.edges()[e];
            (a as usize, b as usize, dual_edge_rate(g, e, theta))
        })
        .collect();
    Ok(GeneratorMatrix::from_symmetric_rates(g.n(), &entries))
}

/// Variable-speed random walk generator: `Q(i, j) = mult(i, j)` for `i ~ j`
/// (the negative graph Laplacian). Coincides with the dual generator at
/// `theta = 1`.
pub fn build_vsrw_generator(g: &Graph) -> Result<GeneratorMatrix> {
    require_connected(g)?;
    check_dense(g.n(), "walk generator")?;
    let entries: Vec<(usize, usize, f64)> = (0..g.m())
        .map(|e| {
            let (a, b) = g.edges()[e];
            (a as usize, b as usize, g.multiplicity(e) as f64)
        })
        .collect();
    Ok(GeneratorMatrix::from_symmetric_rates(g.n(), &entries))
}

/// Symmetrized eigendecomposition of a reversible generator: returns the
/// eigenvalues sorted descending (first ~0) and the orthonormal eigenvector
/// matrix of `D^(1/2) Q D^(-1/2)`.
fn sym_eigen(gm: &GeneratorMatrix) -> Result<(DVector<f64>, DMatrix<f64>)> {
    gm.require_reversible()?;
    let n = gm.n();
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] = gm.q[(i, j)] * (gm.pi[i] / gm.pi[j]).sqrt();
        }
    }
    // Force exact symmetry before the symmetric solver.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (s[(i, j)] + s[(j, i)]);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    let eig = s.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let evals = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut evecs = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        evecs.set_column(col, &eig.eigenvectors.column(k));
    }
    Ok((evals, evecs))
}

/// Relaxation time `max(-1/lambda)` over nonzero eigenvalues of the
/// generator, i.e. the inverse spectral gap. Dense path; reversible chains
/// only.
pub fn relaxation_time(gm: &GeneratorMatrix) -> Result<f64> {
    let n = gm.n();
    if n < 2 {
        return Err(Error::InvalidParams(
            "relaxation time needs at least 2 states".into(),
        ));
    }
    let (evals, _) = sym_eigen(gm)?;
    let scale = (0..n).map(|i| gm.rate(i)).fold(0.0f64, f64::max).max(1.0);
    if evals[0].abs() > 1e-8 * scale {
        return Err(Error::InvalidParams(format!(
            "top eigenvalue {} is not numerically zero",
            evals[0]
        )));
    }
    let gap = -evals[1];
    if gap <= 1e-12 * scale {
        return Err(Error::Disconnected("zero spectral gap".into()));
    }
    Ok(1.0 / gap)
}

/// Worst-case total-variation distance from stationarity at time `t`,
/// evaluated from one reused eigendecomposition.
fn tv_distance(
    gm: &GeneratorMatrix,
    evals: &DVector<f64>,
    evecs: &DMatrix<f64>,
    t: f64,
) -> f64 {
    let n = gm.n();
    // exp(tQ)(x, y) = sum_k e^{t lambda_k} v_xk v_yk sqrt(pi_y / pi_x).
    let scaled = DMatrix::from_fn(n, n, |i, k| evecs[(i, k)] * (t * evals[k]).exp());
    let pt = &scaled * evecs.transpose();
    let mut worst = 0.0f64;
    for x in 0..n {
        let mut acc = 0.0;
        for y in 0..n {
            let p = pt[(x, y)] * (gm.pi[y] / gm.pi[x]).sqrt();
            acc += (p - gm.pi[y]).abs();
        }
        worst = worst.max(0.5 * acc);
    }
    worst
}

/// Mixing time at total-variation threshold `1/e`, located by bisection to
/// absolute accuracy 1e-6. The transition kernel is evaluated through the
/// spectral form of `exp(tQ)`, reusing one symmetric eigendecomposition
/// across all bisection steps.
pub fn tv_mixing_time(gm: &GeneratorMatrix) -> Result<f64> {
    let n = gm.n();
    if n < 2 {
        return Ok(0.0);
    }
    let (evals, evecs) = sym_eigen(gm)?;
    let target = 1.0 / std::f64::consts::E;
    if tv_distance(gm, &evals, &evecs, 0.0) <= target {
        return Ok(0.0);
    }
    let t_rel = relaxation_time(gm)?;
    let mut hi = 10.0 * t_rel * (1.0 + 0.5 * (n as f64).ln());
    let mut grow = 0;
    while tv_distance(gm, &evals, &evecs, hi) > target {
        hi *= 2.0;
        grow += 1;
        if grow > 60 {
            return Err(Error::NoConvergence(
                "TV distance did not cross the threshold".into(),
            ));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if tv_distance(gm, &evals, &evecs, mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Edge-expansion constant `min e(S, S^c) / |S|` over vertex sets with
/// `|S| <= n/2`. Exact (exhaustive) up to [`CHEEGER_EXACT_CAP`] vertices;
/// beyond that, the best sweep cut of the second Laplacian eigenvector,
/// which is a certified upper bound. Simple connected graphs only.
pub fn cheeger_constant(g: &Graph) -> Result<f64> {
    require_connected(g)?;
    if !g.is_simple() {
        return Err(Error::InvalidParams(
            "expansion constant is defined here for simple graphs; flatten first".into(),
        ));
    }
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidParams("need at least 2 vertices".into()));
    }
    if n <= CHEEGER_EXACT_CAP {
        let masks: Vec<u64> = (0..n)
            .map(|v| {
                g.neighbors(v)
                    .iter()
                    .fold(0u64, |acc, &w| acc | (1u64 << w))
            })
            .collect();
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut best = f64::INFINITY;
        for s in 1..full {
            let size = s.count_ones() as usize;
            if 2 * size > n {
                continue;
            }
            let mut cut = 0u32;
            let mut rest = s;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                cut += (masks[v] & !s & full).count_ones();
            }
            let ratio = cut as f64 / size as f64;
            if ratio < best {
                best = ratio;
            }
        }
        Ok(best)
    } else {
        let fiedler = fiedler_vector(g)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| fiedler[a].total_cmp(&fiedler[b]));
        let mut in_set = vec![false; n];
        let mut cut = 0i64;
        let mut best = f64::INFINITY;
        for (k, &v) in order.iter().enumerate().take(n - 1) {
            let inside = g.neighbors(v).iter().filter(|&&w| in_set[w as usize]).count() as i64;
            cut += g.degree(v) as i64 - 2 * inside;
            in_set[v] = true;
            let small = (k + 1).min(n - k - 1);
            let ratio = cut as f64 / small as f64;
            if ratio < best {
                best = ratio;
            }
        }
        Ok(best)
    }
}

/// Second-smallest Laplacian eigenvector (dense or iterative by size).
fn fiedler_vector(g: &Graph) -> Result<Vec<f64>> {
    if g.n() <= DENSE_CAP {
        let gm = build_vsrw_generator(g)?;
        let (_, evecs) = sym_eigen(&gm)?;
        Ok((0..g.n()).map(|i| evecs[(i, 1)]).collect())
    } else {
        let (_, vec) = smallest_positive_laplacian_pair(g, 1.0)?;
        Ok(vec)
    }
}

/// Exact-expansion and relaxation-time sandwich
/// `1/(2 Phi) <= t_rel <= 8 max_deg / Phi^2`. Exhaustive sizes only; returns
/// (lower, relaxation time, upper) or an invariant violation.
pub fn cheeger_relax_sandwich(g: &Graph) -> Result<(f64, f64, f64)> {
    if g.n() > CHEEGER_EXACT_CAP {
        return Err(Error::TooLarge {
            what: "exact expansion scan",
            size: g.n(),
            cap: CHEEGER_EXACT_CAP,
        });
    }
    let phi = cheeger_constant(g)?;
    let t_rel = relaxation_time(&build_vsrw_generator(g)?)?;
    let lower = 1.0 / (2.0 * phi);
    let upper = 8.0 * g.max_degree() as f64 / (phi * phi);
    let slack = 1e-9 * t_rel.max(1.0);
    if lower > t_rel + slack || t_rel > upper + slack {
        return Err(Error::InvariantViolated(format!(
            "expansion sandwich fails: {lower} <= {t_rel} <= {upper}"
        )));
    }
    Ok((lower, t_rel, upper))
}

/// Ergodic flows `c(ij) = pi(i) Q(i, j)` of a reversible chain, stored per
/// unordered support edge.
#[derive(Debug, Clone)]
pub struct ConductanceMap {
    entries: Vec<(usize, usize, f64)>,
}

impl ConductanceMap {
    pub fn get(&self, a: usize, b: usize) -> Option<f64> {
        let key = (a.min(b), a.max(b));
        self.entries
            .binary_search_by(|&(i, j, _)| (i, j).cmp(&key))
            .ok()
            .map(|k| self.entries[k].2)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Computes every edge conductance of a reversible generator.
pub fn edge_conductances(gm: &GeneratorMatrix) -> Result<ConductanceMap> {
    gm.require_reversible()?;
    let n = gm.n();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if gm.q[(i, j)] > 0.0 {
                entries.push((i, j, gm.pi[i] * gm.q[(i, j)]));
            }
        }
    }
    Ok(ConductanceMap { entries })
}

/// Electric-network bound on the commute time between the endpoints of
/// `path`: the sum of inverse conductances along it. Every consecutive pair
/// must be a support edge of the generator.
pub fn path_hitting_bound(gm: &GeneratorMatrix, path: &[usize]) -> Result<f64> {
    if path.len() < 2 {
        return Err(Error::InvalidParams(
            "path needs at least two states".into(),
        ));
    }
    let cond = edge_conductances(gm)?;
    let mut acc = 0.0;
    for w in path.windows(2) {
        let c = cond.get(w[0], w[1]).ok_or_else(|| {
            Error::InvalidParams(format!("({}, {}) is not an edge of the chain", w[0], w[1]))
        })?;
        acc += 1.0 / c;
    }
    Ok(acc)
}

/// Expected hitting time of `to` from `from`, by one dense linear solve.
pub fn expected_hitting_time(gm: &GeneratorMatrix, from: usize, to: usize) -> Result<f64> {
    let n = gm.n();
    if from >= n || to >= n {
        return Err(Error::InvalidParams("state out of range".into()));
    }
    if from == to {
        return Ok(0.0);
    }
    check_dense(n, "hitting-time solve")?;
    let keep: Vec<usize> = (0..n).filter(|&k| k != to).collect();
    let mut a = DMatrix::zeros(n - 1, n - 1);
    for (r, &i) in keep.iter().enumerate() {
        for (c, &j) in keep.iter().enumerate() {
            a[(r, c)] = gm.q[(i, j)];
        }
    }
    let b = DVector::from_element(n - 1, -1.0);
    let h = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::InvalidParams("hitting solve is singular".into()))?;
    let pos = keep.iter().position(|&k| k == from).unwrap();
    Ok(h[pos])
}

/// Expected commute time between `a` and `b` (both hitting directions).
pub fn commute_time(gm: &GeneratorMatrix, a: usize, b: usize) -> Result<f64> {
    Ok(expected_hitting_time(gm, a, b)? + expected_hitting_time(gm, b, a)?)
}

/// Expected meeting times of two independent copies of the chain, for every
/// ordered start pair: entry (x, y) is the expectation from X = x, Y = y,
/// zero on the diagonal. Solved as absorption of the product chain by
/// conjugate gradients on its symmetrized restriction.
pub fn meeting_times(gm: &GeneratorMatrix) -> Result<DMatrix<f64>> {
    gm.require_reversible()?;
    let n = gm.n();
    if n > MEETING_CAP {
        return Err(Error::TooLarge {
            what: "product-chain meeting solve",
            size: n,
            cap: MEETING_CAP,
        });
    }
    if n == 1 {
        return Ok(DMatrix::zeros(1, 1));
    }
    let nbr: Vec<Vec<(usize, f64)>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && gm.q[(i, j)] > 0.0)
                .map(|j| (j, gm.q[(i, j)]))
                .collect()
        })
        .collect();
    let rate: Vec<f64> = (0..n).map(|i| gm.rate(i)).collect();
    // Ordered off-diagonal pairs, flat index x * n + y; diagonal slots stay 0.
    let dim = n * n;
    let sqrt_w: Vec<f64> = (0..dim)
        .map(|k| {
            let (x, y) = (k / n, k % n);
            if x == y {
                0.0
            } else {
                (gm.pi[x] * gm.pi[y]).sqrt()
            }
        })
        .collect();
    // B h = 1 on off-diagonal pairs, B = (rate_x + rate_y) I - moves that do
    // not hit the diagonal. Conjugate gradients on S = D^{1/2} B D^{-1/2}
    // with D = diag(pi_x pi_y), which is symmetric positive definite.
    let apply = |g_in: &[f64], out: &mut [f64]| {
        for x in 0..n {
            for y in 0..n {
                let k = x * n + y;
                if x == y {
                    out[k] = g_in[k];
                    continue;
                }
                let h = |xx: usize, yy: usize| {
                    let kk = xx * n + yy;
                    g_in[kk] / sqrt_w[kk]
                };
                let mut acc = (rate[x] + rate[y]) * h(x, y);
                for &(xp, r) in &nbr[x] {
                    if xp != y {
                        acc -= r * h(xp, y);
                    }
                }
                for &(yp, r) in &nbr[y] {
                    if yp != x {
                        acc -= r * h(x, yp);
                    }
                }
                out[k] = acc * sqrt_w[k];
            }
        }
    };
    let b: Vec<f64> = sqrt_w.clone();
    let mut x = vec![0.0; dim];
    let mut r = b.clone();
    let mut p = r.clone();
    let mut sp = vec![0.0; dim];
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    let bnorm = dot(&b, &b).sqrt();
    let tol = 1e-13 * bnorm;
    let mut rr = dot(&r, &r);
    let max_iter = 200 * dim + 1000;
    let mut iter = 0;
    while rr.sqrt() > tol {
        apply(&p, &mut sp);
        let alpha = rr / dot(&p, &sp);
        for k in 0..dim {
            x[k] += alpha * p[k];
            r[k] -= alpha * sp[k];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for k in 0..dim {
            p[k] = r[k] + beta * p[k];
        }
        iter += 1;
        if iter > max_iter {
            return Err(Error::NoConvergence(
                "meeting-time conjugate gradients stalled".into(),
            ));
        }
    }
    let mut m = DMatrix::zeros(n, n);
    for xx in 0..n {
        for y in 0..n {
            if xx != y {
                let k = xx * n + y;
                m[(xx, y)] = x[k] / sqrt_w[k];
            }
        }
    }
    // The solution is symmetric up to solver error; average to restore it.
    for xx in 0..n {
        for y in (xx + 1)..n {
            let v = 0.5 * (m[(xx, y)] + m[(y, xx)]);
            m[(xx, y)] = v;
            m[(y, xx)] = v;
        }
    }
    Ok(m)
}

/// Expected meeting time from the start pair (x, y). Solves the full product
/// chain; reuse [`meeting_times`] when several pairs are needed.
pub fn exact_meeting_time(gm: &GeneratorMatrix, x: usize, y: usize) -> Result<f64> {
    if x >= gm.n() || y >= gm.n() {
        return Err(Error::InvalidParams("state out of range".into()));
    }
    Ok(meeting_times(gm)?[(x, y)])
}

/// Expected meeting time from two independent stationary starts.
pub fn stationary_meeting_time(gm: &GeneratorMatrix) -> Result<f64> {
    let m = meeting_times(gm)?;
    let n = gm.n();
    let mut acc = 0.0;
    for x in 0..n {
        for y in 0..n {
            acc += gm.pi[x] * gm.pi[y] * m[(x, y)];
        }
    }
    Ok(acc)
}

/// Universal lower bound on the stationary meeting time:
/// `(1 - sum pi^2)^2 / (4 sum q(i) pi(i)^2)`.
pub fn meeting_lower_bound(gm: &GeneratorMatrix) -> f64 {
    let n = gm.n();
    let s2: f64 = (0..n).map(|i| gm.pi[i] * gm.pi[i]).sum();
    let denom: f64 = (0..n).map(|i| gm.rate(i) * gm.pi[i] * gm.pi[i]).sum();
    (1.0 - s2).powi(2) / (4.0 * denom)
}

/// Generator of the chain observed on `subset` (complement excised by Schur
/// complement, matching the time-change that deletes off-subset excursions).
pub fn observed_generator(gm: &GeneratorMatrix, subset: &[usize]) -> Result<GeneratorMatrix> {
    let n = gm.n();
    let mut v: Vec<usize> = subset.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.is_empty() {
        return Err(Error::InvalidParams("observed subset is empty".into()));
    }
    if v.iter().any(|&s| s >= n) {
        return Err(Error::InvalidParams("subset state out of range".into()));
    }
    if v.len() == n {
        return Ok(gm.clone());
    }
    let u: Vec<usize> = (0..n).filter(|k| v.binary_search(k).is_err()).collect();
    let pick = |rows: &[usize], cols: &[usize]| {
        DMatrix::from_fn(rows.len(), cols.len(), |r, c| gm.q[(rows[r], cols[c])])
    };
    let qvv = pick(&v, &v);
    let qvu = pick(&v, &u);
    let quu = pick(&u, &u);
    let quv = pick(&u, &v);
    let x = quu
        .lu()
        .solve(&quv)
        .ok_or_else(|| Error::InvalidParams("observed-chain solve is singular".into()))?;
    let s = qvv - qvu * x;
    let mut pi = DVector::from_iterator(v.len(), v.iter().map(|&k| gm.pi[k]));
    let total: f64 = pi.iter().sum();
    pi /= total;
    let got = GeneratorMatrix { q: s, pi };
    got.require_reversible()?;
    Ok(got)
}

/// Relaxation times of the dual walker for each `theta` in the ascending
/// list, verifying that faster exchange never slows relaxation (the rates
/// are non-decreasing in `theta`, so relaxation time is non-increasing).
pub fn relaxation_monotone_check(g: &Graph, thetas: &[f64]) -> Result<Vec<f64>> {
    if thetas.len() < 2 {
        return Err(Error::InvalidParams("need at least two theta values".into()));
    }
    if thetas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParams(
            "theta values must be strictly increasing".into(),
        ));
    }
    let mut out = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let t = if g.n() <= DENSE_CAP {
            relaxation_time(&build_dual_generator(g, theta)?)?
        } else {
            relaxation_time_iterative(g, theta)?
        };
        out.push(t);
    }
    for w in out.windows(2) {
        if w[1] > w[0] * (1.0 + 1e-9) {
            return Err(Error::InvariantViolated(format!(
                "relaxation time increased with theta: {} -> {}",
                w[0], w[1]
            )));
        }
    }
    Ok(out)
}

/// Smallest positive eigenpair of the weighted Laplacian via inverse power
/// iteration, each step solved by conjugate gradients orthogonal to the
/// all-ones kernel. Returns (eigenvalue, eigenvector).
fn smallest_positive_laplacian_pair(g: &Graph, theta: f64) -> Result<(f64, Vec<f64>)> {
    require_connected(g)?;
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidParams(
            "spectral gap needs at least 2 vertices".into(),
        ));
    }
    let weights: Vec<f64> = (0..g.m()).map(|e| dual_edge_rate(g, e, theta)).collect();
    let apply = |x: &[f64], out: &mut [f64]| {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (e, &(a, b)) in g.edges().iter().enumerate() {
            let (a, b) = (a as usize, b as usize);
            let flow = weights[e] * (x[a] - x[b]);
            out[a] += flow;
            out[b] -= flow;
        }
    };
    let project = |x: &mut [f64]| {
        let mean = x.iter().sum::<f64>() / n as f64;
        x.iter_mut().for_each(|v| *v -= mean);
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();

    // Deterministic start vector.
    let mut rng = SplitMix64::new(0x5eed_1ab5_0f1e_d1e5);
    let mut x: Vec<f64> = (0..n).map(|_| unit_f64(rng.next_u64()) - 0.5).collect();
    project(&mut x);
    let norm = dot(&x, &x).sqrt();
    x.iter_mut().for_each(|v| *v /= norm);

    let mut lam_prev = f64::INFINITY;
    let mut y = vec![0.0; n];
    let mut residual = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut lp = vec![0.0; n];
    for _outer in 0..300 {
        // CG solve L y = x restricted to the complement of the kernel.
        y.iter_mut().for_each(|v| *v = 0.0);
        residual.copy_from_slice(&x);
        p.copy_from_slice(&residual);
        let bnorm2 = dot(&residual, &residual);
        let mut rr = bnorm2;
        let cg_cap = 200 * n + 2000;
        let mut cg_iter = 0;
        while rr > 1e-24 * bnorm2 {
            apply(&p, &mut lp);
            project(&mut lp);
            let alpha = rr / dot(&p, &lp);
            for k in 0..n {
                y[k] += alpha * p[k];
                residual[k] -= alpha * lp[k];
            }
            let rr_new = dot(&residual, &residual);
            let beta = rr_new / rr;
            rr = rr_new;
            for k in 0..n {
                p[k] = residual[k] + beta * p[k];
            }
            cg_iter += 1;
            if cg_iter > cg_cap {
                return Err(Error::NoConvergence(
                    "inner conjugate-gradient solve stalled".into(),
                ));
            }
        }
        project(&mut y);
        // Rayleigh quotient of the new iterate: x ~ L y means lam ~ <y, x> / <y, y>.
        let lam = dot(&y, &x) / dot(&y, &y);
        let norm = dot(&y, &y).sqrt();
        for k in 0..n {
            x[k] = y[k] / norm;
        }
        if (lam - lam_prev).abs() <= 1e-11 * lam.abs().max(1e-300) {
            return Ok((lam, x));
        }
        lam_prev = lam;
    }
    Ok((lam_prev, x))
}

/// Relaxation time of the dual walker (`theta = 1` gives the VSRW) on a
/// large sparse graph: inverse spectral gap of the weighted Laplacian,
/// matrix-free.
pub fn relaxation_time_iterative(g: &Graph, theta: f64) -> Result<f64> {
    let (lam, _) = smallest_positive_laplacian_pair(g, theta)?;
    if lam <= 0.0 {
        return Err(Error::NoConvergence("nonpositive gap estimate".into()));
    }
    Ok(1.0 / lam)
}

/// All connected labeled simple graphs on `n <= 6` vertices.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!(n >= 1 && n <= 6, "enumeration is exponential; n <= 6 only");
    let pairs: Vec<(u32, u32)> = (0..n as u32)
        .flat_map(|i| ((i + 1)..n as u32).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1 << pairs.len()) {
        let edges: Vec<(u32, u32)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        if components(&g).count() == 1 {
            out.push(g);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Exact absorption solvers on explicit configuration spaces (small graphs).
// ---------------------------------------------------------------------------

/// Largest vertex count for the binary-opinion and walker-set exact solvers
/// (state spaces of size 2^n).
pub const ABSORB_EXACT_CAP: usize = 10;
/// Largest vertex count for the distinct-label exact solver (state space n^n).
pub const LABELED_EXACT_CAP: usize = 4;

struct AbsorptionSystem {
    /// transient state id -> dense index
    index: Vec<i64>,
    transient: Vec<u64>,
}

impl AbsorptionSystem {
    fn new(space: u64, absorbing: impl Fn(u64) -> bool) -> AbsorptionSystem {
        let mut index = vec![-1i64; space as usize];
        let mut transient = Vec::new();
        for s in 0..space {
            if !absorbing(s) {
                index[s as usize] = transient.len() as i64;
                transient.push(s);
            }
        }
        AbsorptionSystem { index, transient }
    }

    /// Solves for expected absorption times given the out-transitions of each
    /// transient state.
    fn solve(&self, moves: impl Fn(u64, &mut Vec<(u64, f64)>)) -> Result<Vec<f64>> {
        let t = self.transient.len();
        if t == 0 {
            return Ok(vec![]);
        }
        let mut a = DMatrix::zeros(t, t);
        let mut buf = Vec::new();
        for (r, &s) in self.transient.iter().enumerate() {
            buf.clear();
            moves(s, &mut buf);
            for &(target, rate) in &buf {
                a[(r, r)] -= rate;
                let c = self.index[target as usize];
                if c >= 0 {
                    a[(r, c as usize)] += rate;
                }
            }
        }
        let b = DVector::from_element(t, -1.0);
        let h = a
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::InvalidParams("absorption solve is singular".into()))?;
        Ok(h.iter().copied().collect())
    }

    fn time_from(&self, h: &[f64], state: u64) -> f64 {
        let k = self.index[state as usize];
        if k < 0 {
            0.0
        } else {
            h[k as usize]
        }
    }
}

fn edge_rates(g: &Graph, theta: f64) -> Vec<f64> {
    (0..g.m()).map(|e| dual_edge_rate(g, e, theta)).collect()
}

/// Exact expected consensus time of the two-opinion voter model from the
/// given configuration (bit v of the state = opinion of vertex v). Absorbing
/// states are those with no discordant edge, i.e. constant per component.
pub fn voter_consensus_exact(g: &Graph, theta: f64, init: &[u8]) -> Result<f64> {
    let sys = voter_system(g, theta)?;
    let mask = init
        .iter()
        .enumerate()
        .fold(0u64, |acc, (v, &o)| acc | ((o as u64 & 1) << v));
    Ok(sys.0.time_from(&sys.1, mask))
}

/// Exact mean consensus time under independent Bernoulli(`u`) initial
/// opinions.
pub fn voter_consensus_exact_density(g: &Graph, theta: f64, u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidParams(format!(
            "density must lie in [0, 1], got {u}"
        )));
    }
    let n = g.n();
    let sys = voter_system(g, theta)?;
    let mut acc = 0.0;
    for mask in 0u64..(1 << n) {
        let k = mask.count_ones() as i32;
        let w = u.powi(k) * (1.0 - u).powi(n as i32 - k);
        acc += w * sys.0.time_from(&sys.1, mask);
    }
    Ok(acc)
}

fn voter_system(g: &Graph, theta: f64) -> Result<(AbsorptionSystem, Vec<f64>)> {
    let n = g.n();
    if n > ABSORB_EXACT_CAP {
        return Err(Error::TooLarge {
            what: "exact voter solve",
            size: n,
            cap: ABSORB_EXACT_CAP,
        });
    }
    let rates = edge_rates(g, theta);
    let edges = g.edges();
    let discordant_free = |s: u64| {
        edges
            .iter()
            .all(|&(a, b)| (s >> a) & 1 == (s >> b) & 1)
    };
    let sys = AbsorptionSystem::new(1 << n, discordant_free);
    let h = sys.solve(|s, out| {
        for (e, &(a, b)) in edges.iter().enumerate() {
            if (s >> a) & 1 != (s >> b) & 1 {
                // Either endpoint adopts the other's opinion at half the
                // edge rate.
                out.push((s ^ (1 << a), rates[e]));
                out.push((s ^ (1 << b), rates[e]));
            }
        }
    })?;
    Ok((sys, h))
}

/// Exact expected consensus time starting from all-distinct opinions (one
/// label per vertex), the state coupled to full walker occupation under
/// time reversal.
pub fn labeled_consensus_exact(g: &Graph, theta: f64) -> Result<f64> {
    let n = g.n();
    if n > LABELED_EXACT_CAP {
        return Err(Error::TooLarge {
            what: "exact labeled-voter solve",
            size: n,
            cap: LABELED_EXACT_CAP,
        });
    }
    let rates = edge_rates(g, theta);
    let edges = g.edges();
    let space = (n as u64).pow(n as u32);
    let label = |s: u64, v: usize| (s / (n as u64).pow(v as u32)) % n as u64;
    let with_label = |s: u64, v: usize, l: u64| {
        let p = (n as u64).pow(v as u32);
        s - label(s, v) * p + l * p
    };
    let absorbing = |s: u64| {
        edges
            .iter()
            .all(|&(a, b)| label(s, a as usize) == label(s, b as usize))
    };
    let sys = AbsorptionSystem::new(space, absorbing);
    let h = sys.solve(|s, out| {
        for (e, &(a, b)) in edges.iter().enumerate() {
            let (a, b) = (a as usize, b as usize);
            let (la, lb) = (label(s, a), label(s, b));
            if la != lb {
                out.push((with_label(s, a, lb), rates[e]));
                out.push((with_label(s, b, la), rates[e]));
            }
        }
    })?;
    // All-distinct start: vertex v holds label v.
    let start = (0..n).fold(0u64, |acc, v| acc + v as u64 * (n as u64).pow(v as u32));
    Ok(sys.time_from(&h, start))
}

/// Exact expected coalescence time of degree-weighted walkers started on the
/// given occupied set; absorbed once every component holds at most one
/// walker.
pub fn coalescing_time_exact(g: &Graph, theta: f64, occupied: &[u32]) -> Result<f64> {
    let n = g.n();
    if n > ABSORB_EXACT_CAP {
        return Err(Error::TooLarge {
            what: "exact coalescence solve",
            size: n,
            cap: ABSORB_EXACT_CAP,
        });
    }
    if occupied.is_empty() {
        return Err(Error::InvalidParams("no walkers".into()));
    }
    let mut start = 0u64;
    for &v in occupied {
        if v as usize >= n {
            return Err(Error::InvalidParams("walker position out of range".into()));
        }
        start |= 1 << v;
    }
    let comp = components(g);
    let comp_masks: Vec<u64> = (0..comp.count() as u32)
        .map(|c| {
            comp.vertices_of(c)
                .iter()
                .fold(0u64, |acc, &v| acc | (1 << v))
        })
        .collect();
    let rates = edge_rates(g, theta);
    let edges = g.edges();
    let absorbing =
        |s: u64| comp_masks.iter().all(|&m| (s & m).count_ones() <= 1) || s == 0;
    let sys = AbsorptionSystem::new(1 << n, absorbing);
    let h = sys.solve(|s, out| {
        for (e, &(a, b)) in edges.iter().enumerate() {
            let (ba, bb) = (1u64 << a, 1u64 << b);
            // A walker crosses the edge in either direction at half the edge
            // rate per direction; landing on an occupied vertex merges.
            if s & ba != 0 {
                out.push(((s & !ba) | bb, rates[e]));
            }
            if s & bb != 0 {
                out.push(((s & !bb) | ba, rates[e]));
            }
        }
    })?;
    Ok(sys.time_from(&h, start))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2() -> Graph {
        Graph::complete(2)
    }

    #[test]
    fn dual_generator_rates() {
        // Star on 3 leaves, theta = 2: center-leaf rate (3 + 1) / 2 = 2.
        let g = Graph::star(3);
        let gm = build_dual_generator(&g, 2.0).unwrap();
        assert!((gm.q()[(0, 1)] - 2.0).abs() < 1e-15);
        assert!((gm.q()[(1, 0)] - 2.0).abs() < 1e-15);
        assert!((gm.rate(0) - 6.0).abs() < 1e-15);
        assert!(gm.is_reversible(1e-12));
        // Conductance: pi = 1/4 uniform, c = pi * Q.
        let cond = edge_conductances(&gm).unwrap();
        assert!((cond.get(0, 1).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(cond.get(1, 2), None);
        assert_eq!(cond.len(), 3);
    }

    #[test]
    fn vsrw_is_dual_at_theta_one() {
        let g = Graph::cycle(5);
        let a = build_vsrw_generator(&g).unwrap();
        let b = build_dual_generator(&g, 1.0).unwrap();
        assert!((a.q() - b.q()).abs().max() < 1e-14);
    }

    #[test]
    fn builders_reject_disconnected() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            build_vsrw_generator(&g),
            Err(Error::Disconnected(_))
        ));
    }

    #[test]
    fn from_matrix_validates() {
        use nalgebra::dmatrix;
        let q = dmatrix![-1.0, 1.0; 2.0, -2.0];
        let gm = GeneratorMatrix::from_matrix(q).unwrap();
        assert!((gm.pi()[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!(gm.is_reversible(1e-12));

        let bad = dmatrix![-1.0, 2.0; 2.0, -2.0];
        assert!(GeneratorMatrix::from_matrix(bad).is_err());
        let neg = dmatrix![-1.0, -1.0; 1.0, -1.0];
        assert!(GeneratorMatrix::from_matrix(neg).is_err());
        let red = dmatrix![0.0, 0.0; 0.0, 0.0];
        assert!(GeneratorMatrix::from_matrix(red).is_err());
    }

    #[test]
    fn relaxation_closed_forms() {
        // Two-state chain at unit rates: gap 2.
        let gm = build_vsrw_generator(&k2()).unwrap();
        assert!((relaxation_time(&gm).unwrap() - 0.5).abs() < 1e-12);
        // Path on 3: Laplacian spectrum {0, 1, 3}.
        let gm = build_vsrw_generator(&Graph::path(3)).unwrap();
        assert!((relaxation_time(&gm).unwrap() - 1.0).abs() < 1e-10);
        // Complete graph: gap n.
        for n in [3usize, 5, 8] {
            let gm = build_vsrw_generator(&Graph::complete(n)).unwrap();
            assert!((relaxation_time(&gm).unwrap() - 1.0 / n as f64).abs() < 1e-10);
        }
        // 4-cycle: spectrum {0, 2, 2, 4}.
        let gm = build_vsrw_generator(&Graph::cycle(4)).unwrap();
        assert!((relaxation_time(&gm).unwrap() - 0.5).abs() < 1e-10);
    }

    #[test]
    fn scaling_divides_relaxation() {
        let gm = build_vsrw_generator(&Graph::path(4)).unwrap();
        let t = relaxation_time(&gm).unwrap();
        let t3 = relaxation_time(&gm.scaled(3.0)).unwrap();
        assert!((t3 - t / 3.0).abs() < 1e-10);
    }

    #[test]
    fn mixing_closed_form_on_two_states() {
        // d(t) = exp(-2t)/2 crosses 1/e at (1 - ln 2) / 2.
        let gm = build_vsrw_generator(&k2()).unwrap();
        let want = (1.0 - std::f64::consts::LN_2) / 2.0;
        let got = tv_mixing_time(&gm).unwrap();
        assert!((got - want).abs() < 2e-6, "got {got}, want {want}");
    }

    #[test]
    fn mixing_respects_relaxation_bound() {
        // t_mix <= t_rel (1 + ln(1/min pi) / 2) for reversible chains.
        let half_log = |n: usize| 1.0 + 0.5 * (n as f64).ln();
        for g in [Graph::path(6), Graph::cycle(7), Graph::star(5)] {
            let gm = build_vsrw_generator(&g).unwrap();
            let tm = tv_mixing_time(&gm).unwrap();
            let tr = relaxation_time(&gm).unwrap();
            assert!(
                tm <= tr * half_log(g.n()) + 1e-6,
                "bound fails: {tm} vs {tr}"
            );
        }
    }

    #[test]
    fn cheeger_known_values() {
        assert!((cheeger_constant(&k2()).unwrap() - 1.0).abs() < 1e-15);
        // Complete graph K4: min cut ratio at |S| = 2: 4/2 = 2.
        assert!((cheeger_constant(&Graph::complete(4)).unwrap() - 2.0).abs() < 1e-15);
        // Cycle C6: best is a path of 3 consecutive vertices, 2/3.
        assert!((cheeger_constant(&Graph::cycle(6)).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        // Path P4: cut the middle edge, 1/2.
        assert!((cheeger_constant(&Graph::path(4)).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cheeger_sweep_upper_bound_on_larger_graph() {
        // A 30-cycle is above the exhaustive cap; the sweep cut must still
        // upper-bound the true constant 2/15 and be a valid cut ratio.
        let g = Graph::cycle(30);
        let phi = cheeger_constant(&g).unwrap();
        assert!(phi >= 2.0 / 15.0 - 1e-12, "phi {phi}");
        assert!(phi <= 0.5, "phi {phi}");
    }

    #[test]
    fn sandwich_on_small_graphs() {
        // 4-cycle: Phi = 1, t_rel = 1/2, bounds (1/2, 16): equality below.
        let (lo, t, hi) = cheeger_relax_sandwich(&Graph::cycle(4)).unwrap();
        assert!((lo - 0.5).abs() < 1e-12);
        assert!((t - 0.5).abs() < 1e-10);
        assert!((hi - 16.0).abs() < 1e-9);
        // Two-state: (1/2, 1/2, 8).
        let (lo, t, hi) = cheeger_relax_sandwich(&k2()).unwrap();
        assert!((lo - 0.5).abs() < 1e-12);
        assert!((t - 0.5).abs() < 1e-12);
        assert!((hi - 8.0).abs() < 1e-12);
    }

    #[test]
    fn hitting_and_commute_times() {
        // Two-state chain: hitting time 1 each way, commute 2.
        let gm = build_vsrw_generator(&k2()).unwrap();
        assert!((expected_hitting_time(&gm, 0, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((commute_time(&gm, 0, 1).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(expected_hitting_time(&gm, 1, 1).unwrap(), 0.0);
        // Path P3 endpoints: standard birth-death values E_0 T_2 = 4? Check
        // against the electric bound: commute = sum over path of 1/c exactly
        // for a tree path (all current flows through it).
        let gm = build_vsrw_generator(&Graph::path(3)).unwrap();
        let commute = commute_time(&gm, 0, 2).unwrap();
        let bound = path_hitting_bound(&gm, &[0, 1, 2]).unwrap();
        assert!((commute - bound).abs() < 1e-10, "{commute} vs {bound}");
    }

    #[test]
    fn path_bound_dominates_commute_everywhere() {
        for g in connected_graphs(4) {
            let gm = build_vsrw_generator(&g).unwrap();
            // Breadth-first path from 0 to the farthest vertex.
            let path = bfs_path(&g, 0, farthest(&g, 0));
            let commute = commute_time(&gm, path[0], *path.last().unwrap()).unwrap();
            let bound = path_hitting_bound(&gm, &path).unwrap();
            assert!(
                commute <= bound + 1e-9,
                "commute {commute} above bound {bound}"
            );
        }
    }

    fn farthest(g: &Graph, from: usize) -> usize {
        let mut dist = vec![usize::MAX; g.n()];
        let mut queue = std::collections::VecDeque::new();
        dist[from] = 0;
        queue.push_back(from);
        let mut last = from;
        while let Some(v) = queue.pop_front() {
            last = v;
            for &w in g.neighbors(v) {
                if dist[w as usize] == usize::MAX {
                    dist[w as usize] = dist[v] + 1;
                    queue.push_back(w as usize);
                }
            }
        }
        last
    }

    fn bfs_path(g: &Graph, from: usize, to: usize) -> Vec<usize> {
        let mut prev = vec![usize::MAX; g.n()];
        let mut queue = std::collections::VecDeque::new();
        prev[from] = from;
        queue.push_back(from);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if prev[w as usize] == usize::MAX {
                    prev[w as usize] = v;
                    queue.push_back(w as usize);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    #[test]
    fn meeting_closed_forms() {
        // Two vertices: first jump meets, total rate 2.
        let gm = build_vsrw_generator(&k2()).unwrap();
        let m = meeting_times(&gm).unwrap();
        assert!((m[(0, 1)] - 0.5).abs() < 1e-10);
        assert_eq!(m[(0, 0)], 0.0);
        assert!((stationary_meeting_time(&gm).unwrap() - 0.25).abs() < 1e-10);
        assert!((meeting_lower_bound(&gm) - 0.125).abs() < 1e-15);

        // Triangle: meeting from any distinct pair takes 1/2.
        let gm = build_vsrw_generator(&Graph::cycle(3)).unwrap();
        let m = meeting_times(&gm).unwrap();
        assert!((m[(0, 1)] - 0.5).abs() < 1e-10);
        assert!((m[(0, 2)] - 0.5).abs() < 1e-10);
        assert!((stationary_meeting_time(&gm).unwrap() - 1.0 / 3.0).abs() < 1e-10);

        // Path P3: adjacent pairs 3/4, endpoints 5/4 (hand solve).
        let gm = build_vsrw_generator(&Graph::path(3)).unwrap();
        let m = meeting_times(&gm).unwrap();
        assert!((m[(0, 1)] - 0.75).abs() < 1e-10);
        assert!((m[(1, 2)] - 0.75).abs() < 1e-10);
        assert!((m[(0, 2)] - 1.25).abs() < 1e-10);
    }

    #[test]
    fn meeting_lower_bound_holds_on_enumeration() {
        for g in connected_graphs(4) {
            for theta in [0.0, 1.0, 2.0] {
                let gm = build_dual_generator(&g, theta).unwrap();
                let bound = meeting_lower_bound(&gm);
                let t_pi = stationary_meeting_time(&gm).unwrap();
                assert!(
                    t_pi >= bound - 1e-10,
                    "bound {bound} above stationary meeting {t_pi}"
                );
            }
        }
    }

    #[test]
    fn observed_chain_on_path_is_two_state() {
        // Watching only the endpoints of P3 halves the crossing rate.
        let gm = build_vsrw_generator(&Graph::path(3)).unwrap();
        let obs = observed_generator(&gm, &[0, 2]).unwrap();
        assert_eq!(obs.n(), 2);
        assert!((obs.q()[(0, 1)] - 0.5).abs() < 1e-12);
        assert!((obs.rate(0) - 0.5).abs() < 1e-12);
        assert!((obs.pi()[0] - 0.5).abs() < 1e-12);
        assert!((relaxation_time(&obs).unwrap() - 1.0).abs() < 1e-10);
        assert!(observed_generator(&gm, &[]).is_err());
    }

    #[test]
    fn monotone_relaxation_in_theta() {
        let g = Graph::star(4);
        let ts = relaxation_monotone_check(&g, &[0.0, 0.5, 1.0, 1.5, 2.0]).unwrap();
        for w in ts.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9));
        }
        assert!(relaxation_monotone_check(&g, &[1.0]).is_err());
        assert!(relaxation_monotone_check(&g, &[1.0, 0.5]).is_err());
    }

    #[test]
    fn iterative_gap_matches_dense() {
        for g in [Graph::path(3), Graph::cycle(4), Graph::star(6)] {
            for theta in [0.5, 1.0, 2.0] {
                let dense = relaxation_time(&build_dual_generator(&g, theta).unwrap()).unwrap();
                let sparse = relaxation_time_iterative(&g, theta).unwrap();
                assert!(
                    (dense - sparse).abs() < 1e-7 * dense,
                    "dense {dense} vs iterative {sparse}"
                );
            }
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(connected_graphs(1).len(), 1);
        assert_eq!(connected_graphs(2).len(), 1);
        assert_eq!(connected_graphs(3).len(), 4);
        assert_eq!(connected_graphs(4).len(), 38);
    }

    #[test]
    fn exact_voter_closed_forms() {
        // Two vertices, discordant start: one exponential at rate 2.
        for theta in [0.0, 1.0, 2.0] {
            let t = voter_consensus_exact(&k2(), theta, &[0, 1]).unwrap();
            assert!((t - 0.5).abs() < 1e-12, "theta {theta}: {t}");
        }
        // Monochromatic start is already absorbed.
        assert_eq!(voter_consensus_exact(&k2(), 1.0, &[1, 1]).unwrap(), 0.0);
        // Triangle at theta = 1: every discordant state takes exactly 1/2,
        // so the Bernoulli(1/2) average is (6/8) * 1/2.
        let g = Graph::cycle(3);
        for init in [[0u8, 0, 1], [0, 1, 0], [1, 0, 0], [1, 1, 0]] {
            let t = voter_consensus_exact(&g, 1.0, &init).unwrap();
            assert!((t - 0.5).abs() < 1e-12);
        }
        let t = voter_consensus_exact_density(&g, 1.0, 0.5).unwrap();
        assert!((t - 0.375).abs() < 1e-12);
    }

    #[test]
    fn exact_coalescence_matches_meeting_for_two_walkers() {
        for g in [Graph::path(4), Graph::cycle(5), Graph::star(4)] {
            for theta in [0.0, 1.0, 2.0] {
                let gm = build_dual_generator(&g, theta).unwrap();
                let m = meeting_times(&gm).unwrap();
                let t = coalescing_time_exact(&g, theta, &[0, 2]).unwrap();
                assert!(
                    (t - m[(0, 2)]).abs() < 1e-9,
                    "coalescence {t} vs meeting {}",
                    m[(0, 2)]
                );
            }
        }
    }

    #[test]
    fn duality_exact_on_all_small_connected_graphs() {
        // Labeled consensus from all-distinct equals coalescence from full
        // occupation, for every connected graph on up to 4 vertices.
        for n in 1..=4usize {
            for g in connected_graphs(n) {
                for theta in [0.0, 1.0, 2.0] {
                    let cons = labeled_consensus_exact(&g, theta).unwrap();
                    let occupied: Vec<u32> = (0..n as u32).collect();
                    let coal = coalescing_time_exact(&g, theta, &occupied).unwrap();
                    assert!(
                        (cons - coal).abs() < 1e-10,
                        "n {n} theta {theta}: consensus {cons} vs coalescence {coal}"
                    );
                }
            }
        }
    }

    #[test]
    fn duality_exact_on_disconnected_graphs() {
        let g = Graph::disjoint_union(&[&Graph::path(2), &Graph::path(2)]);
        for theta in [0.0, 2.0] {
            let cons = labeled_consensus_exact(&g, theta).unwrap();
            let coal = coalescing_time_exact(&g, theta, &[0, 1, 2, 3]).unwrap();
            assert!((cons - coal).abs() < 1e-10);
        }
    }

    #[test]
    fn generator_csv_has_full_precision() {
        let gm = build_vsrw_generator(&k2()).unwrap();
        let mut buf = Vec::new();
        gm.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("-1.0000000000000000e0,1.0000000000000000e0"));
    }
}
