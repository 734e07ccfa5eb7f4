//! Experiment orchestration: N-sweeps over the Monte Carlo estimators,
//! log-log exponent fits with an optional poly-logarithmic correction,
//! CSV/JSON/SVG emission, and the exact-oracle invariant suite behind
//! `voterlab check`.

use std::io::Write;
use std::sync::OnceLock;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{
    build_dual_generator, build_vsrw_generator, cheeger_relax_sandwich, coalescing_time_exact,
    commute_time, connected_graphs, exact_meeting_time, labeled_consensus_exact,
    meeting_lower_bound, meeting_times, path_hitting_bound, relaxation_time,
    relaxation_time_iterative, stationary_meeting_time, tv_mixing_time, voter_consensus_exact,
};
use crate::dynamics::{
    estimate_consensus_mc, init_opinions, simulate_coalescing, simulate_meeting, simulate_voter,
    VoterParams, WalkerSet,
};
use crate::netgen::{components, degree_summary, generate, Graph, NetworkParams, Variant};
use crate::rng::{derive_seed, mix64, unit_f64, SplitMix64};
use crate::stats::mean_stderr;
use crate::theory::predict_exponent;
use crate::{Error, Result};
use rand::RngCore;

const NET_TAG: u64 = 0x6861_726e_0001;
const VOTER_TAG: u64 = 0x6861_726e_0002;
const WALK_TAG: u64 = 0x6861_726e_0003;
const PAIR_TAG: u64 = 0x6861_726e_0004;

/// Applies the `VOTERLAB_THREADS` cap to the global worker pool, once.
pub fn init_threads() {
    static INIT: OnceLock<()> = OnceLock::new();
    INIT.get_or_init(|| {
        if let Some(k) = std::env::var("VOTERLAB_THREADS")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&k| k >= 1)
        {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    });
}

/// What statistic a sweep measures per graph size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Consensus time of the voter model from Bernoulli(u) opinions.
    Consensus,
    /// Coalescence time of walkers started on every vertex.
    Coalescence,
    /// Meeting time of two uniform distinct vertices of the giant.
    Meeting,
    /// Relaxation time of the variable-speed walk on the giant.
    MixingProxy,
    /// Degree-profile scaling statistic.
    Degree,
    /// Phase-region scan; has no N sweep and is rejected by [`run_sweep`].
    Region,
}

/// One sweep description; the JSON config files use exactly these field
/// names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub beta: f64,
    pub gamma: f64,
    #[serde(default = "one")]
    pub theta: f64,
    #[serde(default = "half")]
    pub u: f64,
    #[serde(default)]
    pub variant: Variant,
    pub n_values: Vec<usize>,
    /// Replicas per size; `None` picks a budget of max(64, 2^18 / n) runs
    /// (smaller for the spectral and degree modes).
    #[serde(default)]
    pub replicas: Option<usize>,
    pub mode: Mode,
    #[serde(default)]
    pub base_seed: u64,
    /// Fix one graph per size instead of redrawing each replica.
    #[serde(default)]
    pub quenched: bool,
    /// Add a log log N term to the exponent fit.
    #[serde(default)]
    pub with_polylog: bool,
    /// Deterministic per-replica event budget; runs over it are censored and
    /// dropped from the fit with a warning.
    #[serde(default)]
    pub max_events_per_replica: Option<u64>,
    #[serde(default)]
    pub out_csv: Option<String>,
    #[serde(default)]
    pub out_json: Option<String>,
    #[serde(default)]
    pub out_svg: Option<String>,
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

impl ExperimentConfig {
    pub fn from_json_reader<R: std::io::Read>(reader: R) -> Result<ExperimentConfig> {
        Ok(serde_json::from_reader(reader)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == Mode::Region {
            return Err(Error::InvalidParams(
                "region mode scans (beta, gamma), not sizes; use the region scan".into(),
            ));
        }
        let min_points = if self.with_polylog { 4 } else { 3 };
        if self.n_values.len() < min_points {
            return Err(Error::InvalidParams(format!(
                "need at least {min_points} sizes for the fit, got {}",
                self.n_values.len()
            )));
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams(
                "sizes must be strictly increasing".into(),
            ));
        }
        if self.n_values[0] < 2 {
            return Err(Error::InvalidParams("sizes must be at least 2".into()));
        }
        if let Some(r) = self.replicas {
            if r < 2 {
                return Err(Error::InvalidParams("need at least 2 replicas".into()));
            }
        }
        NetworkParams::new(self.n_values[0], self.beta, self.gamma, self.variant, 0).validate()?;
        if self.mode == Mode::Consensus {
            VoterParams::new(self.theta, self.u, 0)?;
        } else if !self.theta.is_finite() || self.theta > 2.0 {
            return Err(Error::InvalidParams(format!(
                "exchange exponent must be finite and at most 2, got {}",
                self.theta
            )));
        }
        Ok(())
    }

    fn replicas_for(&self, n: usize) -> usize {
        self.replicas.unwrap_or(match self.mode {
            Mode::Consensus | Mode::Coalescence => ((1usize << 18) / n).max(64),
            Mode::Meeting => ((1usize << 16) / n).max(64),
            Mode::MixingProxy => ((1usize << 12) / n).max(4),
            Mode::Degree => ((1usize << 16) / n).max(8),
            Mode::Region => unreachable!("rejected by validate"),
        })
    }
}

/// Aggregated measurement at one size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    /// Replicas contributing to the mean.
    pub replicas: usize,
    /// Censored or skipped replicas, excluded from the mean.
    pub censored: usize,
}

/// Sweep outcome: the per-size measurements, the weighted log-log fit, and
/// the predicted consensus-time exponent for the configured phase point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub points: Vec<SweepPoint>,
    pub fitted_exponent: f64,
    pub fit_stderr: f64,
    pub fit_intercept: f64,
    /// Coefficient of the log log N term; zero when the term is disabled.
    pub polylog_coefficient: f64,
    /// `None` exactly on the critical line, where no power law is claimed.
    pub predicted_exponent: Option<f64>,
    pub config: ExperimentConfig,
}

/// Weighted least squares of `ln mean` on `ln n` (and `ln ln n` when
/// `with_polylog` is set), weighted by inverse squared relative error.
/// Returns (exponent, exponent stderr, polylog coefficient).
pub fn fit_exponent(points: &[(f64, f64, f64)], with_polylog: bool) -> Result<(f64, f64, f64)> {
    let fit = fit_log_model(points, with_polylog)?;
    Ok((fit.exponent, fit.exponent_stderr, fit.polylog_coefficient))
}

pub(crate) struct LogFit {
    pub intercept: f64,
    pub exponent: f64,
    pub exponent_stderr: f64,
    pub polylog_coefficient: f64,
}

impl LogFit {
    /// Fitted mean at size `n`.
    fn eval(&self, n: f64) -> f64 {
        (self.intercept + self.exponent * n.ln() + self.polylog_coefficient * n.ln().ln()).exp()
    }
}

pub(crate) fn fit_log_model(points: &[(f64, f64, f64)], with_polylog: bool) -> Result<LogFit> {
    let p = if with_polylog { 3 } else { 2 };
    let min_points = p + 1;
    if points.len() < min_points {
        return Err(Error::DegenerateFit(format!(
            "{} points cannot support a {p}-parameter fit",
            points.len()
        )));
    }
    let k = points.len();
    let mut x = nalgebra::DMatrix::zeros(k, p);
    let mut y = nalgebra::DVector::zeros(k);
    let mut w = nalgebra::DVector::zeros(k);
    for (row, &(n, mean, se)) in points.iter().enumerate() {
        if !(n > 1.0) || !(mean > 0.0) || !(se >= 0.0) || !se.is_finite() {
            return Err(Error::DegenerateFit(format!(
                "point ({n}, {mean}, {se}) is unusable on a log scale"
            )));
        }
        x[(row, 0)] = 1.0;
        x[(row, 1)] = n.ln();
        if with_polylog {
            x[(row, 2)] = n.ln().ln();
        }
        y[row] = mean.ln();
        w[row] = 1.0 / (se / mean).powi(2).max(1e-12);
    }
    let xtw = x.transpose() * nalgebra::DMatrix::from_diagonal(&w);
    let a = &xtw * &x;
    let rhs = &xtw * &y;
    let lu = a.lu();
    let beta = lu
        .solve(&rhs)
        .ok_or_else(|| Error::DegenerateFit("singular design matrix".into()))?;
    let cov_scale = lu
        .try_inverse()
        .ok_or_else(|| Error::DegenerateFit("singular design matrix".into()))?;
    let resid = &y - &x * &beta;
    let dof = (k - p) as f64;
    let sigma2 = if dof > 0.0 {
        (0..k).map(|i| w[i] * resid[i] * resid[i]).sum::<f64>() / dof
    } else {
        0.0
    };
    Ok(LogFit {
        intercept: beta[0],
        exponent: beta[1],
        exponent_stderr: (sigma2 * cov_scale[(1, 1)]).max(0.0).sqrt(),
        polylog_coefficient: if with_polylog { beta[2] } else { 0.0 },
    })
}

/// Runs the configured sweep, invoking `progress` after each completed size
/// so partial results can be flushed.
pub fn run_sweep_with<F: FnMut(&SweepPoint)>(
    cfg: &ExperimentConfig,
    mut progress: F,
) -> Result<ScalingResult> {
    init_threads();
    cfg.validate()?;
    let mut points = Vec::with_capacity(cfg.n_values.len());
    for (idx, &n) in cfg.n_values.iter().enumerate() {
        let point = measure_size(cfg, idx, n)?;
        if point.censored > 0 {
            eprintln!(
                "warning: {} of {} replicas at n = {} censored and excluded",
                point.censored,
                point.censored + point.replicas,
                n
            );
        }
        progress(&point);
        points.push(point);
    }
    let triples: Vec<(f64, f64, f64)> = points
        .iter()
        .map(|p| (p.n as f64, p.mean, p.stderr))
        .collect();
    let fit = fit_log_model(&triples, cfg.with_polylog)?;
    Ok(ScalingResult {
        points,
        fitted_exponent: fit.exponent,
        fit_stderr: fit.exponent_stderr,
        fit_intercept: fit.intercept,
        polylog_coefficient: fit.polylog_coefficient,
        predicted_exponent: predict_exponent(cfg.beta, cfg.gamma, cfg.theta)?,
        config: cfg.clone(),
    })
}

/// [`run_sweep_with`] without a progress callback.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<ScalingResult> {
    run_sweep_with(cfg, |_| {})
}

/// Spectral-growth study: relaxation time of the variable-speed walk on the
/// giant, per size. Thin wrapper that insists on the right mode.
pub fn mixing_proxy_sweep(cfg: &ExperimentConfig) -> Result<ScalingResult> {
    if cfg.mode != Mode::MixingProxy {
        return Err(Error::InvalidParams(
            "mixing sweep requires the mixing_proxy mode".into(),
        ));
    }
    run_sweep(cfg)
}

fn measure_size(cfg: &ExperimentConfig, idx: usize, n: usize) -> Result<SweepPoint> {
    let replicas = cfg.replicas_for(n);
    let size_tag = mix64(idx as u64) ^ mix64(n as u64);
    let net_seed = derive_seed(cfg.base_seed, NET_TAG ^ size_tag);
    let net = NetworkParams::new(n, cfg.beta, cfg.gamma, cfg.variant, net_seed);

    if cfg.mode == Mode::Consensus {
        let mut vp = VoterParams::new(cfg.theta, cfg.u, derive_seed(cfg.base_seed, VOTER_TAG ^ size_tag))?;
        if let Some(cap) = cfg.max_events_per_replica {
            vp = vp.with_event_cap(cap);
        }
        let est = estimate_consensus_mc(&net, &vp, replicas, cfg.quenched)?;
        return Ok(SweepPoint {
            n,
            mean: est.mean,
            stderr: est.stderr,
            replicas: est.replicas,
            censored: est.censored,
        });
    }

    // The walker-based and structural modes share the replica scaffolding:
    // each replica draws its own graph seed (or reuses replica 0's graph in
    // quenched mode) and yields Some(statistic) or None when skipped.
    let quenched_graph = if cfg.quenched {
        Some(generate(&NetworkParams {
            seed: derive_seed(net_seed, 0),
            ..net
        })?)
    } else {
        None
    };
    let samples: Vec<Result<Option<f64>>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let local;
            let g = if let Some(g) = quenched_graph.as_ref() {
                g
            } else {
                local = generate(&NetworkParams {
                    seed: derive_seed(net_seed, r as u64),
                    ..net
                })?;
                &local
            };
            let walk_seed = derive_seed(cfg.base_seed, WALK_TAG ^ size_tag ^ mix64(r as u64));
            match cfg.mode {
                Mode::Coalescence => {
                    let mut walkers = WalkerSet::full(g);
                    Ok(Some(
                        simulate_coalescing(g, &mut walkers, cfg.theta, walk_seed)?.time,
                    ))
                }
                Mode::Meeting => {
                    let comp = components(g);
                    if comp.giant_size() < 2 {
                        return Ok(None);
                    }
                    let giant = comp.giant_vertices();
                    let mut rng = SplitMix64::new(derive_seed(
                        cfg.base_seed,
                        PAIR_TAG ^ size_tag ^ mix64(r as u64),
                    ));
                    let pick = |rng: &mut SplitMix64| {
                        giant[(unit_f64(rng.next_u64()) * giant.len() as f64) as usize
                            % giant.len()]
                    };
                    let x = pick(&mut rng);
                    let mut y = pick(&mut rng);
                    while y == x {
                        y = pick(&mut rng);
                    }
                    Ok(Some(simulate_meeting(g, x, y, cfg.theta, walk_seed)?.time))
                }
                Mode::MixingProxy => {
                    let comp = components(g);
                    if comp.giant_size() < 10 {
                        return Ok(None);
                    }
                    let giant = g.induced(&comp.giant_vertices());
                    Ok(Some(relaxation_time_iterative(&giant, 1.0)?))
                }
                Mode::Degree => Ok(Some(degree_summary(g, cfg.gamma)?.scaling_statistic)),
                Mode::Consensus | Mode::Region => unreachable!("handled above"),
            }
        })
        .collect();
    let mut values = Vec::with_capacity(replicas);
    let mut censored = 0usize;
    for s in samples {
        match s? {
            Some(v) => values.push(v),
            None => censored += 1,
        }
    }
    if values.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "fewer than 2 usable replicas at n = {n}"
        )));
    }
    let (mean, stderr) = mean_stderr(&values);
    Ok(SweepPoint {
        n,
        mean,
        stderr,
        replicas: values.len(),
        censored,
    })
}

/// Output formats of [`emit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Json,
    Svg,
}

/// Writes a completed result to `path` in the requested format.
pub fn emit(result: &ScalingResult, format: EmitFormat, path: &std::path::Path) -> Result<()> {
    if result.points.is_empty() {
        return Err(Error::InvalidParams("refusing to emit an empty sweep".into()));
    }
    let mut file = std::fs::File::create(path)?;
    match format {
        EmitFormat::Csv => write_csv(result, &mut file),
        EmitFormat::Json => write_json(result, &mut file),
        EmitFormat::Svg => write_svg(result, &mut file),
    }
}

/// One `n,mean,stderr,replicas` row per size, then a fit row, so the file
/// has |n_values| + 1 rows.
pub fn write_csv<W: Write>(result: &ScalingResult, out: &mut W) -> Result<()> {
    for p in &result.points {
        writeln!(out, "{},{},{},{}", p.n, p.mean, p.stderr, p.replicas)?;
    }
    writeln!(
        out,
        "fit,{},{},{}",
        result.fitted_exponent, result.fit_stderr, result.polylog_coefficient
    )?;
    Ok(())
}

/// Full structured result, config echo included.
pub fn write_json<W: Write>(result: &ScalingResult, out: &mut W) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, result)?;
    writeln!(out)?;
    Ok(())
}

/// Log-log scatter with the fitted curve and, when a prediction exists, a
/// dashed reference line of the predicted slope through the first fitted
/// point.
pub fn write_svg<W: Write>(result: &ScalingResult, out: &mut W) -> Result<()> {
    let (width, height) = (640.0, 440.0);
    let (ml, mr, mt, mb) = (70.0, 25.0, 20.0, 55.0);
    let xs: Vec<f64> = result.points.iter().map(|p| (p.n as f64).ln()).collect();
    let mut ys: Vec<f64> = Vec::new();
    for p in &result.points {
        if !(p.mean > 0.0) {
            return Err(Error::InvalidParams(
                "log-scale plot needs positive means".into(),
            ));
        }
        ys.push(p.mean.ln());
        if p.stderr > 0.0 && p.mean - p.stderr > 0.0 {
            ys.push((p.mean - p.stderr).ln());
            ys.push((p.mean + p.stderr).ln());
        }
    }
    let fit = LogFit {
        intercept: result.fit_intercept,
        exponent: result.fitted_exponent,
        exponent_stderr: result.fit_stderr,
        polylog_coefficient: result.polylog_coefficient,
    };
    for &x in &xs {
        ys.push(fit.eval(x.exp()).ln());
    }
    let (x0, x1) = (xs[0], *xs.last().unwrap());
    let (mut y0, mut y1) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if y1 - y0 < 1e-9 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let sx = |lx: f64| ml + (lx - x0) / (x1 - x0).max(1e-12) * (width - ml - mr);
    let sy = |ly: f64| height - mb - (ly - y0) / (y1 - y0) * (height - mt - mb);

    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    )?;
    writeln!(out, "<rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>")?;
    writeln!(
        out,
        "<line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>",
        height - mb,
        width - mr,
        height - mb
    )?;
    writeln!(
        out,
        "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>",
        height - mb
    )?;
    for p in &result.points {
        let x = sx((p.n as f64).ln());
        writeln!(
            out,
            "<text x=\"{x}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            height - mb + 16.0,
            p.n
        )?;
        if p.stderr > 0.0 && p.mean - p.stderr > 0.0 {
            writeln!(
                out,
                "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"steelblue\"/>",
                sy((p.mean - p.stderr).ln()),
                sy((p.mean + p.stderr).ln())
            )?;
        }
        writeln!(
            out,
            "<circle cx=\"{x}\" cy=\"{}\" r=\"3\" fill=\"steelblue\"/>",
            sy(p.mean.ln())
        )?;
    }
    for frac in [0.0, 0.5, 1.0] {
        let ly = y0 + frac * (y1 - y0);
        writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{:.3e}</text>",
            ml - 6.0,
            sy(ly) + 4.0,
            ly.exp()
        )?;
    }
    let fit_pts: Vec<String> = (0..=48)
        .map(|k| {
            let lx = x0 + (x1 - x0) * k as f64 / 48.0;
            format!("{:.2},{:.2}", sx(lx), sy(fit.eval(lx.exp()).ln()))
        })
        .collect();
    writeln!(
        out,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"firebrick\" stroke-width=\"1.5\"/>",
        fit_pts.join(" ")
    )?;
    if let Some(pred) = result.predicted_exponent {
        let anchor = fit.eval(x0.exp()).ln();
        writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>",
            sx(x0),
            sy(anchor),
            sx(x1),
            sy(anchor + pred * (x1 - x0))
        )?;
    }
    let label = match result.predicted_exponent {
        Some(p) => format!(
            "fit {:.3} +/- {:.3}, predicted {:.3}",
            result.fitted_exponent, result.fit_stderr, p
        ),
        None => format!(
            "fit {:.3} +/- {:.3}, critical line (no prediction)",
            result.fitted_exponent, result.fit_stderr
        ),
    };
    writeln!(
        out,
        "<text x=\"{ml}\" y=\"{}\" font-size=\"12\">{label}</text>",
        height - 14.0
    )?;
    writeln!(out, "</svg>")?;
    Ok(())
}

/// One invariant check outcome.
#[derive(Debug, Clone)]
pub struct CheckItem {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Result of the exact-oracle invariant suite.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub items: Vec<CheckItem>,
    pub elapsed: std::time::Duration,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    /// One line per item, `ok`/`FAIL` prefixed.
    pub fn write_lines<W: Write>(&self, out: &mut W) -> Result<()> {
        for item in &self.items {
            writeln!(
                out,
                "{} {:<34} {}",
                if item.passed { "ok  " } else { "FAIL" },
                item.name,
                item.detail
            )?;
        }
        writeln!(
            out,
            "{} of {} checks passed in {:.1}s",
            self.items.iter().filter(|i| i.passed).count(),
            self.items.len(),
            self.elapsed.as_secs_f64()
        )?;
        Ok(())
    }
}

fn check(name: &'static str, body: impl FnOnce() -> Result<String>) -> CheckItem {
    match body() {
        Ok(detail) => CheckItem {
            name,
            passed: true,
            detail,
        },
        Err(e) => CheckItem {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn ensure(cond: bool, msg: String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvariantViolated(msg))
    }
}

/// Runs the exact-oracle invariant suite: duality on all small connected
/// graphs, the commute/meeting/expansion bounds, the multi-component
/// coalescence sandwich, martingale and consensus-direction statistics, and
/// the two-vertex closed forms.
pub fn run_check() -> CheckReport {
    init_threads();
    let start = Instant::now();
    let mut items = Vec::new();

    items.push(check("duality-exact-small-graphs", || {
        let mut worst = 0.0f64;
        for n in 1..=4usize {
            for g in connected_graphs(n) {
                for theta in [0.0, 1.0, 2.0] {
                    let cons = labeled_consensus_exact(&g, theta)?;
                    let everyone: Vec<u32> = (0..n as u32).collect();
                    let coal = coalescing_time_exact(&g, theta, &everyone)?;
                    worst = worst.max((cons - coal).abs());
                }
            }
        }
        ensure(worst <= 1e-10, format!("duality gap {worst:.2e}"))?;
        Ok(format!("max |consensus - coalescence| = {worst:.2e} over n <= 4"))
    }));

    items.push(check("commute-path-bound", || {
        let mut worst_ratio = 0.0f64;
        for g in connected_graphs(4) {
            for theta in [0.0, 1.0, 2.0] {
                let gm = build_dual_generator(&g, theta)?;
                let far = farthest_vertex(&g, 0);
                if far == 0 {
                    continue;
                }
                let path = shortest_path(&g, 0, far);
                let commute = commute_time(&gm, 0, far)?;
                let bound = path_hitting_bound(&gm, &path)?;
                ensure(
                    commute <= bound * (1.0 + 1e-9),
                    format!("commute {commute} exceeds path bound {bound}"),
                )?;
                worst_ratio = worst_ratio.max(commute / bound);
            }
        }
        Ok(format!("max commute/bound ratio {worst_ratio:.3}"))
    }));

    items.push(check("meeting-time-lower-bound", || {
        let mut tightest = f64::INFINITY;
        for g in connected_graphs(4) {
            for theta in [0.0, 1.0, 2.0] {
                let gm = build_dual_generator(&g, theta)?;
                let bound = meeting_lower_bound(&gm);
                let t_pi = stationary_meeting_time(&gm)?;
                ensure(
                    t_pi >= bound - 1e-10,
                    format!("stationary meeting {t_pi} below bound {bound}"),
                )?;
                tightest = tightest.min(t_pi / bound);
            }
        }
        Ok(format!("min meeting/bound ratio {tightest:.3}"))
    }));

    items.push(check("expansion-relaxation-sandwich", || {
        let mut graphs = 0usize;
        for n in 2..=6usize {
            for g in connected_graphs(n) {
                cheeger_relax_sandwich(&g)?;
                graphs += 1;
            }
        }
        Ok(format!("sandwich holds on {graphs} connected graphs"))
    }));

    items.push(check("coalescence-sandwich-mc", || {
        let g = Graph::disjoint_union(&[&Graph::path(3), &Graph::cycle(4), &Graph::complete(2)]);
        let comp = components(&g);
        let mut sup_meet = 0.0f64;
        for c in 0..comp.count() as u32 {
            let sub = g.induced(&comp.vertices_of(c));
            let m = meeting_times(&build_dual_generator(&sub, 1.0)?)?;
            sup_meet = sup_meet.max(m.max());
        }
        let upper = std::f64::consts::E * (2.0 + (g.n() as f64).ln()) * sup_meet;
        let exact = coalescing_time_exact(&g, 1.0, &(0..g.n() as u32).collect::<Vec<_>>())?;
        ensure(
            sup_meet <= exact && exact <= upper,
            format!("exact coalescence {exact} outside [{sup_meet}, {upper}]"),
        )?;
        let times: Vec<f64> = (0..2000u64)
            .into_par_iter()
            .map(|seed| {
                let mut w = WalkerSet::full(&g);
                simulate_coalescing(&g, &mut w, 1.0, seed).map(|r| r.time)
            })
            .collect::<Result<_>>()?;
        let (mean, se) = mean_stderr(&times);
        ensure(
            mean + 3.0 * se >= sup_meet && mean - 3.0 * se <= upper,
            format!("MC coalescence {mean} +/- {se} outside sandwich"),
        )?;
        ensure(
            (mean - exact).abs() <= 3.0 * se,
            format!("MC coalescence {mean} +/- {se} disagrees with exact {exact}"),
        )?;
        Ok(format!(
            "{sup_meet:.3} <= {exact:.3} (MC {mean:.3} +/- {se:.3}) <= {upper:.3}"
        ))
    }));

    items.push(check("opinion-sum-martingale", || {
        let net = NetworkParams::new(200, 2.0, 0.3, Variant::Snr, 0x4d61_7274);
        let g = generate(&net)?;
        let checkpoints = [0.3, 1.5];
        let horizon = 1.5;
        let replicas = 10_000u64;
        let deltas: Vec<Vec<f64>> = (0..replicas)
            .into_par_iter()
            .map(|seed| -> Result<Vec<f64>> {
                let params = VoterParams::new(1.0, 0.3, seed)?
                    .with_trajectory()
                    .with_time_cap(horizon);
                let mut state = init_opinions(&g, &params)?;
                let start = state.ones() as f64;
                let rec = simulate_voter(&g, &mut state, &params)?;
                let traj = rec.trajectory.as_ref().unwrap();
                Ok(checkpoints
                    .iter()
                    .map(|&t| value_at(traj, t) - start)
                    .collect())
            })
            .collect::<Result<_>>()?;
        let mut details = Vec::new();
        for (k, &t) in checkpoints.iter().enumerate() {
            let col: Vec<f64> = deltas.iter().map(|d| d[k]).collect();
            let (mean, se) = mean_stderr(&col);
            ensure(
                mean.abs() <= 3.0 * se,
                format!("ones-count drift {mean} +/- {se} at t = {t}"),
            )?;
            details.push(format!("t={t}: drift {mean:.3} (se {se:.3})"));
        }
        Ok(details.join(", "))
    }));

    items.push(check("consensus-direction-law", || {
        let net = NetworkParams::new(80, 2.0, 0.3, Variant::Snr, 0x4469_7265);
        let g = generate(&net)?;
        let comp = components(&g);
        let giant = g.induced(&comp.giant_vertices());
        let n = giant.n() as f64;
        let replicas = 10_000u64;
        let devs: Vec<f64> = (0..replicas)
            .into_par_iter()
            .map(|seed| -> Result<f64> {
                let params = VoterParams::new(2.0, 0.5, seed)?;
                let mut state = init_opinions(&giant, &params)?;
                let start_frac = state.ones() as f64 / n;
                simulate_voter(&giant, &mut state, &params)?;
                let won = (state.ones() as f64 / n == 1.0) as u8 as f64;
                Ok(won - start_frac)
            })
            .collect::<Result<_>>()?;
        let (mean, se) = mean_stderr(&devs);
        ensure(
            mean.abs() <= 3.0 * se,
            format!("all-ones probability off by {mean} +/- {se}"),
        )?;
        Ok(format!(
            "P(consensus 1) - initial fraction = {mean:.4} (se {se:.4}) on {} vertices",
            giant.n()
        ))
    }));

    items.push(check("two-vertex-closed-forms", || {
        let g = Graph::complete(2);
        let gm = build_vsrw_generator(&g)?;
        let t_rel = relaxation_time(&gm)?;
        ensure(
            (t_rel - 0.5).abs() <= 1e-9,
            format!("relaxation time {t_rel}"),
        )?;
        let t_mix = tv_mixing_time(&gm)?;
        let want = (1.0 - std::f64::consts::LN_2) / 2.0;
        ensure(
            (t_mix - want).abs() <= 1e-5,
            format!("mixing time {t_mix} vs {want}"),
        )?;
        let meet = exact_meeting_time(&gm, 0, 1)?;
        ensure((meet - 0.5).abs() <= 1e-10, format!("meeting time {meet}"))?;
        let cons = voter_consensus_exact(&g, 1.0, &[0, 1])?;
        ensure((cons - 0.5).abs() <= 1e-12, format!("consensus time {cons}"))?;
        Ok(format!(
            "t_rel {t_rel:.6}, t_mix {t_mix:.6}, meeting {meet:.6}, consensus {cons:.6}"
        ))
    }));

    CheckReport {
        items,
        elapsed: start.elapsed(),
    }
}

/// Trajectory value in force at time `t` (piecewise constant, last sample
/// at or before `t`).
fn value_at(traj: &[(f64, f64)], t: f64) -> f64 {
    let k = traj.partition_point(|&(s, _)| s <= t);
    traj[k.saturating_sub(1)].1
}

fn farthest_vertex(g: &Graph, from: usize) -> usize {
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

fn shortest_path(g: &Graph, from: usize, to: usize) -> Vec<usize> {
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
