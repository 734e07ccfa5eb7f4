//! Closed-form predictors for the rank-one voter model.
//!
//! Everything here is deterministic arithmetic: the survival fraction of the
//! giant component, the integral criterion for uniform supercriticality, the
//! density thresholds certified by its closed-form envelopes, the
//! consensus-time scaling exponent in each parameter phase, the mean-field
//! consensus order, and the degree-tail index implied by the weight exponent.

use std::io::Write;

use serde::Serialize;

use crate::{Error, Result};

/// Asymptotic giant-component fraction of an Erdos-Renyi graph with mean
/// degree `beta`: the unique positive root of `1 - rho = exp(-beta * rho)`,
/// or 0 when `beta <= 1`.
pub fn solve_rho(beta: f64) -> f64 {
    assert!(beta > 0.0 && beta.is_finite(), "beta must be positive");
    if beta <= 1.0 {
        return 0.0;
    }
    // Root of g(r) = -expm1(-beta r) - r; the expm1 form keeps the sign
    // correct for beta barely above 1, where the root is ~2 (beta - 1).
    let g = |r: f64| -(-beta * r).exp_m1() - r;
    let mut lo = 1e-300;
    let mut hi = 1.0;
    debug_assert!(g(lo) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `T0(gamma) = 1/(1-gamma) - 1 + gamma`, the tree-growth constant appearing
/// in the supercriticality integral.
fn t0(gamma: f64) -> f64 {
    1.0 / (1.0 - gamma) - 1.0 + gamma
}

/// Uniform-supercriticality integral
/// `I(beta, gamma) = int_0^1 x^(-2 gamma) (1 - rho)^(T0 x^(-gamma)) dx`.
/// The network admits the expander decomposition whenever `I < 1`.
///
/// Computed after substituting `u = x^(-gamma)`:
/// `I = (1/gamma) int_1^inf u^(1 - 1/gamma) exp(-a u) du` with
/// `a = T0(gamma) * beta * rho(beta)`, by adaptive Simpson quadrature.
/// Requires `beta > 1` (below that `rho = 0` and the integral degenerates:
/// `1/(1 - 2 gamma)` for `gamma < 1/2`, divergent otherwise).
pub fn assumption_integral(beta: f64, gamma: f64) -> Result<f64> {
    if !(beta > 1.0) || !beta.is_finite() {
        return Err(Error::InvalidParams(format!(
            "assumption integral needs beta > 1, got {beta}"
        )));
    }
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidParams(format!(
            "gamma must lie in [0, 1), got {gamma}"
        )));
    }
    if gamma == 0.0 {
        // T0(0) = 0, so the integrand is identically 1.
        return Ok(1.0);
    }
    let a = t0(gamma) * beta * solve_rho(beta);
    let expo = 1.0 - 1.0 / gamma;
    let h = |u: f64| u.powf(expo) * (-a * u).exp();
    // Tail beyond upper: int_U^inf u^expo e^{-au} du <= U^expo e^{-aU} / a,
    // negligible once a * (U - 1) is ~60.
    let upper = 1.0 + 60.0 / a;
    Ok(adaptive_simpson(&h, 1.0, upper, 1e-12) / gamma)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, fm, flm, left, tol * 0.5, depth - 1)
                + recurse(f, m, b, fm, fb, frm, right, tol * 0.5, depth - 1)
        }
    }
    let (fa, fb) = (f(lo), f(hi));
    let fm = f(0.5 * (lo + hi));
    let whole = simpson(lo, fa, hi, fb, fm);
    recurse(f, lo, hi, fa, fb, fm, whole, tol, 48)
}

/// Envelope bound valid for every `gamma` in (0, 1): the integral is below 1
/// whenever `beta * rho(beta) > (1 - gamma) / (gamma^2 (2 - gamma))`.
fn envelope_all(gamma: f64) -> f64 {
    (1.0 - gamma) / (gamma * gamma * (2.0 - gamma))
}

/// Envelope bound valid for `gamma < 1/2`: the integral is below 1 whenever
/// `beta * rho(beta) > -ln(1 - 2 gamma) (1 - gamma) / (gamma (2 - gamma))`.
fn envelope_small(gamma: f64) -> f64 {
    -(1.0 - 2.0 * gamma).ln() * (1.0 - gamma) / (gamma * (2.0 - gamma))
}

/// Smallest `beta` with `beta * rho(beta)` at or above `level` (the product
/// is continuous and strictly increasing on `beta > 1`).
fn beta_for_level(level: f64) -> f64 {
    let value = |b: f64| b * solve_rho(b);
    let mut hi = 2.0;
    while value(hi) < level {
        hi *= 2.0;
    }
    let mut lo = 1.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if value(mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest density certified to satisfy the integral criterion for every
/// weight exponent `gamma` in (0, 1).
///
/// The two closed-form envelope bounds ([`envelope_small`] increasing,
/// [`envelope_all`] decreasing) cross near `gamma = 0.45`; taking the larger
/// of the two there covers the whole range, and the certified density is the
/// `beta` whose survival level `beta * rho(beta)` reaches that value
/// (about 2.1685).
pub fn min_beta_uniform() -> f64 {
    let g0 = 0.45;
    beta_for_level(envelope_all(g0).max(envelope_small(g0)))
}

/// Smallest density certified for every `gamma` in [1/2, 1): only
/// [`envelope_all`] applies there and it is decreasing, so the binding level
/// is `envelope_all(1/2) = 4/3` (about 1.8106).
pub fn min_beta_highgamma() -> f64 {
    beta_for_level(envelope_all(0.5))
}

/// Consensus-time scaling exponent `alpha` in `E[consensus time] ~ N^alpha`
/// (up to polylogarithmic factors), for opinion-exchange exponent
/// `theta <= 2`.
///
/// * No giant (`gamma < 1/2`, `beta < 1 - 2 gamma`): the four-case
///   small-component table in `gamma` and `theta`.
/// * Giant with `gamma <= 1/2` (`beta > 1 - 2 gamma`): linear, `alpha = 1`.
/// * Ultrasmall (`gamma > 1/2`): linear up to `theta = 1/gamma`, then the
///   superlinear phase `alpha = 2 - gamma theta`.
///
/// Returns `None` exactly on the critical line `beta + 2 gamma = 1`, where
/// no two-sided polynomial order is available.
pub fn predict_exponent(beta: f64, gamma: f64, theta: f64) -> Result<Option<f64>> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidParams(format!(
            "gamma must lie in [0, 1), got {gamma}"
        )));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParams(format!(
            "beta must be positive, got {beta}"
        )));
    }
    if !(theta <= 2.0) {
        return Err(Error::InvalidParams(format!(
            "exponent predictions need theta <= 2, got {theta}"
        )));
    }
    if gamma < 0.5 {
        let crit = 1.0 - 2.0 * gamma;
        if (beta - crit).abs() < 1e-12 {
            return Ok(None);
        }
        if beta > crit {
            return Ok(Some(1.0));
        }
        let thr = (3.0 - 4.0 * gamma) / (2.0 - 2.0 * gamma);
        let c = if theta >= thr {
            gamma / (2.0 - 2.0 * gamma)
        } else if theta > 1.0 {
            gamma * (2.0 - theta)
        } else if theta >= 2.0 * gamma {
            gamma
        } else {
            gamma * (2.0 - theta) / (2.0 - 2.0 * gamma)
        };
        return Ok(Some(c));
    }
    if theta <= 1.0 / gamma {
        Ok(Some(1.0))
    } else {
        Ok(Some(2.0 - gamma * theta))
    }
}

/// Mean-field consensus order `N^2 / sum_v d(v)^theta`.
pub fn mean_field_order(degrees: &[u32], theta: f64) -> Result<f64> {
    if degrees.is_empty() {
        return Err(Error::InvalidParams("no degrees".into()));
    }
    let mut denom = 0.0f64;
    for &d in degrees {
        if d == 0 && theta < 0.0 {
            return Err(Error::InvalidParams(
                "zero degree with negative theta makes the rate sum diverge".into(),
            ));
        }
        denom += (d as f64).powf(theta);
    }
    if denom == 0.0 {
        return Err(Error::InvalidParams("rate sum is zero".into()));
    }
    let n = degrees.len() as f64;
    Ok(n * n / denom)
}

/// Degree-tail index `1 + 1/gamma` implied by the weight exponent.
pub fn tau_from_gamma(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParams(format!(
            "tail index needs gamma in (0, 1), got {gamma}"
        )));
    }
    Ok(1.0 + 1.0 / gamma)
}

/// Phase of the (beta, gamma) plane by giant-component structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `gamma < 1/2`, `beta < 1 - 2 gamma`: largest component is sublinear.
    Subcritical,
    /// On the line `beta + 2 gamma = 1`.
    Critical,
    /// `gamma < 1/2`, `beta > 1 - 2 gamma`: giant, logarithmic distances.
    Supercritical,
    /// `gamma >= 1/2`: giant for every positive density, doubly logarithmic
    /// distances.
    Ultrasmall,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
            Regime::Ultrasmall => "ultrasmall",
        };
        f.write_str(s)
    }
}

/// One evaluated point of the phase plane.
#[derive(Debug, Clone, Serialize)]
pub struct RegionPoint {
    pub beta: f64,
    pub gamma: f64,
    /// Giant fraction of the embedded uniform graph.
    pub rho: f64,
    /// Supercriticality integral; infinite when `beta <= 1` and
    /// `gamma >= 1/2`.
    pub integral: f64,
    /// Whether `beta > 1` and the integral is below 1.
    pub assumption_holds: bool,
    pub regime: Regime,
}

/// Evaluates the phase diagnostics at one parameter point.
pub fn region_point(beta: f64, gamma: f64) -> Result<RegionPoint> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidParams(format!(
            "gamma must lie in [0, 1), got {gamma}"
        )));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParams(format!(
            "beta must be positive, got {beta}"
        )));
    }
    let rho = solve_rho(beta);
    let integral = if beta > 1.0 {
        assumption_integral(beta, gamma)?
    } else if gamma < 0.5 {
        // rho = 0 turns the integrand into plain x^(-2 gamma).
        1.0 / (1.0 - 2.0 * gamma)
    } else {
        f64::INFINITY
    };
    let regime = if gamma >= 0.5 {
        Regime::Ultrasmall
    } else {
        let crit = 1.0 - 2.0 * gamma;
        if (beta - crit).abs() < 1e-12 {
            Regime::Critical
        } else if beta > crit {
            Regime::Supercritical
        } else {
            Regime::Subcritical
        }
    };
    Ok(RegionPoint {
        beta,
        gamma,
        rho,
        integral,
        assumption_holds: beta > 1.0 && integral < 1.0,
        regime,
    })
}

/// Evaluates [`region_point`] on the product of the two grids, gamma-major.
pub fn region_scan(betas: &[f64], gammas: &[f64]) -> Result<Vec<RegionPoint>> {
    let mut out = Vec::with_capacity(betas.len() * gammas.len());
    for &g in gammas {
        for &b in betas {
            out.push(region_point(b, g)?);
        }
    }
    Ok(out)
}

/// The standard evaluation grid `gamma = 0.01, 0.02, ..., 0.99`.
pub fn gamma_grid() -> Vec<f64> {
    (1..=99).map(|k| k as f64 / 100.0).collect()
}

/// Writes region points as CSV with a header row.
pub fn write_region_csv<W: Write>(points: &[RegionPoint], out: &mut W) -> Result<()> {
    writeln!(out, "beta,gamma,rho,integral,assumption_holds,regime")?;
    for p in points {
        let integral = if p.integral.is_infinite() {
            "inf".to_string()
        } else {
            format!("{:.12e}", p.integral)
        };
        writeln!(
            out,
            "{},{},{:.12e},{},{},{}",
            p.beta, p.gamma, p.rho, integral, p.assumption_holds, p.regime
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_frozen_values() {
        assert!((solve_rho(2.0) - 0.7968121300200200).abs() < 1e-11);
        assert!((solve_rho(1.5) - 0.5828116438658117).abs() < 1e-11);
        assert!((solve_rho(3.0) - 0.9404797907073597).abs() < 1e-11);
        assert_eq!(solve_rho(1.0), 0.0);
        assert_eq!(solve_rho(0.5), 0.0);
    }

    #[test]
    fn rho_satisfies_fixed_point() {
        for &beta in &[1.1, 1.5, 2.0, 2.5, 3.0, 5.0, 10.0] {
            let r = solve_rho(beta);
            assert!(r > 0.0 && r < 1.0);
            assert!(
                (1.0 - r - (-beta * r).exp()).abs() < 1e-12,
                "fixed point off at beta {beta}"
            );
        }
    }

    #[test]
    fn rho_near_critical_keeps_precision() {
        let beta = 1.0001;
        let r = solve_rho(beta);
        // Expansion: rho ~ 2 (beta - 1) / beta^2 near the critical point.
        let approx = 2.0 * (beta - 1.0) / (beta * beta);
        assert!(r > 0.0);
        assert!((r - approx).abs() / approx < 0.01, "rho {r} vs {approx}");
    }

    #[test]
    fn integral_frozen_values() {
        let cases = [
            (2.0, 0.6, 0.015071305905121),
            (2.0, 0.75, 0.000540046216048),
            (3.0, 0.3, 0.107825736900503),
            (2.0, 0.3, 0.353575984606092),
            (3.0, 0.01, 0.963584033759150),
            (3.0, 0.5, 0.005712393962577),
            (1.2, 0.3, 1.385618783083171),
        ];
        for (beta, gamma, want) in cases {
            let got = assumption_integral(beta, gamma).unwrap();
            assert!(
                (got - want).abs() < 1e-9,
                "I({beta}, {gamma}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn integral_edge_cases() {
        assert_eq!(assumption_integral(2.0, 0.0).unwrap(), 1.0);
        assert!(assumption_integral(1.0, 0.3).is_err());
        assert!(assumption_integral(0.5, 0.3).is_err());
        assert!(assumption_integral(2.0, 1.0).is_err());
    }

    #[test]
    fn integral_decreases_in_beta() {
        for &gamma in &[0.1, 0.3, 0.5, 0.7, 0.9] {
            let mut prev = f64::INFINITY;
            for &beta in &[1.2, 1.5, 2.0, 3.0, 5.0] {
                let v = assumption_integral(beta, gamma).unwrap();
                assert!(v < prev, "not decreasing at beta {beta}, gamma {gamma}");
                prev = v;
            }
        }
    }

    #[test]
    fn certified_thresholds() {
        let uni = min_beta_uniform();
        let high = min_beta_highgamma();
        assert!((uni - 2.1685478375357023).abs() < 1e-6, "uniform {uni}");
        assert!((high - 1.8106031390503592).abs() < 1e-6, "high gamma {high}");
        // The certificates really certify: the integral is below 1 there.
        for g in gamma_grid() {
            assert!(assumption_integral(uni + 1e-6, g).unwrap() < 1.0);
            if g >= 0.5 {
                assert!(assumption_integral(high + 1e-6, g).unwrap() < 1.0);
            }
        }
    }

    #[test]
    fn exponent_table_points() {
        let cases = [
            // No-giant phase, all four cases of the table.
            (0.2, 0.3, 2.0, 0.2142857142857143),
            (0.2, 0.3, 1.1, 0.27),
            (0.2, 0.3, 0.8, 0.3),
            (0.2, 0.3, 0.3, 0.3642857142857143),
            (0.05, 0.45, 1.05, 0.4275),
            (0.05, 0.45, 2.0, 0.40909090909090906),
            (0.05, 0.45, 1.0, 0.45),
            (0.05, 0.45, -1.0, 1.2272727272727273),
            // Giant phases.
            (2.0, 0.3, 2.0, 1.0),
            (2.0, 0.75, 2.0, 0.5),
            (2.0, 0.75, 1.0, 1.0),
            (1.7, 0.5, 2.0, 1.0),
        ];
        for (beta, gamma, theta, want) in cases {
            let got = predict_exponent(beta, gamma, theta).unwrap().unwrap();
            assert!(
                (got - want).abs() < 1e-12,
                "predict({beta}, {gamma}, {theta}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn exponent_critical_and_errors() {
        assert_eq!(predict_exponent(0.4, 0.3, 1.0).unwrap(), None);
        assert_eq!(predict_exponent(1.0, 0.0, 2.0).unwrap(), None);
        assert!(predict_exponent(2.0, 0.3, 2.1).is_err());
        assert!(predict_exponent(2.0, 1.0, 1.0).is_err());
        assert!(predict_exponent(0.0, 0.3, 1.0).is_err());
    }

    #[test]
    fn exponent_is_continuous_at_case_boundaries() {
        let eps = 1e-9;
        for &gamma in &[0.1f64, 0.25, 0.4, 0.45] {
            let beta = 0.5 * (1.0 - 2.0 * gamma);
            let p = |theta: f64| predict_exponent(beta, gamma, theta).unwrap().unwrap();
            let thr = (3.0 - 4.0 * gamma) / (2.0 - 2.0 * gamma);
            for &t in &[thr, 1.0, 2.0 * gamma] {
                assert!(
                    (p(t - eps) - p(t + eps)).abs() < 1e-6,
                    "jump at boundary theta {t}, gamma {gamma}"
                );
            }
        }
        // Ultrasmall boundary at theta = 1/gamma.
        for &gamma in &[0.6f64, 0.75, 0.9] {
            let t = 1.0 / gamma;
            let p = |theta: f64| predict_exponent(2.0, gamma, theta).unwrap().unwrap();
            assert!((p(t - eps) - p(t + eps)).abs() < 1e-6);
        }
    }

    #[test]
    fn mean_field_order_cases() {
        // Complete graph on 4 vertices, theta = 1: 16 / (4 * 3).
        let got = mean_field_order(&[3, 3, 3, 3], 1.0).unwrap();
        assert!((got - 16.0 / 12.0).abs() < 1e-12);
        // theta = 0 counts vertices.
        let got = mean_field_order(&[5, 1, 1, 1, 1, 1], 0.0).unwrap();
        assert!((got - 6.0).abs() < 1e-12);
        assert!(mean_field_order(&[], 1.0).is_err());
        assert!(mean_field_order(&[0, 2], -1.0).is_err());
    }

    #[test]
    fn tail_index_from_weight_exponent() {
        assert!((tau_from_gamma(0.5).unwrap() - 3.0).abs() < 1e-12);
        assert!((tau_from_gamma(0.6).unwrap() - (1.0 + 1.0 / 0.6)).abs() < 1e-12);
        assert!(tau_from_gamma(0.0).is_err());
        assert!(tau_from_gamma(1.0).is_err());
    }

    #[test]
    fn region_points_and_csv() {
        let p = region_point(0.3, 0.3).unwrap();
        assert_eq!(p.regime, Regime::Subcritical);
        assert!(!p.assumption_holds);
        assert!((p.integral - 2.5).abs() < 1e-12);
        assert_eq!(p.rho, 0.0);

        let p = region_point(2.0, 0.3).unwrap();
        assert_eq!(p.regime, Regime::Supercritical);
        assert!(p.assumption_holds);

        let p = region_point(0.4, 0.3).unwrap();
        assert_eq!(p.regime, Regime::Critical);

        let p = region_point(0.8, 0.7).unwrap();
        assert_eq!(p.regime, Regime::Ultrasmall);
        assert!(p.integral.is_infinite());
        assert!(!p.assumption_holds);

        let pts = region_scan(&[0.5, 2.0], &[0.3, 0.7]).unwrap();
        assert_eq!(pts.len(), 4);
        let mut buf = Vec::new();
        write_region_csv(&pts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("beta,gamma,rho,integral,assumption_holds,regime"));
        assert!(text.contains("inf"));
    }

    #[test]
    fn grid_is_the_documented_one() {
        let g = gamma_grid();
        assert_eq!(g.len(), 99);
        assert!((g[0] - 0.01).abs() < 1e-15);
        assert!((g[98] - 0.99).abs() < 1e-15);
    }
}
