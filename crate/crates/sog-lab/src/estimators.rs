//! Monte Carlo and regenerative estimation of the growth constant, the CLT
//! variance of the heaviest-path weight, normality diagnostics, and the
//! dense-regime series cross-check.

use crate::dist::{check_assumptions, AssumptionReport, AssumptionSet, DistributionSpec};
use crate::error::{Error, Result};
use crate::graph::GraphWindow;
use crate::heaviest::{forward_values, window_max, Variant};
use crate::par::run_replications;
use crate::regen::{detect_renewal, detect_skeleton, suggest_c, WindowParams};
use crate::stats;
use crate::stream::{role, StreamKey};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    C,
    C0,
    B2,
    Gamma,
    Lambda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    PlugIn,
    Regenerative,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateParams {
    pub n: usize,
    pub p: f64,
    pub du: DistributionSpec,
    pub dv: DistributionSpec,
    /// Renewal threshold; None lets the estimator pick a pilot suggestion.
    pub c: Option<f64>,
    pub reps: usize,
    pub margin: usize,
    pub seed: u64,
}

impl EstimateParams {
    fn window_params(&self) -> WindowParams {
        WindowParams {
            n: self.n,
            p: self.p,
            du: self.du.clone(),
            dv: self.dv.clone(),
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimateReport {
    pub target: Target,
    pub estimate: f64,
    pub stderr: f64,
    pub method: Method,
    pub params: EstimateParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycles_used: Option<usize>,
}

fn require(report: AssumptionReport) -> Result<()> {
    if report.satisfied {
        Ok(())
    } else {
        let clauses: Vec<&str> =
            report.violated_clauses.iter().map(|c| c.clause.as_str()).collect();
        Err(Error::Assumption(clauses.join(", ")))
    }
}

fn check_common(params: &EstimateParams, which: AssumptionSet) -> Result<()> {
    require(check_assumptions(&params.du, &params.dv, which))?;
    if params.reps < 2 {
        return Err(Error::parameter("reps", "must be at least 2"));
    }
    if params.margin > params.n / 2 {
        return Err(Error::parameter("margin", "must be at most n/2"));
    }
    params.window_params().replicate(role::REPLICATION, 0)?;
    Ok(())
}

/// Estimate the heaviest-path growth constant C.
///
/// Plug-in: mean of W_{0,n}/n over independent windows. Regenerative: pool
/// cycles between consecutive detected regeneration points and return
/// (sum of cycle weights)/(sum of cycle lengths) with a delta-method stderr.
pub fn estimate_growth_constant(params: &EstimateParams, method: Method) -> Result<EstimateReport> {
    check_common(params, AssumptionSet::A)?;
    match method {
        Method::PlugIn => {
            let wp = params.window_params();
            let n = params.n;
            let vals = run_replications(params.reps, |r| {
                let w = wp.replicate(role::REPLICATION, r).expect("validated params");
                window_max(&w, 0, n, Variant::Full).expect("valid span") / n as f64
            });
            let (estimate, stderr) = stats::mean_stderr(&vals);
            Ok(EstimateReport {
                target: Target::C,
                estimate,
                stderr,
                method,
                params: params.clone(),
                cycles_used: None,
            })
        }
        Method::Regenerative => {
            let cycles = collect_cycles(params)?;
            let ratio = RatioEstimate::from_cycles(&cycles)?;
            Ok(EstimateReport {
                target: Target::C,
                estimate: ratio.ratio,
                stderr: ratio.stderr,
                method,
                params: params.clone(),
                cycles_used: Some(cycles.len()),
            })
        }
    }
}

/// Dense-regime series for the growth constant of the unit-weight graph in
/// q = 1 - p, with the first omitted order reported as a magnitude indicator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesC0 {
    pub value: f64,
    /// q^5: the order of the first omitted term, not an error bound.
    pub remainder: f64,
    /// True when q > 0.2, where the truncation is known to be inaccurate.
    pub extrapolating: bool,
}

pub fn series_c0(q: f64) -> Result<SeriesC0> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::parameter("q", "must lie in [0, 1)"));
    }
    let value = 1.0 - q + q * q - 3.0 * q.powi(3) + 7.0 * q.powi(4);
    Ok(SeriesC0 { value, remainder: q.powi(5), extrapolating: q > 0.2 })
}

/// Estimate the CLT variance b^2: the variance of the centered weight
/// increment over one regeneration cycle, pooled across replications, with a
/// seeded cycle-level bootstrap stderr.
pub fn estimate_clt_variance(params: &EstimateParams) -> Result<EstimateReport> {
    estimate_clt_variance_with(params, 1000)
}

pub fn estimate_clt_variance_with(
    params: &EstimateParams,
    bootstrap_resamples: usize,
) -> Result<EstimateReport> {
    check_common(params, AssumptionSet::B)?;
    let cycles = collect_cycles(params)?;
    let m = cycles.len();
    if m < 30 {
        return Err(Error::Degenerate(format!(
            "only {m} regeneration cycles (need 30); increase n or reps, or lower c"
        )));
    }
    let estimate = cycle_variance(&cycles);
    let mut boot = Vec::with_capacity(bootstrap_resamples);
    for b in 0..bootstrap_resamples {
        let mut rng = StreamKey::root(params.seed).child(role::BOOTSTRAP).child(b as u64).rng();
        let resample: Vec<(f64, f64)> = (0..m).map(|_| cycles[rng.index(m)]).collect();
        boot.push(cycle_variance(&resample));
    }
    let stderr = stats::sample_variance(&boot).sqrt();
    Ok(EstimateReport {
        target: Target::B2,
        estimate,
        stderr,
        method: Method::Regenerative,
        params: params.clone(),
        cycles_used: Some(m),
    })
}

/// Sample variance of W_cycle - R * length with R the ratio estimate of the
/// same cycles; the centered increments then sum to zero exactly.
fn cycle_variance(cycles: &[(f64, f64)]) -> f64 {
    let sw: f64 = cycles.iter().map(|&(w, _)| w).sum();
    let sl: f64 = cycles.iter().map(|&(_, l)| l).sum();
    let r = sw / sl;
    let m = cycles.len() as f64;
    cycles.iter().map(|&(w, l)| (w - r * l).powi(2)).sum::<f64>() / (m - 1.0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub n: usize,
    pub reps: usize,
    pub degenerate: bool,
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
    /// One-sample KS distance of the standardized samples from N(0, 1).
    pub ks_normal: Option<f64>,
}

/// Normality diagnostics for W_{0,n} along an ascending n grid: samples are
/// standardized per grid point (the growth and variance scales are estimated
/// from the same samples) and compared to the standard normal. The
/// process-level statement is exercised only at fixed n, not functionally.
pub fn clt_diagnostic(
    n_grid: &[usize],
    p: f64,
    du: &DistributionSpec,
    dv: &DistributionSpec,
    reps: usize,
    seed: u64,
) -> Result<Vec<DiagnosticRow>> {
    require(check_assumptions(du, dv, AssumptionSet::B))?;
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::parameter("n_grid", "must be nonempty and ascending"));
    }
    if reps < 8 {
        return Err(Error::parameter("reps", "must be at least 8"));
    }
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let wp = WindowParams {
            n,
            p,
            du: du.clone(),
            dv: dv.clone(),
            seed: StreamKey::root(seed).child(n as u64).rng().next_u64(),
        };
        wp.replicate(role::REPLICATION, 0)?;
        let vals = run_replications(reps, |r| {
            let w = wp.replicate(role::REPLICATION, r).expect("validated params");
            window_max(&w, 0, n, Variant::Full).expect("valid span")
        });
        let (mean, _) = stats::mean_stderr(&vals);
        let sd = stats::sample_variance(&vals).sqrt();
        if !(sd > 1e-12 * (1.0 + mean.abs())) {
            rows.push(DiagnosticRow {
                n,
                reps,
                degenerate: true,
                skewness: None,
                excess_kurtosis: None,
                ks_normal: None,
            });
            continue;
        }
        let z: Vec<f64> = vals.iter().map(|v| (v - mean) / sd).collect();
        rows.push(DiagnosticRow {
            n,
            reps,
            degenerate: false,
            skewness: Some(stats::skewness(&z)),
            excess_kurtosis: Some(stats::excess_kurtosis(&z)),
            ks_normal: Some(stats::ks_one_sample(&z, stats::std_normal_cdf)),
        });
    }
    Ok(rows)
}

/// (cycle weight, cycle length) pairs between consecutive detected
/// regeneration points, pooled across replications in replication order.
/// Skeleton cycles are used when u is constant and v = 0 (where the
/// edge-count splitting applies and points are far denser); renewal cycles
/// otherwise, at the given or pilot-suggested c.
fn collect_cycles(params: &EstimateParams) -> Result<Vec<(f64, f64)>> {
    let wp = params.window_params();
    let skeleton_route = matches!(params.du, DistributionSpec::Constant(_))
        && matches!(params.dv, DistributionSpec::Constant(v) if v == 0.0);
    let c = if skeleton_route {
        None
    } else {
        Some(match params.c {
            Some(c) => c,
            None => {
                let pilot = WindowParams { n: params.n.min(256), ..wp.clone() };
                suggest_c(&pilot, 16)?
            }
        })
    };
    if let Some(c) = c {
        if !(c > 0.0) {
            return Err(Error::parameter("c", "must be positive"));
        }
    }
    let margin = params.margin;
    let per_rep: Vec<Vec<(f64, f64)>> = run_replications(params.reps, |r| {
        let w = wp.replicate(role::REPLICATION, r).expect("validated params");
        let report = match c {
            None => detect_skeleton(&w, margin),
            Some(c) => detect_renewal(&w, c, margin),
        }
        .expect("validated detection inputs");
        cycle_pairs(&w, &report.points)
    });
    Ok(per_rep.into_iter().flatten().collect())
}

fn cycle_pairs(w: &GraphWindow, points: &[usize]) -> Vec<(f64, f64)> {
    points
        .windows(2)
        .map(|pair| {
            let (a, b) = (pair[0], pair[1]);
            let weight = forward_values(w, a, b, Variant::Full)[b]
                .expect("regeneration points are mutually reachable");
            (weight, (b - a) as f64)
        })
        .collect()
}

struct RatioEstimate {
    ratio: f64,
    stderr: f64,
}

impl RatioEstimate {
    /// Renewal-reward ratio with delta-method standard error.
    fn from_cycles(cycles: &[(f64, f64)]) -> Result<Self> {
        let m = cycles.len();
        if m < 2 {
            return Err(Error::Degenerate(format!(
                "only {m} regeneration cycles; increase n or reps, or lower c"
            )));
        }
        let sw: f64 = cycles.iter().map(|&(w, _)| w).sum();
        let sl: f64 = cycles.iter().map(|&(_, l)| l).sum();
        let ratio = sw / sl;
        let lbar = sl / m as f64;
        let s2 =
            cycles.iter().map(|&(w, l)| (w - ratio * l).powi(2)).sum::<f64>() / (m as f64 - 1.0);
        Ok(RatioEstimate { ratio, stderr: (s2 / m as f64).sqrt() / lbar })
    }
}
