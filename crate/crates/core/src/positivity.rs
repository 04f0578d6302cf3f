//! Estimation of the positivity threshold `γ_f(Ω)`: the infimal tension
//! above `−μ₁` from which on every solution with load `f` is nonnegative.
//!
//! Positivity can only be certified at sampled tensions. The estimator scans
//! a fixed grid of tensions, takes the start of the longest positive suffix
//! and bisects against the preceding sample. Whether the positive set is an
//! upper interval is measured (`is_upset`), never assumed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ConvexDomain;
use crate::plate::{
    assemble, discretize, solve_membrane, solve_samples, DiscreteOperators, LoadSpec, SolveReport,
    SolverOptions, SpdSolver,
};
use crate::spectral::{buckling_load, BucklingResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositivityConfig {
    /// Largest scanned tension; `None` means `10 μ₁`.
    pub gamma_max: Option<f64>,
    pub scan_points: usize,
    /// Negativity tolerance relative to `‖u‖∞`.
    pub tol_pos: f64,
    /// Bisection resolution; `None` means `1e-3 μ₁`.
    pub bisection_tol: Option<f64>,
    /// Judge positivity on nodes at least `2h` from the boundary.
    pub use_interior_min: bool,
}

impl Default for PositivityConfig {
    fn default() -> Self {
        PositivityConfig {
            gamma_max: None,
            scan_points: 33,
            tol_pos: 1e-8,
            bisection_tol: None,
            use_interior_min: true,
        }
    }
}

impl PositivityConfig {
    pub fn gamma_max_for(&self, mu1: f64) -> f64 {
        self.gamma_max.unwrap_or(10.0 * mu1)
    }

    pub fn bisection_tol_for(&self, mu1: f64) -> f64 {
        self.bisection_tol.unwrap_or(1e-3 * mu1)
    }

    pub fn validate(&self, mu1: f64) -> Result<()> {
        if self.scan_points < 3 {
            return Err(Error::InvalidConfig(format!(
                "scan_points must be at least 3, got {}",
                self.scan_points
            )));
        }
        let gmax = self.gamma_max_for(mu1);
        if !(gmax > -0.95 * mu1) || !gmax.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "gamma_max must exceed -0.95 mu1 = {}, got {gmax}",
                -0.95 * mu1
            )));
        }
        if !(self.tol_pos >= 0.0) {
            return Err(Error::InvalidConfig("tol_pos must be nonnegative".into()));
        }
        if !(self.bisection_tol_for(mu1) > 0.0) {
            return Err(Error::InvalidConfig("bisection_tol must be positive".into()));
        }
        Ok(())
    }
}

/// `true` iff the tested minimum is at least `−tol_pos ‖u‖∞`.
pub fn is_nonneg(r: &SolveReport, cfg: &PositivityConfig) -> bool {
    let m = if cfg.use_interior_min {
        r.min_u_interior
    } else {
        r.min_u
    };
    m >= -cfg.tol_pos * r.max_abs_u
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub gamma: f64,
    pub min_u: f64,
    pub min_u_interior: f64,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaFReport {
    pub mu1: f64,
    /// Scan and bisection probes, ordered by strictly increasing tension.
    pub scan: Vec<ScanEntry>,
    /// `None` when no sampled tension gives a positive solution.
    pub gamma_star: Option<f64>,
    pub bisection_width: Option<f64>,
    pub is_upset: bool,
    pub tau: Option<f64>,
    pub h: f64,
    pub active_count: usize,
}

/// Scan tensions: linear from `−0.95 μ₁` to `min(μ₁, γ_max)` on the first
/// half of the points, geometric from `μ₁` to `γ_max` on the rest.
pub fn scan_gammas(mu1: f64, gamma_max: f64, points: usize) -> Vec<f64> {
    let lo = -0.95 * mu1;
    let linspace = |a: f64, b: f64, n: usize| -> Vec<f64> {
        (0..n)
            .map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
            .collect()
    };
    if gamma_max <= mu1 {
        return linspace(lo, gamma_max, points);
    }
    let n_lin = points.div_ceil(2);
    let n_geo = points - n_lin;
    let mut g = linspace(lo, mu1, n_lin);
    let ratio = (gamma_max / mu1).powf(1.0 / n_geo as f64);
    for k in 1..=n_geo {
        g.push(if k == n_geo { gamma_max } else { mu1 * ratio.powi(k as i32) });
    }
    g
}

fn probe(ops: &DiscreteOperators, f: &[f64], gamma: f64, cfg: &PositivityConfig) -> Result<ScanEntry> {
    let solver = SpdSolver::new(ops.system(gamma), gamma, &SolverOptions::default())?;
    let r = solve_samples(ops, &solver, gamma, f)?;
    Ok(ScanEntry {
        gamma,
        min_u: r.min_u,
        min_u_interior: r.min_u_interior,
        positive: is_nonneg(&r, cfg),
    })
}

/// Full estimator on a domain.
pub fn estimate_gamma_f(
    d: &ConvexDomain,
    f: &LoadSpec,
    h: f64,
    cfg: &PositivityConfig,
) -> Result<GammaFReport> {
    f.validate()?;
    let ops = assemble(discretize(d, h)?);
    let buckling = buckling_load(&ops)?;
    estimate_gamma_f_on(&ops, &buckling, f, cfg)
}

/// Estimator on prepared operators with a known buckling load.
pub fn estimate_gamma_f_on(
    ops: &DiscreteOperators,
    buckling: &BucklingResult,
    f: &LoadSpec,
    cfg: &PositivityConfig,
) -> Result<GammaFReport> {
    f.validate()?;
    let mu1 = buckling.mu1;
    cfg.validate(mu1)?;
    let samples = f.sample(ops.grid());
    let tau = f.tau(ops.grid());
    let base = GammaFReport {
        mu1,
        scan: Vec::new(),
        gamma_star: None,
        bisection_width: None,
        is_upset: true,
        tau,
        h: ops.grid().h(),
        active_count: ops.grid().active_count(),
    };
    if samples.iter().all(|&v| v == 0.0) {
        // u ≡ 0 for every admissible γ.
        return Ok(GammaFReport {
            gamma_star: Some(-mu1),
            bisection_width: Some(0.0),
            ..base
        });
    }

    let gammas = scan_gammas(mu1, cfg.gamma_max_for(mu1), cfg.scan_points);
    let mut scan = gammas
        .par_iter()
        .map(|&g| probe(ops, &samples, g, cfg))
        .collect::<Result<Vec<_>>>()?;

    let suffix_start = scan.iter().rposition(|e| !e.positive).map_or(0, |k| k + 1);
    if suffix_start == scan.len() {
        return Ok(GammaFReport {
            is_upset: upset(&scan),
            scan,
            ..base
        });
    }
    // Bracket [lo, hi]: lo fails (or is the admissibility boundary −μ₁), hi is positive.
    let mut hi = scan[suffix_start].gamma;
    let mut lo = if suffix_start == 0 {
        -mu1
    } else {
        scan[suffix_start - 1].gamma
    };
    let tol = cfg.bisection_tol_for(mu1);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let e = probe(ops, &samples, mid, cfg)?;
        if e.positive {
            hi = mid;
        } else {
            lo = mid;
        }
        scan.push(e);
    }
    scan.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
    Ok(GammaFReport {
        gamma_star: Some(hi),
        bisection_width: Some(hi - lo),
        is_upset: upset(&scan),
        scan,
        ..base
    })
}

/// Whether the positive samples form an upper set of the sampled tensions.
fn upset(scan: &[ScanEntry]) -> bool {
    scan.windows(2).all(|w| !w[0].positive || w[1].positive)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensionSample {
    pub gamma: f64,
    pub min_u: f64,
    pub min_u_interior: f64,
    pub positive: bool,
    pub center_value: f64,
    /// `γ · u_γ(center)`.
    pub scaled_center: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LargeTensionReport {
    pub samples: Vec<TensionSample>,
    /// Smallest sample from which on every sample is positive.
    pub gamma0: f64,
    /// Center value of the membrane problem `−Δv = f`.
    pub membrane_center: f64,
    pub tau: Option<f64>,
    pub h: f64,
}

impl LargeTensionReport {
    /// `γ u_γ(center) / v(center)` at the largest sampled tension.
    pub fn membrane_ratio(&self) -> Option<f64> {
        let last = self.samples.last()?;
        (self.membrane_center != 0.0).then(|| last.scaled_center / self.membrane_center)
    }
}

/// Solves at each sampled tension and locates the positive suffix.
pub fn large_tension_check(
    d: &ConvexDomain,
    f: &LoadSpec,
    h: f64,
    gammas: &[f64],
    cfg: &PositivityConfig,
) -> Result<LargeTensionReport> {
    f.validate()?;
    if gammas.is_empty() || gammas.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidConfig(
            "tension samples must be non-empty and strictly increasing".into(),
        ));
    }
    let ops = assemble(discretize(d, h)?);
    let fs = f.sample(ops.grid());
    let samples = gammas
        .par_iter()
        .map(|&g| {
            let solver = SpdSolver::new(ops.system(g), g, &SolverOptions::default())?;
            let r = solve_samples(&ops, &solver, g, &fs)?;
            Ok(TensionSample {
                gamma: g,
                min_u: r.min_u,
                min_u_interior: r.min_u_interior,
                positive: is_nonneg(&r, cfg),
                center_value: r.center_value,
                scaled_center: g * r.center_value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let start = samples.iter().rposition(|s| !s.positive).map_or(0, |k| k + 1);
    if start == samples.len() {
        return Err(Error::NotFound(format!(
            "solution is not nonnegative even at gamma = {}",
            gammas[gammas.len() - 1]
        )));
    }
    let v = solve_membrane(&ops, f)?;
    Ok(LargeTensionReport {
        gamma0: samples[start].gamma,
        samples,
        membrane_center: v[ops.grid().center_node()],
        tau: f.tau(ops.grid()),
        h,
    })
}
