//! Derivative-free search for a convex domain of prescribed area that
//! minimizes the positivity threshold, plus diagnostics that instrument the
//! resulting minimizing sequence.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    convex_hull, eventually_contains, hausdorff_distance, hausdorff_to_disk,
    outer_parallel_area_bound, ConvexDomain, Point2, REL_TOL,
};
use crate::plate::{assemble, discretize, LoadSpec};
use crate::positivity::{estimate_gamma_f, PositivityConfig};
use crate::spectral::buckling_load;

/// Convex domains inside `B_R(0)` with area `c₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdmissibleClassSpec {
    pub ball_radius: f64,
    pub target_area: f64,
    pub area_tolerance: f64,
}

impl AdmissibleClassSpec {
    pub fn new(ball_radius: f64, target_area: f64) -> Result<Self> {
        let spec = AdmissibleClassSpec {
            ball_radius,
            target_area,
            area_tolerance: 1e-6,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.ball_radius;
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidConfig(format!("ball radius must be positive, got {r}")));
        }
        if !(self.target_area > 0.0) || self.target_area > PI * r * r {
            return Err(Error::InvalidConfig(format!(
                "target area must lie in (0, πR²] = (0, {}], got {}",
                PI * r * r,
                self.target_area
            )));
        }
        if !(self.area_tolerance > 0.0) {
            return Err(Error::InvalidConfig("area tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Runs the three membership checks on `d`.
    pub fn membership(&self, d: &ConvexDomain) -> Membership {
        let area_rel_error = (d.area() - self.target_area).abs() / self.target_area;
        Membership {
            area_rel_error,
            area_ok: area_rel_error <= self.area_tolerance,
            convex: ConvexDomain::from_strict(d.vertices().to_vec(), d.ball_radius()).is_ok(),
            inside_ball: d.max_vertex_norm() <= self.ball_radius * (1.0 + REL_TOL),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub area_rel_error: f64,
    pub area_ok: bool,
    pub convex: bool,
    pub inside_ball: bool,
}

impl Membership {
    pub fn holds(&self) -> bool {
        self.area_ok && self.convex && self.inside_ball
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub class_spec: AdmissibleClassSpec,
    pub vertex_count: usize,
    pub iterations: usize,
    /// Proposal scale; `None` means `0.05 R`.
    pub sigma0: Option<f64>,
    pub sigma_decay: f64,
    /// Initial temperature; `None` means `0.2 |γ_f(start)| + 1`.
    pub t0: Option<f64>,
    pub cooling: f64,
    pub h: f64,
    pub positivity: PositivityConfig,
    pub seed: u64,
    /// Starting domain (rescaled to the target area); `None` means the
    /// regular `vertex_count`-gon centred at the origin.
    pub start: Option<ConvexDomain>,
}

impl SearchConfig {
    pub fn new(class_spec: AdmissibleClassSpec, h: f64) -> Self {
        SearchConfig {
            class_spec,
            vertex_count: 16,
            iterations: 200,
            sigma0: None,
            sigma_decay: 0.99,
            t0: None,
            cooling: 0.95,
            h,
            positivity: PositivityConfig::default(),
            seed: 0,
            start: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.class_spec.validate()?;
        if self.vertex_count < 4 {
            return Err(Error::InvalidConfig(format!(
                "vertex count must be at least 4, got {}",
                self.vertex_count
            )));
        }
        let unit = |v: f64| v > 0.0 && v <= 1.0;
        if !unit(self.sigma_decay) || !unit(self.cooling) {
            return Err(Error::InvalidConfig("decay and cooling factors must lie in (0, 1]".into()));
        }
        if self.sigma0.is_some_and(|s| !(s >= 0.0)) || self.t0.is_some_and(|t| !(t > 0.0)) {
            return Err(Error::InvalidConfig("sigma0 must be >= 0 and t0 > 0".into()));
        }
        Ok(())
    }

    fn start_domain(&self) -> Result<ConvexDomain> {
        let spec = &self.class_spec;
        let d = match &self.start {
            Some(d) => d.with_ball_radius(spec.ball_radius)?,
            None => {
                let k = self.vertex_count as f64;
                let r = (2.0 * spec.target_area / (k * (2.0 * PI / k).sin())).sqrt();
                ConvexDomain::regular(self.vertex_count, r, Point2::default(), spec.ball_radius)?
            }
        };
        d.scale_to_area(spec.target_area)
    }
}

/// Random admissible neighbour of `d`: Gaussian vertex noise of scale
/// `sigma`, convex hull, refill to `vertex_count` vertices, homothetic clip
/// into the ball, rescale to the target area.
pub fn propose<R: Rng + ?Sized>(
    d: &ConvexDomain,
    sigma: f64,
    spec: &AdmissibleClassSpec,
    vertex_count: usize,
    rng: &mut R,
) -> Result<ConvexDomain> {
    if sigma == 0.0 {
        return Ok(d.clone());
    }
    let infeasible = |e: Error| Error::ProposalInfeasible(e.to_string());
    let noise = Normal::new(0.0, sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let moved: Vec<Point2> = d
        .vertices()
        .iter()
        .map(|&v| v + Point2::new(noise.sample(rng), noise.sample(rng)))
        .collect();
    let reach = moved.iter().map(|p| p.norm()).fold(spec.ball_radius, f64::max);
    let hull = convex_hull(&moved, reach).map_err(infeasible)?;
    let mut pts = hull.vertices().to_vec();
    refill(&mut pts, vertex_count);
    let hull = ConvexDomain::new(pts, reach * 1.01).map_err(infeasible)?;

    let c = hull.centroid();
    let r = spec.ball_radius;
    if c.norm() >= r {
        return Err(Error::ProposalInfeasible("centroid left the ambient ball".into()));
    }
    // Largest t ≤ 1 with |c + t (v − c)| ≤ R for every vertex.
    let mut t: f64 = 1.0;
    for &v in hull.vertices() {
        let w = v - c;
        let (a, b, cc) = (w.dot(w), c.dot(w), c.dot(c) - r * r);
        let root = (-b + (b * b - a * cc).sqrt()) / a;
        t = t.min(root);
    }
    let clipped = if t < 1.0 {
        let pts = hull
            .vertices()
            .iter()
            .map(|&v| c + (t * (1.0 - 1e-12)) * (v - c))
            .collect();
        ConvexDomain::new(pts, r).map_err(infeasible)?
    } else {
        hull.with_ball_radius(r).map_err(infeasible)?
    };
    let out = clipped.scale_to_area(spec.target_area).map_err(infeasible)?;
    if !spec.membership(&out).holds() {
        return Err(Error::ProposalInfeasible("rescaled proposal left the admissible class".into()));
    }
    Ok(out)
}

/// Splits the longest edges until the chain has `target` vertices. The new
/// midpoint is nudged outward by 1e-3 of the edge length, or less when the
/// neighbouring vertices would otherwise flatten.
fn refill(pts: &mut Vec<Point2>, target: usize) {
    while pts.len() < target {
        let n = pts.len();
        let k = (0..n)
            .max_by(|&i, &j| {
                let li = pts[i].dist(pts[(i + 1) % n]);
                let lj = pts[j].dist(pts[(j + 1) % n]);
                li.total_cmp(&lj)
            })
            .unwrap();
        let (p, a, b, q) = (pts[(k + n - 1) % n], pts[k], pts[(k + 1) % n], pts[(k + 2) % n]);
        let e = b - a;
        let len = e.norm();
        let nrm = Point2::new(e.y / len, -e.x / len);
        let mid = 0.5 * (a + b);
        // Largest outward offset that keeps a and b strictly convex.
        let mut room = f64::INFINITY;
        let da = (a - p).cross(nrm);
        if da < 0.0 {
            room = room.min((a - p).cross(mid - a) / -da);
        }
        let db = nrm.cross(q - b);
        if db > 0.0 {
            room = room.min((b - mid).cross(q - b) / db);
        }
        let bulge = (1e-3 * len).min(0.25 * room);
        pts.insert(k + 1, mid + bulge * nrm);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IterateStatus {
    Start,
    Evaluated,
    Infeasible,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Iterate {
    pub iter: usize,
    pub domain: Option<ConvexDomain>,
    pub gamma_star: Option<f64>,
    pub mu1: Option<f64>,
    pub accepted: bool,
    /// `d_H` to the previously accepted iterate (accepted iterates only).
    pub d_h_step: Option<f64>,
    pub status: IterateStatus,
    pub note: Option<String>,
}

/// The minimizing sequence produced by [`optimize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub iterates: Vec<Iterate>,
    /// Index into `iterates` of the incumbent.
    pub best: usize,
    pub seed: u64,
    /// Configuration with every default resolved.
    pub config: SearchConfig,
    pub load: LoadSpec,
}

/// One line of the JSON-lines trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub vertices: Option<Vec<Point2>>,
    pub gamma_star: Option<f64>,
    pub mu1: Option<f64>,
    pub accepted: bool,
    #[serde(rename = "d_H_step")]
    pub d_h_step: Option<f64>,
    pub status: IterateStatus,
}

impl OptimizationTrace {
    pub fn incumbent(&self) -> &Iterate {
        &self.iterates[self.best]
    }

    pub fn accepted(&self) -> impl Iterator<Item = &Iterate> {
        self.iterates.iter().filter(|it| it.accepted)
    }

    pub fn hausdorff_steps(&self) -> Vec<f64> {
        self.accepted().filter_map(|it| it.d_h_step).collect()
    }

    /// Incumbent value after each iteration.
    pub fn incumbent_history(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.iterates
            .iter()
            .map(|it| {
                if it.accepted {
                    if let Some(g) = it.gamma_star {
                        best = best.min(g);
                    }
                }
                best
            })
            .collect()
    }

    pub fn records(&self) -> Vec<TraceRecord> {
        self.iterates
            .iter()
            .map(|it| TraceRecord {
                iter: it.iter,
                vertices: it.domain.as_ref().map(|d| d.vertices().to_vec()),
                gamma_star: it.gamma_star,
                mu1: it.mu1,
                accepted: it.accepted,
                d_h_step: it.d_h_step,
                status: it.status,
            })
            .collect()
    }

    pub fn to_json_lines(&self) -> Result<String> {
        let mut out = String::new();
        for r in self.records() {
            out.push_str(&serde_json::to_string(&r)?);
            out.push('\n');
        }
        Ok(out)
    }
}

fn evaluate(d: &ConvexDomain, f: &LoadSpec, cfg: &SearchConfig) -> Result<(f64, f64)> {
    let rep = estimate_gamma_f(d, f, cfg.h, &cfg.positivity)?;
    match rep.gamma_star {
        Some(g) => Ok((g, rep.mu1)),
        None => Err(Error::NotFound("no positive suffix in the tension scan".into())),
    }
}

/// Simulated annealing over vertex perturbations.
pub fn optimize(cfg: &SearchConfig, f: &LoadSpec) -> Result<OptimizationTrace> {
    cfg.validate()?;
    f.validate()?;
    let spec = cfg.class_spec;
    let start = cfg.start_domain()?;
    let (g0, mu0) = evaluate(&start, f, cfg)?;
    let sigma0 = cfg.sigma0.unwrap_or(0.05 * spec.ball_radius);
    let t0 = cfg.t0.unwrap_or(0.2 * g0.abs() + 1.0);
    let resolved = SearchConfig {
        sigma0: Some(sigma0),
        t0: Some(t0),
        start: Some(start.clone()),
        ..cfg.clone()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut iterates = vec![Iterate {
        iter: 0,
        domain: Some(start.clone()),
        gamma_star: Some(g0),
        mu1: Some(mu0),
        accepted: true,
        d_h_step: None,
        status: IterateStatus::Start,
        note: None,
    }];
    let (mut current, mut g_cur) = (start, g0);
    let (mut best, mut g_best) = (0, g0);

    for it in 1..=cfg.iterations {
        let k = (it - 1) as i32;
        let sigma = sigma0 * cfg.sigma_decay.powi(k);
        let temp = t0 * cfg.cooling.powi(k);
        let cand = match propose(&current, sigma, &spec, cfg.vertex_count, &mut rng) {
            Ok(c) => c,
            Err(e) => {
                iterates.push(Iterate {
                    iter: it,
                    domain: None,
                    gamma_star: None,
                    mu1: None,
                    accepted: false,
                    d_h_step: None,
                    status: IterateStatus::Infeasible,
                    note: Some(e.to_string()),
                });
                continue;
            }
        };
        let (g, mu) = match evaluate(&cand, f, cfg) {
            Ok(v) => v,
            Err(e) => {
                iterates.push(Iterate {
                    iter: it,
                    domain: Some(cand),
                    gamma_star: None,
                    mu1: None,
                    accepted: false,
                    d_h_step: None,
                    status: IterateStatus::Failed,
                    note: Some(e.to_string()),
                });
                continue;
            }
        };
        let delta = g - g_cur;
        let accept = delta <= 0.0 || rng.random::<f64>() < (-delta / temp).exp();
        let d_h_step = accept.then(|| hausdorff_distance(&current, &cand));
        if accept {
            current = cand.clone();
            g_cur = g;
            if g < g_best {
                g_best = g;
                best = iterates.len();
            }
        }
        iterates.push(Iterate {
            iter: it,
            domain: Some(cand),
            gamma_star: Some(g),
            mu1: Some(mu),
            accepted: accept,
            d_h_step,
            status: IterateStatus::Evaluated,
            note: None,
        });
    }
    Ok(OptimizationTrace {
        iterates,
        best,
        seed: cfg.seed,
        config: resolved,
        load: f.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaStep {
    pub d_h: f64,
    pub area_change: f64,
    pub bound: f64,
    pub holds: bool,
    /// `|area − c₁| / c₁` of the later iterate.
    pub area_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDiagnostics {
    pub accepted_count: usize,
    pub area_steps: Vec<AreaStep>,
    pub area_continuity_holds: bool,
    pub incumbent_mu1: f64,
    pub incumbent_gamma_star: f64,
    pub min_gamma_star: f64,
    /// `−μ₁(incumbent) ≤ min γ_f over the trace`.
    pub buckling_bound_holds: bool,
    /// Largest pairwise `d_H` among the last half of the accepted iterates.
    pub tail_diameter: f64,
    /// Distance from the 0.9-scaled incumbent to the incumbent's boundary.
    pub containment_margin: f64,
    /// First accepted position (1-based) from which every accepted iterate
    /// is within `containment_margin` of the incumbent in `d_H`.
    pub close_tail_start: Option<usize>,
    /// `eventually_contains` on the accepted sequence for the scaled copy.
    pub containment_index: Option<usize>,
    /// When the trace ends close to the incumbent, the containment index
    /// exists and does not exceed `close_tail_start`; vacuous otherwise.
    pub containment_consistent: bool,
}

/// Minimizing-sequence diagnostics; needs at least two accepted iterates.
pub fn diagnostics(t: &OptimizationTrace) -> Result<TraceDiagnostics> {
    let accepted: Vec<&Iterate> = t
        .accepted()
        .filter(|it| it.domain.is_some() && it.gamma_star.is_some())
        .collect();
    if accepted.len() < 2 {
        return Err(Error::PreconditionViolated(format!(
            "diagnostics need at least 2 accepted iterates, found {}",
            accepted.len()
        )));
    }
    let domains: Vec<ConvexDomain> = accepted.iter().map(|it| it.domain.clone().unwrap()).collect();
    let spec = &t.config.class_spec;
    let r = spec.ball_radius;

    let area_steps: Vec<AreaStep> = domains
        .windows(2)
        .map(|w| {
            let d_h = hausdorff_distance(&w[0], &w[1]);
            let area_change = (w[1].area() - w[0].area()).abs();
            let bound = outer_parallel_area_bound(r, d_h);
            AreaStep {
                d_h,
                area_change,
                bound,
                holds: area_change <= bound + 1e-12 * spec.target_area,
                area_rel_error: (w[1].area() - spec.target_area).abs() / spec.target_area,
            }
        })
        .collect();

    let inc = t.incumbent();
    let inc_domain = inc
        .domain
        .clone()
        .ok_or_else(|| Error::PreconditionViolated("incumbent has no domain".into()))?;
    let incumbent_mu1 = inc.mu1.unwrap_or(f64::NAN);
    let incumbent_gamma_star = inc.gamma_star.unwrap_or(f64::NAN);
    let min_gamma_star = t
        .iterates
        .iter()
        .filter_map(|it| it.gamma_star)
        .fold(f64::INFINITY, f64::min);

    let tail = &domains[domains.len() / 2..];
    let mut tail_diameter: f64 = 0.0;
    for (i, a) in tail.iter().enumerate() {
        for b in &tail[i + 1..] {
            tail_diameter = tail_diameter.max(hausdorff_distance(a, b));
        }
    }

    let compact = inc_domain.scaled(0.9)?;
    let containment_margin = compact
        .vertices()
        .iter()
        .map(|&p| -inc_domain.signed_distance(p))
        .fold(f64::INFINITY, f64::min);
    let close: Vec<bool> = domains
        .iter()
        .map(|d| hausdorff_distance(d, &inc_domain) < containment_margin)
        .collect();
    let close_tail_start = close
        .iter()
        .rposition(|&c| !c)
        .map_or(Some(1), |k| (k + 1 < close.len()).then_some(k + 2));
    let containment_index = eventually_contains(&domains, &inc_domain, &compact)?;
    // Convexity forces containment on a close tail; nothing is predicted
    // when the trace ends away from the incumbent.
    let containment_consistent = match close_tail_start {
        Some(s) => containment_index.is_some_and(|m0| m0 <= s),
        None => true,
    };

    Ok(TraceDiagnostics {
        accepted_count: domains.len(),
        area_continuity_holds: area_steps.iter().all(|s| s.holds),
        area_steps,
        incumbent_mu1,
        incumbent_gamma_star,
        min_gamma_star,
        buckling_bound_holds: -incumbent_mu1 <= min_gamma_star,
        tail_diameter,
        containment_margin,
        close_tail_start,
        containment_index,
        containment_consistent,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    /// Centre of the comparison disk (incumbent centroid when the disk fits).
    pub disk_center: Point2,
    pub disk_radius: f64,
    /// Exact `d_H` between the incumbent and the area-matched disk.
    pub hausdorff_to_disk: f64,
    /// `f ≡ 0`: values below compare buckling loads (`γ_f = −μ₁`).
    pub zero_load: bool,
    pub incumbent_gamma_star: f64,
    pub incumbent_mu1: f64,
    /// Computed on a 64-gon approximation of the disk at the trace's `h`.
    pub disk_gamma_star: Option<f64>,
    pub disk_mu1: f64,
}

pub const DISK_VERTICES: usize = 64;

/// Compares the incumbent with the disk of equal area.
pub fn symmetry_report(t: &OptimizationTrace, f: &LoadSpec) -> Result<SymmetryReport> {
    let inc = t.incumbent();
    let d = inc
        .domain
        .as_ref()
        .ok_or_else(|| Error::PreconditionViolated("incumbent has no domain".into()))?;
    let r = d.ball_radius();
    let area = d.area();
    let c = d.centroid();
    let disk_radius = (area / PI).sqrt();
    let k = DISK_VERTICES as f64;
    let poly_r = (2.0 * area / (k * (2.0 * PI / k).sin())).sqrt();
    let (disk_center, disk) = match ConvexDomain::regular(DISK_VERTICES, poly_r, c, r) {
        Ok(p) => (c, p),
        Err(_) => (
            Point2::default(),
            ConvexDomain::regular(DISK_VERTICES, poly_r, Point2::default(), r)?,
        ),
    };
    let hausdorff_to_disk = hausdorff_to_disk(d, c, disk_radius);

    let cfg = &t.config;
    let ops = assemble(discretize(&disk, cfg.h)?);
    let zero_load = f.sample(ops.grid()).iter().all(|&v| v == 0.0);
    let (disk_gamma_star, disk_mu1) = if zero_load {
        let mu = buckling_load(&ops)?.mu1;
        (Some(-mu), mu)
    } else {
        let rep = estimate_gamma_f(&disk, f, cfg.h, &cfg.positivity)?;
        (rep.gamma_star, rep.mu1)
    };
    Ok(SymmetryReport {
        disk_center,
        disk_radius,
        hausdorff_to_disk,
        zero_load,
        incumbent_gamma_star: inc.gamma_star.unwrap_or(f64::NAN),
        incumbent_mu1: inc.mu1.unwrap_or(f64::NAN),
        disk_gamma_star,
        disk_mu1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> AdmissibleClassSpec {
        AdmissibleClassSpec::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn class_spec_rejects_oversized_area() {
        assert!(AdmissibleClassSpec::new(1.0, 3.2).is_err());
        assert!(AdmissibleClassSpec::new(1.0, PI).is_ok());
    }

    #[test]
    fn zero_sigma_is_identity() {
        let d = ConvexDomain::regular(16, 0.5, Point2::default(), 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(propose(&d, 0.0, &spec(), 16, &mut rng).unwrap(), d);
    }

    #[test]
    fn proposals_stay_admissible() {
        let s = spec();
        let d = ConvexDomain::regular(16, 0.6, Point2::default(), 1.0)
            .unwrap()
            .scale_to_area(s.target_area)
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut ok = 0;
        for _ in 0..200 {
            match propose(&d, 0.05, &s, 16, &mut rng) {
                Ok(p) => {
                    assert!(s.membership(&p).holds());
                    assert_eq!(p.len(), 16);
                    ok += 1;
                }
                Err(e) => assert!(matches!(e, Error::ProposalInfeasible(_))),
            }
        }
        assert!(ok > 100);
    }

    #[test]
    fn large_noise_near_ball_boundary_never_yields_invalid_domain() {
        let s = AdmissibleClassSpec::new(1.0, 2.0).unwrap();
        let sq = ConvexDomain::rectangle(2f64.sqrt(), 2f64.sqrt(), Point2::default(), 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut infeasible = 0;
        for _ in 0..200 {
            match propose(&sq, 0.5, &s, 8, &mut rng) {
                Ok(p) => assert!(s.membership(&p).holds()),
                Err(Error::ProposalInfeasible(_)) => infeasible += 1,
                Err(e) => panic!("{e}"),
            }
        }
        assert!(infeasible > 0);
    }

    #[test]
    fn refill_keeps_convexity() {
        let mut pts = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0)];
        refill(&mut pts, 8);
        assert_eq!(pts.len(), 8);
        assert!(ConvexDomain::from_strict(pts, 2.0).is_ok());
    }
}
