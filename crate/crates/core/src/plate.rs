//! Uniform-grid discretization of `(−Δ)²u − γΔu = f` with clamped boundary
//! conditions on a convex polygon.
//!
//! Unknowns live on grid nodes strictly inside the domain. Every stencil
//! neighbour outside that set reads zero, which is the discrete form of
//! extending `W₀^{2,2}(Ω)` functions by zero: the first ring of outside
//! nodes carries `u = 0` and, through the 13-point stencil, also `∂_ν u ≈ 0`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexDomain, Point2, REL_TOL};
use crate::linalg::{self, CgOutcome, CsrMatrix, EnvelopeCholesky};

const INACTIVE: u32 = u32::MAX;

/// Grid nodes `(i h, j h)`, `|i|, |j| ≤ N`, restricted to the strict interior
/// of a domain.
#[derive(Debug, Clone)]
pub struct ActiveGrid {
    h: f64,
    ball_radius: f64,
    half: i64,
    lookup: Vec<u32>,
    coords: Vec<(i64, i64)>,
    positions: Vec<Point2>,
    boundary_distance: Vec<f64>,
    center_node: usize,
}

impl ActiveGrid {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn ball_radius(&self) -> f64 {
        self.ball_radius
    }

    pub fn active_count(&self) -> usize {
        self.coords.len()
    }

    /// Integer grid coordinates `(i, j)` of each unknown.
    pub fn coords(&self) -> &[(i64, i64)] {
        &self.coords
    }

    pub fn positions(&self) -> &[Point2] {
        &self.positions
    }

    /// Distance of each active node to the domain boundary.
    pub fn boundary_distance(&self) -> &[f64] {
        &self.boundary_distance
    }

    /// Active node nearest the domain centroid.
    pub fn center_node(&self) -> usize {
        self.center_node
    }

    /// Unknown index of grid node `(i, j)`, if active.
    pub fn index_of(&self, i: i64, j: i64) -> Option<usize> {
        if i.abs() > self.half || j.abs() > self.half {
            return None;
        }
        let side = (2 * self.half + 1) as usize;
        let k = (j + self.half) as usize * side + (i + self.half) as usize;
        match self.lookup[k] {
            INACTIVE => None,
            idx => Some(idx as usize),
        }
    }

    /// Pads `u` (a field on this grid) with zeros to a field on `target`.
    /// Fails if the grids have different spacing or some node carrying a
    /// nonzero value is not active in `target`.
    pub fn extend_by_zero(&self, u: &[f64], target: &ActiveGrid) -> Result<Vec<f64>> {
        if self.h != target.h {
            return Err(Error::PreconditionViolated(format!(
                "grid spacings differ ({} vs {})",
                self.h, target.h
            )));
        }
        let mut out = vec![0.0; target.active_count()];
        for (&(i, j), &v) in self.coords.iter().zip(u) {
            match target.index_of(i, j) {
                Some(k) => out[k] = v,
                None if v == 0.0 => {}
                None => {
                    return Err(Error::PreconditionViolated(format!(
                        "node ({i}, {j}) is not active in the target grid"
                    )))
                }
            }
        }
        Ok(out)
    }
}

/// Classifies the grid nodes of spacing `h` against `d`.
///
/// A node is active iff its signed distance to the polygon is below
/// `−1e-12 R`, so nodes on the boundary stay inactive.
pub fn discretize(d: &ConvexDomain, h: f64) -> Result<ActiveGrid> {
    let r = d.ball_radius();
    if !(h > 0.0) || !h.is_finite() || h > r / 8.0 * (1.0 + REL_TOL) {
        return Err(Error::PreconditionViolated(format!(
            "grid spacing must satisfy 0 < h <= R/8 (h = {h}, R = {r})"
        )));
    }
    let half = ((r / h) * (1.0 + REL_TOL)).floor() as i64;
    let side = (2 * half + 1) as usize;
    let mut lookup = vec![INACTIVE; side * side];

    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in d.vertices() {
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
        ymin = ymin.min(p.y);
        ymax = ymax.max(p.y);
    }
    let lo = |v: f64| ((v / h).floor() as i64).max(-half);
    let hi = |v: f64| ((v / h).ceil() as i64).min(half);

    let tol = REL_TOL * r;
    let mut coords = Vec::new();
    let mut positions = Vec::new();
    let mut boundary_distance = Vec::new();
    for j in lo(ymin)..=hi(ymax) {
        for i in lo(xmin)..=hi(xmax) {
            let p = Point2::new(i as f64 * h, j as f64 * h);
            let sd = d.signed_distance(p);
            if sd < -tol {
                let k = (j + half) as usize * side + (i + half) as usize;
                lookup[k] = coords.len() as u32;
                coords.push((i, j));
                positions.push(p);
                boundary_distance.push(-sd);
            }
        }
    }
    if coords.is_empty() {
        return Err(Error::EmptyGrid { h });
    }
    let c = d.centroid();
    let center_node = positions
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.dist(c).total_cmp(&b.1.dist(c)))
        .map(|(k, _)| k)
        .unwrap_or(0);
    Ok(ActiveGrid {
        h,
        ball_radius: r,
        half,
        lookup,
        coords,
        positions,
        boundary_distance,
        center_node,
    })
}

/// Right-hand side of the plate equation. All kinds are nonnegative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoadSpec {
    /// `f ≡ amplitude`.
    Constant { amplitude: f64 },
    /// `f(x) = amplitude · exp(−|x − center|² / (2 width²))`.
    GaussianBump {
        center: Point2,
        width: f64,
        amplitude: f64,
    },
    /// Values at integer grid coordinates `(i, j)`; missing nodes read zero.
    GridSamples { samples: Vec<(i64, i64, f64)> },
}

impl LoadSpec {
    pub fn constant(amplitude: f64) -> Self {
        LoadSpec::Constant { amplitude }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v >= 0.0 && v.is_finite();
        match self {
            LoadSpec::Constant { amplitude } if ok(*amplitude) => Ok(()),
            LoadSpec::GaussianBump {
                center,
                width,
                amplitude,
            } if ok(*amplitude) && center.is_finite() && *width > 0.0 && width.is_finite() => Ok(()),
            LoadSpec::GridSamples { samples } if samples.iter().all(|s| ok(s.2)) => Ok(()),
            _ => Err(Error::InvalidLoad(format!(
                "load must be finite and nonnegative (with positive bump width): {self:?}"
            ))),
        }
    }

    /// Samples `f` at the active nodes.
    pub fn sample(&self, grid: &ActiveGrid) -> Vec<f64> {
        match self {
            LoadSpec::Constant { amplitude } => vec![*amplitude; grid.active_count()],
            LoadSpec::GaussianBump {
                center,
                width,
                amplitude,
            } => grid
                .positions()
                .iter()
                .map(|p| {
                    let r2 = (*p - *center).dot(*p - *center);
                    amplitude * (-r2 / (2.0 * width * width)).exp()
                })
                .collect(),
            LoadSpec::GridSamples { samples } => {
                let map: HashMap<(i64, i64), f64> =
                    samples.iter().map(|&(i, j, f)| ((i, j), f)).collect();
                grid.coords()
                    .iter()
                    .map(|ij| map.get(ij).copied().unwrap_or(0.0))
                    .collect()
            }
        }
    }

    /// `τ = h² Σ f / ‖f‖∞` over the active nodes; `None` when `f ≡ 0` there.
    pub fn tau(&self, grid: &ActiveGrid) -> Option<f64> {
        let f = self.sample(grid);
        let max = linalg::norm_inf(&f);
        (max > 0.0).then(|| grid.h() * grid.h() * f.iter().sum::<f64>() / max)
    }
}

/// Stiffness pair on the active unknowns: `A` the 13-point `Δ²` and `B` the
/// 5-point `−Δ`, both with zero extension.
#[derive(Debug, Clone)]
pub struct DiscreteOperators {
    grid: ActiveGrid,
    a: CsrMatrix,
    b: CsrMatrix,
}

const BIHARMONIC: [((i64, i64), f64); 13] = [
    ((0, 0), 20.0),
    ((1, 0), -8.0),
    ((-1, 0), -8.0),
    ((0, 1), -8.0),
    ((0, -1), -8.0),
    ((1, 1), 2.0),
    ((1, -1), 2.0),
    ((-1, 1), 2.0),
    ((-1, -1), 2.0),
    ((2, 0), 1.0),
    ((-2, 0), 1.0),
    ((0, 2), 1.0),
    ((0, -2), 1.0),
];

const LAPLACIAN: [((i64, i64), f64); 5] = [
    ((0, 0), 4.0),
    ((1, 0), -1.0),
    ((-1, 0), -1.0),
    ((0, 1), -1.0),
    ((0, -1), -1.0),
];

fn stencil_matrix(grid: &ActiveGrid, stencil: &[((i64, i64), f64)], scale: f64) -> CsrMatrix {
    let rows = grid
        .coords()
        .iter()
        .map(|&(i, j)| {
            stencil
                .iter()
                .filter_map(|&((di, dj), w)| grid.index_of(i + di, j + dj).map(|k| (k, w * scale)))
                .collect()
        })
        .collect();
    CsrMatrix::from_rows(rows)
}

/// Assembles `(A, B)` on `grid`.
pub fn assemble(grid: ActiveGrid) -> DiscreteOperators {
    let h2 = grid.h() * grid.h();
    let a = stencil_matrix(&grid, &BIHARMONIC, 1.0 / (h2 * h2));
    let b = stencil_matrix(&grid, &LAPLACIAN, 1.0 / h2);
    DiscreteOperators { grid, a, b }
}

impl DiscreteOperators {
    pub fn grid(&self) -> &ActiveGrid {
        &self.grid
    }

    pub fn a(&self) -> &CsrMatrix {
        &self.a
    }

    pub fn b(&self) -> &CsrMatrix {
        &self.b
    }

    /// `A + γB`.
    pub fn system(&self, gamma: f64) -> CsrMatrix {
        self.a.linear_combination(1.0, &self.b, gamma)
    }

    /// Quadrature weight for discrete `L²` inner products.
    pub fn weight(&self) -> f64 {
        self.grid.h() * self.grid.h()
    }
}

/// Controls how symmetric positive-definite systems are solved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Largest envelope (in stored entries) for which the direct factor is
    /// used; larger systems fall back to conjugate gradients.
    pub direct_budget: usize,
    /// Relative residual target of the iterative fallback.
    pub cg_tol: f64,
    pub cg_max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            direct_budget: 96 << 20,
            cg_tol: 1e-10,
            cg_max_iter: 200_000,
        }
    }
}

/// A factored (or iteratively solved) SPD system `M x = b`.
#[derive(Debug, Clone)]
pub enum SpdSolver {
    Direct { matrix: CsrMatrix, factor: EnvelopeCholesky },
    Iterative { matrix: CsrMatrix, options: SolverOptions },
}

impl SpdSolver {
    /// Prepares a solver for `matrix`; `gamma` only labels the error.
    pub fn new(matrix: CsrMatrix, gamma: f64, options: &SolverOptions) -> Result<Self> {
        if matrix.envelope_size() <= options.direct_budget {
            let factor = EnvelopeCholesky::factor(&matrix).map_err(|e| Error::IndefiniteSystem {
                gamma,
                row: e.row,
                pivot: e.pivot,
            })?;
            Ok(SpdSolver::Direct { matrix, factor })
        } else {
            Ok(SpdSolver::Iterative {
                matrix,
                options: *options,
            })
        }
    }

    pub fn matrix(&self) -> &CsrMatrix {
        match self {
            SpdSolver::Direct { matrix, .. } | SpdSolver::Iterative { matrix, .. } => matrix,
        }
    }

    /// Solves `M x = b`. The direct path applies up to two steps of
    /// iterative refinement.
    pub fn solve(&self, b: &[f64], gamma: f64) -> Result<Vec<f64>> {
        match self {
            SpdSolver::Direct { matrix, factor } => {
                let mut x = factor.solve(b);
                let mut best = residual_norm(matrix, &x, b);
                for _ in 0..2 {
                    if best == 0.0 {
                        break;
                    }
                    let mx = matrix.mul_vec(&x);
                    let r: Vec<f64> = b.iter().zip(&mx).map(|(b, m)| b - m).collect();
                    let dx = factor.solve(&r);
                    let cand: Vec<f64> = x.iter().zip(&dx).map(|(x, d)| x + d).collect();
                    let res = residual_norm(matrix, &cand, b);
                    if res < best {
                        best = res;
                        x = cand;
                    } else {
                        break;
                    }
                }
                Ok(x)
            }
            SpdSolver::Iterative { matrix, options } => {
                match linalg::conjugate_gradient(matrix, b, options.cg_tol, options.cg_max_iter) {
                    CgOutcome::Converged { x, .. } => Ok(x),
                    CgOutcome::Indefinite { curvature, .. } => Err(Error::IndefiniteSystem {
                        gamma,
                        row: 0,
                        pivot: curvature,
                    }),
                    CgOutcome::Stalled {
                        iterations,
                        residual,
                        ..
                    } => Err(Error::NoConvergence {
                        iterations,
                        residual,
                    }),
                }
            }
        }
    }
}

fn residual_norm(m: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let mx = m.mul_vec(x);
    b.iter().zip(&mx).map(|(b, m)| (b - m) * (b - m)).sum::<f64>().sqrt()
}

/// Normwise backward error `‖f − Mu‖∞ / (‖M‖∞ ‖u‖∞ + ‖f‖∞)`.
pub fn backward_error(m: &CsrMatrix, u: &[f64], f: &[f64]) -> f64 {
    let mu = m.mul_vec(u);
    let r = f.iter().zip(&mu).fold(0.0f64, |acc, (f, m)| acc.max((f - m).abs()));
    let denom = m.norm_inf() * linalg::norm_inf(u) + linalg::norm_inf(f);
    if denom == 0.0 {
        0.0
    } else {
        r / denom
    }
}

/// Result of one plate solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub gamma: f64,
    #[serde(skip)]
    pub u: Vec<f64>,
    pub min_u: f64,
    /// Minimum over nodes at distance `≥ 2h` from the boundary (falls back
    /// to `min_u` when no node is that deep).
    pub min_u_interior: f64,
    pub max_abs_u: f64,
    /// Normwise backward error of the computed solution.
    pub residual: f64,
    pub center_value: f64,
    pub h: f64,
    pub active_count: usize,
}

impl SolveReport {
    fn from_solution(grid: &ActiveGrid, gamma: f64, u: Vec<f64>, residual: f64) -> Self {
        let depth = 2.0 * grid.h() * (1.0 - REL_TOL);
        let min_u = u.iter().copied().fold(f64::INFINITY, f64::min);
        let min_u_interior = u
            .iter()
            .zip(grid.boundary_distance())
            .filter(|(_, &d)| d >= depth)
            .map(|(&v, _)| v)
            .fold(f64::INFINITY, f64::min);
        SolveReport {
            gamma,
            min_u,
            min_u_interior: if min_u_interior.is_finite() {
                min_u_interior
            } else {
                min_u
            },
            max_abs_u: linalg::norm_inf(&u),
            residual,
            center_value: u[grid.center_node()],
            h: grid.h(),
            active_count: grid.active_count(),
            u,
        }
    }
}

/// Solves `(A + γB) u = f` at the active nodes.
pub fn solve_plate(ops: &DiscreteOperators, gamma: f64, load: &LoadSpec) -> Result<SolveReport> {
    solve_plate_with(ops, gamma, load, &SolverOptions::default())
}

pub fn solve_plate_with(
    ops: &DiscreteOperators,
    gamma: f64,
    load: &LoadSpec,
    options: &SolverOptions,
) -> Result<SolveReport> {
    if !gamma.is_finite() {
        return Err(Error::PreconditionViolated(format!("tension must be finite, got {gamma}")));
    }
    load.validate()?;
    let f = load.sample(ops.grid());
    let solver = SpdSolver::new(ops.system(gamma), gamma, options)?;
    solve_samples(ops, &solver, gamma, &f)
}

/// Solves with an already prepared system for the sampled load `f`.
pub fn solve_samples(
    ops: &DiscreteOperators,
    solver: &SpdSolver,
    gamma: f64,
    f: &[f64],
) -> Result<SolveReport> {
    let u = if f.iter().all(|&v| v == 0.0) {
        vec![0.0; f.len()]
    } else {
        solver.solve(f, gamma)?
    };
    let residual = backward_error(solver.matrix(), &u, f);
    Ok(SolveReport::from_solution(ops.grid(), gamma, u, residual))
}

/// Solves the membrane problem `B v = f` (the `γ → ∞` limit of `γ u_γ`).
pub fn solve_membrane(ops: &DiscreteOperators, load: &LoadSpec) -> Result<Vec<f64>> {
    load.validate()?;
    let f = load.sample(ops.grid());
    let solver = SpdSolver::new(ops.b().clone(), f64::INFINITY, &SolverOptions::default())?;
    solver.solve(&f, f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexDomain {
        ConvexDomain::rectangle(1.0, 1.0, Point2::new(0.5, 0.5), 2.0).unwrap()
    }

    #[test]
    fn square_interior_count() {
        let g = discretize(&unit_square(), 0.25).unwrap();
        assert_eq!(g.active_count(), 9);
        assert_eq!(g.positions()[g.center_node()], Point2::new(0.5, 0.5));
    }

    #[test]
    fn tiny_triangle_has_no_nodes() {
        let tri = ConvexDomain::new(
            vec![Point2::new(0.01, 0.01), Point2::new(0.05, 0.01), Point2::new(0.02, 0.05)],
            2.0,
        )
        .unwrap();
        assert!(matches!(discretize(&tri, 0.25), Err(Error::EmptyGrid { .. })));
    }

    #[test]
    fn spacing_precondition() {
        assert!(matches!(
            discretize(&unit_square(), 0.5),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(discretize(&unit_square(), 0.0).is_err());
    }

    #[test]
    fn single_node_stencil_centers() {
        // Square of side 2h around the origin has exactly one interior node.
        let h = 0.25;
        let d = ConvexDomain::rectangle(2.0 * h, 2.0 * h, Point2::default(), 2.0).unwrap();
        let ops = assemble(discretize(&d, h).unwrap());
        assert_eq!(ops.grid().active_count(), 1);
        assert_eq!(ops.a().get(0, 0), 20.0 / h.powi(4));
        assert_eq!(ops.b().get(0, 0), 4.0 / h.powi(2));
    }

    #[test]
    fn laplacian_annihilates_constants_deep_inside() {
        let ops = assemble(discretize(&unit_square(), 0.125).unwrap());
        let ones = vec![1.0; ops.grid().active_count()];
        let bu = ops.b().mul_vec(&ones);
        let au = ops.a().mul_vec(&ones);
        let h = ops.grid().h();
        for (k, &(i, j)) in ops.grid().coords().iter().enumerate() {
            let inner = [(1, 0), (-1, 0), (0, 1), (0, -1)]
                .iter()
                .all(|&(di, dj)| ops.grid().index_of(i + di, j + dj).is_some());
            if inner {
                assert!(bu[k].abs() < 1e-9 / (h * h));
            }
            let deep = (-2..=2).all(|di: i64| {
                (-2..=2).all(|dj: i64| {
                    di.abs() + dj.abs() > 2 || ops.grid().index_of(i + di, j + dj).is_some()
                })
            });
            if deep {
                assert!(au[k].abs() < 1e-9 / h.powi(4));
            }
        }
    }

    #[test]
    fn zero_load_gives_zero_field() {
        let ops = assemble(discretize(&unit_square(), 0.125).unwrap());
        let r = solve_plate(&ops, 0.0, &LoadSpec::constant(0.0)).unwrap();
        assert!(r.u.iter().all(|&v| v == 0.0));
        assert_eq!(r.min_u, 0.0);
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn linear_in_load() {
        let ops = assemble(discretize(&unit_square(), 0.0625).unwrap());
        let bump = |a: f64| LoadSpec::GaussianBump {
            center: Point2::new(0.3, 0.6),
            width: 0.1,
            amplitude: a,
        };
        let r1 = solve_plate(&ops, 3.0, &bump(1.0)).unwrap();
        let r2 = solve_plate(&ops, 3.0, &bump(2.0)).unwrap();
        for (a, b) in r1.u.iter().zip(&r2.u) {
            assert!((2.0 * a - b).abs() <= 1e-12 * b.abs().max(1e-300) + 1e-300);
        }
        assert!(r1.residual < 1e-10);
    }

    #[test]
    fn rejects_negative_load() {
        let ops = assemble(discretize(&unit_square(), 0.125).unwrap());
        assert!(matches!(
            solve_plate(&ops, 0.0, &LoadSpec::constant(-1.0)),
            Err(Error::InvalidLoad(_))
        ));
    }

    #[test]
    fn iterative_fallback_agrees_with_direct() {
        let ops = assemble(discretize(&unit_square(), 1.0 / 16.0).unwrap());
        let load = LoadSpec::constant(1.0);
        let direct = solve_plate(&ops, 5.0, &load).unwrap();
        let opts = SolverOptions {
            direct_budget: 0,
            ..SolverOptions::default()
        };
        let cg = solve_plate_with(&ops, 5.0, &load, &opts).unwrap();
        for (a, b) in direct.u.iter().zip(&cg.u) {
            assert!((a - b).abs() < 1e-8 * direct.max_abs_u);
        }
    }

    #[test]
    fn grid_samples_load() {
        let g = discretize(&unit_square(), 0.25).unwrap();
        let load = LoadSpec::GridSamples {
            samples: vec![(2, 2, 3.0), (9, 9, 1.0)],
        };
        let f = load.sample(&g);
        assert_eq!(f.iter().sum::<f64>(), 3.0);
        assert_eq!(load.tau(&g), Some(0.0625));
        assert_eq!(LoadSpec::constant(0.0).tau(&g), None);
    }
}
