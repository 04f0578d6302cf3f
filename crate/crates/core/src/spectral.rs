//! Buckling load: the smallest eigenvalue of `A u = μ B u`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, norm2};
use crate::plate::{DiscreteOperators, SolverOptions, SpdSolver};

/// Seed of the deterministic starting vector.
pub const START_SEED: u64 = 0x5eed_b0c1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IterationScheme {
    /// `u ← A⁻¹ B u`, normalized in the `B` norm.
    Inverse,
    /// Inverse iteration plus a Rayleigh–Ritz step over the current iterate,
    /// its inverse-iteration image and the previous update direction.
    LocallyOptimal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BucklingOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub scheme: IterationScheme,
    pub solver: SolverOptions,
}

impl Default for BucklingOptions {
    fn default() -> Self {
        BucklingOptions {
            tol: 1e-8,
            max_iter: 500,
            scheme: IterationScheme::LocallyOptimal,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucklingResult {
    pub mu1: f64,
    /// Normalized so that `uᵀBu = 1` and its entries sum to a nonnegative value.
    #[serde(skip)]
    pub eigenvector: Vec<f64>,
    /// `‖Au − μ₁Bu‖₂ / ‖Au‖₂`.
    pub residual: f64,
    pub iterations: usize,
    pub h: f64,
    pub active_count: usize,
}

/// `uᵀAu / uᵀBu`.
pub fn rayleigh_quotient(ops: &DiscreteOperators, u: &[f64]) -> Result<f64> {
    let den = ops.b().bilinear(u, u);
    if !(den > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    Ok(ops.a().bilinear(u, u) / den)
}

pub fn buckling_load(ops: &DiscreteOperators) -> Result<BucklingResult> {
    buckling_load_with(ops, &BucklingOptions::default())
}

pub fn buckling_load_with(ops: &DiscreteOperators, opts: &BucklingOptions) -> Result<BucklingResult> {
    let n = ops.grid().active_count();
    let solver = SpdSolver::new(ops.a().clone(), 0.0, &opts.solver)?;
    let (a, b) = (ops.a(), ops.b());

    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.0)).collect();
    b_normalize(b, &mut x);
    let mut prev_dir: Option<Vec<f64>> = None;
    let mut residual = f64::INFINITY;

    for it in 1..=opts.max_iter {
        let y = solver.solve(&b.mul_vec(&x), 0.0)?;
        match opts.scheme {
            IterationScheme::Inverse => {
                x = y;
                b_normalize(b, &mut x);
            }
            IterationScheme::LocallyOptimal => {
                let mut basis = vec![x.clone(), y];
                if let Some(p) = prev_dir.take() {
                    basis.push(p);
                }
                let (xn, pn) = rayleigh_ritz(a, b, basis);
                x = xn;
                prev_dir = pn;
            }
        }
        fix_sign(&mut x);
        let (mu, r) = eigen_residual(ops, &x);
        residual = r;
        if residual <= opts.tol {
            return Ok(BucklingResult {
                mu1: mu,
                eigenvector: x,
                residual,
                iterations: it,
                h: ops.grid().h(),
                active_count: n,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual,
    })
}

fn b_normalize(b: &crate::linalg::CsrMatrix, x: &mut [f64]) {
    let s = b.bilinear(x, x).sqrt();
    x.iter_mut().for_each(|v| *v /= s);
}

fn fix_sign(x: &mut [f64]) {
    if x.iter().sum::<f64>() < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Rayleigh quotient of `x` and the relative eigen-residual.
fn eigen_residual(ops: &DiscreteOperators, x: &[f64]) -> (f64, f64) {
    let ax = ops.a().mul_vec(x);
    let bx = ops.b().mul_vec(x);
    let mu = inner(x, &ax) / inner(x, &bx);
    let r: Vec<f64> = ax.iter().zip(&bx).map(|(a, b)| a - mu * b).collect();
    (mu, norm2(&r) / norm2(&ax))
}

/// Minimizes the Rayleigh quotient over `span(basis)`; `basis[0]` is the
/// current iterate. Returns the new iterate (B-normalized) and the update
/// direction, i.e. the part of the minimizer outside the current iterate.
fn rayleigh_ritz(
    a: &crate::linalg::CsrMatrix,
    b: &crate::linalg::CsrMatrix,
    basis: Vec<Vec<f64>>,
) -> (Vec<f64>, Option<Vec<f64>>) {
    // B-orthonormalize by modified Gram–Schmidt, twice.
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(basis.len());
    let mut bq: Vec<Vec<f64>> = Vec::with_capacity(basis.len());
    for v in basis {
        let mut w = v;
        let original = b.bilinear(&w, &w).sqrt();
        for _ in 0..2 {
            for (qk, bqk) in q.iter().zip(&bq) {
                let c = inner(&w, bqk);
                w.iter_mut().zip(qk).for_each(|(wi, qi)| *wi -= c * qi);
            }
        }
        let bw = b.mul_vec(&w);
        let nrm = inner(&w, &bw).sqrt();
        if !(nrm > 1e-13 * original) {
            continue;
        }
        w.iter_mut().for_each(|v| *v /= nrm);
        bq.push(bw.into_iter().map(|v| v / nrm).collect());
        q.push(w);
    }
    let m = q.len();
    let aq: Vec<Vec<f64>> = q.iter().map(|v| a.mul_vec(v)).collect();
    let gram = DMatrix::from_fn(m, m, |i, j| 0.5 * (inner(&q[i], &aq[j]) + inner(&q[j], &aq[i])));
    let eig = SymmetricEigen::new(gram);
    let k = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|l, r| l.1.total_cmp(r.1))
        .map(|(k, _)| k)
        .unwrap();
    let c = eig.eigenvectors.column(k);
    let n = q[0].len();
    let mut x = vec![0.0; n];
    let mut p = vec![0.0; n];
    for (idx, qk) in q.iter().enumerate() {
        let ck = c[idx];
        x.iter_mut().zip(qk).for_each(|(xi, qi)| *xi += ck * qi);
        if idx > 0 {
            p.iter_mut().zip(qk).for_each(|(pi, qi)| *pi += ck * qi);
        }
    }
    b_normalize(b, &mut x);
    let dir = (m > 1).then_some(p);
    (x, dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConvexDomain, Point2};
    use crate::plate::{assemble, discretize};

    fn square_ops(side: f64, h: f64) -> DiscreteOperators {
        let d = ConvexDomain::rectangle(side, side, Point2::default(), 2.0).unwrap();
        assemble(discretize(&d, h).unwrap())
    }

    #[test]
    fn eigenvector_quotient_is_mu1() {
        let ops = square_ops(1.0, 1.0 / 16.0);
        let res = buckling_load(&ops).unwrap();
        let q = rayleigh_quotient(&ops, &res.eigenvector).unwrap();
        assert!((q - res.mu1).abs() <= 1e-10 * res.mu1);
        assert!(res.residual <= 1e-8);
        assert!((ops.b().bilinear(&res.eigenvector, &res.eigenvector) - 1.0).abs() < 1e-12);
        let scaled: Vec<f64> = res.eigenvector.iter().map(|v| 7.0 * v).collect();
        let q7 = rayleigh_quotient(&ops, &scaled).unwrap();
        assert!((q7 - q).abs() <= 1e-13 * q);
    }

    #[test]
    fn both_schemes_agree() {
        let ops = square_ops(1.0, 1.0 / 16.0);
        let fast = buckling_load(&ops).unwrap();
        let plain = buckling_load_with(
            &ops,
            &BucklingOptions {
                scheme: IterationScheme::Inverse,
                ..BucklingOptions::default()
            },
        )
        .unwrap();
        assert!((fast.mu1 - plain.mu1).abs() <= 1e-10 * fast.mu1);
        assert!(fast.iterations <= plain.iterations);
    }

    #[test]
    fn zero_field_has_no_quotient() {
        let ops = square_ops(1.0, 0.125);
        let z = vec![0.0; ops.grid().active_count()];
        assert!(matches!(rayleigh_quotient(&ops, &z), Err(Error::ZeroDenominator)));
    }

    #[test]
    fn iteration_cap_reports_no_convergence() {
        let ops = square_ops(1.0, 1.0 / 16.0);
        let r = buckling_load_with(
            &ops,
            &BucklingOptions {
                max_iter: 1,
                scheme: IterationScheme::Inverse,
                ..BucklingOptions::default()
            },
        );
        assert!(matches!(r, Err(Error::NoConvergence { iterations: 1, .. })));
    }
}
