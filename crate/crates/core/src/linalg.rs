//! Sparse symmetric storage and the positive-definite solvers used by the
//! plate and buckling computations.

/// Compressed sparse row matrix with sorted column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a square matrix from per-row `(column, value)` lists. Duplicate
    /// columns within a row are summed.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(c, _)| c);
            let start = cols.len();
            for (c, v) in row {
                assert!(c < n, "column {c} out of range for order {n}");
                if cols.len() > start && *cols.last().unwrap() == c {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    /// `xᵀ M y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.n)
            .map(|i| x[i] * self.row(i).map(|(j, v)| v * y[j]).sum::<f64>())
            .sum()
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest `|M_ij − M_ji|` over stored entries.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// `alpha·self + beta·other` for matrices of equal order.
    pub fn linear_combination(&self, alpha: f64, other: &CsrMatrix, beta: f64) -> CsrMatrix {
        assert_eq!(self.n, other.n);
        let rows = (0..self.n)
            .map(|i| {
                self.row(i)
                    .map(|(j, v)| (j, alpha * v))
                    .chain(other.row(i).map(|(j, v)| (j, beta * v)))
                    .collect()
            })
            .collect();
        CsrMatrix::from_rows(rows)
    }

    /// Number of stored lower-envelope entries a skyline factor would need.
    pub fn envelope_size(&self) -> usize {
        (0..self.n)
            .map(|i| {
                let first = self.row(i).map(|(j, _)| j).next().unwrap_or(i).min(i);
                i - first + 1
            })
            .sum()
    }
}

/// The factorization hit a non-positive pivot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotPositiveDefinite {
    pub row: usize,
    pub pivot: f64,
}

/// Envelope (skyline) Cholesky factor `M = L Lᵀ`.
///
/// Row `i` of `L` is stored densely from its first structural nonzero
/// column up to the diagonal; fill stays inside that profile.
#[derive(Debug, Clone)]
pub struct EnvelopeCholesky {
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl EnvelopeCholesky {
    pub fn factor(m: &CsrMatrix) -> Result<Self, NotPositiveDefinite> {
        let n = m.order();
        let mut first = Vec::with_capacity(n);
        let mut start = Vec::with_capacity(n + 1);
        let mut len = 0;
        for i in 0..n {
            let f = m.row(i).map(|(j, _)| j).next().unwrap_or(i).min(i);
            first.push(f);
            start.push(len);
            len += i - f + 1;
        }
        start.push(len);
        let mut data = vec![0.0; len];
        for i in 0..n {
            let base = start[i] - first[i];
            for (j, v) in m.row(i) {
                if j <= i {
                    data[base + j] = v;
                }
            }
        }

        for i in 0..n {
            let fi = first[i];
            let (done, rest) = data.split_at_mut(start[i]);
            let row_i = &mut rest[..i - fi + 1];
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let row_j = &done[start[j]..start[j + 1]];
                let dot = dot(&row_i[k0 - fi..j - fi], &row_j[k0 - fj..j - fj]);
                let djj = row_j[j - fj];
                row_i[j - fi] = (row_i[j - fi] - dot) / djj;
            }
            let off = &row_i[..i - fi];
            let d = row_i[i - fi] - dot(off, off);
            if !(d > 0.0) || !d.is_finite() {
                return Err(NotPositiveDefinite { row: i, pivot: d });
            }
            row_i[i - fi] = d.sqrt();
        }
        Ok(EnvelopeCholesky { first, start, data })
    }

    pub fn order(&self) -> usize {
        self.first.len()
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[self.start[i]..self.start[i + 1]]
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.order();
        assert_eq!(x.len(), n);
        for i in 0..n {
            let fi = self.first[i];
            let row = self.row(i);
            let s = dot(&row[..i - fi], &x[fi..i]);
            x[i] = (x[i] - s) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = self.row(i);
            x[i] /= row[i - fi];
            let xi = x[i];
            for (xk, lk) in x[fi..i].iter_mut().zip(&row[..i - fi]) {
                *xk -= lk * xi;
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four independent accumulators let the compiler vectorize.
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for k in 0..chunks {
        for l in 0..4 {
            acc[l] += a[4 * k + l] * b[4 * k + l];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..a.len() {
        s += a[k] * b[k];
    }
    s
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn inner(x: &[f64], y: &[f64]) -> f64 {
    dot(x, y)
}

/// Outcome of the Jacobi-preconditioned conjugate gradient iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum CgOutcome {
    Converged { x: Vec<f64>, iterations: usize },
    /// A search direction with `pᵀ M p ≤ 0` was met.
    Indefinite { iterations: usize, curvature: f64 },
    Stalled { x: Vec<f64>, iterations: usize, residual: f64 },
}

/// Preconditioned CG for `M x = b` stopping at `‖b − Mx‖₂ ≤ rel_tol ‖b‖₂`.
pub fn conjugate_gradient(m: &CsrMatrix, b: &[f64], rel_tol: f64, max_iter: usize) -> CgOutcome {
    let n = m.order();
    let bnorm = norm2(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return CgOutcome::Converged { x, iterations: 0 };
    }
    let inv_diag: Vec<f64> = m
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut mp = vec![0.0; n];
    for it in 1..=max_iter {
        m.mul_vec_into(&p, &mut mp);
        let curvature = dot(&p, &mp);
        if !(curvature > 0.0) {
            return CgOutcome::Indefinite {
                iterations: it,
                curvature,
            };
        }
        let alpha = rz / curvature;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * mp[k];
        }
        if it % 50 == 0 {
            // guard against drift of the recursive residual
            let mx = m.mul_vec(&x);
            for k in 0..n {
                r[k] = b[k] - mx[k];
            }
        }
        if norm2(&r) <= rel_tol * bnorm {
            return CgOutcome::Converged { x, iterations: it };
        }
        for k in 0..n {
            z[k] = r[k] * inv_diag[k];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    let residual = norm2(&r) / bnorm;
    CgOutcome::Stalled {
        x,
        iterations: max_iter,
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize, diag: f64) -> CsrMatrix {
        CsrMatrix::from_rows(
            (0..n)
                .map(|i| {
                    let mut r = vec![(i, diag)];
                    if i > 0 {
                        r.push((i - 1, -1.0));
                    }
                    if i + 1 < n {
                        r.push((i + 1, -1.0));
                    }
                    r
                })
                .collect(),
        )
    }

    #[test]
    fn cholesky_solves_tridiagonal() {
        let m = tridiag(50, 2.0);
        let x_true: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = m.mul_vec(&x_true);
        let x = EnvelopeCholesky::factor(&m).unwrap().solve(&b);
        for (a, e) in x.iter().zip(&x_true) {
            assert!((a - e).abs() < 1e-10);
        }
    }

    #[test]
    fn cholesky_detects_indefinite() {
        let m = tridiag(20, 1.5);
        // smallest eigenvalue of tridiag(-1, d, -1) is d - 2cos(π/(n+1)) < 0
        assert!(EnvelopeCholesky::factor(&m).is_err());
    }

    #[test]
    fn cg_matches_cholesky() {
        let m = tridiag(80, 2.1);
        let b: Vec<f64> = (0..80).map(|i| 1.0 + (i % 3) as f64).collect();
        let direct = EnvelopeCholesky::factor(&m).unwrap().solve(&b);
        match conjugate_gradient(&m, &b, 1e-12, 1000) {
            CgOutcome::Converged { x, .. } => {
                for (a, e) in x.iter().zip(&direct) {
                    assert!((a - e).abs() < 1e-9);
                }
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            conjugate_gradient(&tridiag(20, -0.5), &b[..20], 1e-12, 100),
            CgOutcome::Indefinite { .. }
        ));
    }

    #[test]
    fn linear_combination_merges_patterns() {
        let a = tridiag(4, 2.0);
        let d = CsrMatrix::from_rows((0..4).map(|i| vec![(i, 1.0)]).collect());
        let c = a.linear_combination(1.0, &d, 3.0);
        assert_eq!(c.get(2, 2), 5.0);
        assert_eq!(c.get(2, 1), -1.0);
        assert_eq!(c.nnz(), a.nnz());
        assert_eq!(c.asymmetry(), 0.0);
    }
}
