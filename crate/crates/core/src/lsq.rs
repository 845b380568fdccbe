//! Minimum-norm linear least squares for sparse systems.

use nalgebra::{DMatrix, DVector};

/// Largest unknown count solved densely; bigger systems go through LSQR.
pub const DENSE_LIMIT: usize = 1200;
/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Sparse matrix stored as a list of rows of `(column, value)` entries.
#[derive(Debug, Clone, Default)]
pub struct SparseRows {
    pub cols: usize,
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl SparseRows {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<(usize, f64)>) {
        self.rows.push(row);
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    fn mul(&self, x: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.iter().map(|&(j, a)| a * x[j]).sum();
        }
    }

    fn mul_transpose(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (row, &yi) in self.rows.iter().zip(y) {
            for &(j, a) in row {
                out[j] += a * yi;
            }
        }
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows.len(), self.cols);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, a) in row {
                m[(i, j)] += a;
            }
        }
        m
    }

    pub fn residual_norm(&self, x: &[f64], b: &[f64]) -> f64 {
        let mut r = vec![0.0; self.rows.len()];
        self.mul(x, &mut r);
        r.iter()
            .zip(b)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    DenseSvd,
    Lsqr,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<f64>,
    /// Numerical rank; LSQR assumes full rank.
    pub rank: usize,
    pub condition_number: f64,
    pub residual_norm: f64,
    pub solver: Solver,
}

pub fn solve(a: &SparseRows, b: &[f64]) -> Solution {
    if a.cols <= DENSE_LIMIT {
        solve_dense(a, b)
    } else {
        solve_lsqr(a, b, 1e-14, 4 * a.cols + 100)
    }
}

/// Thin QR, singular values of the triangular factor, then back substitution;
/// a full SVD pseudo-inverse only when the system is rank deficient.
pub fn solve_dense(a: &SparseRows, b: &[f64]) -> Solution {
    let n = a.cols;
    let m = a.n_rows();
    let dense = a.to_dense();
    let mut rhs = DVector::from_column_slice(b);
    let (r, qtb) = if m > n {
        let qr = dense.qr();
        qr.q_tr_mul(&mut rhs);
        (qr.r(), rhs.rows(0, n).into_owned())
    } else {
        (dense, rhs)
    };
    let sv = r.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let cut = smax * RANK_TOLERANCE;
    let rank = sv.iter().filter(|&&s| s > cut).count();
    let smin = if sv.len() < n {
        0.0
    } else {
        sv.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let condition_number = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    let x = if rank == n && r.is_square() {
        r.solve_upper_triangular(&qtb)
            .map(|v| v.iter().copied().collect::<Vec<_>>())
    } else {
        None
    };
    let x = x.unwrap_or_else(|| {
        r.svd(true, true)
            .solve(&qtb, cut.max(f64::MIN_POSITIVE))
            .map(|v| v.iter().copied().collect())
            .unwrap_or_else(|_| vec![0.0; n])
    });
    let residual_norm = a.residual_norm(&x, b);
    Solution {
        x,
        rank,
        condition_number,
        residual_norm,
        solver: Solver::DenseSvd,
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn scale(v: &mut [f64], s: f64) {
    v.iter_mut().for_each(|a| *a *= s);
}

/// LSQR iteration (Paige and Saunders) with a running condition estimate.
pub fn solve_lsqr(a: &SparseRows, b: &[f64], tol: f64, max_iter: usize) -> Solution {
    let n = a.cols;
    let m = a.n_rows();
    let mut x = vec![0.0; n];
    let mut u = b.to_vec();
    let mut beta = norm(&u);
    let mut v = vec![0.0; n];
    let mut alpha = 0.0;
    if beta > 0.0 {
        scale(&mut u, 1.0 / beta);
        a.mul_transpose(&u, &mut v);
        alpha = norm(&v);
    }
    if alpha > 0.0 {
        scale(&mut v, 1.0 / alpha);
    }
    let mut w = v.clone();
    let mut phibar = beta;
    let mut rhobar = alpha;
    let mut anorm2 = 0.0;
    let mut ddnorm = 0.0;
    let bnorm = beta;
    let mut au = vec![0.0; m];
    let mut atu = vec![0.0; n];
    for _ in 0..max_iter {
        if alpha == 0.0 || (beta == 0.0 && phibar == 0.0) {
            break;
        }
        a.mul(&v, &mut au);
        for (ui, &ai) in u.iter_mut().zip(&au) {
            *ui = ai - alpha * *ui;
        }
        beta = norm(&u);
        if beta > 0.0 {
            scale(&mut u, 1.0 / beta);
            a.mul_transpose(&u, &mut atu);
            for (vi, &ai) in v.iter_mut().zip(&atu) {
                *vi = ai - beta * *vi;
            }
            alpha = norm(&v);
            if alpha > 0.0 {
                scale(&mut v, 1.0 / alpha);
            }
        }
        anorm2 += alpha * alpha + beta * beta;
        let rho = rhobar.hypot(beta);
        let c = rhobar / rho;
        let s = beta / rho;
        let theta = s * alpha;
        rhobar = -c * alpha;
        let phi = c * phibar;
        phibar *= s;
        let t1 = phi / rho;
        let t2 = -theta / rho;
        let mut dk2 = 0.0;
        for j in 0..n {
            let wj = w[j];
            x[j] += t1 * wj;
            dk2 += (wj / rho).powi(2);
            w[j] = v[j] + t2 * wj;
        }
        ddnorm += dk2;
        let anorm = anorm2.sqrt();
        let arnorm = phibar * alpha * c.abs();
        if phibar <= tol * bnorm || arnorm <= tol * anorm * phibar.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    let condition_number = anorm2.sqrt() * ddnorm.sqrt();
    let residual_norm = a.residual_norm(&x, b);
    Solution {
        x,
        rank: n,
        condition_number,
        residual_norm,
        solver: Solver::Lsqr,
    }
}
