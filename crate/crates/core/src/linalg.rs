//! Small dense helpers shared by the solvers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Solve `A x = b` with partial-pivoting LU.
pub fn lu_solve(a: DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>> {
    let rhs = DVector::from_column_slice(b);
    a.lu()
        .solve(&rhs)
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| Error::Domain("singular linear system".into()))
}

pub fn lu_solve_complex(a: DMatrix<Complex64>, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let rhs = DVector::from_column_slice(b);
    a.lu()
        .solve(&rhs)
        .map(|x| x.iter().copied().collect())
        .ok_or_else(|| Error::Domain("singular linear system".into()))
}

/// Thomas algorithm for a tridiagonal system with complex right-hand side.
/// `lower[0]` and `upper[n-1]` are ignored.
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[Complex64]) -> Vec<Complex64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / m } else { 0.0 };
        d[i] = (rhs[i] - d[i - 1] * lower[i]) / m;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= next * c[i];
    }
    x
}

/// Ordinary least-squares line `y = slope·x + intercept`; returns
/// `(slope, intercept, rms residual)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Anderson mixing for fixed-point problems `x = G(x)`.
pub struct Anderson {
    depth: usize,
    xs: Vec<Vec<f64>>,
    fs: Vec<Vec<f64>>,
}

impl Anderson {
    pub fn new(depth: usize) -> Self {
        Self {
            depth,
            xs: Vec::new(),
            fs: Vec::new(),
        }
    }

    /// Given the current iterate `x` and `g = G(x)`, return the next iterate.
    pub fn step(&mut self, x: &[f64], g: &[f64]) -> Vec<f64> {
        let f: Vec<f64> = g.iter().zip(x).map(|(a, b)| a - b).collect();
        self.xs.push(g.to_vec());
        self.fs.push(f.clone());
        if self.xs.len() > self.depth + 1 {
            self.xs.remove(0);
            self.fs.remove(0);
        }
        let m = self.fs.len() - 1;
        if m == 0 {
            return g.to_vec();
        }
        let n = f.len();
        // minimize |f_m - Σ γ_j (f_{j+1} - f_j)|
        let df = DMatrix::from_fn(n, m, |i, j| self.fs[j + 1][i] - self.fs[j][i]);
        let rhs = DVector::from_column_slice(&self.fs[m]);
        let gamma = match df.clone().svd(true, true).solve(&rhs, 1e-12) {
            Ok(g) => g,
            Err(_) => return g.to_vec(),
        };
        let mut next = self.xs[m].clone();
        for j in 0..m {
            for (i, v) in next.iter_mut().enumerate() {
                *v -= gamma[j] * (self.xs[j + 1][i] - self.xs[j][i]);
            }
        }
        next
    }
}

/// Real-data discrete Fourier coefficients `c_k = (1/N) Σ f_l e^{-ikθ_l}` on
/// the uniform grid `θ_l = 2πl/N`, for `k = 0..=k_max`.
pub fn fourier_coefficients(samples: &[f64], k_max: usize) -> Vec<Complex64> {
    let n = samples.len();
    (0..=k_max)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (l, v) in samples.iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * (k * l) as f64 / n as f64;
                acc += Complex64::from_polar(*v, ang);
            }
            acc / n as f64
        })
        .collect()
}

/// Weights of the trigonometric interpolant through `n` uniform samples
/// `θ_l = 2πl/n`, and of its derivative, at `theta`.
///
/// For even `n` the Nyquist mode is split evenly, so the interpolant is real
/// and its derivative at a node matches [`periodic_derivative_matrix`].
pub fn trig_interp_weights(n: usize, theta: f64) -> (Vec<f64>, Vec<f64>) {
    let mut w = vec![0.0; n];
    let mut dw = vec![0.0; n];
    let top = if n.is_multiple_of(2) { n / 2 - 1 } else { (n - 1) / 2 };
    for l in 0..n {
        let x = theta - 2.0 * std::f64::consts::PI * l as f64 / n as f64;
        let (mut v, mut d) = (1.0, 0.0);
        for k in 1..=top {
            let (s, c) = (k as f64 * x).sin_cos();
            v += 2.0 * c;
            d -= 2.0 * k as f64 * s;
        }
        if n.is_multiple_of(2) {
            let h = (n / 2) as f64;
            v += (h * x).cos();
            d -= h * (h * x).sin();
        }
        w[l] = v / n as f64;
        dw[l] = d / n as f64;
    }
    (w, dw)
}

/// Spectral derivative matrix on a uniform periodic grid of `n` points.
pub fn periodic_derivative_matrix(n: usize) -> Vec<Vec<f64>> {
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let mut d = vec![vec![0.0; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            if i == j {
                continue;
            }
            let x = (i as f64 - j as f64) * h / 2.0;
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            *v = if n.is_multiple_of(2) {
                0.5 * sign / x.tan()
            } else {
                0.5 * sign / x.sin()
            };
        }
    }
    d
}
