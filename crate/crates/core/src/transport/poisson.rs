use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::fourier_coefficients;
use crate::quadgeom::gauss::gauss_legendre_on;
use crate::quadgeom::DomainSpec;

/// Solution of `−Δξ = f`, `ξ = 0` on the boundary, with first and second
/// derivatives in the local polar frame `(e_r, e_θ)` at every `(r_i, θ_l)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoissonSolution {
    pub value: Vec<f64>,
    /// `(∂_r ξ, r⁻¹∂_θ ξ)`
    pub gradient: Vec<[f64; 2]>,
    /// `(H_rr, H_rθ, H_θθ)`
    pub hessian: Vec<[f64; 3]>,
}

impl PoissonSolution {
    /// `(w·∇)ⁿξ` for `n = 0, 1, 2` along a direction at angle `alpha` from `e_r`.
    pub fn directional(&self, node: usize, alpha: f64, order: usize) -> f64 {
        let (s, c) = alpha.sin_cos();
        match order {
            0 => self.value[node],
            1 => c * self.gradient[node][0] + s * self.gradient[node][1],
            2 => {
                let h = self.hessian[node];
                c * c * h[0] + 2.0 * c * s * h[1] + s * s * h[2]
            }
            _ => panic!("directional derivative of order {order} not available"),
        }
    }
}

/// Homogeneous radial solutions vanishing at the left (`y1`) and right (`y2`)
/// ends, with their derivatives.
struct Radial {
    dim: usize,
    k: f64,
    a: f64,
    b: f64,
}

impl Radial {
    fn y1(&self, r: f64) -> (f64, f64) {
        let (a, k) = (self.a, self.k);
        match (self.dim, a > 0.0, k == 0.0) {
            (2, false, true) | (3, false, _) => (1.0, 0.0),
            (2, false, false) => (r.powf(k), k * r.powf(k - 1.0)),
            (2, true, true) => ((r / a).ln(), 1.0 / r),
            (2, true, false) => (
                (r / a).powf(k) - (a / r).powf(k),
                k / r * ((r / a).powf(k) + (a / r).powf(k)),
            ),
            _ => (1.0 / a - 1.0 / r, 1.0 / (r * r)),
        }
    }

    fn y2(&self, r: f64) -> (f64, f64) {
        let (b, k) = (self.b, self.k);
        match (self.dim, k == 0.0) {
            (2, true) => ((b / r).ln(), -1.0 / r),
            (2, false) => (
                (b / r).powf(k) - (r / b).powf(k),
                -k / r * ((b / r).powf(k) + (r / b).powf(k)),
            ),
            _ => (1.0 / r - 1.0 / b, -1.0 / (r * r)),
        }
    }

    fn p(&self, r: f64) -> f64 {
        r.powi(self.dim as i32 - 1)
    }

    /// Solve `−(pξ')' + p k²/r² ξ = p f` on the nodes; returns `(ξ, ξ')` and
    /// the radius each was evaluated at.
    fn solve(&self, radii: &[f64], f: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>, Vec<f64>) {
        let n = radii.len();
        let (y1b, d1b) = self.y1(self.b);
        let (y2b, d2b) = self.y2(self.b);
        let big_a = -self.p(self.b) * (y1b * d2b - d1b * y2b);
        // cell integrals of y·p against the piecewise-linear interpolant of f
        let (gx, gw) = gauss_legendre_on(4, 0.0, 1.0);
        let mut left = vec![Complex64::new(0.0, 0.0); n];
        let mut cells = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n - 1 {
            let (r0, r1) = (radii[i], radii[i + 1]);
            let h = r1 - r0;
            let mut lo = Complex64::new(0.0, 0.0);
            let mut hi = Complex64::new(0.0, 0.0);
            for (t, w) in gx.iter().zip(&gw) {
                let r = r0 + t * h;
                let fv = f[i] * (1.0 - t) + f[i + 1] * t;
                let pw = self.p(r) * w * h;
                lo += self.y1(r).0 * pw * fv;
                hi += self.y2(r).0 * pw * fv;
            }
            left[i + 1] = left[i] + lo;
            cells[i] = hi;
        }
        let mut right = vec![Complex64::new(0.0, 0.0); n];
        for i in (0..n - 1).rev() {
            right[i] = right[i + 1] + cells[i];
        }
        // the centre of a disk or ball is evaluated just off the origin, with
        // the y1 integral taken from the leading behaviour f·r^{k+d}/(k+d)
        let mut xi = vec![Complex64::new(0.0, 0.0); n];
        let mut dxi = vec![Complex64::new(0.0, 0.0); n];
        let mut reff = radii.to_vec();
        for i in 0..n {
            let mut r = radii[i];
            let mut l = left[i];
            if r == 0.0 {
                r = 1e-4 * radii[1];
                let e = self.k + self.dim as f64;
                l = f[i] * r.powf(e) / e;
                reff[i] = r;
            }
            let (y1, d1) = self.y1(r);
            let (y2, d2) = self.y2(r);
            xi[i] = (y2 * l + y1 * right[i]) / big_a;
            dxi[i] = (d2 * l + d1 * right[i]) / big_a;
        }
        (xi, dxi, reff)
    }
}

/// Solve `−Δξ = f` with zero Dirichlet data, `f` sampled on `[r_i][θ_l]`
/// (uniform `θ`; one sample per radius in 3D). Each `θ` mode is integrated
/// against its radial Green's function.
pub fn solve_poisson(domain: &DomainSpec, radii: &[f64], thetas: &[f64], f: &[f64]) -> Result<PoissonSolution> {
    let dim = domain.dimension();
    let nt = thetas.len();
    let nr = radii.len();
    if f.len() != nr * nt || nr < 2 {
        return Err(Error::Config("poisson data does not match the grid".into()));
    }
    if dim == 3 && nt != 1 {
        return Err(Error::Config("3D poisson solves are radial only".into()));
    }
    let (a, b) = (domain.inner_radius(), domain.outer_radius());
    let k_top = nt / 2;
    let coeffs: Vec<Vec<Complex64>> = (0..nr)
        .map(|i| fourier_coefficients(&f[i * nt..(i + 1) * nt], k_top))
        .collect();

    let zero = Complex64::new(0.0, 0.0);
    let mut value = vec![0.0; nr * nt];
    let mut gradient = vec![[0.0; 2]; nr * nt];
    let mut hessian = vec![[0.0; 3]; nr * nt];
    for k in 0..=k_top {
        let fk: Vec<Complex64> = coeffs.iter().map(|c| c[k]).collect();
        if fk.iter().all(|v| *v == zero) {
            continue;
        }
        let rad = Radial { dim, k: k as f64, a, b };
        let (xi, dxi, reff) = rad.solve(radii, &fk);
        let nyquist = nt.is_multiple_of(2) && k == k_top;
        let mult = if k == 0 || nyquist { 1.0 } else { 2.0 };
        let kf = k as f64;
        let d = dim as f64;
        let ik = Complex64::new(0.0, kf);
        for i in 0..nr {
            let r = reff[i];
            let d2 = -(d - 1.0) / r * dxi[i] + kf * kf / (r * r) * xi[i] - fk[i];
            for (l, th) in thetas.iter().enumerate() {
                let e = Complex64::from_polar(mult, kf * th);
                let node = i * nt + l;
                let g_r = (dxi[i] * e).re;
                let g_t = (ik * xi[i] * e).re / r;
                value[node] += (xi[i] * e).re;
                gradient[node][0] += g_r;
                gradient[node][1] += g_t;
                hessian[node][0] += (d2 * e).re;
                hessian[node][1] += (ik * dxi[i] * e).re / r - g_t / r;
                hessian[node][2] += (-kf * kf * xi[i] * e).re / (r * r) + g_r / r;
            }
        }
    }
    Ok(PoissonSolution {
        value,
        gradient,
        hessian,
    })
}
