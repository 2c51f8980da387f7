use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::fourier_coefficients;
use crate::quadgeom::DomainSpec;

/// Maximum Fourier mode kept from sampled boundary data.
pub const MODE_CAP: usize = 32;

/// Dirichlet samples per boundary face, faces ordered as [`DomainSpec::faces`].
///
/// Planar faces carry samples at `θ_l = 2πl/N`; spherical faces carry one value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryValues {
    pub faces: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
enum Repr {
    /// `Re F(z)`, `F = A + B log z + Σ p_k z^k + q_k z^{-k}`.
    Planar {
        a: f64,
        b: f64,
        p: Vec<Complex64>,
        q: Vec<Complex64>,
    },
    /// `A + B/r`.
    Radial { a: f64, b: f64 },
}

/// Harmonic function on one of the analytic domains, stored spectrally.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarmonicFunction {
    pub domain: DomainSpec,
    repr: Repr,
    /// Highest Fourier mode retained.
    pub max_mode: usize,
    /// Whether boundary data had to be truncated at [`MODE_CAP`].
    pub truncated: bool,
}

pub fn solve_dirichlet_laplace(domain: &DomainSpec, data: &BoundaryValues) -> Result<HarmonicFunction> {
    domain.validate()?;
    let faces = domain.faces();
    if data.faces.len() != faces.len() {
        return Err(Error::GridMismatch(format!(
            "expected data on {} faces, got {}",
            faces.len(),
            data.faces.len()
        )));
    }
    if data.faces.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite boundary data".into()));
    }
    if domain.dimension() == 3 {
        let vals: Vec<f64> = data
            .faces
            .iter()
            .map(|f| {
                if f.is_empty() {
                    Err(Error::GridMismatch("empty face data".into()))
                } else {
                    Ok(f.iter().sum::<f64>() / f.len() as f64)
                }
            })
            .collect::<Result<_>>()?;
        let (a, b) = if vals.len() == 1 {
            (vals[0], 0.0)
        } else {
            let (ro, ri) = (faces[0].radius, faces[1].radius);
            // A + B/ro = out, A + B/ri = in
            let b = (vals[1] - vals[0]) / (1.0 / ri - 1.0 / ro);
            (vals[0] - b / ro, b)
        };
        return Ok(HarmonicFunction {
            domain: *domain,
            repr: Repr::Radial { a, b },
            max_mode: 0,
            truncated: false,
        });
    }

    let n_min = data.faces.iter().map(|f| f.len()).min().unwrap_or(0);
    if n_min == 0 {
        return Err(Error::GridMismatch("empty face data".into()));
    }
    let nyquist = (n_min - 1) / 2;
    let kmax = nyquist.min(MODE_CAP);
    let coeffs: Vec<Vec<Complex64>> = data.faces.iter().map(|f| fourier_coefficients(f, kmax)).collect();
    let truncated = nyquist > MODE_CAP
        && data
            .faces
            .iter()
            .map(|f| fourier_coefficients(f, (f.len() - 1) / 2))
            .any(|c| c[MODE_CAP + 1..].iter().any(|v| v.norm() > 1e-14));

    let mut p = vec![Complex64::new(0.0, 0.0); kmax + 1];
    let mut q = vec![Complex64::new(0.0, 0.0); kmax + 1];
    let (a, b);
    let ro = faces[0].radius;
    if faces.len() == 1 {
        a = coeffs[0][0].re;
        b = 0.0;
        for k in 1..=kmax {
            p[k] = 2.0 * coeffs[0][k] / ro.powi(k as i32);
        }
    } else {
        let ri = faces[1].radius;
        let (co, ci) = (coeffs[0][0].re, coeffs[1][0].re);
        b = (co - ci) / (ro / ri).ln();
        a = co - b * ro.ln();
        for k in 1..=kmax {
            // p r^k + conj(q) r^{-k} = 2 c_k at r = ro and r = ri
            let ki = k as i32;
            let (m11, m12, m21, m22) = (ro.powi(ki), ro.powi(-ki), ri.powi(ki), ri.powi(-ki));
            let det = m11 * m22 - m12 * m21;
            let (r1, r2) = (2.0 * coeffs[0][k], 2.0 * coeffs[1][k]);
            p[k] = (r1 * m22 - r2 * m12) / det;
            q[k] = ((r2 * m11 - r1 * m21) / det).conj();
        }
    }
    Ok(HarmonicFunction {
        domain: *domain,
        repr: Repr::Planar { a, b, p, q },
        max_mode: kmax,
        truncated,
    })
}

fn falling(m: i64, n: usize) -> f64 {
    (0..n as i64).map(|j| (m - j) as f64).product()
}

impl HarmonicFunction {
    pub fn constant(domain: &DomainSpec, value: f64) -> Self {
        let repr = if domain.dimension() == 3 {
            Repr::Radial { a: value, b: 0.0 }
        } else {
            Repr::Planar {
                a: value,
                b: 0.0,
                p: vec![Complex64::new(0.0, 0.0)],
                q: vec![Complex64::new(0.0, 0.0)],
            }
        };
        Self {
            domain: *domain,
            repr,
            max_mode: 0,
            truncated: false,
        }
    }

    pub fn is_constant(&self) -> bool {
        match &self.repr {
            Repr::Radial { b, .. } => *b == 0.0,
            Repr::Planar { b, p, q, .. } => *b == 0.0 && p.iter().chain(q).all(|c| c.norm() == 0.0),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.directional(x, x, 0)
    }

    /// `(w·∇)^n U` at `x`. Orders up to 3 are supported in 3D; any order in 2D.
    pub fn directional(&self, x: &[f64], w: &[f64], order: usize) -> f64 {
        match &self.repr {
            Repr::Planar { a, b, p, q } => {
                let z = Complex64::new(x[0], x[1]);
                let wc = Complex64::new(w[0], w[1]);
                let mut f = Complex64::new(0.0, 0.0);
                if order == 0 {
                    f += *a;
                    if *b != 0.0 {
                        f += *b * z.norm().ln();
                    }
                } else if *b != 0.0 {
                    let sign = if order % 2 == 1 { 1.0 } else { -1.0 };
                    let fact: f64 = (1..order).map(|j| j as f64).product();
                    f += *b * sign * fact * z.powi(-(order as i32));
                }
                for k in 1..p.len() {
                    let ki = k as i64;
                    if k >= order {
                        f += p[k] * falling(ki, order) * z.powi(ki as i32 - order as i32);
                    }
                    if q[k].norm() != 0.0 {
                        f += q[k] * falling(-ki, order) * z.powi(-(ki as i32) - order as i32);
                    }
                }
                (wc.powi(order as i32) * f).re
            }
            Repr::Radial { a, b } => {
                let base = if order == 0 { *a } else { 0.0 };
                if *b == 0.0 {
                    return base;
                }
                let r2: f64 = x.iter().map(|v| v * v).sum();
                let r = r2.sqrt();
                let wx: f64 = x.iter().zip(w).map(|(p, q)| p * q).sum();
                let inv = match order {
                    0 => 1.0 / r,
                    1 => -wx / r.powi(3),
                    2 => -1.0 / r.powi(3) + 3.0 * wx * wx / r.powi(5),
                    3 => 9.0 * wx / r.powi(5) - 15.0 * wx.powi(3) / r.powi(7),
                    _ => panic!("radial harmonic derivatives beyond third order are not needed"),
                };
                base + b * inv
            }
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let d = x.len();
        (0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                self.directional(x, &e, 1)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn samples(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..n).map(|l| f(2.0 * PI * l as f64 / n as f64)).collect()
    }

    #[test]
    fn constant_data_gives_constant() {
        for d in [
            DomainSpec::Disk { radius: 1.0 },
            DomainSpec::Annulus { inner: 1.0, outer: 2.0 },
        ] {
            let data = BoundaryValues {
                faces: d.faces().iter().map(|_| vec![3.0; 16]).collect(),
            };
            let u = solve_dirichlet_laplace(&d, &data).unwrap();
            let x = [0.0, 1.5];
            assert!((u.value(&x) - 3.0).abs() < 1e-13);
            assert!(u.gradient(&x).iter().all(|g| g.abs() < 1e-12));
        }
    }

    #[test]
    fn disk_cosine_is_linear() {
        let d = DomainSpec::Disk { radius: 1.0 };
        let u = solve_dirichlet_laplace(
            &d,
            &BoundaryValues {
                faces: vec![samples(16, f64::cos)],
            },
        )
        .unwrap();
        for (r, t) in [(0.3, 0.4), (0.9, 2.0), (0.0, 0.0)] {
            let x = [r * f64::cos(t), r * f64::sin(t)];
            assert!((u.value(&x) - x[0]).abs() < 1e-13);
            let g = u.gradient(&x);
            assert!((g[0] - 1.0).abs() < 1e-13 && g[1].abs() < 1e-13);
        }
    }

    #[test]
    fn annulus_log_profile() {
        let d = DomainSpec::Annulus { inner: 1.0, outer: 2.0 };
        let u = solve_dirichlet_laplace(
            &d,
            &BoundaryValues {
                faces: vec![vec![1.0; 8], vec![0.0; 8]],
            },
        )
        .unwrap();
        for r in [1.0, 1.3, 2.0] {
            assert!((u.value(&[0.0, r]) - r.ln() / 2f64.ln()).abs() < 1e-13);
        }
    }

    #[test]
    fn annulus_matches_both_traces() {
        let d = DomainSpec::Annulus { inner: 0.5, outer: 1.5 };
        let outer = samples(24, |t| 1.0 + 0.3 * (2.0 * t).cos() - 0.2 * t.sin());
        let inner = samples(24, |t| -0.5 + 0.4 * (3.0 * t).sin());
        let u = solve_dirichlet_laplace(
            &d,
            &BoundaryValues {
                faces: vec![outer.clone(), inner.clone()],
            },
        )
        .unwrap();
        for l in 0..24 {
            let t = 2.0 * PI * l as f64 / 24.0;
            assert!((u.value(&[1.5 * t.cos(), 1.5 * t.sin()]) - outer[l]).abs() < 1e-12);
            assert!((u.value(&[0.5 * t.cos(), 0.5 * t.sin()]) - inner[l]).abs() < 1e-12);
        }
    }

    #[test]
    fn shell_radial_profile() {
        let d = DomainSpec::Shell { inner: 1.0, outer: 2.0 };
        let u = solve_dirichlet_laplace(
            &d,
            &BoundaryValues {
                faces: vec![vec![1.0], vec![0.0]],
            },
        )
        .unwrap();
        // 2 - 2/r vanishes at r=1 and is 1 at r=2
        for r in [1.0, 1.5, 2.0] {
            assert!((u.value(&[0.0, 0.0, r]) - (2.0 - 2.0 / r)).abs() < 1e-13);
        }
    }

    #[test]
    fn radial_derivatives_match_differences() {
        let d = DomainSpec::Shell { inner: 1.0, outer: 2.0 };
        let u = solve_dirichlet_laplace(
            &d,
            &BoundaryValues {
                faces: vec![vec![1.0], vec![0.0]],
            },
        )
        .unwrap();
        let x = [0.4, 1.1, -0.6];
        let w = [0.48, 0.6, 0.64];
        let f = |t: f64| u.value(&[x[0] + t * w[0], x[1] + t * w[1], x[2] + t * w[2]]);
        let h = 1e-3;
        let d1 = (f(h) - f(-h)) / (2.0 * h);
        let d2 = (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
        let d3 = (f(2.0 * h) - 2.0 * f(h) + 2.0 * f(-h) - f(-2.0 * h)) / (2.0 * h.powi(3));
        assert!((u.directional(&x, &w, 1) - d1).abs() < 1e-6);
        assert!((u.directional(&x, &w, 2) - d2).abs() < 1e-5);
        assert!((u.directional(&x, &w, 3) - d3).abs() < 1e-4);
    }

    #[test]
    fn mode_cap_reported() {
        let d = DomainSpec::Disk { radius: 1.0 };
        let data = samples(128, |t| (40.0 * t).cos());
        let u = solve_dirichlet_laplace(&d, &BoundaryValues { faces: vec![data] }).unwrap();
        assert!(u.truncated);
        assert_eq!(u.max_mode, MODE_CAP);
    }
}
