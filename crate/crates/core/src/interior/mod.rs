//! Interior expansion `U₀ + εU₁ + ε²U₂` built from harmonic extensions.

mod harmonic;

pub use harmonic::{solve_dirichlet_laplace, BoundaryValues, HarmonicFunction, MODE_CAP};

use crate::error::{Error, Result};
use crate::milne::MilneFamily;
use crate::quadgeom::DomainSpec;

/// `U₀` harmonic with trace `Φ_∞`, `U₁ = −w·∇U₀`, `U₂ = (w·∇)²U₀`.
#[derive(Debug, Clone)]
pub struct InteriorSolution {
    pub u0: HarmonicFunction,
    pub eps: f64,
}

impl InteriorSolution {
    pub fn new(u0: HarmonicFunction, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::Config(format!("eps must be positive, got {eps}")));
        }
        Ok(Self { u0, eps })
    }

    pub fn u0(&self, x: &[f64]) -> f64 {
        self.u0.value(x)
    }

    pub fn u1(&self, x: &[f64], w: &[f64]) -> f64 {
        -self.u0.directional(x, w, 1)
    }

    pub fn u2(&self, x: &[f64], w: &[f64]) -> f64 {
        self.u0.directional(x, w, 2)
    }

    /// `U₀ + εU₁ + ε²U₂`.
    pub fn composite(&self, x: &[f64], w: &[f64]) -> f64 {
        let e = self.eps;
        self.u0(x) + e * self.u1(x, w) + e * e * self.u2(x, w)
    }

    /// `w·∇U₀`, `w·∇U₁` and `w·∇U₂` at once.
    pub fn transported(&self, x: &[f64], w: &[f64]) -> [f64; 3] {
        [
            self.u0.directional(x, w, 1),
            -self.u0.directional(x, w, 2),
            self.u0.directional(x, w, 3),
        ]
    }
}

/// Harmonic extension of the far-field limits of a Milne family.
pub fn build_expansion(domain: &DomainSpec, family: &MilneFamily, eps: f64) -> Result<InteriorSolution> {
    let faces = domain.faces().iter().map(|f| family.face(f.side).phi_inf()).collect();
    let u0 = solve_dirichlet_laplace(domain, &BoundaryValues { faces })?;
    InteriorSolution::new(u0, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadgeom::{AngularGrid, AngularPoint};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn dir(dim: usize, p: &AngularPoint) -> Vec<f64> {
        let (s, c) = p.phi.sin_cos();
        match p.psi {
            Some(psi) if dim == 3 => vec![c * psi.cos(), c * psi.sin(), s],
            _ => vec![c, s],
        }
    }

    fn random_disk(seed: u64) -> HarmonicFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c: Vec<(f64, f64)> = (0..=5)
            .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let n = 32;
        let data: Vec<f64> = (0..n)
            .map(|l| {
                let t = 2.0 * PI * l as f64 / n as f64;
                c.iter()
                    .enumerate()
                    .map(|(k, (a, b))| a * (k as f64 * t).cos() + b * (k as f64 * t).sin())
                    .sum()
            })
            .collect();
        solve_dirichlet_laplace(&DomainSpec::Disk { radius: 1.0 }, &BoundaryValues { faces: vec![data] }).unwrap()
    }

    fn worst_laplacian(u: &HarmonicFunction, n: usize) -> f64 {
        let h = 1.4 / n as f64;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = [-0.7 + (i as f64 + 0.5) * h, -0.7 + (j as f64 + 0.5) * h];
                if x[0].hypot(x[1]) > 0.7 {
                    continue;
                }
                let lap = (u.value(&[x[0] + h, x[1]])
                    + u.value(&[x[0] - h, x[1]])
                    + u.value(&[x[0], x[1] + h])
                    + u.value(&[x[0], x[1] - h])
                    - 4.0 * u.value(&x))
                    / (h * h);
                worst = worst.max(lap.abs());
            }
        }
        worst
    }

    #[test]
    fn discrete_laplacian_vanishes_at_second_order() {
        let u = random_disk(3);
        let (a, b) = (worst_laplacian(&u, 64), worst_laplacian(&u, 128));
        assert!(a < 2e-2, "{a}");
        assert!(b < a / 3.5, "{a} -> {b}");
    }

    #[test]
    fn analytic_gradient_matches_differences() {
        let u = random_disk(3);
        let n = 64;
        let h = 1.4 / n as f64;
        let w = [0.6, -0.8];
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = [-0.7 + (i as f64 + 0.5) * h, -0.7 + (j as f64 + 0.5) * h];
                if x[0].hypot(x[1]) > 0.7 {
                    continue;
                }
                let d = 1e-4;
                let fd = (u.value(&[x[0] + d * w[0], x[1] + d * w[1]]) - u.value(&[x[0] - d * w[0], x[1] - d * w[1]]))
                    / (2.0 * d);
                worst = worst.max((fd - u.directional(&x, &w, 1)).abs());
                let f1 = |t: f64| u.directional(&[x[0] + t * w[0], x[1] + t * w[1]], &w, 1);
                let fd2 = (f1(d) - f1(-d)) / (2.0 * d);
                worst = worst.max((fd2 - u.directional(&x, &w, 2)).abs());
            }
        }
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn mean_value_property() {
        let u = random_disk(11);
        let c = [0.2, -0.1];
        let rho = 0.3;
        let m = 64;
        let avg: f64 = (0..m)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / m as f64;
                u.value(&[c[0] + rho * t.cos(), c[1] + rho * t.sin()])
            })
            .sum::<f64>()
            / m as f64;
        assert!((avg - u.value(&c)).abs() < 1e-12);
    }

    #[test]
    fn correctors_are_average_free() {
        let u = random_disk(5);
        let sol = InteriorSolution::new(u, 0.1).unwrap();
        let g = AngularGrid::new(2, 32, 1).unwrap();
        for x in [[0.1, 0.2], [-0.5, 0.3], [0.0, -0.8]] {
            let i1 = g.integrate(|p| sol.u1(&x, &dir(2, p)));
            assert!(i1.abs() < 1e-12);
        }
        let shell = DomainSpec::Shell { inner: 1.0, outer: 2.0 };
        let v = solve_dirichlet_laplace(
            &shell,
            &BoundaryValues {
                faces: vec![vec![1.0], vec![0.0]],
            },
        )
        .unwrap();
        let sol3 = InteriorSolution::new(v, 0.1).unwrap();
        let g3 = AngularGrid::new(3, 16, 16).unwrap();
        let x = [0.3, 1.2, 0.4];
        let i1 = g3.integrate(|p| sol3.u1(&x, &dir(3, p)));
        assert!(i1.abs() < 1e-12);
        // (w·∇)²U₀ averages to ΔU₀/d = 0 up to quadrature exactness
        let i2 = g3.integrate(|p| sol3.u2(&x, &dir(3, p)));
        assert!(i2.abs() < 1e-10, "{i2}");
    }

    #[test]
    fn disk_cosine_correctors() {
        let d = DomainSpec::Disk { radius: 1.0 };
        let data: Vec<f64> = (0..16).map(|l| (2.0 * PI * l as f64 / 16.0).cos()).collect();
        let u = solve_dirichlet_laplace(&d, &BoundaryValues { faces: vec![data] }).unwrap();
        let sol = InteriorSolution::new(u, 0.2).unwrap();
        let w = [0.6, 0.8];
        assert!((sol.u1(&[0.3, 0.1], &w) + 0.6).abs() < 1e-13);
        assert!(sol.u2(&[0.3, 0.1], &w).abs() < 1e-13);
    }
}
