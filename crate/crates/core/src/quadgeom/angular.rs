use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::gauss::gauss_legendre_on;
use crate::error::{Error, Result};

/// Velocity direction in boundary-adapted angles.
///
/// In 3D, `phi` is in [-π/2, π/2] with `-w·n = sin φ` and `psi` in [-π, π].
/// In 2D the circle is parameterized by `phi` in (-π, π] alone and `psi` is
/// `None`; the grazing set is `sin φ = 0` in both cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularPoint {
    pub phi: f64,
    pub psi: Option<f64>,
}

impl AngularPoint {
    pub fn planar(phi: f64) -> Self {
        Self { phi, psi: None }
    }

    pub fn spatial(phi: f64, psi: f64) -> Self {
        Self { phi, psi: Some(psi) }
    }

    /// Signed angle to the tangent plane, in [-π/2, π/2].
    pub fn grazing_angle(&self) -> f64 {
        grazing_angle(self.phi)
    }
}

/// Signed angle between a direction with polar parameter `phi` and the
/// tangent line/plane: `asin(sin φ)` computed without round-trip loss.
pub fn grazing_angle(phi: f64) -> f64 {
    if phi > PI / 2.0 {
        PI - phi
    } else if phi < -PI / 2.0 {
        -PI - phi
    } else {
        phi
    }
}

/// Derivative of [`grazing_angle`] with respect to `phi` (±1).
pub fn grazing_angle_slope(phi: f64) -> f64 {
    if phi.abs() > PI / 2.0 {
        -1.0
    } else {
        1.0
    }
}

/// Quadrature over the velocity circle or sphere.
///
/// Polar nodes use a double Gauss–Legendre layout: one rule per half-range
/// `sin φ > 0` / `sin φ < 0`, so no node ever sits on the grazing set. In 3D
/// the rule is placed in `sin φ` (which absorbs the `cos φ` Jacobian) and the
/// azimuth uses the uniform midpoint rule; weights sum to 4π. In 2D the rule
/// is placed in `φ` directly and weights sum to 2π.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AngularGrid {
    pub dimension: usize,
    pub n_polar: usize,
    pub n_azimuth: usize,
    pub nodes: Vec<AngularPoint>,
    pub weights: Vec<f64>,
}

impl AngularGrid {
    pub fn new(dimension: usize, n_polar: usize, n_azimuth: usize) -> Result<Self> {
        if n_polar < 2 || !n_polar.is_multiple_of(2) {
            return Err(Error::Config(format!("n_polar must be even and >= 2, got {n_polar}")));
        }
        match dimension {
            2 => Ok(Self::planar(n_polar)),
            3 => {
                if n_azimuth < 1 {
                    return Err(Error::Config("n_azimuth must be >= 1".into()));
                }
                Ok(Self::spatial(n_polar, n_azimuth))
            }
            d => Err(Error::Config(format!("dimension must be 2 or 3, got {d}"))),
        }
    }

    fn planar(n_polar: usize) -> Self {
        let half = n_polar / 2;
        let (neg, wn) = gauss_legendre_on(half, -PI, 0.0);
        let (pos, wp) = gauss_legendre_on(half, 0.0, PI);
        let nodes = neg.iter().chain(&pos).map(|&p| AngularPoint::planar(p)).collect();
        let weights = wn.into_iter().chain(wp).collect();
        Self {
            dimension: 2,
            n_polar,
            n_azimuth: 1,
            nodes,
            weights,
        }
    }

    fn spatial(n_polar: usize, n_azimuth: usize) -> Self {
        let (mu, wmu) = Self::polar_rule_3d(n_polar);
        let dpsi = 2.0 * PI / n_azimuth as f64;
        let mut nodes = Vec::with_capacity(n_polar * n_azimuth);
        let mut weights = Vec::with_capacity(n_polar * n_azimuth);
        for (m, w) in mu.iter().zip(&wmu) {
            let phi = m.asin();
            for j in 0..n_azimuth {
                let psi = -PI + (j as f64 + 0.5) * dpsi;
                nodes.push(AngularPoint::spatial(phi, psi));
                weights.push(w * dpsi);
            }
        }
        Self {
            dimension: 3,
            n_polar,
            n_azimuth,
            nodes,
            weights,
        }
    }

    /// Double-Gauss rule in `s = sin φ` on [-1, 1], ascending.
    pub fn polar_rule_3d(n_polar: usize) -> (Vec<f64>, Vec<f64>) {
        let half = n_polar / 2;
        let (neg, wn) = gauss_legendre_on(half, -1.0, 0.0);
        let (pos, wp) = gauss_legendre_on(half, 0.0, 1.0);
        (neg.into_iter().chain(pos).collect(), wn.into_iter().chain(wp).collect())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Normalized angular average of nodal values.
    pub fn average(&self, values: &[f64]) -> f64 {
        let s: f64 = values.iter().zip(&self.weights).map(|(v, w)| v * w).sum();
        s / self.total_measure()
    }

    pub fn integrate<F: Fn(&AngularPoint) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }

    /// Polar nodes (values of `sin φ`) with weights integrated over azimuth.
    ///
    /// For azimuth-independent integrands this collapses the grid to one
    /// dimension; weights still sum to the full measure.
    pub fn polar_collapsed(&self) -> (Vec<f64>, Vec<f64>) {
        if self.dimension == 2 {
            let s = self.nodes.iter().map(|p| p.phi.sin()).collect();
            return (s, self.weights.clone());
        }
        let mut s = Vec::with_capacity(self.n_polar);
        let mut w = Vec::with_capacity(self.n_polar);
        for (chunk, wchunk) in self
            .nodes
            .chunks(self.n_azimuth)
            .zip(self.weights.chunks(self.n_azimuth))
        {
            s.push(chunk[0].phi.sin());
            w.push(wchunk.iter().sum());
        }
        (s, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn total_measure_3d() {
        for (np, na) in [(2, 1), (8, 4), (16, 12), (32, 7)] {
            let g = AngularGrid::new(3, np, na).unwrap();
            assert!((g.total_measure() - 4.0 * PI).abs() < 1e-10);
        }
    }

    #[test]
    fn total_measure_2d() {
        let g = AngularGrid::new(2, 24, 1).unwrap();
        assert!((g.total_measure() - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn odd_moment_vanishes() {
        let g = AngularGrid::new(3, 10, 6).unwrap();
        assert!(g.integrate(|p| p.phi.sin()).abs() < 1e-10);
        let g2 = AngularGrid::new(2, 10, 1).unwrap();
        assert!(g2.integrate(|p| p.phi.sin()).abs() < 1e-10);
    }

    #[test]
    fn hemisphere_flux_is_pi() {
        let g = AngularGrid::new(3, 16, 8).unwrap();
        let half: f64 = g
            .nodes
            .iter()
            .zip(&g.weights)
            .filter(|(p, _)| p.phi.sin() > 0.0)
            .map(|(p, w)| w * p.phi.sin())
            .sum();
        assert!((half - PI).abs() < 1e-8);
        // brute-force midpoint check of the same integral
        let n = 200_000;
        let brute: f64 = (0..n)
            .map(|i| {
                let phi = (i as f64 + 0.5) * (PI / 2.0) / n as f64;
                phi.sin() * phi.cos() * (PI / 2.0) / n as f64
            })
            .sum::<f64>()
            * 2.0
            * PI;
        assert!((brute - PI).abs() < 1e-8);
    }

    #[test]
    fn polynomial_exactness_in_sin_phi() {
        let np = 12;
        let g = AngularGrid::new(3, np, 4).unwrap();
        for deg in 0..np {
            let num = g.integrate(|p| p.phi.sin().powi(deg as i32));
            let exact = if deg % 2 == 1 {
                0.0
            } else {
                4.0 * PI / (deg as f64 + 1.0)
            };
            assert!((num - exact).abs() < 1e-8, "deg {deg}: {num} vs {exact}");
        }
    }

    #[test]
    fn symmetric_and_no_grazing_node() {
        for dim in [2, 3] {
            let g = AngularGrid::new(dim, 14, 3).unwrap();
            for p in &g.nodes {
                assert!(p.phi.sin().abs() > 1e-6);
                let mirrored = g.nodes.iter().any(|q| (q.phi + p.phi).abs() < 1e-13);
                assert!(mirrored, "no mirror for {p:?}");
            }
            assert!(g.weights.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn rejects_odd_counts() {
        assert!(AngularGrid::new(3, 7, 4).is_err());
        assert!(AngularGrid::new(3, 0, 4).is_err());
        assert!(AngularGrid::new(3, 8, 0).is_err());
        assert!(AngularGrid::new(4, 8, 1).is_err());
    }

    #[test]
    fn grazing_angle_maps_circle() {
        assert!((grazing_angle(3.0) - (PI - 3.0)).abs() < 1e-15);
        assert!((grazing_angle(-3.0) - (-PI + 3.0)).abs() < 1e-15);
        for i in 0..100 {
            let phi = -PI + 2.0 * PI * (i as f64 + 0.5) / 100.0;
            assert!((grazing_angle(phi).sin() - phi.sin()).abs() < 1e-14);
        }
    }
}
