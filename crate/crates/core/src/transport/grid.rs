use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadgeom::{AngularGrid, DomainSpec, Side};

/// Resolution parameters of the phase-space grid.
///
/// Radial spacing follows `h(r) = min(max_cell, finest·ε + (grading − 1)·d(r))`
/// with `d` the distance to the nearest face, so cells grow geometrically away
/// from every boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    /// Ordinates on the velocity circle (2D) or polar nodes (3D); even.
    pub n_polar: usize,
    /// Boundary-angle nodes for disk/annulus; 0 picks `max(8, 4k+4)` from the data.
    pub n_theta: usize,
    /// Finest radial cell as a fraction of `ε`.
    pub finest: f64,
    pub grading: f64,
    pub max_cell: f64,
    /// Rays are truncated after this many mean free paths.
    pub ray_cutoff: f64,
    /// Longest quadrature piece along a ray, in mean free paths.
    pub max_piece: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_polar: 64,
            n_theta: 0,
            finest: 0.125,
            grading: 1.15,
            max_cell: 0.02,
            ray_cutoff: 36.0,
            max_piece: 0.5,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_polar < 2 || !self.n_polar.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "n_polar must be even and >= 2, got {}",
                self.n_polar
            )));
        }
        if !(self.finest > 0.0 && self.grading > 1.0 && self.max_cell > 0.0) {
            return Err(Error::Config("need finest > 0, grading > 1 and max_cell > 0".into()));
        }
        if !(self.ray_cutoff > 0.0 && self.max_piece > 0.0) {
            return Err(Error::Config("ray cutoff and piece length must be positive".into()));
        }
        Ok(())
    }

    /// Twice the resolution in every direction.
    pub fn refined(&self) -> Self {
        Self {
            n_polar: 2 * self.n_polar,
            n_theta: 2 * self.n_theta,
            finest: 0.5 * self.finest,
            grading: self.grading.sqrt(),
            max_cell: 0.5 * self.max_cell,
            ..*self
        }
    }
}

/// Radial nodes on `[inner, outer]` graded toward each face.
pub fn radial_mesh(domain: &DomainSpec, eps: f64, spec: &GridSpec) -> Vec<f64> {
    let (a, b) = (domain.inner_radius(), domain.outer_radius());
    let inner_face = domain.has_inner_boundary();
    let h = |r: f64| {
        let d = if inner_face { (r - a).min(b - r) } else { b - r };
        (spec.finest * eps + (spec.grading - 1.0) * d.max(0.0)).min(spec.max_cell)
    };
    // cumulative cell count F(r) = ∫ dr/h on a fine grid, then invert at integers
    let n_fine = 20_000;
    let dx = (b - a) / n_fine as f64;
    let mut cum = vec![0.0; n_fine + 1];
    for i in 0..n_fine {
        let r = a + (i as f64 + 0.5) * dx;
        cum[i + 1] = cum[i] + dx / h(r);
    }
    let total = cum[n_fine];
    let n = total.ceil().max(2.0) as usize;
    let mut nodes = Vec::with_capacity(n + 1);
    nodes.push(a);
    let mut j = 0;
    for k in 1..n {
        let target = total * k as f64 / n as f64;
        while cum[j + 1] < target {
            j += 1;
        }
        let t = (target - cum[j]) / (cum[j + 1] - cum[j]);
        nodes.push(a + (j as f64 + t) * dx);
    }
    nodes.push(b);
    nodes
}

/// Phase-space grid `(r_i, θ_l, α_j)`; `α` is the velocity angle from `e_r`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransportGrid {
    pub domain: DomainSpec,
    pub eps: f64,
    pub radii: Vec<f64>,
    pub thetas: Vec<f64>,
    pub alphas: Vec<f64>,
    /// Ordinate weights normalized to sum to one.
    pub weights: Vec<f64>,
    pub spec: GridSpec,
}

impl TransportGrid {
    pub fn new(domain: &DomainSpec, eps: f64, spec: &GridSpec, n_theta: usize) -> Result<Self> {
        domain.validate()?;
        spec.validate()?;
        if !(eps > 0.0) {
            return Err(Error::Config(format!("eps must be positive, got {eps}")));
        }
        let dim = domain.dimension();
        let n_theta = if dim == 3 { 1 } else { n_theta.max(1) };
        let ang = AngularGrid::new(dim, spec.n_polar, 1)?;
        let (alphas, weights) = if dim == 2 {
            let a = ang.nodes.iter().map(|p| wrap(p.phi + PI / 2.0)).collect();
            let w = ang.weights.iter().map(|w| w / (2.0 * PI)).collect();
            (a, w)
        } else {
            let (s, w) = ang.polar_collapsed();
            (
                s.iter().map(|s| (-s).acos()).collect(),
                w.iter().map(|w| w / (4.0 * PI)).collect(),
            )
        };
        Ok(Self {
            domain: *domain,
            eps,
            radii: radial_mesh(domain, eps, spec),
            thetas: (0..n_theta).map(|l| 2.0 * PI * l as f64 / n_theta as f64).collect(),
            alphas,
            weights,
            spec: *spec,
        })
    }

    pub fn dimension(&self) -> usize {
        self.domain.dimension()
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.radii.len(), self.thetas.len(), self.alphas.len()]
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.thetas.len() * self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ir: usize, it: usize, ia: usize) -> usize {
        (ir * self.thetas.len() + it) * self.alphas.len() + ia
    }

    /// Measure of the velocity circle or sphere.
    pub fn velocity_measure(&self) -> f64 {
        self.domain.velocity_measure()
    }

    /// Trapezoid weights for `∫ f r^{d-1} dr`.
    pub fn radial_weights(&self) -> Vec<f64> {
        let r = &self.radii;
        let p = (self.dimension() - 1) as i32;
        (0..r.len())
            .map(|i| {
                let left = if i > 0 { r[i] - r[i - 1] } else { 0.0 };
                let right = if i + 1 < r.len() { r[i + 1] - r[i] } else { 0.0 };
                0.5 * (left + right) * r[i].powi(p)
            })
            .collect()
    }

    /// Weight of one boundary-angle sample (the full sphere area factor in 3D).
    pub fn theta_weight(&self) -> f64 {
        if self.dimension() == 3 {
            4.0 * PI
        } else {
            2.0 * PI / self.thetas.len() as f64
        }
    }

    /// `∫_Ω f dx` for a field sampled on `(r_i, θ_l)`.
    pub fn integrate_space(&self, values: &[f64]) -> f64 {
        let wr = self.radial_weights();
        let nt = self.thetas.len();
        let wt = self.theta_weight();
        values.iter().enumerate().map(|(k, v)| wr[k / nt] * wt * v).sum()
    }

    /// `∫_Ω ∫ f dw dx` for a phase-space field.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        let wr = self.radial_weights();
        let (nt, na) = (self.thetas.len(), self.alphas.len());
        let wt = self.theta_weight() * self.velocity_measure();
        values
            .iter()
            .enumerate()
            .map(|(k, v)| wr[k / (nt * na)] * wt * self.weights[k % na] * v)
            .sum()
    }

    /// Cartesian position and velocity of a grid point; 3D points lie in the `xy` plane.
    pub fn point(&self, ir: usize, it: usize, ia: usize) -> (Vec<f64>, Vec<f64>) {
        let (r, th, a) = (self.radii[ir], self.thetas[it], self.alphas[ia]);
        let dir = th + a;
        let x = vec![r * th.cos(), r * th.sin()];
        let w = vec![dir.cos(), dir.sin()];
        if self.dimension() == 3 {
            (vec![x[0], x[1], 0.0], vec![w[0], w[1], 0.0])
        } else {
            (x, w)
        }
    }

    /// Collar coordinates `(face, depth, φ)` of the ordinate `α` at radius `r`
    /// relative to the face `side`.
    pub fn collar_angle(&self, side: Side, alpha: f64) -> f64 {
        face_angle(self.dimension(), side, alpha)
    }

    /// Number of radial cells within `2ε` of each face.
    pub fn collar_cells(&self) -> Vec<(Side, usize)> {
        let reach = 2.0 * self.eps;
        self.domain
            .faces()
            .iter()
            .map(|f| {
                let n = self
                    .radii
                    .windows(2)
                    .filter(|w| f.depth_of(w[0]).min(f.depth_of(w[1])) < reach)
                    .count();
                (f.side, n)
            })
            .collect()
    }

    pub fn collar_resolved(&self) -> bool {
        self.collar_cells().iter().all(|(_, n)| *n >= 8)
    }
}

/// Wrap an angle into `(-π, π]`.
pub fn wrap(a: f64) -> f64 {
    let mut x = a % (2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    } else if x <= -PI {
        x += 2.0 * PI;
    }
    x
}

/// Boundary angle `φ` of a velocity making angle `alpha` with `e_r`, measured
/// in the chart of face `side`.
pub fn face_angle(dim: usize, side: Side, alpha: f64) -> f64 {
    match (dim, side) {
        (2, Side::Outer) => wrap(alpha - PI / 2.0),
        (2, Side::Inner) => wrap(alpha + PI / 2.0),
        (_, Side::Outer) => (-alpha.cos()).clamp(-1.0, 1.0).asin(),
        (_, Side::Inner) => alpha.cos().clamp(-1.0, 1.0).asin(),
    }
}

/// Inverse of [`face_angle`] on the branch used by the transport grid.
pub fn ordinate_angle(dim: usize, side: Side, phi: f64) -> f64 {
    match (dim, side) {
        (2, Side::Outer) => wrap(phi + PI / 2.0),
        (2, Side::Inner) => wrap(phi - PI / 2.0),
        (_, Side::Outer) => PI / 2.0 + phi,
        (_, Side::Inner) => PI / 2.0 - phi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_is_graded_and_resolves_collar() {
        let d = DomainSpec::Annulus { inner: 1.0, outer: 2.0 };
        for eps in [0.2, 0.05, 0.0125] {
            let g = TransportGrid::new(&d, eps, &GridSpec::default(), 8).unwrap();
            let r = &g.radii;
            assert_eq!(r[0], 1.0);
            assert_eq!(*r.last().unwrap(), 2.0);
            assert!(r.windows(2).all(|w| w[1] > w[0]));
            let first = r[1] - r[0];
            assert!(first <= 0.25 * eps && first <= 1.1 * (0.125 * eps).min(0.02), "{first}");
            assert!(r.windows(2).all(|w| w[1] - w[0] <= 0.0201));
            assert!(g.collar_resolved(), "{:?}", g.collar_cells());
        }
    }

    #[test]
    fn weights_integrate_volume() {
        for d in [
            DomainSpec::Disk { radius: 1.0 },
            DomainSpec::Annulus { inner: 1.0, outer: 2.0 },
            DomainSpec::Ball { radius: 1.0 },
            DomainSpec::Shell { inner: 1.0, outer: 2.0 },
        ] {
            let g = TransportGrid::new(&d, 0.1, &GridSpec::default(), 8).unwrap();
            let ones = vec![1.0; g.len()];
            let v = g.integrate(&ones) / g.velocity_measure();
            assert!((v - d.volume()).abs() < 2e-3 * d.volume(), "{d:?}: {v}");
            assert!((g.weights.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn face_angles_round_trip() {
        for dim in [2, 3] {
            for side in [Side::Outer, Side::Inner] {
                for phi in [-1.2, -0.3, 0.4, 1.5] {
                    let a = ordinate_angle(dim, side, phi);
                    assert!((face_angle(dim, side, a) - phi).abs() < 1e-12);
                }
            }
        }
        // 2D: outward radial motion is incoming at an inner face
        assert!((face_angle(2, Side::Inner, 0.0) - PI / 2.0).abs() < 1e-15);
        assert!((face_angle(2, Side::Outer, PI) - PI / 2.0).abs() < 1e-15);
    }
}
