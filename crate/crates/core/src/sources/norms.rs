use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transport::TransportGrid;

pub const NORM_SCHEMA: &str = "nte-norms/1";

/// Tensor quadrature over space × velocity. Values are laid out
/// `[spatial][angular]`; spatial weights include the volume element and
/// angular weights sum to the velocity measure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseQuadrature {
    pub spatial: Vec<f64>,
    /// Scaled distance to the nearest face at each spatial point.
    pub eta: Vec<f64>,
    pub angular: Vec<f64>,
}

impl PhaseQuadrature {
    pub fn len(&self) -> usize {
        self.spatial.len() * self.angular.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn velocity_measure(&self) -> f64 {
        self.angular.iter().sum()
    }

    /// The quadrature implied by a transport grid.
    pub fn from_grid(grid: &TransportGrid) -> Self {
        let wr = grid.radial_weights();
        let wt = grid.theta_weight();
        let faces = grid.domain.faces();
        let mut spatial = Vec::with_capacity(grid.radii.len() * grid.thetas.len());
        let mut eta = Vec::with_capacity(spatial.capacity());
        for (i, r) in grid.radii.iter().enumerate() {
            let d = faces.iter().map(|f| f.depth_of(*r)).fold(f64::INFINITY, f64::min);
            for _ in &grid.thetas {
                spatial.push(wr[i] * wt);
                eta.push(d / grid.eps);
            }
        }
        let m = grid.velocity_measure();
        Self {
            spatial,
            eta,
            angular: grid.weights.iter().map(|w| w * m).collect(),
        }
    }

    fn check(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::Config(format!(
                "field has {} samples but quadrature has {}",
                values.len(),
                self.len()
            )));
        }
        Ok(())
    }

    /// `(∫∫ |ρ f|² dw dx)^{1/2}` with `ρ = 1 + η` when `weighted`.
    pub fn l2(&self, values: &[f64], weighted: bool) -> Result<f64> {
        self.check(values)?;
        let na = self.angular.len();
        let mut s = 0.0;
        for (k, v) in values.iter().enumerate() {
            let i = k / na;
            let rho = if weighted { 1.0 + self.eta[i] } else { 1.0 };
            s += self.spatial[i] * self.angular[k % na] * (rho * v).powi(2);
        }
        Ok(s.sqrt())
    }

    /// `(∫ (∫ |ρ f| dw)² dx)^{1/2}`.
    pub fn l2_l1(&self, values: &[f64], weighted: bool) -> Result<f64> {
        self.check(values)?;
        let na = self.angular.len();
        let mut s = 0.0;
        for (i, chunk) in values.chunks(na).enumerate() {
            let rho = if weighted { 1.0 + self.eta[i] } else { 1.0 };
            let inner: f64 = chunk.iter().zip(&self.angular).map(|(v, w)| w * (rho * v).abs()).sum();
            s += self.spatial[i] * inner * inner;
        }
        Ok(s.sqrt())
    }

    /// Normalized angular average at every spatial point.
    pub fn average(&self, values: &[f64]) -> Result<Vec<f64>> {
        self.check(values)?;
        let m = self.velocity_measure();
        Ok(values
            .chunks(self.angular.len())
            .map(|c| c.iter().zip(&self.angular).map(|(v, w)| v * w).sum::<f64>() / m)
            .collect())
    }

    /// `(∫ |f̄|² dx)^{1/2}` for a spatial field.
    pub fn spatial_l2(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.spatial.len() {
            return Err(Error::Config("spatial field does not match quadrature".into()));
        }
        Ok(values
            .iter()
            .zip(&self.spatial)
            .map(|(v, w)| w * v * v)
            .sum::<f64>()
            .sqrt())
    }
}

/// Boundary quadrature with `dγ = |w·n| dw dS` folded into the weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryQuadrature {
    pub weights: Vec<f64>,
}

impl BoundaryQuadrature {
    pub fn norm(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.weights.len() {
            return Err(Error::Config(format!(
                "boundary field has {} samples but quadrature has {}",
                values.len(),
                self.weights.len()
            )));
        }
        Ok(values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * v * v)
            .sum::<f64>()
            .sqrt())
    }
}

/// One measured norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEntry {
    pub field: String,
    pub norm: String,
    pub eps: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub schema: String,
    pub entries: Vec<NormEntry>,
}

impl NormReport {
    pub fn new() -> Self {
        Self {
            schema: NORM_SCHEMA.into(),
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, field: &str, norm: &str, eps: f64, value: f64) {
        self.entries.push(NormEntry {
            field: field.into(),
            norm: norm.into(),
            eps,
            value,
        });
    }

    pub fn extend(&mut self, entries: Vec<NormEntry>) {
        self.entries.extend(entries);
    }

    pub fn get(&self, field: &str, norm: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.field == field && e.norm == norm)
            .map(|e| e.value)
    }
}

/// `L2`, `L2xL1` and their `(1+eta)`-weighted variants of one field.
pub fn norm_suite(field: &str, eps: f64, values: &[f64], q: &PhaseQuadrature) -> Result<Vec<NormEntry>> {
    let entry = |norm: &str, value: f64| NormEntry {
        field: field.into(),
        norm: norm.into(),
        eps,
        value,
    };
    Ok(vec![
        entry("L2", q.l2(values, false)?),
        entry("L2xL1", q.l2_l1(values, false)?),
        entry("L2-weighted", q.l2(values, true)?),
        entry("L2xL1-weighted", q.l2_l1(values, true)?),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadgeom::DomainSpec;
    use crate::transport::GridSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid() -> TransportGrid {
        grid_with(&GridSpec::default())
    }

    fn grid_with(spec: &GridSpec) -> TransportGrid {
        TransportGrid::new(&DomainSpec::Disk { radius: 1.0 }, 0.05, spec, 16).unwrap()
    }

    #[test]
    fn zero_field_has_zero_norms() {
        let g = grid();
        let q = PhaseQuadrature::from_grid(&g);
        let z = vec![0.0; q.len()];
        for e in norm_suite("z", 0.05, &z, &q).unwrap() {
            assert_eq!(e.value, 0.0);
        }
    }

    #[test]
    fn gaussian_bump_matches_closed_form() {
        let s = 0.3;
        // ∫_S ∫_disk e^{-2r²/s²} = 2π · (π s²/2)(1 − e^{-2/s²})
        let exact = (2.0 * PI * PI * s * s / 2.0 * (1.0 - (-2.0 / (s * s)).exp())).sqrt();
        // ∫ (2π e^{-r²/s²})² dx = 4π² · (π s²/2)(1 − e^{-2/s²})
        let exact1 = (4.0 * PI * PI * PI * s * s / 2.0 * (1.0 - (-2.0 / (s * s)).exp())).sqrt();
        let errors = |spec: &GridSpec| {
            let g = grid_with(spec);
            let q = PhaseQuadrature::from_grid(&g);
            let f: Vec<f64> = (0..g.len())
                .map(|k| {
                    let ir = k / (g.thetas.len() * g.alphas.len());
                    (-(g.radii[ir] / s).powi(2)).exp()
                })
                .collect();
            (
                (q.l2(&f, false).unwrap() - exact).abs() / exact,
                (q.l2_l1(&f, false).unwrap() - exact1).abs() / exact1,
            )
        };
        let coarse = errors(&GridSpec::default());
        let fine = errors(&GridSpec::default().refined());
        assert!(coarse.0 < 1e-3 && coarse.1 < 1e-3, "{coarse:?}");
        // trapezoid in r: second order
        assert!(
            fine.0 < coarse.0 / 3.0 && fine.1 < coarse.1 / 3.0,
            "{coarse:?} {fine:?}"
        );
    }

    #[test]
    fn weighted_dominates_unweighted() {
        let g = grid();
        let q = PhaseQuadrature::from_grid(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f: Vec<f64> = (0..q.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = norm_suite("f", 0.05, &f, &q).unwrap();
        assert!(n[2].value >= n[0].value && n[3].value >= n[1].value);
        assert!(n.iter().all(|e| e.value >= 0.0));
    }

    #[test]
    fn pythagoras_for_the_average() {
        let g = grid();
        let q = PhaseQuadrature::from_grid(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f: Vec<f64> = (0..q.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let avg = q.average(&f).unwrap();
        let na = q.angular.len();
        let dev: Vec<f64> = f.iter().enumerate().map(|(k, v)| v - avg[k / na]).collect();
        let full = q.l2(&f, false).unwrap().powi(2);
        let parts = q.velocity_measure() * q.spatial_l2(&avg).unwrap().powi(2) + q.l2(&dev, false).unwrap().powi(2);
        assert!((full - parts).abs() < 1e-10 * full);
    }

    #[test]
    fn mismatched_sizes_are_rejected() {
        let g = grid();
        let q = PhaseQuadrature::from_grid(&g);
        assert!(q.l2(&[1.0, 2.0], false).is_err());
        assert!(norm_suite("x", 0.1, &[0.0], &q).is_err());
    }

    #[test]
    fn report_serializes_with_keys() {
        let mut r = NormReport::new();
        r.push("S0", "L2", 0.1, 2.5e-3);
        let j = serde_json::to_value(&r).unwrap();
        let e = &j["entries"][0];
        assert_eq!(e["field"], "S0");
        assert_eq!(e["norm"], "L2");
        assert_eq!(e["eps"], 0.1);
        assert_eq!(e["value"], 2.5e-3);
        assert_eq!(r.get("S0", "L2"), Some(2.5e-3));
    }
}
