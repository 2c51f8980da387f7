use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use super::cutoff::CutoffSpec;
use super::solver::{solve_milne, EtaMesh, MilneOptions, MilneProblem, MilneSolution};
use crate::data::BoundaryData;
use crate::error::{Error, Result};
use crate::quadgeom::{grazing_angle, AngularGrid, BoundaryFace, DomainSpec, Side};

/// Milne solutions sampled at uniform boundary parameters `θ_l = 2πl/N` on one face.
#[derive(Debug, Clone)]
pub struct FaceLayer {
    pub face: BoundaryFace,
    pub thetas: Vec<f64>,
    pub solutions: Vec<MilneSolution>,
}

impl FaceLayer {
    pub fn phi_inf(&self) -> Vec<f64> {
        self.solutions.iter().map(|s| s.phi_inf).collect()
    }
}

/// All half-space solves needed for one domain and one data set.
///
/// Solutions do not depend on `ε`, so one family serves a whole sweep.
#[derive(Debug, Clone)]
pub struct MilneFamily {
    pub dimension: usize,
    pub data: BoundaryData,
    pub faces: Vec<FaceLayer>,
}

impl MilneFamily {
    /// Solve on every face at `n_theta` boundary points (one point for
    /// rotationally symmetric 3D data). Solves run in parallel.
    pub fn solve(
        domain: &DomainSpec,
        data: &BoundaryData,
        grid: &AngularGrid,
        mesh: &EtaMesh,
        n_theta: usize,
        opts: &MilneOptions,
    ) -> Result<Self> {
        domain.validate()?;
        data.validate()?;
        let dim = domain.dimension();
        if grid.dimension != dim {
            return Err(Error::GridMismatch(format!(
                "angular grid is {}D but domain is {dim}D",
                grid.dimension
            )));
        }
        let n_theta = if dim == 3 { 1 } else { n_theta.max(1) };
        let thetas: Vec<f64> = (0..n_theta).map(|l| 2.0 * PI * l as f64 / n_theta as f64).collect();
        let faces = domain
            .faces()
            .into_iter()
            .map(|face| {
                let solutions = thetas
                    .par_iter()
                    .map(|&th| {
                        let p = MilneProblem::new(grid, mesh.clone(), |a| data.value(face.side, th, a.phi))?;
                        solve_milne(&p, opts)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(FaceLayer {
                    face,
                    thetas: thetas.clone(),
                    solutions,
                })
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| e.at_stage("milne"))?;
        Ok(Self {
            dimension: dim,
            data: data.clone(),
            faces,
        })
    }

    pub fn face(&self, side: Side) -> &FaceLayer {
        self.faces.iter().find(|f| f.face.side == side).expect("face present")
    }

    /// `Ψ(η, φ)` at boundary point `l` of face `side`, for ascending `etas`.
    pub fn psi_profile(&self, side: Side, l: usize, phi: f64, etas: &[f64]) -> Vec<f64> {
        let f = self.face(side);
        let sol = &f.solutions[l];
        let s = phi.sin();
        let g = if s > 0.0 {
            self.data.value(side, f.thetas[l], phi)
        } else {
            0.0
        };
        sol.psi_trace(s, g, etas)
    }

    pub fn psi(&self, side: Side, l: usize, phi: f64, eta: f64) -> f64 {
        self.psi_profile(side, l, phi, &[eta])[0]
    }
}

/// `U^B₀ = χ̃(φ_g/ε) χ(εη) Ψ(η, φ)` on every face.
#[derive(Debug, Clone)]
pub struct BoundaryLayerField {
    pub eps: f64,
    pub cutoff: CutoffSpec,
    pub family: Arc<MilneFamily>,
}

pub fn build_boundary_layer(family: Arc<MilneFamily>, eps: f64, cutoff: CutoffSpec) -> Result<BoundaryLayerField> {
    if !(eps > 0.0) {
        return Err(Error::Config(format!("eps must be positive, got {eps}")));
    }
    if !(cutoff.collar_scale > 0.0) {
        return Err(Error::Config("collar scale must be positive".into()));
    }
    Ok(BoundaryLayerField { eps, cutoff, family })
}

impl BoundaryLayerField {
    /// Layer value at physical depth `mu` from face `side`.
    pub fn value(&self, side: Side, l: usize, mu: f64, phi: f64) -> f64 {
        self.profile(side, l, phi, &[mu])[0]
    }

    /// Layer values along ascending depths `mus` for a fixed direction.
    pub fn profile(&self, side: Side, l: usize, phi: f64, mus: &[f64]) -> Vec<f64> {
        let ang = self.cutoff.angular(grazing_angle(phi), self.eps);
        if ang == 0.0 {
            return vec![0.0; mus.len()];
        }
        let etas: Vec<f64> = mus.iter().map(|m| m / self.eps).collect();
        let psi = self.family.psi_profile(side, l, phi, &etas);
        mus.iter()
            .zip(psi)
            .map(|(m, p)| ang * self.cutoff.collar(*m) * p)
            .collect()
    }

    /// Trace at the face: `χ̃(φ_g/ε) Ψ(0, φ)`.
    pub fn at_boundary(&self, side: Side, l: usize, phi: f64) -> f64 {
        self.value(side, l, 0.0, phi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family() -> Arc<MilneFamily> {
        let d = DomainSpec::Disk { radius: 1.0 };
        let g = AngularGrid::new(2, 16, 1).unwrap();
        let mesh = EtaMesh::graded(30.0, 5e-3, 1.15, 0.4).unwrap();
        Arc::new(MilneFamily::solve(&d, &BoundaryData::default(), &g, &mesh, 8, &MilneOptions::default()).unwrap())
    }

    #[test]
    fn cutoffs_kill_the_layer() {
        let fam = family();
        let eps = 0.05;
        let layer = build_boundary_layer(fam, eps, CutoffSpec::default()).unwrap();
        for phi in [0.0, 0.5 * eps, -eps, PI - 0.9 * eps] {
            assert_eq!(layer.value(Side::Outer, 1, 0.01, phi), 0.0);
        }
        assert_eq!(layer.value(Side::Outer, 1, 2.0, 0.7), 0.0);
        assert_eq!(layer.value(Side::Outer, 1, 2.5, -0.7), 0.0);
    }

    #[test]
    fn equals_psi_where_cutoffs_are_one() {
        let fam = family();
        let eps = 0.05;
        let layer = build_boundary_layer(fam.clone(), eps, CutoffSpec::default()).unwrap();
        for (mu, phi) in [(0.0, 0.4), (0.02, -0.9), (0.3, 2.0)] {
            let v = layer.value(Side::Outer, 2, mu, phi);
            let p = fam.psi(Side::Outer, 2, phi, mu / eps);
            assert!((v - p).abs() < 1e-14);
        }
    }

    #[test]
    fn boundary_trace_matches_data_minus_limit() {
        let fam = family();
        let layer = build_boundary_layer(fam.clone(), 0.05, CutoffSpec::default()).unwrap();
        let l = 3;
        let th = fam.face(Side::Outer).thetas[l];
        let phi = 0.8;
        let expected = fam.data.value(Side::Outer, th, phi) - fam.face(Side::Outer).solutions[l].phi_inf;
        assert!((layer.at_boundary(Side::Outer, l, phi) - expected).abs() < 1e-14);
    }

    #[test]
    fn rejects_nonpositive_eps() {
        assert!(build_boundary_layer(family(), 0.0, CutoffSpec::default()).is_err());
    }
}
