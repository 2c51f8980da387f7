//! Approximate solution `u_a`, remainder data `h`, sources `S₀…S₃` and norms.

mod approx;
mod norms;
mod terms;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use approx::ApproximateSolution;
pub use norms::{norm_suite, BoundaryQuadrature, NormEntry, NormReport, PhaseQuadrature, NORM_SCHEMA};
pub use terms::{AngularRule, SourceEvaluator, SourceSample};

use crate::error::Result;
use crate::quadgeom::gauss::gauss_legendre_on;
use crate::quadgeom::Side;
use crate::transport::{face_angle, TransportGrid};

/// Depth quadrature of the boundary collar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollarSpec {
    /// First panel in `η`.
    pub first: f64,
    pub ratio: f64,
    /// Largest panel in `η`.
    pub max_eta_step: f64,
    /// Largest panel as a fraction of the collar scale.
    pub max_mu_fraction: f64,
    pub order: usize,
}

impl Default for CollarSpec {
    fn default() -> Self {
        Self {
            first: 1e-3,
            ratio: 1.3,
            max_eta_step: 1.0,
            max_mu_fraction: 0.125,
            order: 4,
        }
    }
}

/// Gauss panels in depth `μ ∈ [0, 2s]`, graded in `η = μ/ε`, with a break at
/// the collar scale `s` where the cutoff starts to fall.
pub fn collar_depth_rule(eps: f64, scale: f64, spec: &CollarSpec) -> (Vec<f64>, Vec<f64>) {
    let top = 2.0 * scale;
    let cap = (spec.max_eta_step * eps).min(spec.max_mu_fraction * scale);
    let mut edges = vec![0.0];
    let mut h = spec.first * eps;
    let mut x = 0.0;
    while x + h < top {
        x += h;
        edges.push(x);
        h = (h * spec.ratio).min(cap);
    }
    edges.push(top);
    if !edges.iter().any(|e| (e - scale).abs() < 1e-12) {
        edges.push(scale);
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
    let mut mus = Vec::new();
    let mut ws = Vec::new();
    for w in edges.windows(2) {
        let (x, wt) = gauss_legendre_on(spec.order, w[0], w[1]);
        mus.extend(x);
        ws.extend(wt);
    }
    (mus, ws)
}

/// Sources sampled on the collar quadrature, `h` on the incoming boundary
/// and `S₀` on a volume quadrature.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceTerms {
    pub eps: f64,
    pub quadrature: PhaseQuadrature,
    /// Layout `[face][θ_l][μ][φ]`, matching `quadrature`.
    pub samples: Vec<SourceSample>,
    pub boundary: BoundaryQuadrature,
    pub h: Vec<f64>,
    pub h_without_layer: Vec<f64>,
    pub volume: PhaseQuadrature,
    pub s0: Vec<f64>,
}

impl SourceTerms {
    pub fn component<F: Fn(&SourceSample) -> f64>(&self, f: F) -> Vec<f64> {
        self.samples.iter().map(f).collect()
    }

    pub fn norms(&self) -> Result<NormReport> {
        let e = self.eps;
        let q = &self.quadrature;
        let mut r = NormReport::new();
        let fields: [(&str, fn(&SourceSample) -> f64); 9] = [
            ("U_B", |s| s.ub),
            ("S1", |s| s.s1()),
            ("S11", |s| s.s11),
            ("S12", |s| s.s12),
            ("S2", |s| s.s2),
            ("S3", |s| s.s3()),
            ("S31", |s| s.s31),
            ("S32", |s| s.s32),
            ("S3_defect", |s| s.s3_defect),
        ];
        for (name, f) in fields {
            r.extend(norm_suite(name, e, &self.component(f), q)?);
        }
        r.extend(norm_suite("S0", e, &self.s0, &self.volume)?);
        r.push("h", "gamma-", e, self.boundary.norm(&self.h)?);
        r.push(
            "h_without_layer",
            "gamma-",
            e,
            self.boundary.norm(&self.h_without_layer)?,
        );
        Ok(r)
    }
}

/// `h` on the incoming boundary, sampled at the layer's boundary nodes and
/// the collar angular rule.
pub fn assemble_h(approx: &ApproximateSolution) -> (BoundaryQuadrature, Vec<f64>, Vec<f64>) {
    let ev = SourceEvaluator::new(approx);
    let dim = approx.domain().dimension();
    let mut weights = Vec::new();
    let mut h = Vec::new();
    let mut bare = Vec::new();
    for face in approx.domain().faces() {
        let thetas = &approx.layer.family.face(face.side).thetas;
        let area = if dim == 2 {
            face.radius * 2.0 * PI / thetas.len() as f64
        } else {
            4.0 * PI * face.radius * face.radius
        };
        for &th in thetas {
            for (phi, w) in ev.rule.phis.iter().zip(&ev.rule.weights) {
                let s = phi.sin();
                if s <= 0.0 {
                    continue;
                }
                weights.push(area * w * s);
                h.push(ev.h(face.side, th, *phi));
                bare.push(ev.h_without_layer(face.side, th, *phi));
            }
        }
    }
    (BoundaryQuadrature { weights }, h, bare)
}

/// Volume quadrature for fields smooth in space: Gauss panels in `r`,
/// uniform `θ`, uniform velocity angle (2D) or Gauss in `cos α` (3D).
fn volume_points(approx: &ApproximateSolution) -> (PhaseQuadrature, Vec<(Vec<f64>, Vec<f64>)>) {
    let d = approx.domain();
    let dim = d.dimension();
    let eps = approx.eps();
    let (a, b) = (d.inner_radius(), d.outer_radius());
    let panels = 48;
    let mut rs = Vec::new();
    let mut wr = Vec::new();
    for p in 0..panels {
        let lo = a + (b - a) * p as f64 / panels as f64;
        let hi = a + (b - a) * (p + 1) as f64 / panels as f64;
        let (x, w) = gauss_legendre_on(4, lo, hi);
        rs.extend(x);
        wr.extend(w);
    }
    let (thetas, wt): (Vec<f64>, f64) = if dim == 2 {
        let n = 64;
        (
            (0..n).map(|l| 2.0 * PI * l as f64 / n as f64).collect(),
            2.0 * PI / n as f64,
        )
    } else {
        (vec![0.0], 4.0 * PI)
    };
    let (alphas, wa): (Vec<f64>, Vec<f64>) = if dim == 2 {
        let n = 32;
        (
            (0..n).map(|j| 2.0 * PI * (j as f64 + 0.5) / n as f64).collect(),
            vec![2.0 * PI / n as f64; n],
        )
    } else {
        let (c, w) = gauss_legendre_on(16, -1.0, 1.0);
        (
            c.iter().map(|c| c.acos()).collect(),
            w.iter().map(|w| 2.0 * PI * w).collect(),
        )
    };
    let faces = d.faces();
    let mut spatial = Vec::new();
    let mut eta = Vec::new();
    let mut pts = Vec::new();
    for (r, w) in rs.iter().zip(&wr) {
        let dist = faces.iter().map(|f| f.depth_of(*r)).fold(f64::INFINITY, f64::min);
        for &th in &thetas {
            spatial.push(w * r.powi(dim as i32 - 1) * wt);
            eta.push(dist / eps);
            for &al in &alphas {
                let dir = th + al;
                let (x, v) = if dim == 2 {
                    (vec![r * th.cos(), r * th.sin()], vec![dir.cos(), dir.sin()])
                } else {
                    (vec![*r, 0.0, 0.0], vec![al.cos(), al.sin(), 0.0])
                };
                pts.push((x, v));
            }
        }
    }
    (
        PhaseQuadrature {
            spatial,
            eta,
            angular: wa,
        },
        pts,
    )
}

/// Assemble every source on the collar quadrature together with `h` and `S₀`.
pub fn assemble_sources(approx: &ApproximateSolution, spec: &CollarSpec) -> Result<SourceTerms> {
    let ev = SourceEvaluator::new(approx);
    let eps = approx.eps();
    let dim = approx.domain().dimension();
    let scale = approx.layer.cutoff.collar_scale;
    let (mus, wmu) = collar_depth_rule(eps, scale, spec);
    let faces = approx.domain().faces();
    let jobs: Vec<(Side, f64, f64, usize)> = faces
        .iter()
        .flat_map(|f| {
            let th = approx.layer.family.face(f.side).thetas.clone();
            let n = th.len();
            th.into_iter().map(move |t| (f.side, f.signed_radius(), t, n))
        })
        .collect();
    let blocks: Vec<Vec<Vec<SourceSample>>> = jobs
        .par_iter()
        .map(|(side, _, th, _)| ev.block(*side, *th, &mus, &ev.rule.phis))
        .collect();
    let mut spatial = Vec::new();
    let mut eta = Vec::new();
    let mut samples = Vec::new();
    for ((_, rs, _, n), block) in jobs.iter().zip(&blocks) {
        let per_theta = if dim == 2 { 2.0 * PI / *n as f64 } else { 4.0 * PI };
        for (m, (mu, w)) in mus.iter().zip(&wmu).enumerate() {
            spatial.push(per_theta * w * (rs - mu).abs().powi(dim as i32 - 1));
            eta.push(mu / eps);
            samples.extend(block.iter().map(|col| col[m]));
        }
    }
    let (boundary, h, h_without_layer) = assemble_h(approx);
    let (volume, pts) = volume_points(approx);
    let s0 = pts.par_iter().map(|(x, w)| ev.s0(x, w)).collect();
    Ok(SourceTerms {
        eps,
        quadrature: PhaseQuadrature {
            spatial,
            eta,
            angular: ev.rule.weights.clone(),
        },
        samples,
        boundary,
        h,
        h_without_layer,
        volume,
        s0,
    })
}

/// Sources at every node of a transport grid, `[r][θ][ordinate]`.
pub fn sources_on_grid(approx: &ApproximateSolution, grid: &TransportGrid) -> Result<Vec<SourceSample>> {
    approx.check_grid(grid)?;
    let ev = SourceEvaluator::new(approx);
    let mut out: Vec<SourceSample> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let na = grid.alphas.len();
            let nt = grid.thetas.len();
            let (x, w) = grid.point(k / (nt * na), (k / na) % nt, k % na);
            SourceSample {
                s0: ev.s0(&x, &w),
                ..SourceSample::default()
            }
        })
        .collect();
    let extent = approx.layer.cutoff.collar_extent();
    let dim = grid.dimension();
    for face in approx.domain().faces() {
        let mut nodes: Vec<(f64, usize)> = grid
            .radii
            .iter()
            .enumerate()
            .map(|(i, r)| (face.depth_of(*r), i))
            .filter(|(mu, _)| *mu >= 0.0 && *mu < extent)
            .collect();
        nodes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mus: Vec<f64> = nodes.iter().map(|n| n.0).collect();
        let phis: Vec<f64> = grid.alphas.iter().map(|a| face_angle(dim, face.side, *a)).collect();
        let blocks: Vec<Vec<Vec<SourceSample>>> = grid
            .thetas
            .par_iter()
            .map(|th| ev.block(face.side, *th, &mus, &phis))
            .collect();
        for (it, block) in blocks.iter().enumerate() {
            for (ia, col) in block.iter().enumerate() {
                for ((_, ir), s) in nodes.iter().zip(col) {
                    let o = &mut out[grid.index(*ir, it, ia)];
                    o.s11 += s.s11;
                    o.s12 += s.s12;
                    o.s2 += s.s2;
                    o.s31 += s.s31;
                    o.s32 += s.s32;
                    o.s3_defect += s.s3_defect;
                    o.ub += s.ub;
                }
            }
        }
    }
    Ok(out)
}
