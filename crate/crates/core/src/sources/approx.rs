use crate::error::{Error, Result};
use crate::interior::InteriorSolution;
use crate::linalg::trig_interp_weights;
use crate::milne::BoundaryLayerField;
use crate::quadgeom::{DomainSpec, Side};
use crate::transport::{face_angle, TransportGrid};

/// `u_a = U₀ + εU₁ + ε²U₂ + U^B₀`.
#[derive(Debug, Clone)]
pub struct ApproximateSolution {
    pub interior: InteriorSolution,
    pub layer: BoundaryLayerField,
}

/// Interpolation weights over the layer's boundary samples; a node hit exactly
/// gets a unit weight so no spectral smearing enters node evaluations.
pub(crate) fn theta_weights(n: usize, theta: f64) -> (Vec<f64>, Vec<f64>) {
    let (w, dw) = trig_interp_weights(n, theta);
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let pos = theta.rem_euclid(2.0 * std::f64::consts::PI) / h;
    let near = pos.round();
    if (pos - near).abs() < 1e-12 {
        let mut unit = vec![0.0; n];
        unit[near as usize % n] = 1.0;
        return (unit, dw);
    }
    (w, dw)
}

impl ApproximateSolution {
    pub fn new(interior: InteriorSolution, layer: BoundaryLayerField) -> Result<Self> {
        if (interior.eps - layer.eps).abs() > 1e-14 * interior.eps {
            return Err(Error::Config(format!(
                "interior built at eps={} but layer at eps={}",
                interior.eps, layer.eps
            )));
        }
        if interior.u0.domain.dimension() != layer.family.dimension {
            return Err(Error::Config("interior and layer dimensions differ".into()));
        }
        Ok(Self { interior, layer })
    }

    pub fn eps(&self) -> f64 {
        self.interior.eps
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.interior.u0.domain
    }

    /// `U^B₀` along ascending depths from face `side` at boundary parameter `theta`.
    pub fn layer_profile(&self, side: Side, theta: f64, phi: f64, mus: &[f64]) -> Vec<f64> {
        let n = self.layer.family.face(side).thetas.len();
        let (w, _) = theta_weights(n, theta);
        let mut out = vec![0.0; mus.len()];
        for (l, c) in w.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.layer.profile(side, l, phi, mus)) {
                *o += c * v;
            }
        }
        out
    }

    pub fn layer_value(&self, side: Side, theta: f64, mu: f64, phi: f64) -> f64 {
        self.layer_profile(side, theta, phi, &[mu])[0]
    }

    /// `u_a(x, w)` at a Cartesian point.
    pub fn value(&self, x: &[f64], w: &[f64]) -> f64 {
        self.interior.composite(x, w) + self.layer_at(x, w)
    }

    /// Layer part of `u_a` at a Cartesian point.
    pub fn layer_at(&self, x: &[f64], w: &[f64]) -> f64 {
        let dim = self.domain().dimension();
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let (theta, alpha) = if dim == 2 {
            let th = x[1].atan2(x[0]);
            (th, w[1].atan2(w[0]) - th)
        } else if r > 0.0 {
            let c = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / r;
            (0.0, c.clamp(-1.0, 1.0).acos())
        } else {
            (0.0, 0.0)
        };
        let extent = self.layer.cutoff.collar_extent();
        self.domain()
            .faces()
            .iter()
            .map(|f| {
                let mu = f.depth_of(r);
                if mu >= extent || mu < 0.0 {
                    0.0
                } else {
                    self.layer_value(f.side, theta, mu, face_angle(dim, f.side, alpha))
                }
            })
            .sum()
    }

    /// `u_a` on every node of a transport grid, `[r][θ][ordinate]`.
    pub fn on_grid(&self, grid: &TransportGrid) -> Result<Vec<f64>> {
        self.check_grid(grid)?;
        let mut out = vec![0.0; grid.len()];
        for ir in 0..grid.radii.len() {
            for it in 0..grid.thetas.len() {
                for ia in 0..grid.alphas.len() {
                    let (x, w) = grid.point(ir, it, ia);
                    out[grid.index(ir, it, ia)] = self.interior.composite(&x, &w);
                }
            }
        }
        let extent = self.layer.cutoff.collar_extent();
        let dim = grid.dimension();
        for face in self.domain().faces() {
            let mut nodes: Vec<(f64, usize)> = grid
                .radii
                .iter()
                .enumerate()
                .map(|(i, r)| (face.depth_of(*r), i))
                .filter(|(mu, _)| *mu >= 0.0 && *mu < extent)
                .collect();
            nodes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let mus: Vec<f64> = nodes.iter().map(|n| n.0).collect();
            for (it, &th) in grid.thetas.iter().enumerate() {
                for (ia, &a) in grid.alphas.iter().enumerate() {
                    let prof = self.layer_profile(face.side, th, face_angle(dim, face.side, a), &mus);
                    for ((_, ir), v) in nodes.iter().zip(prof) {
                        out[grid.index(*ir, it, ia)] += v;
                    }
                }
            }
        }
        Ok(out)
    }

    pub(crate) fn check_grid(&self, grid: &TransportGrid) -> Result<()> {
        if grid.domain != *self.domain() {
            return Err(Error::GridMismatch(
                "grid and approximation live on different domains".into(),
            ));
        }
        if (grid.eps - self.eps()).abs() > 1e-14 * self.eps() {
            return Err(Error::GridMismatch(format!(
                "grid built for eps={} but approximation for eps={}",
                grid.eps,
                self.eps()
            )));
        }
        Ok(())
    }
}
