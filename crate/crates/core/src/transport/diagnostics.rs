use serde::{Deserialize, Serialize};

use super::grid::TransportGrid;
use super::poisson::{solve_poisson, PoissonSolution};
use super::solver::{angular_average, TransportField};
use crate::error::{Error, Result};
use crate::interior::HarmonicFunction;
use crate::linalg::periodic_derivative_matrix;
use crate::quadgeom::Side;
use crate::sources::{ApproximateSolution, SourceSample};

pub const KERNEL_SCHEMA: &str = "nte-kernel/1";

/// `R = u − u_a` on a transport grid with its norms and the test function
/// `ξ` solving `−Δξ = R̄`, `ξ = 0` on the boundary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RemainderDiagnostics {
    pub eps: f64,
    pub grid: TransportGrid,
    pub remainder: Vec<f64>,
    /// `R̄` on `[r][θ]`.
    pub average: Vec<f64>,
    /// `‖R‖` over phase space.
    pub total_l2: f64,
    /// `‖R̄‖` over space.
    pub average_l2: f64,
    pub deviation_l2: f64,
    pub gamma_plus: f64,
    pub xi: PoissonSolution,
}

impl RemainderDiagnostics {
    pub fn from_remainder(grid: &TransportGrid, remainder: Vec<f64>) -> Result<Self> {
        if remainder.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "remainder has {} samples but grid has {}",
                remainder.len(),
                grid.len()
            )));
        }
        let average = angular_average(grid, &remainder);
        let na = grid.alphas.len();
        let dev: Vec<f64> = remainder
            .iter()
            .enumerate()
            .map(|(k, v)| (v - average[k / na]).powi(2))
            .collect();
        let sq: Vec<f64> = remainder.iter().map(|v| v * v).collect();
        let avg_sq: Vec<f64> = average.iter().map(|v| v * v).collect();
        let gamma_plus = boundary_norm(grid, &remainder, true);
        let xi = solve_poisson(&grid.domain, &grid.radii, &grid.thetas, &average)?;
        Ok(Self {
            eps: grid.eps,
            grid: grid.clone(),
            total_l2: grid.integrate(&sq).sqrt(),
            average_l2: grid.integrate_space(&avg_sq).sqrt(),
            deviation_l2: grid.integrate(&dev).sqrt(),
            gamma_plus,
            remainder,
            average,
            xi,
        })
    }

    /// `‖R‖² − |S|·‖R̄‖² − ‖R − R̄‖²`.
    pub fn decomposition_defect(&self) -> f64 {
        self.total_l2.powi(2) - self.grid.velocity_measure() * self.average_l2.powi(2) - self.deviation_l2.powi(2)
    }

    /// `(w·∇)ⁿξ` on every phase-space node.
    pub fn xi_field(&self, order: usize) -> Vec<f64> {
        let g = &self.grid;
        let na = g.alphas.len();
        (0..g.len())
            .map(|k| self.xi.directional(k / na, g.alphas[k % na], order))
            .collect()
    }
}

/// `R = u − u_a` and its diagnostics.
pub fn remainder_diagnostics(u: &TransportField, ua: &ApproximateSolution) -> Result<RemainderDiagnostics> {
    let approx = ua.on_grid(&u.grid)?;
    let r = u.values.iter().zip(&approx).map(|(a, b)| a - b).collect();
    RemainderDiagnostics::from_remainder(&u.grid, r)
}

/// `‖u − U₀‖` over phase space, `U₀` taken as independent of velocity.
pub fn interior_distance(u: &TransportField, u0: &HarmonicFunction) -> Result<f64> {
    let g = &u.grid;
    if g.domain != u0.domain {
        return Err(Error::GridMismatch(
            "field and interior solution live on different domains".into(),
        ));
    }
    let na = g.alphas.len();
    let nt = g.thetas.len();
    let mut base = Vec::with_capacity(g.radii.len() * nt);
    for ir in 0..g.radii.len() {
        for it in 0..nt {
            base.push(u0.value(&g.point(ir, it, 0).0));
        }
    }
    let sq: Vec<f64> = u
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| (v - base[k / na]).powi(2))
        .collect();
    Ok(g.integrate(&sq).sqrt())
}

/// Radial node, outward normal sign and area per `θ` sample of each face.
fn faces(grid: &TransportGrid) -> Vec<(usize, f64, f64)> {
    let d = grid.dimension() as i32;
    grid.domain
        .faces()
        .iter()
        .map(|f| {
            let (node, sign) = match f.side {
                Side::Outer => (grid.radii.len() - 1, 1.0),
                Side::Inner => (0, -1.0),
            };
            (node, sign, grid.theta_weight() * f.radius.powi(d - 1))
        })
        .collect()
}

/// `∫_γ f (w·n)` over the whole boundary.
fn boundary_flux(grid: &TransportGrid, f: &[f64]) -> f64 {
    let m = grid.velocity_measure();
    let mut s = 0.0;
    for (ir, sign, area) in faces(grid) {
        for it in 0..grid.thetas.len() {
            for (ia, a) in grid.alphas.iter().enumerate() {
                s += area * m * grid.weights[ia] * sign * a.cos() * f[grid.index(ir, it, ia)];
            }
        }
    }
    s
}

/// `(∫_{γ±} |f|² |w·n|)^{1/2}`.
pub fn boundary_norm(grid: &TransportGrid, f: &[f64], outgoing: bool) -> f64 {
    let m = grid.velocity_measure();
    let mut s = 0.0;
    for (ir, sign, area) in faces(grid) {
        for it in 0..grid.thetas.len() {
            for (ia, a) in grid.alphas.iter().enumerate() {
                let wn = sign * a.cos();
                if (wn > 0.0) == outgoing && wn != 0.0 {
                    s += area * m * grid.weights[ia] * wn.abs() * f[grid.index(ir, it, ia)].powi(2);
                }
            }
        }
    }
    s.sqrt()
}

/// Derivative weights at `x` of the quadratic through three nodes.
fn lagrange_slope(xs: [f64; 3], x: f64) -> [f64; 3] {
    let mut w = [0.0; 3];
    for j in 0..3 {
        for m in 0..3 {
            if m == j {
                continue;
            }
            let mut t = 1.0 / (xs[j] - xs[m]);
            for n in 0..3 {
                if n != j && n != m {
                    t *= (x - xs[n]) / (xs[j] - xs[n]);
                }
            }
            w[j] += t;
        }
    }
    w
}

/// Three-point stencils `(indices, weights)` for `d/dx` on the nodes `xs`
/// taken in the order `order`; periodic with period `period` when given.
fn stencils(xs: &[f64], order: &[usize], period: Option<f64>) -> Vec<([usize; 3], [f64; 3])> {
    let n = order.len();
    let mut out = vec![([0; 3], [0.0; 3]); xs.len()];
    for p in 0..n {
        let (idx, pos) = match period {
            Some(t) => {
                let lo = (p + n - 1) % n;
                let hi = (p + 1) % n;
                let mut a = xs[order[lo]];
                let mut b = xs[order[hi]];
                let x = xs[order[p]];
                if a > x {
                    a -= t;
                }
                if b < x {
                    b += t;
                }
                ([order[lo], order[p], order[hi]], [a, x, b])
            }
            None => {
                let c = p.clamp(1, n - 2);
                let ids = [order[c - 1], order[c], order[c + 1]];
                (ids, [xs[ids[0]], xs[ids[1]], xs[ids[2]]])
            }
        };
        out[order[p]] = (idx, lagrange_slope(pos, xs[order[p]]));
    }
    out
}

/// Discrete `w·∇f` on the grid: `cos α ∂_r f + (sin α / r)(∂_θ − ∂_α) f` in
/// 2D and `cos α ∂_r f − (sin α / r) ∂_α f` in 3D. Radial and angular
/// derivatives are three-point, `θ` derivatives spectral; centre nodes of a
/// disk or ball carry zero volume weight and are set to 0.
pub fn transport_derivative(grid: &TransportGrid, f: &[f64]) -> Vec<f64> {
    let (nr, nt, na) = (grid.radii.len(), grid.thetas.len(), grid.alphas.len());
    let radial: Vec<usize> = (0..nr).collect();
    let rs = stencils(&grid.radii, &radial, None);
    let mut ord: Vec<usize> = (0..na).collect();
    ord.sort_by(|a, b| grid.alphas[*a].partial_cmp(&grid.alphas[*b]).unwrap());
    let two_d = grid.dimension() == 2;
    let period = if two_d { Some(2.0 * std::f64::consts::PI) } else { None };
    let als = stencils(&grid.alphas, &ord, period);
    let dth = if two_d {
        periodic_derivative_matrix(nt)
    } else {
        vec![vec![0.0]]
    };
    let mut out = vec![0.0; f.len()];
    for ir in 0..nr {
        let r = grid.radii[ir];
        if r == 0.0 {
            continue;
        }
        let (ri, rw) = rs[ir];
        for it in 0..nt {
            for ia in 0..na {
                let (s, c) = grid.alphas[ia].sin_cos();
                let d_r: f64 = (0..3).map(|q| rw[q] * f[grid.index(ri[q], it, ia)]).sum();
                let (ai, aw) = als[ia];
                let d_a: f64 = (0..3).map(|q| aw[q] * f[grid.index(ir, it, ai[q])]).sum();
                let d_t: f64 = if two_d {
                    (0..nt).map(|m| dth[it][m] * f[grid.index(ir, m, ia)]).sum()
                } else {
                    0.0
                };
                out[grid.index(ir, it, ia)] = c * d_r + s / r * (d_t - d_a);
            }
        }
    }
    out
}

/// `|∬ (w·∇f) g + (w·∇g) f − ∫_γ f g (w·n)|` with discrete transport
/// derivatives.
pub fn green_identity_residual(grid: &TransportGrid, f: &[f64], g: &[f64]) -> Result<f64> {
    if f.len() != grid.len() || g.len() != grid.len() {
        return Err(Error::GridMismatch("fields do not match the grid".into()));
    }
    let df = transport_derivative(grid, f);
    let dg = transport_derivative(grid, g);
    let vol: Vec<f64> = (0..f.len()).map(|k| df[k] * g[k] + dg[k] * f[k]).collect();
    let fg: Vec<f64> = f.iter().zip(g).map(|(a, b)| a * b).collect();
    Ok((grid.integrate(&vol) - boundary_flux(grid, &fg)).abs())
}

/// Terms of the weak formulation of `w·∇R + ε⁻¹(R − R̄) = S` tested with
/// `ξ` and `w·∇ξ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    pub schema: String,
    pub eps: f64,
    /// `‖R̄‖²`
    pub average_sq: f64,
    /// `|S|/d`, the second angular moment.
    pub moment: f64,
    /// `−⟨R̄, (w·∇)²ξ⟩`
    pub second_average: f64,
    /// `second_average / (moment · ‖R̄‖²)`
    pub second_ratio: f64,
    /// `−⟨R − R̄, (w·∇)²ξ⟩`
    pub second_deviation: f64,
    /// `∫_γ R (w·∇ξ)(w·n)`
    pub boundary: f64,
    /// `ε⁻¹⟨R − R̄, w·∇ξ⟩`
    pub relaxation: f64,
    /// `⟨S, w·∇ξ⟩`
    pub source_gradient: f64,
    /// `boundary + second_average + second_deviation + relaxation − source_gradient`
    pub gradient_residual: f64,
    /// `⟨R, w·∇ξ⟩ + ⟨S, ξ⟩`
    pub conservation: f64,
    /// `⟨R̄, w·∇ξ⟩`
    pub oddness: f64,
    /// `‖R̄‖·‖w·∇ξ‖`, the scale `oddness` is measured against.
    pub oddness_scale: f64,
}

/// Evaluate every term of the tested weak formulation.
pub fn kernel_estimate_check(diag: &RemainderDiagnostics, sources: &[SourceSample]) -> Result<KernelReport> {
    let g = &diag.grid;
    if sources.len() != g.len() {
        return Err(Error::GridMismatch("sources do not match the grid".into()));
    }
    let na = g.alphas.len();
    let r = &diag.remainder;
    let rbar = |k: usize| diag.average[k / na];
    let xi0 = diag.xi_field(0);
    let xi1 = diag.xi_field(1);
    let xi2 = diag.xi_field(2);
    let inner = |f: &dyn Fn(usize) -> f64| {
        let v: Vec<f64> = (0..g.len()).map(f).collect();
        g.integrate(&v)
    };
    let average_sq = diag.average_l2.powi(2);
    let moment = g.velocity_measure() / g.dimension() as f64;
    let second_average = -inner(&|k| rbar(k) * xi2[k]);
    let second_deviation = -inner(&|k| (r[k] - rbar(k)) * xi2[k]);
    let rx: Vec<f64> = (0..g.len()).map(|k| r[k] * xi1[k]).collect();
    let boundary = boundary_flux(g, &rx);
    let relaxation = inner(&|k| (r[k] - rbar(k)) * xi1[k]) / diag.eps;
    let source_gradient = inner(&|k| sources[k].total() * xi1[k]);
    let conservation = inner(&|k| r[k] * xi1[k]) + inner(&|k| sources[k].total() * xi0[k]);
    let oddness = inner(&|k| rbar(k) * xi1[k]);
    let oddness_scale = diag.average_l2 * g.velocity_measure().sqrt() * inner(&|k| xi1[k] * xi1[k]).sqrt();
    let second_ratio = if average_sq > 0.0 {
        second_average / (moment * average_sq)
    } else {
        0.0
    };
    Ok(KernelReport {
        schema: KERNEL_SCHEMA.into(),
        eps: diag.eps,
        average_sq,
        moment,
        second_average,
        second_ratio,
        second_deviation,
        boundary,
        relaxation,
        source_gradient,
        gradient_residual: boundary + second_average + second_deviation + relaxation - source_gradient,
        conservation,
        oddness,
        oddness_scale,
    })
}
