use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::approx::{theta_weights, ApproximateSolution};
use crate::quadgeom::gauss::gauss_legendre_on;
use crate::quadgeom::{grazing_angle, grazing_angle_slope, Side};
use crate::transport::ordinate_angle;

/// Source terms at one phase-space point.
///
/// `S₁ = S₁₁ + S₁₂` separates the `∂_φΨ` part from the cutoff-derivative
/// part; `S₃ = S₃₁ + S₃₂` separates `ε⁻¹χ avg((χ̃ − 1)Ψ)` from
/// `ε⁻¹χ(1 − χ̃)Ψ̄`, both with `Ψ̄` taken on the collar rule. `s3_defect`
/// carries the difference between that average and the half-space solver's
/// own `Φ̄ − Φ_∞`; it closes the discrete remainder equation and vanishes as
/// the half-space solve is refined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SourceSample {
    pub s0: f64,
    pub s11: f64,
    pub s12: f64,
    pub s2: f64,
    pub s31: f64,
    pub s32: f64,
    pub s3_defect: f64,
    /// `U^B₀` at the same point.
    pub ub: f64,
}

impl SourceSample {
    pub fn s1(&self) -> f64 {
        self.s11 + self.s12
    }

    pub fn s3(&self) -> f64 {
        self.s31 + self.s32
    }

    pub fn total(&self) -> f64 {
        self.s0 + self.s1() + self.s2 + self.s3() + self.s3_defect
    }
}

/// Angular rule with panel breaks at the cutoff edges `|φ_g| = ε, 2ε`,
/// geometric panels away from the grazing set and a break at normal
/// incidence. Weights sum to the velocity measure.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AngularRule {
    pub dimension: usize,
    pub phis: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Breakpoints in the grazing angle on `[0, π/2]`.
fn grazing_edges(eps: f64, ratio: f64) -> Vec<f64> {
    let half = PI / 2.0;
    let mut e = vec![0.0, 0.5 * eps, eps, 1.5 * eps, 2.0 * eps];
    e.retain(|v| *v < half);
    let mut x = 2.0 * eps;
    loop {
        x *= ratio;
        if x >= half * 0.98 {
            break;
        }
        e.push(x);
    }
    e.push(half);
    e
}

impl AngularRule {
    pub fn collar(dimension: usize, eps: f64) -> Self {
        let edges = grazing_edges(eps, 1.35);
        let order = 6;
        let mut phis = Vec::new();
        let mut weights = Vec::new();
        if dimension == 2 {
            for w in edges.windows(2) {
                let (g, gw) = gauss_legendre_on(order, w[0], w[1]);
                for (x, wt) in g.iter().zip(&gw) {
                    for phi in [*x, PI - x, -x, -PI + x] {
                        phis.push(phi);
                        weights.push(*wt);
                    }
                }
            }
        } else {
            for w in edges.windows(2) {
                let (s, sw) = gauss_legendre_on(order, w[0].sin(), w[1].sin());
                for (x, wt) in s.iter().zip(&sw) {
                    for sign in [1.0, -1.0] {
                        phis.push((sign * x).asin());
                        weights.push(2.0 * PI * wt);
                    }
                }
            }
        }
        Self {
            dimension,
            phis,
            weights,
        }
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Pointwise evaluator of `h` and `S₀…S₃` for one approximate solution.
pub struct SourceEvaluator<'a> {
    pub approx: &'a ApproximateSolution,
    pub rule: AngularRule,
    /// Step of the fourth-order central difference in `φ`.
    pub delta: f64,
}

impl<'a> SourceEvaluator<'a> {
    pub fn new(approx: &'a ApproximateSolution) -> Self {
        let dim = approx.domain().dimension();
        Self {
            approx,
            rule: AngularRule::collar(dim, approx.eps()),
            delta: 1e-3,
        }
    }

    fn point(&self, side: Side, theta: f64, mu: f64, phi: f64) -> (Vec<f64>, Vec<f64>) {
        let dim = self.approx.domain().dimension();
        let face = self.approx.domain().face(side).expect("face present");
        let r = face.radius_at_depth(mu);
        let a = ordinate_angle(dim, side, phi);
        if dim == 2 {
            let d = theta + a;
            (vec![r * theta.cos(), r * theta.sin()], vec![d.cos(), d.sin()])
        } else {
            (vec![r, 0.0, 0.0], vec![a.cos(), a.sin(), 0.0])
        }
    }

    /// `S₀ = −ε²(w·∇)³U₀` at a Cartesian point.
    pub fn s0(&self, x: &[f64], w: &[f64]) -> f64 {
        let e = self.approx.eps();
        -e * e * self.approx.interior.u0.directional(x, w, 3)
    }

    /// Remainder boundary data `h = g − u_a` at an incoming direction.
    pub fn h(&self, side: Side, theta: f64, phi: f64) -> f64 {
        let (x, w) = self.point(side, theta, 0.0, phi);
        let e = self.approx.eps();
        let u0 = &self.approx.interior.u0;
        let fam = &self.approx.layer.family;
        let (c, _) = theta_weights(fam.face(side).thetas.len(), theta);
        let psi0: f64 = c
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(l, c)| c * fam.psi(side, l, phi, 0.0))
            .sum();
        let a = self.approx.layer.cutoff.angular(grazing_angle(phi), e);
        e * u0.directional(&x, &w, 1) - e * e * u0.directional(&x, &w, 2) + (1.0 - a) * psi0
    }

    /// `h` with the layer switched off entirely: `g − (U₀ + εU₁ + ε²U₂)`.
    pub fn h_without_layer(&self, side: Side, theta: f64, phi: f64) -> f64 {
        let (x, w) = self.point(side, theta, 0.0, phi);
        self.approx.layer.family.data.value(side, theta, phi) - self.approx.interior.composite(&x, &w)
    }

    /// Samples `[phi][mu]` at boundary parameter `theta` of face `side`, for
    /// ascending depths `mus`.
    pub fn block(&self, side: Side, theta: f64, mus: &[f64], phis: &[f64]) -> Vec<Vec<SourceSample>> {
        let ap = self.approx;
        let eps = ap.eps();
        let cut = &ap.layer.cutoff;
        let fam = &ap.layer.family;
        let dim = fam.dimension;
        let face = ap.domain().face(side).expect("face present");
        let fl = fam.face(side);
        let (c, dc) = theta_weights(fl.thetas.len(), theta);
        let etas: Vec<f64> = mus.iter().map(|m| m / eps).collect();
        let nm = mus.len();
        let measure = self.rule.measure();
        let ang: Vec<f64> = phis.iter().map(|p| cut.angular(grazing_angle(*p), eps)).collect();
        let rule_ang: Vec<f64> = self
            .rule
            .phis
            .iter()
            .map(|p| cut.angular(grazing_angle(*p), eps))
            .collect();

        let mut psi = vec![vec![0.0; nm]; phis.len()];
        let mut psi_th = vec![vec![0.0; nm]; phis.len()];
        let mut psi_phi = vec![vec![0.0; nm]; phis.len()];
        let mut bar = vec![0.0; nm];
        let mut bar_solver = vec![0.0; nm];
        let mut avg_a = vec![0.0; nm];
        for l in 0..fl.thetas.len() {
            let (cl, dcl) = (c[l], dc[l]);
            if cl == 0.0 && dcl == 0.0 {
                continue;
            }
            for (ip, &phi) in phis.iter().enumerate() {
                let p = fam.psi_profile(side, l, phi, &etas);
                for m in 0..nm {
                    psi[ip][m] += cl * p[m];
                    psi_th[ip][m] += dcl * p[m];
                }
            }
            if cl == 0.0 {
                continue;
            }
            for (ip, &phi) in phis.iter().enumerate() {
                if ang[ip] == 0.0 {
                    continue;
                }
                let d = self.delta;
                let p2 = fam.psi_profile(side, l, phi + 2.0 * d, &etas);
                let p1 = fam.psi_profile(side, l, phi + d, &etas);
                let m1 = fam.psi_profile(side, l, phi - d, &etas);
                let m2 = fam.psi_profile(side, l, phi - 2.0 * d, &etas);
                for m in 0..nm {
                    psi_phi[ip][m] += cl * (8.0 * (p1[m] - m1[m]) - (p2[m] - m2[m])) / (12.0 * d);
                }
            }
            let sol = &fl.solutions[l];
            for (m, e) in etas.iter().enumerate() {
                bar_solver[m] += cl * (sol.average_at(*e) - sol.phi_inf);
            }
            // both averages on the collar rule, which resolves the grazing set
            for ((phi, w), a) in self.rule.phis.iter().zip(&self.rule.weights).zip(&rule_ang) {
                let p = fam.psi_profile(side, l, *phi, &etas);
                for m in 0..nm {
                    bar[m] += cl * w / measure * p[m];
                    avg_a[m] += cl * w / measure * a * p[m];
                }
            }
        }

        let rs = face.signed_radius();
        let u0 = &ap.interior.u0;
        phis.iter()
            .enumerate()
            .map(|(ip, &phi)| {
                let (sf, cf) = phi.sin_cos();
                let a = ang[ip];
                let a_prime = cut.angular_prime(grazing_angle(phi), eps) * grazing_angle_slope(phi);
                mus.iter()
                    .enumerate()
                    .map(|(m, &mu)| {
                        let (x, w) = self.point(side, theta, mu, phi);
                        let col = cut.collar(mu);
                        let col_prime = cut.collar_prime(mu);
                        let d = rs - mu;
                        let c_phi = -cf / d;
                        let c_theta = if dim == 2 { cf / d } else { 0.0 };
                        let p = psi[ip][m];
                        SourceSample {
                            s0: -eps * eps * u0.directional(&x, &w, 3),
                            s11: if a == 0.0 {
                                0.0
                            } else {
                                -col * c_phi * a * psi_phi[ip][m]
                            },
                            s12: -col * c_phi * a_prime * p,
                            s2: -a * col * c_theta * psi_th[ip][m] - a * sf * col_prime * p,
                            s31: col * (avg_a[m] - bar[m]) / eps,
                            s32: col * (1.0 - a) * bar[m] / eps,
                            s3_defect: col * a * (bar[m] - bar_solver[m]) / eps,
                            ub: a * col * p,
                        }
                    })
                    .collect()
            })
            .collect()
    }
}
