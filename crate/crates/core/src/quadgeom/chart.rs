use serde::{Deserialize, Serialize};

use super::angular::AngularPoint;
use super::domain::{DomainSpec, Side};
use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

const ON_BOUNDARY_TOL: f64 = 1e-9;

/// Principal-direction frame at a boundary point.
///
/// Curvatures are signed: positive on convex faces, negative on the inner
/// face of an annulus or shell, so every curvature denominator has the form
/// `R_i - εη` with `R_i = 1/κ_i`. In 2D only the second direction exists
/// (`tangents[1]`, `lengths[1]`, `curvatures[1]`); the first slot is unused.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryChart {
    pub dimension: usize,
    pub side: Side,
    pub point: Vec3,
    pub iota: [f64; 2],
    pub normal: Vec3,
    pub tangents: [Vec3; 2],
    pub lengths: [f64; 2],
    pub curvatures: [f64; 2],
    /// `ς₁·(ς₂×(∂₁₂r×ς₂))` and `ς₂·(ς₁×(∂₁₂r×ς₁))` for the ψ-coefficient.
    pub twist: [f64; 2],
}

impl BoundaryChart {
    pub fn curvature_radii(&self) -> [f64; 2] {
        [1.0 / self.curvatures[0], 1.0 / self.curvatures[1]]
    }
}

/// Normal chart coordinates of an interior point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalCoordinates {
    pub mu: f64,
    pub eta: f64,
    pub chart: BoundaryChart,
}

impl NormalCoordinates {
    pub fn new(mu: f64, eps: f64, chart: BoundaryChart) -> Result<Self> {
        if mu < 0.0 || eps <= 0.0 {
            return Err(Error::Domain(format!(
                "need mu >= 0 and eps > 0, got mu={mu} eps={eps}"
            )));
        }
        Ok(Self {
            mu,
            eta: mu / eps,
            chart,
        })
    }
}

/// Build the boundary chart at a point of ∂Ω.
pub fn chart_at(domain: &DomainSpec, point: Vec3) -> Result<BoundaryChart> {
    domain.validate()?;
    let dim = domain.dimension();
    if dim == 2 && point[2].abs() > ON_BOUNDARY_TOL {
        return Err(Error::Domain("2D boundary point must have z = 0".into()));
    }
    let r = norm(point);
    let face = domain
        .faces()
        .into_iter()
        .find(|f| (r - f.radius).abs() <= ON_BOUNDARY_TOL * f.radius.max(1.0))
        .ok_or_else(|| Error::Domain(format!("point at radius {r} is not on the boundary")))?;
    let e_r = scale(point, 1.0 / r);
    let sign = match face.side {
        Side::Outer => 1.0,
        Side::Inner => -1.0,
    };
    let normal = scale(e_r, sign);
    let kappa = face.curvature();

    if dim == 2 {
        let theta = point[1].atan2(point[0]);
        // ς is the normal rotated by +90°.
        let tangent = [-normal[1], normal[0], 0.0];
        let iota = sign * face.radius * theta;
        return Ok(BoundaryChart {
            dimension: 2,
            side: face.side,
            point,
            iota: [0.0, iota],
            normal,
            tangents: [[0.0; 3], tangent],
            lengths: [1.0, 1.0],
            curvatures: [kappa, kappa],
            twist: [0.0, 0.0],
        });
    }

    // Spherical coordinates about whichever axis is least aligned with the
    // point, so the chart never sits on a pole.
    let axes = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
    let axis = *axes
        .iter()
        .min_by(|a, b| dot(**a, e_r).abs().total_cmp(&dot(**b, e_r).abs()))
        .unwrap();
    let helper = if axis[2] == 1.0 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let e1 = {
        let c = cross(helper, axis);
        scale(c, 1.0 / norm(c))
    };
    let e1 = cross(e1, axis);
    let e1 = scale(e1, 1.0 / norm(e1));
    let e2 = cross(axis, e1);
    let (x, y, z) = (dot(e_r, e1), dot(e_r, e2), dot(e_r, axis));
    let vartheta = z.clamp(-1.0, 1.0).acos();
    let varphi = y.atan2(x);
    let (st, ct) = vartheta.sin_cos();
    let (sp, cp) = varphi.sin_cos();
    let rho = face.radius;
    let frame = |a: f64, b: f64, c: f64| add(add(scale(e1, a), scale(e2, b)), scale(axis, c));
    let e_theta = frame(ct * cp, ct * sp, -st);
    let e_phi = frame(-sp, cp, 0.0);
    let r12 = scale(e_phi, rho * ct);
    let t1 = dot(e_theta, cross(e_phi, cross(r12, e_phi)));
    let t2 = dot(e_phi, cross(e_theta, cross(r12, e_theta)));
    Ok(BoundaryChart {
        dimension: 3,
        side: face.side,
        point,
        iota: [vartheta, varphi],
        normal,
        tangents: [e_theta, e_phi],
        lengths: [rho, rho * st],
        curvatures: [kappa, kappa],
        twist: [t1, t2],
    })
}

/// Map a unit velocity to boundary-adapted angles.
pub fn velocity_substitution(w: Vec3, chart: &BoundaryChart) -> Result<AngularPoint> {
    let len = norm(w);
    if (len - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("velocity must be a unit vector, |w| = {len}")));
    }
    let s = -dot(w, chart.normal);
    if chart.dimension == 2 {
        let c = dot(w, chart.tangents[1]);
        return Ok(AngularPoint::planar(s.atan2(c)));
    }
    let a = dot(w, chart.tangents[0]);
    let b = dot(w, chart.tangents[1]);
    let phi = s.atan2((a * a + b * b).sqrt());
    let psi = a.atan2(b);
    Ok(AngularPoint::spatial(phi, psi))
}

/// Inverse of [`velocity_substitution`].
pub fn velocity_from_angles(p: &AngularPoint, chart: &BoundaryChart) -> Vec3 {
    let (sf, cf) = p.phi.sin_cos();
    let mut w = scale(chart.normal, -sf);
    match p.psi {
        Some(psi) if chart.dimension == 3 => {
            let (sp, cp) = psi.sin_cos();
            w = add(w, scale(chart.tangents[0], cf * sp));
            w = add(w, scale(chart.tangents[1], cf * cp));
        }
        _ => {
            w = add(w, scale(chart.tangents[1], cf));
        }
    }
    w
}

/// Coefficients of the transport operator written in (η, φ, ι₁, ι₂, ψ).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AdvectionCoefficients {
    pub c_eta: f64,
    pub c_phi: f64,
    pub c_iota1: f64,
    pub c_iota2: f64,
    pub c_psi: f64,
}

pub fn advection_coefficients(
    chart: &BoundaryChart,
    eta: f64,
    eps: f64,
    angles: &AngularPoint,
) -> Result<AdvectionCoefficients> {
    if eps <= 0.0 {
        return Err(Error::Config(format!("eps must be positive, got {eps}")));
    }
    let mu = eps * eta;
    let [r1, r2] = chart.curvature_radii();
    let d1 = r1 - mu;
    let d2 = r2 - mu;
    for (r, d) in [(r1, d1), (r2, d2)] {
        if d / r <= 1e-14 {
            return Err(Error::SingularChart { denominator: d, eta });
        }
    }
    let (sf, cf) = angles.phi.sin_cos();
    let c_eta = sf / eps;
    if chart.dimension == 2 {
        return Ok(AdvectionCoefficients {
            c_eta,
            c_phi: -cf / d2,
            c_iota1: 0.0,
            c_iota2: r2 * cf / (chart.lengths[1] * d2),
            c_psi: 0.0,
        });
    }
    let psi = angles.psi.unwrap_or(0.0);
    let (sp, cp) = psi.sin_cos();
    let [l1, l2] = chart.lengths;
    let [t1, t2] = chart.twist;
    Ok(AdvectionCoefficients {
        c_eta,
        c_phi: -(sp * sp / d1 + cp * cp / d2) * cf,
        c_iota1: r1 * cf * sp / (l1 * d1),
        c_iota2: r2 * cf * cp / (l2 * d2),
        c_psi: sp / d1 * (r1 * cf / (l1 * l2) * t1 - sf * cp) - cp / d2 * (r2 * cf / (l1 * l2) * t2 - sf * sp),
    })
}
