use serde::{Deserialize, Serialize};

fn bump(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

fn bump_prime(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp() / (t * t)
    }
}

/// Smooth cutoff: 1 on `|y| ≤ 1`, 0 on `|y| ≥ 2`.
pub fn chi(y: f64) -> f64 {
    let t = 2.0 - y.abs();
    if t >= 1.0 {
        return 1.0;
    }
    if t <= 0.0 {
        return 0.0;
    }
    let a = bump(t);
    a / (a + bump(1.0 - t))
}

pub fn chi_tilde(y: f64) -> f64 {
    1.0 - chi(y)
}

/// Derivative of [`chi`].
pub fn chi_prime(y: f64) -> f64 {
    let t = 2.0 - y.abs();
    if !(0.0 < t && t < 1.0) {
        return 0.0;
    }
    let (a, b) = (bump(t), bump(1.0 - t));
    let (da, db) = (bump_prime(t), bump_prime(1.0 - t));
    // d/dt [a/(a+b)] with b depending on 1-t, then dt/dy = -sign(y)
    let dchi_dt = (da * b + a * db) / (a + b).powi(2);
    -y.signum() * dchi_dt
}

/// Cutoff parameters for the boundary layer.
///
/// The angular cutoff is `χ̃(φ_g/ε)`. The collar cutoff is `χ(μ/collar_scale)`
/// with `μ = εη` the physical distance to the face; `collar_scale = 1` is the
/// plain `χ(εη)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub collar_scale: f64,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        Self { collar_scale: 1.0 }
    }
}

impl CutoffSpec {
    /// Collar scale that keeps the layer support inside `room` (the disk
    /// radius or annulus gap).
    pub fn fitted(room: f64) -> Self {
        Self {
            collar_scale: 0.25 * room,
        }
    }

    pub fn collar(&self, mu: f64) -> f64 {
        chi(mu / self.collar_scale)
    }

    pub fn collar_prime(&self, mu: f64) -> f64 {
        chi_prime(mu / self.collar_scale) / self.collar_scale
    }

    /// Largest distance at which the collar cutoff is non-zero.
    pub fn collar_extent(&self) -> f64 {
        2.0 * self.collar_scale
    }

    pub fn angular(&self, grazing: f64, eps: f64) -> f64 {
        chi_tilde(grazing / eps)
    }

    /// Derivative of [`CutoffSpec::angular`] with respect to the grazing angle.
    pub fn angular_prime(&self, grazing: f64, eps: f64) -> f64 {
        -chi_prime(grazing / eps) / eps
    }
}
