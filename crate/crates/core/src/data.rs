//! Inflow data families on the incoming boundary.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadgeom::{grazing_angle, Side};

/// Named analytic boundary data `g(θ, φ)`.
///
/// `θ` is the boundary parameter (ignored on balls and shells, whose data
/// must be rotationally symmetric) and `φ` the boundary-adapted polar angle.
/// Families are written in terms of the grazing angle `φ_g = asin(sin φ)` so
/// that the 2D circle and the 3D sphere share one definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum BoundaryData {
    Constant {
        value: f64,
    },
    /// `base + amplitude · cos(kθ) · cos φ_g`
    FourierMode {
        base: f64,
        amplitude: f64,
        mode: u32,
    },
    /// `base + amplitude · cos(kθ) · exp(-(φ_g/width)²)`
    Grazing {
        base: f64,
        amplitude: f64,
        mode: u32,
        width: f64,
    },
    /// `Σ c_n sinⁿφ`, independent of θ.
    SinPolynomial {
        coefficients: Vec<f64>,
    },
    /// Bilinear table over periodic `θ` and `φ_g ∈ [-π/2, π/2]`.
    Tabulated {
        thetas: Vec<f64>,
        phis: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

impl Default for BoundaryData {
    fn default() -> Self {
        BoundaryData::FourierMode {
            base: 1.0,
            amplitude: 0.5,
            mode: 1,
        }
    }
}

impl BoundaryData {
    pub fn validate(&self) -> Result<()> {
        match self {
            BoundaryData::Grazing { width, .. } if !(*width > 0.0) => {
                Err(Error::Config("grazing width must be positive".into()))
            }
            BoundaryData::SinPolynomial { coefficients } if coefficients.is_empty() => {
                Err(Error::Config("sin-polynomial needs at least one coefficient".into()))
            }
            BoundaryData::Tabulated { thetas, phis, values } => {
                if thetas.is_empty() || phis.len() < 2 || values.len() != thetas.len() {
                    return Err(Error::Config("tabulated data shape mismatch".into()));
                }
                if values.iter().any(|row| row.len() != phis.len()) {
                    return Err(Error::Config("tabulated row length mismatch".into()));
                }
                if phis.windows(2).any(|w| w[1] <= w[0]) || thetas.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Config("tabulated axes must be increasing".into()));
                }
                if values.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::Config("tabulated values must be finite".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Whether the data are independent of the boundary parameter.
    pub fn is_symmetric(&self) -> bool {
        match self {
            BoundaryData::Constant { .. } | BoundaryData::SinPolynomial { .. } => true,
            BoundaryData::FourierMode { mode, amplitude, .. } | BoundaryData::Grazing { mode, amplitude, .. } => {
                *mode == 0 || *amplitude == 0.0
            }
            BoundaryData::Tabulated { values, .. } => values.windows(2).all(|w| w[0] == w[1]),
        }
    }

    /// Highest Fourier mode in θ, if finite.
    pub fn max_mode(&self) -> Option<u32> {
        match self {
            BoundaryData::Constant { .. } | BoundaryData::SinPolynomial { .. } => Some(0),
            BoundaryData::FourierMode { mode, .. } | BoundaryData::Grazing { mode, .. } => Some(*mode),
            BoundaryData::Tabulated { .. } => None,
        }
    }

    /// Evaluate `g` on face `side` at boundary parameter `theta`, angle `phi`.
    pub fn value(&self, _side: Side, theta: f64, phi: f64) -> f64 {
        let pg = grazing_angle(phi);
        match self {
            BoundaryData::Constant { value } => *value,
            BoundaryData::FourierMode { base, amplitude, mode } => {
                base + amplitude * (*mode as f64 * theta).cos() * pg.cos()
            }
            BoundaryData::Grazing {
                base,
                amplitude,
                mode,
                width,
            } => base + amplitude * (*mode as f64 * theta).cos() * (-(pg / width).powi(2)).exp(),
            BoundaryData::SinPolynomial { coefficients } => {
                let s = phi.sin();
                coefficients.iter().rev().fold(0.0, |acc, c| acc * s + c)
            }
            BoundaryData::Tabulated { thetas, phis, values } => tabulated(thetas, phis, values, theta, pg),
        }
    }

    pub fn bounds(&self) -> (f64, f64) {
        match self {
            BoundaryData::Constant { value } => (*value, *value),
            BoundaryData::FourierMode { base, amplitude, .. } | BoundaryData::Grazing { base, amplitude, .. } => {
                (base - amplitude.abs(), base + amplitude.abs())
            }
            BoundaryData::SinPolynomial { .. } => {
                let n = 2001;
                let vals: Vec<f64> = (0..n)
                    .map(|i| self.value(Side::Outer, 0.0, -PI / 2.0 + PI * i as f64 / (n - 1) as f64))
                    .collect();
                (
                    vals.iter().copied().fold(f64::INFINITY, f64::min),
                    vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                )
            }
            BoundaryData::Tabulated { values, .. } => {
                let flat = values.iter().flatten().copied();
                (
                    flat.clone().fold(f64::INFINITY, f64::min),
                    flat.fold(f64::NEG_INFINITY, f64::max),
                )
            }
        }
    }
}

fn tabulated(thetas: &[f64], phis: &[f64], values: &[Vec<f64>], theta: f64, pg: f64) -> f64 {
    let interp_row = |row: &[f64]| -> f64 {
        let p = pg.clamp(phis[0], phis[phis.len() - 1]);
        let j = match phis.iter().position(|&x| x >= p) {
            Some(0) => 1,
            Some(j) => j,
            None => phis.len() - 1,
        };
        let t = (p - phis[j - 1]) / (phis[j] - phis[j - 1]);
        row[j - 1] * (1.0 - t) + row[j] * t
    };
    if thetas.len() == 1 {
        return interp_row(&values[0]);
    }
    let two_pi = 2.0 * PI;
    let th = (theta - thetas[0]).rem_euclid(two_pi) + thetas[0];
    let n = thetas.len();
    let (i0, i1, t) = match thetas.iter().position(|&x| x > th) {
        Some(0) => (n - 1, 0, 1.0),
        Some(i) => (i - 1, i, (th - thetas[i - 1]) / (thetas[i] - thetas[i - 1])),
        None => {
            let span = thetas[0] + two_pi - thetas[n - 1];
            (n - 1, 0, (th - thetas[n - 1]) / span)
        }
    };
    interp_row(&values[i0]) * (1.0 - t) + interp_row(&values[i1]) * t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_family_is_even_in_grazing_angle() {
        let g = BoundaryData::default();
        for phi in [0.3, 1.2, 2.5] {
            let a = g.value(Side::Outer, 0.7, phi);
            let b = g.value(Side::Outer, 0.7, PI - phi);
            assert!((a - b).abs() < 1e-14);
        }
        assert!((g.value(Side::Outer, 0.0, 0.0) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn tabulated_reproduces_nodes_and_is_periodic() {
        let thetas = vec![0.0, PI / 2.0, PI, 1.5 * PI];
        let phis = vec![-PI / 2.0, 0.0, PI / 2.0];
        let values = vec![
            vec![1.0, 2.0, 3.0],
            vec![0.0, 1.0, 0.0],
            vec![5.0, 5.0, 5.0],
            vec![2.0, 2.0, 2.0],
        ];
        let g = BoundaryData::Tabulated { thetas, phis, values };
        g.validate().unwrap();
        assert!((g.value(Side::Outer, PI, 0.3) - 5.0).abs() < 1e-14);
        assert!((g.value(Side::Outer, 0.0, 0.0) - 2.0).abs() < 1e-14);
        assert!((g.value(Side::Outer, 2.0 * PI, 0.0) - 2.0).abs() < 1e-14);
        // halfway between 1.5π (2.0) and 2π (row 0 at φ=0 → 2.0)
        assert!((g.value(Side::Outer, 1.75 * PI, -PI / 4.0) - 1.75).abs() < 1e-14);
    }

    #[test]
    fn bounds_contain_samples() {
        let g = BoundaryData::SinPolynomial {
            coefficients: vec![0.5, 1.0, -0.25],
        };
        let (lo, hi) = g.bounds();
        for i in 0..100 {
            let v = g.value(Side::Outer, 0.0, -PI + 2.0 * PI * i as f64 / 100.0);
            assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
        }
    }
}
