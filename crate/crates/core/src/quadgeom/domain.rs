use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the four analytic domains the laboratory supports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainSpec {
    Disk { radius: f64 },
    Annulus { inner: f64, outer: f64 },
    Ball { radius: f64 },
    Shell { inner: f64, outer: f64 },
}

/// Which boundary component a face is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Outer,
    Inner,
}

/// A circular or spherical boundary component.
///
/// The signed radius is `+R` on an outer face and `-a` on an inner face, so
/// that `signed_radius - mu` is the curvature denominator on both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFace {
    pub side: Side,
    pub radius: f64,
}

impl BoundaryFace {
    pub fn signed_radius(&self) -> f64 {
        match self.side {
            Side::Outer => self.radius,
            Side::Inner => -self.radius,
        }
    }

    pub fn curvature(&self) -> f64 {
        1.0 / self.signed_radius()
    }

    /// Radial coordinate of the point at normal distance `mu` from this face.
    pub fn radius_at_depth(&self, mu: f64) -> f64 {
        match self.side {
            Side::Outer => self.radius - mu,
            Side::Inner => self.radius + mu,
        }
    }

    /// Normal distance from this face of a point at radius `r`.
    pub fn depth_of(&self, r: f64) -> f64 {
        match self.side {
            Side::Outer => self.radius - r,
            Side::Inner => r - self.radius,
        }
    }

    /// Convexity sign used by the characteristic tracer: +1 convex, -1 non-convex.
    pub fn convexity_sign(&self) -> f64 {
        match self.side {
            Side::Outer => 1.0,
            Side::Inner => -1.0,
        }
    }
}

impl DomainSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DomainSpec::Disk { radius } | DomainSpec::Ball { radius } => {
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(Error::Config(format!("radius must be positive, got {radius}")));
                }
            }
            DomainSpec::Annulus { inner, outer } | DomainSpec::Shell { inner, outer } => {
                if !(inner > 0.0 && inner < outer && outer.is_finite()) {
                    return Err(Error::Config(format!(
                        "need 0 < inner < outer, got inner={inner} outer={outer}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_convex(&self) -> bool {
        matches!(self, DomainSpec::Disk { .. } | DomainSpec::Ball { .. })
    }

    pub fn dimension(&self) -> usize {
        match self {
            DomainSpec::Disk { .. } | DomainSpec::Annulus { .. } => 2,
            DomainSpec::Ball { .. } | DomainSpec::Shell { .. } => 3,
        }
    }

    pub fn outer_radius(&self) -> f64 {
        match *self {
            DomainSpec::Disk { radius } | DomainSpec::Ball { radius } => radius,
            DomainSpec::Annulus { outer, .. } | DomainSpec::Shell { outer, .. } => outer,
        }
    }

    /// Inner radius, or 0 for the simply connected domains.
    pub fn inner_radius(&self) -> f64 {
        match *self {
            DomainSpec::Disk { .. } | DomainSpec::Ball { .. } => 0.0,
            DomainSpec::Annulus { inner, .. } | DomainSpec::Shell { inner, .. } => inner,
        }
    }

    pub fn has_inner_boundary(&self) -> bool {
        !self.is_convex()
    }

    /// Boundary faces, outer first.
    pub fn faces(&self) -> Vec<BoundaryFace> {
        let mut faces = vec![BoundaryFace {
            side: Side::Outer,
            radius: self.outer_radius(),
        }];
        if self.has_inner_boundary() {
            faces.push(BoundaryFace {
                side: Side::Inner,
                radius: self.inner_radius(),
            });
        }
        faces
    }

    pub fn face(&self, side: Side) -> Option<BoundaryFace> {
        self.faces().into_iter().find(|f| f.side == side)
    }

    /// Smallest radial extent available to a boundary collar: the disk/ball
    /// radius, or the gap of an annulus/shell.
    pub fn collar_room(&self) -> f64 {
        self.outer_radius() - self.inner_radius()
    }

    /// Total measure of the velocity sphere (4π) or circle (2π).
    pub fn velocity_measure(&self) -> f64 {
        velocity_measure(self.dimension())
    }

    /// Lebesgue measure of the domain.
    pub fn volume(&self) -> f64 {
        let (a, b) = (self.inner_radius(), self.outer_radius());
        match self.dimension() {
            2 => std::f64::consts::PI * (b * b - a * a),
            _ => 4.0 / 3.0 * std::f64::consts::PI * (b.powi(3) - a.powi(3)),
        }
    }
}

pub fn velocity_measure(dimension: usize) -> f64 {
    if dimension == 2 {
        2.0 * std::f64::consts::PI
    } else {
        4.0 * std::f64::consts::PI
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convexity() {
        assert!(DomainSpec::Disk { radius: 1.0 }.is_convex());
        assert!(DomainSpec::Ball { radius: 1.0 }.is_convex());
        assert!(!DomainSpec::Annulus { inner: 1.0, outer: 2.0 }.is_convex());
        assert!(!DomainSpec::Shell { inner: 1.0, outer: 2.0 }.is_convex());
    }

    #[test]
    fn rejects_bad_radii() {
        assert!(DomainSpec::Disk { radius: 0.0 }.validate().is_err());
        assert!(DomainSpec::Annulus { inner: 2.0, outer: 1.0 }.validate().is_err());
        assert!(DomainSpec::Shell { inner: 0.0, outer: 1.0 }.validate().is_err());
    }

    #[test]
    fn inner_face_has_negative_curvature() {
        let d = DomainSpec::Annulus { inner: 1.0, outer: 2.0 };
        let inner = d.face(Side::Inner).unwrap();
        assert_eq!(inner.curvature(), -1.0);
        assert_eq!(inner.radius_at_depth(0.25), 1.25);
    }
}
