//! Angular quadrature, boundary charts and the curvilinear form of `w·∇`.

mod angular;
mod chart;
mod domain;
pub mod gauss;

pub use angular::{grazing_angle, grazing_angle_slope, AngularGrid, AngularPoint};
pub use chart::{
    advection_coefficients, chart_at, cross, dot, norm, velocity_from_angles, velocity_substitution,
    AdvectionCoefficients, BoundaryChart, NormalCoordinates, Vec3,
};
pub use domain::{velocity_measure, BoundaryFace, DomainSpec, Side};
