//! Shared fixtures for the benchmarks in `benches/`.

use nte_core::data::BoundaryData;
use nte_core::milne::{EtaMesh, MilneProblem};
use nte_core::quadgeom::{AngularGrid, DomainSpec, Side};
use nte_core::transport::{GridSpec, SolverOptions, TransportProblem};

/// Disk transport problem on a coarse grid.
pub fn disk_problem(eps: f64, options: SolverOptions) -> TransportProblem {
    let spec = GridSpec {
        n_polar: 16,
        finest: 0.25,
        grading: 1.3,
        max_cell: 0.1,
        ..GridSpec::default()
    };
    TransportProblem::new(
        &DomainSpec::Disk { radius: 1.0 },
        eps,
        &BoundaryData::default(),
        &spec,
        options,
    )
    .expect("valid problem")
}

/// Planar half-space problem with cosine inflow.
pub fn milne_problem(n_polar: usize) -> MilneProblem {
    let grid = AngularGrid::new(2, n_polar, 1).expect("grid");
    let data = BoundaryData::default();
    MilneProblem::new(&grid, EtaMesh::default(), |a| data.value(Side::Outer, 0.0, a.phi)).expect("problem")
}
