//! Half-space boundary layer: solver, cutoffs, layer field and characteristics.

mod characteristics;
mod cutoff;
mod layer;
mod solver;

pub use characteristics::{
    classify_hollow, conserved_quantity, orbit_touches_boundary, trace_characteristic, trace_characteristic_capped,
    CharacteristicPath, PathExit,
};
pub use cutoff::{chi, chi_prime, chi_tilde, CutoffSpec};
pub use layer::{build_boundary_layer, BoundaryLayerField, FaceLayer, MilneFamily};
pub use solver::{
    cell_update, milne_infinity, solve_milne, solve_milne_direct, EtaMesh, MilneOptions, MilneProblem, MilneSolution,
};
