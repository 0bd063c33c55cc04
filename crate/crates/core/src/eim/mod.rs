//! Equivalent inclusion method: piecewise-constant eigen-fields on a mesh
//! of line elements, a homogeneous comparison medium, and Bloch-periodic
//! boundary conditions.

mod extract;
mod mesh;
mod source;
mod system;

pub use extract::{
    default_source, ensemble_averages, ensemble_effective, ensemble_effective_with_sources,
    extract_effective_pm_zeta, extract_effective_two_sources, kernels_from_pm_zeta, loading_zeta,
    solve_loading, RANK_TOLERANCE, ZETA_EPS,
};
pub use mesh::{EimMesh, Element};
pub use source::{SourceSpec, SourceTerm};
pub use system::{
    assemble_system, cell_averages, evaluate_fields, solve, solve_problem, AverageProvenance,
    CellAverages, EimOptions, EimProblem, EimSolution, EimSystem, FieldSamples, UnknownLayout,
};

#[cfg(test)]
mod tests;
