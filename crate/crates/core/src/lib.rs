#![no_std]

extern crate alloc;

pub mod algebra;
pub mod design;
mod error;
pub mod inverse;
mod linalg;
pub mod verify;

pub use algebra::{builtin_algebra, lie_invariant_directions, verify_closure, Algebra, GeneratorRep, StructureConstants};
pub use design::{
    boundary_invariant_values, design, design_su2, design_u3s3, fit_polynomial, literal_first_violation, literal_min_time_scan, min_time_scan, BoundaryValues, PolynomialAnsatz, Profile,
    ScenarioSpec, ShortcutSolution,
};
pub use error::{Error, Result};
pub use inverse::{build_a_matrix, consistency_residual, gauss_solve, solve_constrained, solve_hamiltonian, spectral_decompose, SpectralData};

pub use nalgebra::{Complex, DMatrix, DVector};

pub type CoeffVector = DVector<f64>;
pub type QuantumState = DVector<Complex<f64>>;
