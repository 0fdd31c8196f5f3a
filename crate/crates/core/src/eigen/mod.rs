//! Dirichlet eigenpairs of the Laplacian on the physical domain.
//!
//! The domain is embedded in a Cartesian grid with nodes at integer
//! multiples of `h`; boundary arms use symmetric Shortley–Weller cut cells.
//! Reflection symmetries split the operator into independent sectors, and
//! each sector is solved by shift-and-invert Lanczos on windows whose exact
//! eigenvalue counts come from the inertia of sparse `L D Lᵀ` factors.

mod assemble;
mod grid;
mod io;
mod lanczos;
mod window;

pub use assemble::{assemble, sectors, Operator, Parity, Sector, SectorOperator};
pub use grid::{aligned_spacing, Grid};
pub use io::{read_field, write_field};
pub use window::{
    eigenvalue_count, field_residual, residual_check, solve_window, weyl_count, EigenPair,
    SolveOptions, WindowSolution,
};
