//! Boundary straightening `(x, y) -> (x, y' = y / Y(x))` near the flat part.
//!
//! In straightened coordinates the Laplacian becomes a variable-coefficient
//! operator; conjugating by `Y^{1/2}` gives the operator
//!
//! ```text
//! Δ̃ = ∂x² + ∂y (1 + A)/Y² ∂y − ∂x (B/Y²) ∂y − ∂y (B/Y²) ∂x − Y''/(2Y) + 3 Y'²/(4 Y²)
//! ```
//!
//! with `A = (y' Y')²` and `B = y' Y' Y`, which is symmetric for the flat
//! measure `dx dy'`. This module evaluates those coefficients pointwise,
//! discretizes `Δ̃` on tensor strips, moves fields between the two frames
//! and builds the λ-dependent cutoffs used to localize near the corners.

mod coeffs;
mod conjugate;
mod cutoff;
mod identities;
mod operator;
mod transform;

pub use coeffs::{
    coeffs_at, dx_coefficient_residual, dy_coefficient, dy_coefficient_unsimplified,
    StraightenedCoeffs,
};
pub use conjugate::{conjugate_to_u, conjugate_to_v, interp_linear};
pub use cutoff::{
    heaviside, make_chi, make_psi, make_psi_tilde, ramp, Cutoff, CutoffSpec, BUMP_NORMALIZER,
};
pub use identities::{identity_suite, identity_suite_many, IdentityReport};
pub use operator::{apply_tilde_delta, apply_tilde_delta_raw, strip_grid, StripOperator};
pub use transform::{transform_dx, transform_dxx, StraightJet};
