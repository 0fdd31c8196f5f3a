//! Physical derivatives of `u = Y^{-1/2} v(x, y/Y)` from straightened jets.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{CornerSide, DomainProfile};

use super::coeffs::jet_with_curvature;

/// Value and derivatives of `v` at one straightened point `(x, y')`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StraightJet {
    pub v: f64,
    pub v_x: f64,
    pub v_y: f64,
    pub v_xx: f64,
    pub v_xy: f64,
    pub v_yy: f64,
}

/// `u_x = −½ Y' Y^{-3/2} v + Y^{-1/2} (v_x − v_y y' Y'/Y)`.
pub fn transform_dx(
    profile: &DomainProfile,
    x: f64,
    y_prime: f64,
    jet: &StraightJet,
) -> Result<f64> {
    let j = profile.jet(x, CornerSide::Wing)?;
    let (w, w1) = (j.y, j.yp);
    let s = w.sqrt();
    Ok(-0.5 * w1 / (w * s) * jet.v + (jet.v_x - jet.v_y * y_prime * w1 / w) / s)
}

/// `u_xx` by the chain rule, including the term `y'(2Y'² − Y Y'') Y^{-5/2} v_y`
/// produced by differentiating `y'(x, y) = y/Y(x)` inside `v_y`.
pub fn transform_dxx(
    profile: &DomainProfile,
    x: f64,
    y_prime: f64,
    jet: &StraightJet,
) -> Result<f64> {
    let (j, w2) = jet_with_curvature(profile, x)?;
    let (w, w1) = (j.y, j.yp);
    let s = w.sqrt();
    let k = y_prime * w1 / w;
    let potential = (-0.5 * w2 / w + 0.75 * w1 * w1 / (w * w)) / s;
    let first = -w1 / (w * s) * (jet.v_x - jet.v_y * k);
    let second = (jet.v_xx - 2.0 * jet.v_xy * k + jet.v_yy * k * k) / s;
    let drift = y_prime * (2.0 * w1 * w1 - w * w2) / (w * w * s) * jet.v_y;
    Ok(potential * jet.v + first + second + drift)
}
