use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{CornerSide, DomainProfile, ProfileJet};

/// Pointwise coefficients of the straightened, conjugated Laplacian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StraightenedCoeffs {
    pub x: f64,
    pub y_prime: f64,
    pub width: f64,
    pub width_d1: f64,
    pub width_d2: f64,
    /// `A = (y' Y')²`
    pub stretch: f64,
    /// `B = y' Y' Y`
    pub shear: f64,
    /// Pulled-back metric `[[1 + A, B], [B, Y²]]`.
    pub metric: [[f64; 2]; 2],
    /// Explicit 2×2 determinant of `metric`; equals `Y²`.
    pub det_g: f64,
    pub inv_metric: [[f64; 2]; 2],
    /// `−Y''/(2Y) + 3Y'²/(4Y²)`
    pub potential: f64,
    /// `(1 + A)/Y²`
    pub c_yy: f64,
    /// `B/Y²`
    pub c_mix: f64,
}

pub(crate) fn jet_with_curvature(profile: &DomainProfile, x: f64) -> Result<(ProfileJet, f64)> {
    let jet = profile.jet(x, CornerSide::Wing)?;
    let ypp = jet
        .ypp
        .ok_or_else(|| Error::Regularity(format!("Y'' unavailable at x = {x}")))?;
    Ok((jet, ypp))
}

fn check_y(y_prime: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&y_prime) {
        return Err(Error::Parameter(format!("y' = {y_prime} outside [-1, 1]")));
    }
    Ok(())
}

/// Coefficients at `(x, y')`. At the corners the wing-side limit of `Y''`
/// is used.
pub fn coeffs_at(profile: &DomainProfile, x: f64, y_prime: f64) -> Result<StraightenedCoeffs> {
    check_y(y_prime)?;
    let (jet, ypp) = jet_with_curvature(profile, x)?;
    let (w, w1) = (jet.y, jet.yp);
    let stretch = (y_prime * w1).powi(2);
    let shear = y_prime * w1 * w;
    let metric = [[1.0 + stretch, shear], [shear, w * w]];
    let det_g = metric[0][0] * metric[1][1] - metric[0][1] * metric[1][0];
    let w2 = w * w;
    let inv_metric = [[1.0, -shear / w2], [-shear / w2, (1.0 + stretch) / w2]];
    Ok(StraightenedCoeffs {
        x,
        y_prime,
        width: w,
        width_d1: w1,
        width_d2: ypp,
        stretch,
        shear,
        metric,
        det_g,
        inv_metric,
        potential: -0.5 * ypp / w + 0.75 * w1 * w1 / w2,
        c_yy: (1.0 + stretch) / w2,
        c_mix: shear / w2,
    })
}

/// Coefficient of `∂x` in the straightened Laplace–Beltrami operator,
/// `Y'/Y − Y^{-1} ∂y(B/Y)`, which cancels because `Y` is independent of `y'`.
pub fn dx_coefficient_residual(profile: &DomainProfile, x: f64, y_prime: f64) -> Result<f64> {
    check_y(y_prime)?;
    let jet = profile.jet(x, CornerSide::Wing)?;
    if jet.y <= 0.0 {
        return Err(Error::Degenerate(format!("Y = 0 at x = {x}")));
    }
    // ∂y B = Y' Y, and Y does not depend on y'.
    let d_shear_dy = jet.yp * jet.y;
    Ok(jet.yp / jet.y - (d_shear_dy / jet.y) / jet.y)
}

/// Simplified `∂y` coefficient `−y' Y (Y'/Y²)_x`.
pub fn dy_coefficient(profile: &DomainProfile, x: f64, y_prime: f64) -> Result<f64> {
    check_y(y_prime)?;
    let (jet, ypp) = jet_with_curvature(profile, x)?;
    let (w, w1) = (jet.y, jet.yp);
    let d_ratio = ypp / (w * w) - 2.0 * w1 * w1 / (w * w * w);
    Ok(-y_prime * w * d_ratio)
}

/// Unsimplified `∂y` coefficient `Y^{-1}(−(B/Y)_x + ((1 + A)/Y)_y)`, with
/// `(B/Y)_x` expanded by the quotient rule.
pub fn dy_coefficient_unsimplified(profile: &DomainProfile, x: f64, y_prime: f64) -> Result<f64> {
    check_y(y_prime)?;
    let (jet, ypp) = jet_with_curvature(profile, x)?;
    let (w, w1) = (jet.y, jet.yp);
    let shear = y_prime * w1 * w;
    let shear_x = y_prime * (ypp * w + w1 * w1);
    let ratio_x = shear_x / w - shear * w1 / (w * w);
    let stretch_y = 2.0 * y_prime * w1 * w1;
    Ok((-ratio_x + stretch_y / w) / w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{WingProfile, WingSign};
    use std::f64::consts::PI;

    #[test]
    fn rectangle_region() {
        let p = DomainProfile::stadium(1.0);
        let c = coeffs_at(&p, 0.0, 0.5).unwrap();
        assert_eq!((c.stretch, c.shear, c.potential), (0.0, 0.0, 0.0));
        assert_eq!(c.det_g, PI * PI);
        assert_eq!(dx_coefficient_residual(&p, 0.0, 0.2).unwrap(), 0.0);
        assert_eq!(dy_coefficient(&p, 0.0, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn power_wing_point() {
        let p = DomainProfile::symmetric(
            1.0,
            PI,
            WingProfile::power_law(2, 0.0, 1.0, WingSign::OpensOutward),
            Some(2.0),
        )
        .unwrap();
        let c = coeffs_at(&p, 1.1, 1.0).unwrap();
        assert!((c.stretch - 0.04).abs() < 1e-15);
        assert!((c.shear - 0.2 * (PI + 0.01)).abs() < 1e-14);
        let (w, w1, w2) = (PI + 0.01, 0.2, 2.0);
        let expected = -w * (w2 / (w * w) - 2.0 * w1 * w1 / (w * w * w));
        assert!((dy_coefficient(&p, 1.1, 1.0).unwrap() - expected).abs() < 1e-14);
        assert!((dy_coefficient_unsimplified(&p, 1.1, 1.0).unwrap() - expected).abs() < 1e-12);
        assert_eq!(dy_coefficient(&p, 1.1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn stadium_wing_determinant_and_inverse() {
        let p = DomainProfile::stadium(1.0);
        let c = coeffs_at(&p, -1.5, 0.3).unwrap();
        let y = p.eval_y(-1.5).unwrap();
        assert!((c.det_g - y * y).abs() <= 1e-13 * y * y);
        for r in 0..2 {
            for s in 0..2 {
                let e: f64 = (0..2).map(|k| c.inv_metric[r][k] * c.metric[k][s]).sum();
                assert!((e - if r == s { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert!(dx_coefficient_residual(&p, -1.4, 0.7).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn errors() {
        let p = DomainProfile::stadium(1.0);
        assert!(matches!(
            coeffs_at(&p, -1.0 - PI, 0.0),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(coeffs_at(&p, 0.0, 1.5), Err(Error::Parameter(_))));
        let rough = DomainProfile::symmetric(
            1.0,
            PI,
            WingProfile::power_law(1, 0.5, 1.0, WingSign::ClosesInward),
            Some(1.5),
        )
        .unwrap();
        assert!(matches!(
            coeffs_at(&rough, 1.0, 0.2),
            Err(Error::Regularity(_))
        ));
    }
}
