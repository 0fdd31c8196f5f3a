//! The regularity exponent `s_δ` and log-log exponent fits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Regularity;

/// `s_δ = 1 + max{1/(k+α), (1+δ)/(2(k+α) − 3)} + δ`, defined for `k + α ≥ 2`.
/// `k + α = ∞` (passed as `alpha = f64::INFINITY`) gives the smooth value `1 + δ`.
pub fn compute_s_delta(k: u32, alpha: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Parameter(format!(
            "delta = {delta} must be positive"
        )));
    }
    if alpha.is_nan() || alpha < 0.0 || (alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("alpha = {alpha} not in [0, 1]")));
    }
    s_delta_of_beta(k as f64 + alpha, delta)
}

/// [`compute_s_delta`] as a function of `β = k + α`.
pub fn s_delta_of_beta(beta: f64, delta: f64) -> Result<f64> {
    if !(beta >= 2.0) {
        return Err(Error::Regularity(format!(
            "k + alpha = {beta} < 2 is outside the supported regularity range"
        )));
    }
    let first = 1.0 / beta;
    let second = (1.0 + delta) / (2.0 * beta - 3.0);
    Ok(1.0 + first.max(second) + delta)
}

/// `k + α` at which the two branches of the maximum cross.
pub fn branch_crossing(delta: f64) -> f64 {
    3.0 / (1.0 - delta)
}

/// Ordinary least-squares fit of `log value` against `log λ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr_slope: f64,
    pub n_points: usize,
    pub lambda_range: (f64, f64),
}

pub fn fit_exponent(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "{} points; at least 5 are required",
            points.len()
        )));
    }
    for &(l, v) in points {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Data(format!(
                "nonpositive or non-finite value {v} at lambda = {l}"
            )));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Data(format!("nonpositive lambda {l}")));
        }
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Data("all lambda values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr_slope = (sse / (n - 2.0) / sxx).sqrt();
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(ScalingFit {
        slope,
        intercept,
        stderr_slope,
        n_points: points.len(),
        lambda_range: (lo, hi),
    })
}

/// Lower envelope: the minimum value in each `λ` bin of the given width,
/// reported at the `λ` of the minimizing point, in bin order.
pub fn lower_envelope(points: &[(f64, f64)], bin_width: f64) -> Vec<(f64, f64)> {
    let mut bins: std::collections::BTreeMap<i64, (f64, f64)> = std::collections::BTreeMap::new();
    for &(l, v) in points {
        let key = (l / bin_width).floor() as i64;
        let e = bins.entry(key).or_insert((l, v));
        if v < e.1 || (v == e.1 && l < e.0) {
            *e = (l, v);
        }
    }
    bins.into_values().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum ReportVerdict {
    Pass,
    Fail,
    Info,
    NotApplicable,
}

/// Floor on the wing-mass exponent implied by the regularity class:
/// `−(2 + δ)` for `C^{1,1}` wings (`k + α = 2`), `−s_δ` above, none for
/// 0-Gevrey or absent wings.
pub fn theory_floor(regularity: Regularity, delta: f64) -> Result<Option<f64>> {
    match regularity {
        Regularity::Holder { k, alpha } => {
            let beta = k as f64 + alpha;
            if beta == 2.0 {
                Ok(Some(-(2.0 + delta)))
            } else {
                Ok(Some(-s_delta_of_beta(beta, delta)?))
            }
        }
        Regularity::Gevrey | Regularity::NoWings => Ok(None),
    }
}

/// One named data series of `(λ, value)` points for a profile.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub name: String,
    pub profile: String,
    pub regularity: Regularity,
    pub points: Vec<(f64, f64)>,
}

/// JSON row of the exponent report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentRow {
    pub profile: String,
    pub series: String,
    pub delta: f64,
    pub theory_floor: Option<f64>,
    pub fitted_slope: f64,
    pub stderr: f64,
    pub margin: f64,
    pub verdict: ReportVerdict,
    pub n_modes: usize,
    pub lambda_range: (f64, f64),
}

/// Fits the lower envelope (bin width 1) of each sweep and compares the
/// slope with the theory floor minus `margin`. All sweeps must belong to
/// `profile`.
pub fn exponent_report(
    sweeps: &[Sweep],
    profile: &str,
    delta: f64,
    margin: f64,
) -> Result<Vec<ExponentRow>> {
    let mut rows = Vec::new();
    for s in sweeps {
        if s.profile != profile {
            return Err(Error::Consistency(format!(
                "sweep '{}' belongs to profile '{}', report is for '{profile}'",
                s.name, s.profile
            )));
        }
        let env = lower_envelope(&s.points, 1.0);
        let fit = fit_exponent(&env)?;
        let floor = theory_floor(s.regularity, delta)?;
        let verdict = match (s.regularity, floor) {
            (Regularity::NoWings, _) => ReportVerdict::NotApplicable,
            (_, None) => ReportVerdict::Info,
            (_, Some(f)) if fit.slope >= f - margin => ReportVerdict::Pass,
            _ => ReportVerdict::Fail,
        };
        rows.push(ExponentRow {
            profile: s.profile.clone(),
            series: s.name.clone(),
            delta,
            theory_floor: floor,
            fitted_slope: fit.slope,
            stderr: fit.stderr_slope,
            margin,
            verdict,
            n_modes: s.points.len(),
            lambda_range: fit.lambda_range,
        });
    }
    Ok(rows)
}
