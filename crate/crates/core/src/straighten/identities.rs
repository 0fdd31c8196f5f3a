//! Randomized check of the pointwise identities of the straightened metric.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::geometry::{DomainProfile, WingKind};

use super::coeffs::{
    coeffs_at, dx_coefficient_residual, dy_coefficient, dy_coefficient_unsimplified,
};

/// Worst observed deviation of each identity.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IdentityReport {
    pub samples: usize,
    /// `max |det g − Y²| / Y²`.
    pub det_rel: f64,
    /// `max |Y'/Y − Y^{-1} ∂y(B/Y)|`.
    pub dx_residual: f64,
    /// `max |simplified − unsimplified| / max(1, |simplified|)`.
    pub dy_mismatch: f64,
}

impl IdentityReport {
    /// Tolerances: `1e-13`, `1e-12`, `1e-10`.
    pub fn passes(&self) -> bool {
        self.det_rel <= 1e-13 && self.dx_residual <= 1e-12 && self.dy_mismatch <= 1e-10
    }

    fn absorb(&mut self, other: &IdentityReport) {
        self.samples += other.samples;
        self.det_rel = self.det_rel.max(other.det_rel);
        self.dx_residual = self.dx_residual.max(other.dx_residual);
        self.dy_mismatch = self.dy_mismatch.max(other.dy_mismatch);
    }
}

/// Largest `|x|` sampled: pinching wings stop at 95% of the way to the tip.
fn x_reach(profile: &DomainProfile) -> f64 {
    let closes = |w: &crate::geometry::WingProfile| {
        w.kind != WingKind::Flat && w.sign == crate::geometry::WingSign::ClosesInward
    };
    if closes(&profile.left_wing) || closes(&profile.right_wing) {
        profile.a + 0.95 * (profile.x_extent - profile.a)
    } else {
        profile.x_extent
    }
}

/// Samples `n` points `(x, y')` uniformly in `[-reach, reach] × [-1, 1]`.
pub fn identity_suite(profile: &DomainProfile, n: usize, seed: u64) -> Result<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reach = x_reach(profile);
    let mut rep = IdentityReport {
        samples: n,
        ..Default::default()
    };
    for _ in 0..n {
        let x = reach * (2.0 * rng.random::<f64>() - 1.0);
        let yp = 2.0 * rng.random::<f64>() - 1.0;
        let c = coeffs_at(profile, x, yp)?;
        let w2 = c.width * c.width;
        rep.det_rel = rep.det_rel.max((c.det_g - w2).abs() / w2);
        rep.dx_residual = rep
            .dx_residual
            .max(dx_coefficient_residual(profile, x, yp)?.abs());
        let s = dy_coefficient(profile, x, yp)?;
        let u = dy_coefficient_unsimplified(profile, x, yp)?;
        rep.dy_mismatch = rep.dy_mismatch.max((s - u).abs() / s.abs().max(1.0));
    }
    Ok(rep)
}

/// Runs [`identity_suite`] over several profiles, splitting `total` samples
/// evenly, and merges the reports.
pub fn identity_suite_many(
    profiles: &[DomainProfile],
    total: usize,
    seed: u64,
) -> Result<IdentityReport> {
    let mut rep = IdentityReport::default();
    let per = total.div_ceil(profiles.len().max(1));
    for (k, p) in profiles.iter().enumerate() {
        rep.absorb(&identity_suite(p, per, seed.wrapping_add(k as u64))?);
    }
    Ok(rep)
}
