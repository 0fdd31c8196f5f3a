//! Partially rectangular domains `{(x, y) : |y| < Y(x)}`.
//!
//! The width function is `Y(x) = half_width + r(x)` where `r` vanishes on the
//! flat part `[-a, a]` and follows one of a few analytic wing families beyond
//! it. Everything here is a pure function of immutable data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Analytic family of a single wing, parametrised by the distance
/// `t = ±x - a >= 0` into the wing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WingKind {
    /// Quarter circle of radius `half_width`: `r = (w^2 - t^2)^{1/2} - w`.
    Stadium,
    /// `r = ±|coeff| t^{k + alpha}`.
    PowerLaw { k: u32, alpha: f64, coeff: f64 },
    /// `r = ±|coeff| exp(-t^{-tau})`, flat to infinite order at the corner.
    Gevrey0 { tau: f64, coeff: f64 },
    /// `r ≡ 0`: the rectangle simply continues.
    Flat,
}

/// Whether the wing widens (`r > 0`) or narrows (`r < 0`) away from the
/// rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WingSign {
    OpensOutward,
    ClosesInward,
}

impl WingSign {
    fn factor(self) -> f64 {
        match self {
            WingSign::OpensOutward => 1.0,
            WingSign::ClosesInward => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WingProfile {
    pub kind: WingKind,
    pub sign: WingSign,
}

/// Which one-sided limit to report exactly at the corners `x = ±a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CornerSide {
    Wing,
    Rectangle,
}

/// Hölder class of the boundary, used for the exponent `s_δ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Regularity {
    /// `C^{k,alpha}` with `k + alpha >= 2`.
    Holder { k: u32, alpha: f64 },
    /// Infinitely flat at the corner (0-Gevrey wings); no polynomial floor.
    Gevrey,
    /// No wings at all.
    NoWings,
}

/// `Y` and its first two derivatives at a point. `ypp` is `None` where the
/// second derivative does not exist.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileJet {
    pub y: f64,
    pub yp: f64,
    pub ypp: Option<f64>,
}

impl WingProfile {
    /// Short stable identifier, e.g. `power-k2-a0.5-c1-in`.
    pub fn label(&self) -> String {
        let dir = match self.sign {
            WingSign::OpensOutward => "out",
            WingSign::ClosesInward => "in",
        };
        match self.kind {
            WingKind::Stadium => "stadium".into(),
            WingKind::Flat => "flat".into(),
            WingKind::PowerLaw { k, alpha, coeff } => {
                format!("power-k{k}-a{alpha}-c{}-{dir}", coeff.abs())
            }
            WingKind::Gevrey0 { tau, coeff } => format!("gevrey-t{tau}-c{}-{dir}", coeff.abs()),
        }
    }

    pub fn stadium() -> Self {
        WingProfile {
            kind: WingKind::Stadium,
            sign: WingSign::ClosesInward,
        }
    }

    pub fn flat() -> Self {
        WingProfile {
            kind: WingKind::Flat,
            sign: WingSign::ClosesInward,
        }
    }

    pub fn power_law(k: u32, alpha: f64, coeff: f64, sign: WingSign) -> Self {
        WingProfile {
            kind: WingKind::PowerLaw { k, alpha, coeff },
            sign,
        }
    }

    pub fn gevrey0(tau: f64, coeff: f64, sign: WingSign) -> Self {
        WingProfile {
            kind: WingKind::Gevrey0 { tau, coeff },
            sign,
        }
    }

    fn validate(&self) -> Result<()> {
        match self.kind {
            WingKind::Stadium => {
                if self.sign != WingSign::ClosesInward {
                    return Err(Error::Parameter("stadium wings always close inward".into()));
                }
            }
            WingKind::PowerLaw { k, alpha, coeff } => {
                if !(0.0..=1.0).contains(&alpha) {
                    return Err(Error::Parameter(format!("alpha = {alpha} not in [0, 1]")));
                }
                let beta = k as f64 + alpha;
                if beta <= 1.0 {
                    return Err(Error::Parameter(format!(
                        "power-law wing needs k + alpha > 1 for a C^1 corner, got {beta}"
                    )));
                }
                self.check_coeff(coeff)?;
            }
            WingKind::Gevrey0 { tau, coeff } => {
                if !(tau > 0.0 && tau.is_finite()) {
                    return Err(Error::Parameter(format!("tau = {tau} must be positive")));
                }
                self.check_coeff(coeff)?;
            }
            WingKind::Flat => {}
        }
        Ok(())
    }

    fn check_coeff(&self, coeff: f64) -> Result<()> {
        if coeff == 0.0 || !coeff.is_finite() {
            return Err(Error::Parameter(
                "wing coefficient must be finite and nonzero".into(),
            ));
        }
        if coeff < 0.0 && self.sign == WingSign::OpensOutward {
            return Err(Error::Parameter(format!(
                "negative coefficient {coeff} contradicts an outward-opening wing"
            )));
        }
        Ok(())
    }

    /// `(r, r', r'')` as functions of the wing distance `t >= 0`.
    fn radial(&self, t: f64, half_width: f64) -> (f64, f64, Option<f64>) {
        let s = self.sign.factor();
        match self.kind {
            WingKind::Flat => (0.0, 0.0, Some(0.0)),
            WingKind::Stadium => {
                let w = half_width;
                let root = (w * w - t * t).max(0.0).sqrt();
                if root == 0.0 {
                    return (-w, f64::NEG_INFINITY, None);
                }
                (root - w, -t / root, Some(-w * w / (root * root * root)))
            }
            WingKind::PowerLaw { k, alpha, coeff } => {
                let c = s * coeff.abs();
                let beta = k as f64 + alpha;
                if t == 0.0 {
                    let ypp = if beta > 2.0 {
                        Some(0.0)
                    } else if beta == 2.0 {
                        Some(2.0 * c)
                    } else {
                        None
                    };
                    return (0.0, 0.0, ypp);
                }
                (
                    c * t.powf(beta),
                    c * beta * t.powf(beta - 1.0),
                    Some(c * beta * (beta - 1.0) * t.powf(beta - 2.0)),
                )
            }
            WingKind::Gevrey0 { tau, coeff } => {
                let c = s * coeff.abs();
                if t == 0.0 {
                    return (0.0, 0.0, Some(0.0));
                }
                let q = t.powf(-tau);
                if q > 700.0 {
                    return (0.0, 0.0, Some(0.0));
                }
                let e = (-q).exp();
                let r1 = c * tau * q / t * e;
                let r2 = c * e * (tau * tau * q * q - tau * (tau + 1.0) * q) / (t * t);
                (c * e, r1, Some(r2))
            }
        }
    }

    /// Distance from the corner at which a closing wing pinches off, if any.
    fn tip(&self, half_width: f64) -> Option<f64> {
        if self.sign == WingSign::OpensOutward {
            return None;
        }
        match self.kind {
            WingKind::Stadium => Some(half_width),
            WingKind::PowerLaw { k, alpha, coeff } => {
                Some((half_width / coeff.abs()).powf(1.0 / (k as f64 + alpha)))
            }
            WingKind::Gevrey0 { tau, coeff } if coeff.abs() > half_width => {
                Some((-(half_width / coeff.abs()).ln()).powf(-1.0 / tau))
            }
            _ => None,
        }
    }
}

/// Symmetric (about `y = 0`) partially rectangular domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainProfile {
    pub a: f64,
    pub half_width: f64,
    pub left_wing: WingProfile,
    pub right_wing: WingProfile,
    /// Maximal `|x|` of the domain.
    pub x_extent: f64,
}

impl DomainProfile {
    /// Builds and validates a profile. When `x_extent` is `None` it defaults
    /// to the point where the wings pinch off; opening and flat wings need an
    /// explicit extent.
    pub fn new(
        a: f64,
        half_width: f64,
        left_wing: WingProfile,
        right_wing: WingProfile,
        x_extent: Option<f64>,
    ) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::Parameter(format!("a = {a} must be nonnegative")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Parameter(format!(
                "half_width = {half_width} must be positive"
            )));
        }
        left_wing.validate()?;
        right_wing.validate()?;
        let x_extent = match x_extent {
            Some(e) => e,
            None => {
                let tl = left_wing.tip(half_width);
                let tr = right_wing.tip(half_width);
                match (tl, tr) {
                    (Some(l), Some(r)) => a + l.max(r),
                    _ => {
                        return Err(Error::Parameter(
                            "x_extent is required unless both wings close".into(),
                        ))
                    }
                }
            }
        };
        if !(x_extent >= a && x_extent.is_finite()) || x_extent == 0.0 {
            return Err(Error::Parameter(format!(
                "x_extent = {x_extent} must be >= a and > 0"
            )));
        }
        Ok(DomainProfile {
            a,
            half_width,
            left_wing,
            right_wing,
            x_extent,
        })
    }

    /// Same wing on both sides.
    pub fn symmetric(
        a: f64,
        half_width: f64,
        wing: WingProfile,
        x_extent: Option<f64>,
    ) -> Result<Self> {
        Self::new(a, half_width, wing, wing, x_extent)
    }

    /// Bunimovich stadium with flat part `[-a, a] × [-π, π]`.
    pub fn stadium(a: f64) -> Self {
        Self::symmetric(a, std::f64::consts::PI, WingProfile::stadium(), None)
            .expect("stadium parameters are valid for a >= 0")
    }

    /// The rectangle `[-a, a] × [-π, π]` with vertical walls.
    pub fn rectangle(a: f64) -> Result<Self> {
        Self::symmetric(a, std::f64::consts::PI, WingProfile::flat(), Some(a))
    }

    /// Identifier of the profile, e.g. `stadium` or `power-k2-a0-c1-in|flat`
    /// when the wings differ.
    pub fn label(&self) -> String {
        let (l, r) = (self.left_wing.label(), self.right_wing.label());
        if l == r {
            l
        } else {
            format!("{l}|{r}")
        }
    }

    pub fn is_x_symmetric(&self) -> bool {
        self.left_wing == self.right_wing
    }

    /// True when `Ω \ R` is empty.
    pub fn has_wings(&self) -> bool {
        self.x_extent > self.a
    }

    pub fn regularity(&self) -> Regularity {
        if !self.has_wings() {
            return Regularity::NoWings;
        }
        let of = |w: &WingProfile| match w.kind {
            WingKind::Stadium => Regularity::Holder { k: 1, alpha: 1.0 },
            WingKind::PowerLaw { k, alpha, .. } => Regularity::Holder { k, alpha },
            WingKind::Gevrey0 { .. } => Regularity::Gevrey,
            WingKind::Flat => Regularity::NoWings,
        };
        // The rougher wing dictates the exponent.
        match (of(&self.left_wing), of(&self.right_wing)) {
            (Regularity::Holder { k: k1, alpha: a1 }, Regularity::Holder { k: k2, alpha: a2 }) => {
                if k1 as f64 + a1 <= k2 as f64 + a2 {
                    Regularity::Holder { k: k1, alpha: a1 }
                } else {
                    Regularity::Holder { k: k2, alpha: a2 }
                }
            }
            (h @ Regularity::Holder { .. }, _) | (_, h @ Regularity::Holder { .. }) => h,
            (Regularity::Gevrey, _) | (_, Regularity::Gevrey) => Regularity::Gevrey,
            _ => Regularity::NoWings,
        }
    }

    fn check_extent(&self, x: f64) -> Result<()> {
        if x.abs() > self.x_extent || x.is_nan() {
            return Err(Error::OutOfExtent {
                x,
                lo: -self.x_extent,
                hi: self.x_extent,
            });
        }
        Ok(())
    }

    /// Wing containing `x` with the distance into it and the orientation
    /// `dt/dx`, or `None` on the flat part.
    fn locate(&self, x: f64) -> Option<(&WingProfile, f64, f64)> {
        if x > self.a {
            Some((&self.right_wing, x - self.a, 1.0))
        } else if x < -self.a {
            Some((&self.left_wing, -x - self.a, -1.0))
        } else {
            None
        }
    }

    /// `Y(x)`, clamped to zero beyond a pinch-off.
    pub fn eval_y(&self, x: f64) -> Result<f64> {
        self.check_extent(x)?;
        Ok(self.width_unchecked(x))
    }

    pub(crate) fn width_unchecked(&self, x: f64) -> f64 {
        match self.locate(x) {
            None => self.half_width,
            Some((wing, t, _)) => (self.half_width + wing.radial(t, self.half_width).0).max(0.0),
        }
    }

    /// One-sided analytic derivative of `Y` of the given order (1 or 2).
    /// Exactly at `x = ±a` the limit from `side` is returned.
    pub fn eval_y_deriv(&self, x: f64, order: u8, side: CornerSide) -> Result<f64> {
        if !(order == 1 || order == 2) {
            return Err(Error::Parameter(format!(
                "derivative order {order} not in {{1, 2}}"
            )));
        }
        let jet = self.jet(x, side)?;
        match order {
            1 => Ok(jet.yp),
            _ => jet.ypp.ok_or_else(|| {
                Error::Regularity(format!("second derivative of Y does not exist at x = {x}"))
            }),
        }
    }

    /// `Y, Y', Y''` at `x` (one-sided at the corners).
    pub fn jet(&self, x: f64, side: CornerSide) -> Result<ProfileJet> {
        self.check_extent(x)?;
        let at_corner = x.abs() == self.a;
        let located = if at_corner && side == CornerSide::Wing {
            if x > 0.0 || (x == 0.0 && self.a == 0.0) {
                Some((&self.right_wing, 0.0, 1.0))
            } else {
                Some((&self.left_wing, 0.0, -1.0))
            }
        } else {
            self.locate(x)
        };
        let Some((wing, t, orient)) = located else {
            return Ok(ProfileJet {
                y: self.half_width,
                yp: 0.0,
                ypp: Some(0.0),
            });
        };
        let (r, r1, r2) = wing.radial(t, self.half_width);
        let y = self.half_width + r;
        if y <= 0.0 {
            return Err(Error::Degenerate(format!("Y(x) = 0 at x = {x}")));
        }
        Ok(ProfileJet {
            y,
            yp: orient * r1,
            ypp: r2,
        })
    }

    /// Point membership: `|x| < x_extent` and `|y| < Y(x)`.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x.abs() < self.x_extent && y.abs() < self.width_unchecked(x)
    }

    /// Area by composite Simpson quadrature of `2 Y(x)`.
    pub fn area(&self) -> f64 {
        let n = 20_000;
        let h = 2.0 * self.x_extent / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let x = -self.x_extent + i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += w * 2.0 * self.width_unchecked(x.clamp(-self.x_extent, self.x_extent));
        }
        s * h / 3.0
    }
}
