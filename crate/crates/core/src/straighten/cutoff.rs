//! Ramp/Heaviside weights and smooth plateau cutoffs.
//!
//! A [`Cutoff`] equals 1 on `|x| <= plateau` and vanishes for
//! `|x| >= plateau + width`. It is the indicator of
//! `[-(plateau + width/2), plateau + width/2]` convolved with the rescaled
//! mollifier `exp(-1/(1 - t²))` of half-width `width/2`, so every derivative
//! is an explicit rescaled derivative of the bump.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, integrate};

/// `∫_{-1}^{1} exp(-1/(1 - t²)) dt`.
pub const BUMP_NORMALIZER: f64 = 0.443_993_816_168_079_4;

/// `R(x) = max(x - a, 0)`.
pub fn ramp(x: f64, a: f64) -> f64 {
    (x - a).max(0.0)
}

/// `H = R'`, taken as 0 at `x = a`.
pub fn heaviside(x: f64, a: f64) -> f64 {
    if x > a {
        1.0
    } else {
        0.0
    }
}

/// `d^n/dt^n` of `g(t) = -1/(1 - t²)`.
fn g_deriv(t: f64, n: u32) -> f64 {
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    -0.5 * fact * ((1.0 - t).powi(-(n as i32 + 1)) + sign * (1.0 + t).powi(-(n as i32 + 1)))
}

/// `m`-th derivative (m ≤ 4) of the unnormalized bump `exp(-1/(1 - t²))`.
fn bump_deriv(t: f64, m: u32) -> f64 {
    if t.abs() >= 1.0 {
        return 0.0;
    }
    let g = -1.0 / (1.0 - t * t);
    if g < -700.0 {
        return 0.0;
    }
    let e = g.exp();
    let g1 = g_deriv(t, 1);
    let poly = match m {
        0 => 1.0,
        1 => g1,
        2 => g_deriv(t, 2) + g1 * g1,
        3 => g_deriv(t, 3) + 3.0 * g1 * g_deriv(t, 2) + g1.powi(3),
        4 => {
            let (g2, g3, g4) = (g_deriv(t, 2), g_deriv(t, 3), g_deriv(t, 4));
            g4 + 4.0 * g1 * g3 + 3.0 * g2 * g2 + 6.0 * g1 * g1 * g2 + g1.powi(4)
        }
        _ => panic!("bump derivatives implemented up to order 4"),
    };
    poly * e
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(24))
}

/// CDF of the normalized bump.
fn bump_cdf(s: f64) -> f64 {
    if s <= -1.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    if s > 0.0 {
        return 1.0 - bump_cdf(-s);
    }
    integrate(|t| bump_deriv(t, 0), -1.0, s, 8, rule()) / BUMP_NORMALIZER
}

/// `max_t |φ^{(m)}(t)|` for the normalized bump, m = 0..=3, by dense sampling.
fn bump_derivative_maxima() -> &'static [f64; 4] {
    static MAX: OnceLock<[f64; 4]> = OnceLock::new();
    MAX.get_or_init(|| {
        let mut out = [0.0; 4];
        let n = 200_000;
        for k in 1..n {
            let t = -1.0 + 2.0 * k as f64 / n as f64;
            for (m, o) in out.iter_mut().enumerate() {
                *o = f64::max(*o, bump_deriv(t, m as u32).abs() / BUMP_NORMALIZER);
            }
        }
        out
    })
}

/// λ-dependent cutoff parameters: support `|x| <= a + c λ^{-p}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutoffSpec {
    pub a: f64,
    pub lambda: f64,
    pub p: f64,
    pub c: f64,
    /// `C_m` with `|∂^m χ| <= C_m λ^{m p}` for m = 1..=4.
    pub order_bound_const: Vec<f64>,
    /// Grid spacing the cutoff will be sampled on, if known.
    pub grid_spacing: Option<f64>,
}

impl CutoffSpec {
    pub fn new(a: f64, lambda: f64, p: f64, c: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Parameter(format!(
                "lambda = {lambda} must be positive"
            )));
        }
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Parameter(format!("p = {p} must be positive")));
        }
        if !(c >= 1.0 && c.is_finite()) {
            return Err(Error::Parameter(format!(
                "support multiplier c = {c} must be >= 1"
            )));
        }
        if !(a >= 0.0) {
            return Err(Error::Parameter(format!("a = {a} must be nonnegative")));
        }
        let maxima = bump_derivative_maxima();
        let order_bound_const = (1..=4)
            .map(|m| (2.0 / c).powi(m) * maxima[m as usize - 1])
            .collect();
        Ok(CutoffSpec {
            a,
            lambda,
            p,
            c,
            order_bound_const,
            grid_spacing: None,
        })
    }

    pub fn with_grid_spacing(mut self, h: f64) -> Self {
        self.grid_spacing = Some(h);
        self
    }

    /// Width `c λ^{-p}` of the transition layer.
    pub fn width(&self) -> f64 {
        self.c * self.lambda.powf(-self.p)
    }

    fn check_resolution(&self, width: f64) -> Result<()> {
        if let Some(h) = self.grid_spacing {
            if width < 4.0 * h {
                return Err(Error::Resolution(format!(
                    "cutoff transition {width:.3e} spans fewer than 4 cells of size {h:.3e}"
                )));
            }
        }
        Ok(())
    }
}

/// Smooth even cutoff, 1 on `|x| <= plateau`, 0 beyond `plateau + width`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Cutoff {
    pub plateau: f64,
    pub width: f64,
}

impl Cutoff {
    pub fn new(plateau: f64, width: f64) -> Result<Self> {
        if !(plateau >= 0.0 && width > 0.0 && width.is_finite()) {
            return Err(Error::Parameter(format!(
                "invalid cutoff plateau {plateau}, width {width}"
            )));
        }
        Ok(Cutoff { plateau, width })
    }

    pub fn support(&self) -> f64 {
        self.plateau + self.width
    }

    fn eps(&self) -> f64 {
        0.5 * self.width
    }

    pub fn value(&self, x: f64) -> f64 {
        let eps = self.eps();
        let l = self.plateau + eps;
        bump_cdf((l - x) / eps) - bump_cdf((-l - x) / eps)
    }

    /// `∂^m` of the cutoff, `m <= 5`.
    pub fn derivative(&self, x: f64, m: u32) -> f64 {
        if m == 0 {
            return self.value(x);
        }
        let eps = self.eps();
        let l = self.plateau + eps;
        let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
        sign * eps.powi(-(m as i32))
            * (bump_deriv((l - x) / eps, m - 1) - bump_deriv((-l - x) / eps, m - 1))
            / BUMP_NORMALIZER
    }

    /// Continuum `‖∂^m χ‖_{L²(R)}`.
    pub fn derivative_l2(&self, m: u32) -> f64 {
        let r = rule();
        let s = self.support();
        let sq = |x: f64| self.derivative(x, m).powi(2);
        let flank = integrate(sq, self.plateau, s, 16, r);
        if m == 0 {
            (2.0 * self.plateau + 2.0 * flank).sqrt()
        } else {
            (2.0 * flank).sqrt()
        }
    }
}

/// `χ`: 1 on `[-a, a]`, supported in `|x| <= a + c λ^{-p}`.
pub fn make_chi(spec: &CutoffSpec) -> Result<Cutoff> {
    let w = spec.width();
    spec.check_resolution(w)?;
    Cutoff::new(spec.a, w)
}

/// `ψ` has the same construction as `χ`.
pub fn make_psi(spec: &CutoffSpec) -> Result<Cutoff> {
    make_chi(spec)
}

/// `ψ̃`: identically 1 on the support of `ψ`, supported in `a + 2c λ^{-p}`.
pub fn make_psi_tilde(spec: &CutoffSpec) -> Result<Cutoff> {
    let w = spec.width();
    spec.check_resolution(w)?;
    Cutoff::new(spec.a + w, w)
}
