//! One-dimensional reductions of the comparison operator
//! `P̃ = −∂x² − Y^{-2} ∂y'²` on the straightened strip.
//!
//! With transverse factor `sin(nπ(y' + 1)/2)` each mode `n` becomes the
//! Schrödinger problem `−w'' + q_n w = λ² w`, `q_n = (nπ/2)² / Y²`, with
//! Dirichlet walls at `x = ±(a + span)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::DomainProfile;
use crate::par::{self, Execution};

/// Wall distance beyond the corners used when none is given.
pub const DEFAULT_WALL_SPAN: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeProblem {
    pub n: u32,
    pub profile: DomainProfile,
    pub x_lo: f64,
    pub x_hi: f64,
}

impl ModeProblem {
    /// Walls at `±(a + span)`, with `span` capped at 90% of the wing
    /// length so that `Y > 0` on the interval; flat-walled domains end at `±a`.
    pub fn new(n: u32, profile: &DomainProfile, wall_span: Option<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter(
                "transverse mode index n must be >= 1".into(),
            ));
        }
        let span = wall_span.unwrap_or(DEFAULT_WALL_SPAN);
        if !(span >= 0.0 && span.is_finite()) {
            return Err(Error::Parameter(format!(
                "wall span {span} must be nonnegative"
            )));
        }
        let reach = if profile.has_wings() {
            span.min(0.9 * (profile.x_extent - profile.a))
        } else {
            0.0
        };
        let x_hi = profile.a + reach;
        Self::on_interval(n, profile, -x_hi, x_hi)
    }

    pub fn on_interval(n: u32, profile: &DomainProfile, x_lo: f64, x_hi: f64) -> Result<Self> {
        if !(x_hi > x_lo) {
            return Err(Error::Parameter(format!("empty interval [{x_lo}, {x_hi}]")));
        }
        for k in 0..=256 {
            let x = x_lo + (x_hi - x_lo) * k as f64 / 256.0;
            if profile.eval_y(x)? <= 0.0 {
                return Err(Error::Degenerate(format!(
                    "Y vanishes at x = {x} inside the interval"
                )));
            }
        }
        Ok(ModeProblem {
            n,
            profile: *profile,
            x_lo,
            x_hi,
        })
    }

    /// `q_n(x) = (nπ/2)² / Y(x)²`.
    pub fn potential(&self, x: f64) -> Result<f64> {
        let y = self.profile.eval_y(x)?;
        if y <= 0.0 {
            return Err(Error::Degenerate(format!("Y = 0 at x = {x}")));
        }
        let k = self.n as f64 * std::f64::consts::FRAC_PI_2;
        Ok(k * k / (y * y))
    }
}

/// A 1D eigenpair on the interior nodes `x_lo + i h`, `i = 1..N-1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Mode1d {
    pub lambda_sq: f64,
    pub lambda: f64,
    pub h: f64,
    pub x: Vec<f64>,
    /// Normalized so that `Σ w² h = 1`.
    pub w: Vec<f64>,
}

/// Symmetric tridiagonal matrix: diagonal `d`, constant off-diagonal `e`.
struct Tridiagonal {
    d: Vec<f64>,
    e: f64,
}

impl Tridiagonal {
    /// Number of eigenvalues below `mu` (Sturm count).
    fn count_below(&self, mu: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for (i, &di) in self.d.iter().enumerate() {
            q = di - mu - if i == 0 { 0.0 } else { self.e * self.e / q };
            if q == 0.0 {
                q = -f64::EPSILON * (di.abs() + self.e.abs());
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// `k`-th smallest eigenvalue (0-based) by bisection.
    fn eigenvalue(&self, k: usize) -> f64 {
        let bound = 2.0 * self.e.abs();
        let mut lo = self.d.iter().fold(f64::INFINITY, |m, &v| m.min(v)) - bound;
        let mut hi = self.d.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) + bound;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves `(T − mu I) x = b` by elimination without pivoting.
    fn solve_shifted(&self, mu: f64, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut piv = vec![0.0; n];
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut p = self.d[i] - mu;
            let mut r = b[i];
            if i > 0 {
                let l = self.e / piv[i - 1];
                p -= l * self.e;
                r -= l * y[i - 1];
            }
            if p.abs() < 1e-300 {
                p = 1e-300;
            }
            piv[i] = p;
            y[i] = r;
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let next = if i + 1 < n { self.e * x[i + 1] } else { 0.0 };
            x[i] = (y[i] - next) / piv[i];
        }
        x
    }

    fn eigenvector(&self, mu: f64) -> Vec<f64> {
        let n = self.d.len();
        let shift = mu - 1e-10 * (mu.abs() + self.e.abs());
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64)
            .collect();
        for _ in 0..4 {
            v = self.solve_shifted(shift, &v);
            let norm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
            v.iter_mut().for_each(|t| *t /= norm);
        }
        v
    }
}

/// Lowest `count` eigenpairs of `−w'' + q_n w` with Dirichlet walls.
pub fn solve_modes(problem: &ModeProblem, h: f64, count: usize) -> Result<Vec<Mode1d>> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Parameter(format!(
            "grid spacing h = {h} must be positive"
        )));
    }
    let len = problem.x_hi - problem.x_lo;
    let cells = (len / h).round().max(2.0) as usize;
    let h = len / cells as f64;
    let n = cells - 1;
    if count > n {
        return Err(Error::Parameter(format!(
            "requested {count} modes from a grid with {n} unknowns"
        )));
    }
    let x: Vec<f64> = (1..cells).map(|i| problem.x_lo + i as f64 * h).collect();
    let q = x
        .iter()
        .map(|&xi| problem.potential(xi))
        .collect::<Result<Vec<f64>>>()?;
    let q_max = q.iter().fold(0.0_f64, |m, &v| m.max(v));
    if h * q_max.sqrt() > 0.1 {
        return Err(Error::Resolution(format!(
            "h·sqrt(max q) = {:.3} exceeds 0.1; refine to h <= {:.3e}",
            h * q_max.sqrt(),
            0.1 / q_max.sqrt()
        )));
    }
    let inv_h2 = 1.0 / (h * h);
    let t = Tridiagonal {
        d: q.iter().map(|qi| 2.0 * inv_h2 + qi).collect(),
        e: -inv_h2,
    };
    Ok((0..count)
        .map(|k| {
            let mu = t.eigenvalue(k);
            let mut w = t.eigenvector(mu);
            let norm = (w.iter().map(|v| v * v).sum::<f64>() * h).sqrt();
            // Fix the sign by the first clearly nonzero entry.
            let lead = w.iter().copied().find(|v| v.abs() > 1e-8).unwrap_or(1.0);
            let s = lead.signum() / norm;
            w.iter_mut().for_each(|v| *v *= s);
            Mode1d {
                lambda_sq: mu,
                lambda: mu.sqrt(),
                h,
                x: x.clone(),
                w,
            }
        })
        .collect())
}

/// `∫ w²` over `x > a` (right) and `x < −a` (left), by the trapezoid rule on
/// the piecewise-linear interpolant of `w²`, with zero wall values.
pub fn wing_masses_1d(mode: &Mode1d, a: f64) -> (f64, f64) {
    let h = mode.h;
    let mut xs = Vec::with_capacity(mode.x.len() + 2);
    let mut fs = Vec::with_capacity(mode.x.len() + 2);
    xs.push(mode.x[0] - h);
    fs.push(0.0);
    for (&x, &w) in mode.x.iter().zip(&mode.w) {
        xs.push(x);
        fs.push(w * w);
    }
    xs.push(mode.x[mode.x.len() - 1] + h);
    fs.push(0.0);
    let beyond = |cut: f64, sign: f64| {
        let mut total = 0.0;
        for k in 0..xs.len() - 1 {
            let (u0, u1) = (sign * xs[k], sign * xs[k + 1]);
            let (f0, f1) = (fs[k], fs[k + 1]);
            let (lo, hi, flo, fhi) = if u0 < u1 {
                (u0, u1, f0, f1)
            } else {
                (u1, u0, f1, f0)
            };
            if hi <= cut {
                continue;
            }
            let start = lo.max(cut);
            let f_start = flo + (fhi - flo) * (start - lo) / (hi - lo);
            total += 0.5 * (f_start + fhi) * (hi - start);
        }
        total
    };
    (beyond(a, -1.0), beyond(a, 1.0))
}

/// Total wing mass `∫_{|x|>a} w²`.
pub fn wing_mass_1d(mode: &Mode1d, a: f64) -> f64 {
    let (l, r) = wing_masses_1d(mode, a);
    l + r
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparableRow {
    pub n: u32,
    pub lambda: f64,
    pub lambda_sq: f64,
    pub wing_mass_left: f64,
    pub wing_mass_right: f64,
    pub h: f64,
    pub profile_id: String,
}

/// Grid spacing meeting `h · sqrt(max q_n) ≤ resolution` (at most `h_max`).
pub fn spacing_for(problem: &ModeProblem, h_max: f64, resolution: f64) -> Result<f64> {
    let mut q_max = 0.0_f64;
    for k in 0..=2048 {
        let x = problem.x_lo + (problem.x_hi - problem.x_lo) * k as f64 / 2048.0;
        q_max = q_max.max(problem.potential(x)?);
    }
    Ok(h_max.min(resolution / q_max.sqrt()))
}

/// Lowest mode and its wing masses for each `n`. The grid spacing is
/// `min(h_max, 0.05 / sqrt(max q_n))`.
pub fn sweep_scaling(
    profile: &DomainProfile,
    n_list: &[u32],
    h_max: f64,
    wall_span: Option<f64>,
    exec: Execution,
) -> Result<Vec<SeparableRow>> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter("n_list must be strictly ascending".into()));
    }
    let id = profile.label();
    par::map(exec, n_list, |&n| {
        let problem = ModeProblem::new(n, profile, wall_span)?;
        let h = spacing_for(&problem, h_max, 0.05)?;
        let mode = solve_modes(&problem, h, 1)?.remove(0);
        let (left, right) = wing_masses_1d(&mode, profile.a);
        Ok(SeparableRow {
            n,
            lambda: mode.lambda,
            lambda_sq: mode.lambda_sq,
            wing_mass_left: left,
            wing_mass_right: right,
            h: mode.h,
            profile_id: id.clone(),
        })
    })
    .into_iter()
    .collect()
}

/// Relative change of the total wing mass of mode `n` when the walls move
/// from `span` to `0.8 · span`.
pub fn wall_sensitivity(profile: &DomainProfile, n: u32, h_max: f64, span: f64) -> Result<f64> {
    let mass = |s: f64| -> Result<f64> {
        let problem = ModeProblem::new(n, profile, Some(s))?;
        let h = spacing_for(&problem, h_max, 0.05)?;
        Ok(wing_mass_1d(&solve_modes(&problem, h, 1)?[0], profile.a))
    };
    let (m1, m2) = (mass(span)?, mass(0.8 * span)?);
    Ok((m1 - m2).abs() / m1.max(f64::MIN_POSITIVE))
}
