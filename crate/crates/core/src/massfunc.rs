//! Wing-mass functionals and the weighted derivative norms of the
//! straightened quasimode.
//!
//! The wing is `{|x| > a} ∩ Ω`, assigned node by node. `x`-derivatives use
//! centred differences, switching to the non-uniform three-point formula
//! when an arm is cut by the boundary (where the value is zero).

use serde::Serialize;

use crate::eigen::Grid;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::DomainProfile;
use crate::straighten::{conjugate_to_v, heaviside, make_psi, ramp, strip_grid, CutoffSpec};

/// The three normalized wing norms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct WingMasses {
    /// `‖u‖_{L²(Ω∖R)} / ‖u‖`
    pub m0: f64,
    /// `‖λ⁻¹ ∂x u‖_{L²(Ω∖R)} / ‖u‖`
    pub m1: f64,
    /// `‖λ⁻² ∂x² u‖_{L²(Ω∖R)} / ‖u‖`
    pub m2: f64,
}

impl WingMasses {
    pub fn max(&self) -> f64 {
        self.m0.max(self.m1).max(self.m2)
    }
}

/// `(∂x u, ∂x² u)` at interior node `p`.
fn x_derivatives(grid: &Grid, u: &Field, p: usize) -> (f64, f64) {
    let k = grid.interior_nodes[p];
    let h = grid.h;
    let arms = grid.boundary_distances[p];
    let u0 = u.values[k];
    let (hr, ur) = match arms[0] {
        Some(t) => (t * h, 0.0),
        None => (h, u.values[k + 1]),
    };
    let (hl, ul) = match arms[1] {
        Some(t) => (t * h, 0.0),
        None => (h, u.values[k - 1]),
    };
    let denom = hl * hr * (hl + hr);
    let d1 = (hl * hl * ur - hr * hr * ul + (hr * hr - hl * hl) * u0) / denom;
    let d2 = 2.0 * (hl * ur + hr * ul - (hl + hr) * u0) / denom;
    (d1, d2)
}

/// `(M0, M1, M2)` of a field sampled on `grid`; values off the interior
/// nodes are ignored.
pub fn wing_masses(u: &Field, lambda: f64, grid: &Grid, a: f64) -> Result<WingMasses> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!(
            "lambda = {lambda} must be positive"
        )));
    }
    if u.grid != grid.tensor() {
        return Err(Error::Parameter(
            "field is not sampled on the given grid".into(),
        ));
    }
    let (mut total, mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0, 0.0);
    for (p, &k) in grid.interior_nodes.iter().enumerate() {
        let v = u.values[k];
        total += v * v;
        let (li, _) = grid.lattice(k);
        if (li as f64 * grid.h).abs() > a {
            let (d1, d2) = x_derivatives(grid, u, p);
            s0 += v * v;
            s1 += d1 * d1;
            s2 += d2 * d2;
        }
    }
    if total == 0.0 {
        return Err(Error::Parameter("field vanishes identically".into()));
    }
    Ok(WingMasses {
        m0: (s0 / total).sqrt(),
        m1: (s1 / total).sqrt() / lambda,
        m2: (s2 / total).sqrt() / (lambda * lambda),
    })
}

/// `(‖u‖²_{L²(R)}, ‖u‖²_{L²(Ω∖R)})` with the same node assignment.
pub fn region_split(u: &Field, grid: &Grid, a: f64) -> (f64, f64) {
    let h2 = grid.h * grid.h;
    let (mut inside, mut wing) = (0.0, 0.0);
    for &k in &grid.interior_nodes {
        let v = u.values[k];
        let (li, _) = grid.lattice(k);
        if (li as f64 * grid.h).abs() > a {
            wing += v * v * h2;
        } else {
            inside += v * v * h2;
        }
    }
    (inside, wing)
}

/// Names of the five weighted norms, in report order.
pub const LEMMA_NAMES: [&str; 5] = ["ny", "nx", "nxy", "nyy", "nxx"];

/// Values, ceilings and ratios of the five weighted derivative norms.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaNorms {
    pub values: [f64; 5],
    pub ceilings: [f64; 5],
    pub ratios: [f64; 5],
    /// `max |v|` on the rows `y' = ±1`, relative to `max |v|`.
    pub boundary_leak: f64,
    pub boundary_warning: bool,
}

/// Straightened `v` on the columns `|x| ≤ a + width + 2h` of a physical
/// field, with as many `y'` nodes as the field has rows.
pub fn straighten_near_rectangle(
    u: &Field,
    profile: &DomainProfile,
    spec: &CutoffSpec,
) -> Result<Field> {
    let g = u.grid;
    let reach = (spec.a + spec.width() + 2.0 * g.hx).min(profile.x_extent - g.hx);
    let cols: Vec<usize> = (0..g.nx)
        .filter(|&i| g.x(i).abs() <= reach + 1e-9 * g.hx)
        .collect();
    let (first, n) = match (cols.first(), cols.len()) {
        (Some(&f), n) if n >= 3 => (f, n),
        _ => {
            return Err(Error::Parameter(
                "fewer than 3 columns near the rectangle".into(),
            ))
        }
    };
    let sub_grid = crate::field::TensorGrid {
        x0: g.x(first),
        nx: n,
        ..g
    };
    let mut sub = Field::zeros(sub_grid);
    for j in 0..g.ny {
        for (c, i) in (first..first + n).enumerate() {
            *sub.at_mut(c, j) = u.at(i, j);
        }
    }
    let strip = strip_grid(sub_grid.x0, sub_grid.x(n - 1), n, g.ny)?;
    conjugate_to_v(&sub, profile, strip)
}

/// Exponents of the weights on `∂y, ∂x, ∂x∂y, ∂y², ∂x²`.
struct Weights {
    xy: f64,
    yy: f64,
}

fn weighted_norms(v: &Field, spec: &CutoffSpec, w: &Weights) -> Result<([f64; 5], f64)> {
    let g = v.grid;
    if g.nx < 3 || g.ny < 3 {
        return Err(Error::Parameter(
            "straightened field needs at least 3x3 nodes".into(),
        ));
    }
    let psi = make_psi(spec)?;
    let a = spec.a;
    let (hx, hy) = (g.hx, g.hy);
    let mut sums = [0.0; 5];
    for j in 1..g.ny - 1 {
        for i in 1..g.nx - 1 {
            let ax = g.x(i).abs();
            let hv = heaviside(ax, a);
            if hv == 0.0 {
                continue;
            }
            let ps = psi.value(g.x(i));
            if ps == 0.0 {
                continue;
            }
            let r = ramp(ax, a);
            let c = v.at(i, j);
            let vy = (v.at(i, j + 1) - v.at(i, j - 1)) / (2.0 * hy);
            let vx = (v.at(i + 1, j) - v.at(i - 1, j)) / (2.0 * hx);
            let vxy = (v.at(i + 1, j + 1) - v.at(i + 1, j - 1) - v.at(i - 1, j + 1)
                + v.at(i - 1, j - 1))
                / (4.0 * hx * hy);
            let vyy = (v.at(i, j + 1) - 2.0 * c + v.at(i, j - 1)) / (hy * hy);
            let vxx = (v.at(i + 1, j) - 2.0 * c + v.at(i - 1, j)) / (hx * hx);
            let terms = [
                hv * vy,
                hv * vx,
                r.powf(w.xy) * vxy,
                r.powf(w.yy) * vyy,
                hv * vxx,
            ];
            for (s, t) in sums.iter_mut().zip(terms) {
                *s += (ps * t).powi(2);
            }
        }
    }
    let values = sums.map(|s| (s * hx * hy).sqrt());
    let peak = v.max_abs();
    let mut edge = 0.0_f64;
    for i in 0..g.nx {
        edge = edge.max(v.at(i, 0).abs()).max(v.at(i, g.ny - 1).abs());
    }
    let leak = if peak > 0.0 { edge / peak } else { 0.0 };
    Ok((values, leak))
}

/// `‖R^q ψ w‖` over the whole tensor grid, with `q = 0` meaning `H`.
pub fn ramp_weighted_norm(w: &Field, spec: &CutoffSpec, q: f64) -> Result<f64> {
    let psi = make_psi(spec)?;
    let g = w.grid;
    let mut sum = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let ax = g.x(i).abs();
            let weight = if q == 0.0 {
                heaviside(ax, spec.a)
            } else {
                ramp(ax, spec.a).powf(q)
            };
            sum += (weight * psi.value(g.x(i)) * w.at(i, j)).powi(2);
        }
    }
    Ok((sum * g.hx * g.hy).sqrt())
}

fn finish(values: [f64; 5], ceilings: [f64; 5], leak: f64) -> LemmaNorms {
    let mut ratios = [0.0; 5];
    for k in 0..5 {
        ratios[k] = values[k] / ceilings[k];
    }
    LemmaNorms {
        values,
        ceilings,
        ratios,
        boundary_leak: leak,
        boundary_warning: leak > 1e-8,
    }
}

/// Ceilings for `C^{1,1}` wings with `p = 1 + ε₀/2` and `δ₀ = δ`.
pub fn c11_ceilings(lambda: f64, eps0: f64, delta: f64) -> [f64; 5] {
    let l = |e: f64| lambda.powf(e);
    [
        l(-1.0 - delta).max(l(-1.0 - eps0 / 2.0)),
        l(-1.0 - delta),
        l(-eps0 / 2.0).max(l(-delta)),
        l(-2.0 - delta - eps0).max(l(-2.0 - 1.5 * eps0)),
        l(-delta).max(l(-eps0 / 2.0)),
    ]
}

/// Norms `‖Hψ∂y v‖, ‖Hψ∂x v‖, ‖Rψ∂x∂y v‖, ‖R²ψ∂y² v‖, ‖Hψ∂x² v‖` on a
/// straightened field, weights taken in `|x|` so both wings count.
/// `spec.p` should be `1 + ε₀/2`.
pub fn lemma_norms_c11(
    v: &Field,
    lambda: f64,
    eps0: f64,
    delta: f64,
    spec: &CutoffSpec,
) -> Result<LemmaNorms> {
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!(
            "lambda = {lambda} must be positive"
        )));
    }
    let (values, leak) = weighted_norms(v, spec, &Weights { xy: 1.0, yy: 2.0 })?;
    Ok(finish(values, c11_ceilings(lambda, eps0, delta), leak))
}

/// Ceilings for `C^{k,α}` wings, `γ = k + α − 1`.
pub fn cka_ceilings(lambda: f64, gamma: f64, p: f64, s: f64) -> [f64; 5] {
    let l = |e: f64| lambda.powf(e);
    [
        l(1.0 - s).max(l(-p * (2.0 * gamma - 1.0))),
        l(1.0 - s).max(l(-p * (3.0 * gamma - 1.0))),
        l(2.0 - s - p * gamma)
            .max(l(1.0 - p * (2.0 * gamma - 1.0)))
            .max(l((2.0 - s - p * (3.0 * gamma - 2.0)) / 2.0)),
        l(2.0 - s - p * (gamma + 1.0)).max(l(1.0 - 3.0 * p * gamma)),
        l(2.0 - s).max(l(1.0 - p * (2.0 * gamma - 1.0))),
    ]
}

/// As [`lemma_norms_c11`] with weights `R^γ` and `R^{γ+1}` on the mixed and
/// `∂y²` terms.
pub fn lemma_norms_cka(
    v: &Field,
    lambda: f64,
    gamma: f64,
    p: f64,
    s: f64,
    spec: &CutoffSpec,
) -> Result<LemmaNorms> {
    if !(gamma > 1.0) {
        return Err(Error::Parameter(format!(
            "gamma = {gamma} must exceed 1; use lemma_norms_c11 for C^{{1,1}} wings"
        )));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Parameter(format!("p = {p} not in (0, 1]")));
    }
    if !(0.0..=2.0).contains(&s) {
        return Err(Error::Parameter(format!("s = {s} not in [0, 2]")));
    }
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!(
            "lambda = {lambda} must be positive"
        )));
    }
    let (values, leak) = weighted_norms(
        v,
        spec,
        &Weights {
            xy: gamma,
            yy: gamma + 1.0,
        },
    )?;
    Ok(finish(values, cka_ceilings(lambda, gamma, p, s), leak))
}

/// One row of the theorem check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CheckEntry {
    pub lambda: f64,
    pub residual: f64,
    pub masses: WingMasses,
    /// False when the domain has no wing region at all.
    pub wing_present: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub lambda: f64,
    pub residual: f64,
    pub masses: WingMasses,
    /// `max(M0, M1, M2) · λ^s`
    pub t: f64,
    pub alarm: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremCheck {
    pub exponent: f64,
    pub rows: Vec<CheckRow>,
    pub envelope_slope: Option<f64>,
    pub alarms: usize,
    pub verdict: Verdict,
}

/// Applies the alarm rule to each entry: a row is flagged when its residual
/// is small (`E ≤ λ^{-ε₀}`) yet `T < 0.01 · median(T)`. The verdict passes
/// when nothing is flagged and the per-bin minimum of `T` has log-log slope
/// `≥ −δ/2`.
pub fn theorem_check(
    entries: &[CheckEntry],
    delta: f64,
    eps0: f64,
    s_override: Option<f64>,
) -> Result<TheoremCheck> {
    if entries.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "{} modes; at least 5 are required",
            entries.len()
        )));
    }
    let s = s_override.unwrap_or(2.0 + delta);
    if entries.iter().all(|e| !e.wing_present) {
        let rows = entries
            .iter()
            .map(|e| CheckRow {
                lambda: e.lambda,
                residual: e.residual,
                masses: e.masses,
                t: 0.0,
                alarm: false,
            })
            .collect();
        return Ok(TheoremCheck {
            exponent: s,
            rows,
            envelope_slope: None,
            alarms: 0,
            verdict: Verdict::NotApplicable,
        });
    }
    let ts: Vec<f64> = entries
        .iter()
        .map(|e| e.masses.max() * e.lambda.powf(s))
        .collect();
    let mut sorted = ts.clone();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let median = if m % 2 == 1 {
        sorted[m / 2]
    } else {
        0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
    };
    let rows: Vec<CheckRow> = entries
        .iter()
        .zip(&ts)
        .map(|(e, &t)| CheckRow {
            lambda: e.lambda,
            residual: e.residual,
            masses: e.masses,
            t,
            alarm: e.residual <= e.lambda.powf(-eps0) && t < 0.01 * median,
        })
        .collect();
    let alarms = rows.iter().filter(|r| r.alarm).count();
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.lambda, r.t)).collect();
    let env = crate::scaling::lower_envelope(&pts, 1.0);
    let envelope_slope = if env.len() >= 5 && env.iter().all(|p| p.1 > 0.0) {
        Some(crate::scaling::fit_exponent(&env)?.slope)
    } else {
        None
    };
    let verdict = match envelope_slope {
        Some(sl) if alarms == 0 && sl >= -delta / 2.0 => Verdict::Pass,
        _ => Verdict::Fail,
    };
    Ok(TheoremCheck {
        exponent: s,
        rows,
        envelope_slope,
        alarms,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::aligned_spacing;
    use crate::geometry::DomainProfile;
    use crate::straighten::strip_grid;
    use std::f64::consts::PI;

    fn stadium_grid(h: f64) -> (DomainProfile, Grid) {
        let p = DomainProfile::stadium(1.0);
        let g = Grid::new(&p, aligned_spacing(h, PI).unwrap()).unwrap();
        (p, g)
    }

    #[test]
    fn supported_inside_rectangle_gives_zero() {
        let (_, g) = stadium_grid(0.05);
        let u = Field::from_fn(g.tensor(), |x, y| {
            if x.abs() < 0.8 {
                (PI * PI - y * y) * (0.64 - x * x)
            } else {
                0.0
            }
        });
        let m = wing_masses(&u, 3.0, &g, 1.0).unwrap();
        assert_eq!((m.m0, m.m1, m.m2), (0.0, 0.0, 0.0));
        assert!(wing_masses(&u, 0.0, &g, 1.0).is_err());
    }

    #[test]
    fn bump_in_one_wing_has_full_mass() {
        let (_, g) = stadium_grid(0.02);
        let u = Field::from_fn(g.tensor(), |x, y| {
            let r2 = (x - 2.0).powi(2) + y * y;
            if r2 < 0.25 {
                (-1.0 / (1.0 - 4.0 * r2)).exp()
            } else {
                0.0
            }
        });
        let m = wing_masses(&u, 3.0, &g, 1.0).unwrap();
        assert!((m.m0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn partition_of_mass() {
        let (_, g) = stadium_grid(0.05);
        let u = Field::from_fn(g.tensor(), |x, y| (x * 1.3).cos() + y * 0.2 + 1.0);
        let (a, b) = region_split(&u, &g, 1.0);
        let total: f64 = g
            .interior_nodes
            .iter()
            .map(|&k| u.values[k].powi(2))
            .sum::<f64>()
            * g.h
            * g.h;
        assert!((a + b - total).abs() <= 1e-10 * total);
    }

    #[test]
    fn centred_derivative_is_second_order() {
        // M1 of a smooth field against its exact value under refinement.
        // g vanishes on the stadium boundary and is smooth on each wing.
        let g = |x: f64, y: f64| PI * PI - (x.abs() - 1.0).max(0.0).powi(2) - y * y;
        let gx = |x: f64| -2.0 * (x.abs() - 1.0).max(0.0) * x.signum();
        let f = |x: f64, y: f64| (1.0 + 0.3 * x) * g(x, y);
        let fx = |x: f64, y: f64| 0.3 * g(x, y) + (1.0 + 0.3 * x) * gx(x);
        let mut errs = Vec::new();
        for h in [0.04, 0.02, 0.01] {
            let (_, g) = stadium_grid(h);
            let u = Field::from_fn(g.tensor(), f);
            let m = wing_masses(&u, 1.0, &g, 1.0).unwrap();
            let mut ex = 0.0;
            let mut tot = 0.0;
            for &k in &g.interior_nodes {
                let (li, lj) = g.lattice(k);
                let (x, y) = (li as f64 * g.h, lj as f64 * g.h);
                tot += f(x, y).powi(2);
                if x.abs() > 1.0 {
                    ex += fx(x, y).powi(2);
                }
            }
            errs.push((m.m1 - (ex / tot).sqrt()).abs());
        }
        assert!(errs[2] < errs[0] / 8.0, "{errs:?}");
    }

    #[test]
    fn lemma_product_structure() {
        // v = w(x) sin(π(y'+1)/2): the mixed norm factorizes into 1D sums.
        let spec = CutoffSpec::new(1.0, 20.0, 1.25, 3.0).unwrap();
        let g = strip_grid(-1.5, 1.5, 301, 101).unwrap();
        let w = |x: f64| (-(x * x)).exp();
        let sn = |y: f64| (PI * (y + 1.0) / 2.0).sin();
        let v = Field::from_fn(g, |x, y| w(x) * sn(y));
        let n = lemma_norms_c11(&v, 20.0, 0.5, 0.1, &spec).unwrap();
        let psi = make_psi(&spec).unwrap();
        let (mut sx, mut sy) = (0.0, 0.0);
        for i in 1..g.nx - 1 {
            let x = g.x(i);
            let dx = (w(g.x(i + 1)) - w(g.x(i - 1))) / (2.0 * g.hx);
            sx += (ramp(x.abs(), 1.0) * psi.value(x) * dx).powi(2);
        }
        for j in 1..g.ny - 1 {
            let dy = (sn(g.y(j + 1)) - sn(g.y(j - 1))) / (2.0 * g.hy);
            sy += dy * dy;
        }
        let product = (sx * g.hx * sy * g.hy).sqrt();
        assert!((n.values[2] - product).abs() <= 1e-10 * product);
        assert!(!n.boundary_warning);
        let zero = Field::from_fn(g, |x, y| if x.abs() < 1.0 { w(x) * sn(y) } else { 0.0 });
        let z = lemma_norms_c11(&zero, 20.0, 0.5, 0.1, &spec).unwrap();
        assert!(z.values.iter().all(|&v| v == 0.0) || z.values[1] > 0.0);
    }

    #[test]
    fn straightening_window() {
        let (p, g) = stadium_grid(0.05);
        let u = Field::from_fn(g.tensor(), |x, y| {
            let w = p.eval_y(x).unwrap_or(0.0);
            (w * w - y * y).max(0.0)
        });
        let spec = CutoffSpec::new(1.0, 10.0, 1.25, 3.0).unwrap();
        let v = straighten_near_rectangle(&u, &p, &spec).unwrap();
        let reach = 1.0 + spec.width() + 0.1;
        assert!(v.grid.x0 >= -reach - 1e-9 && v.grid.x0 < -reach + 0.05 + 1e-9);
        // On the flat part v = √π (π² − π² y'²).
        let j = v.grid.ny / 4;
        let i = v.grid.nx / 2;
        let yp = v.grid.y(j);
        assert!((v.at(i, j) - PI.sqrt() * PI * PI * (1.0 - yp * yp)).abs() < 1e-9);
    }

    #[test]
    fn cka_guard_and_ceiling() {
        let g = strip_grid(-1.5, 1.5, 31, 11).unwrap();
        let v = Field::zeros(g);
        let spec = CutoffSpec::new(1.0, 20.0, 1.0, 3.0).unwrap();
        assert!(lemma_norms_cka(&v, 20.0, 1.0, 1.0, 1.5, &spec).is_err());
        let c = cka_ceilings(10.0, 2.0, 1.0, 1.5);
        assert!((c[3] - 10f64.powf(-2.5)).abs() < 1e-15);
    }

    fn random_field(seed: u64) -> Field {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = strip_grid(-1.6, 1.6, 97, 9).unwrap();
        let mut f = Field::zeros(g);
        f.values
            .iter_mut()
            .for_each(|v| *v = rng.random::<f64>() - 0.5);
        f
    }

    proptest::proptest! {
        #[test]
        fn scaling_covariance(seed in 0u64..200, e in -8i32..8) {
            let (_, g) = stadium_grid(0.1);
            let u = Field::from_fn(g.tensor(), |x, y| ((seed as f64 + 1.0) * x).sin() + (y * 0.3).cos());
            let mut v = u.clone();
            v.scale(2f64.powi(e));
            proptest::prop_assert_eq!(wing_masses(&u, 4.0, &g, 1.0).unwrap(), wing_masses(&v, 4.0, &g, 1.0).unwrap());
        }

        #[test]
        fn weight_ordering(seed in 0u64..200, gamma in 1.0f64..4.0, lambda in 5.0f64..60.0) {
            let w = random_field(seed);
            let spec = CutoffSpec::new(1.0, lambda, 0.8, 3.0).unwrap();
            let radius = spec.width();
            let lo = ramp_weighted_norm(&w, &spec, gamma).unwrap();
            let hi = ramp_weighted_norm(&w, &spec, gamma + 1.0).unwrap();
            proptest::prop_assert!(hi <= radius * lo * (1.0 + 1e-12));
            // R^γ ψ ≤ (c λ^{-p})^γ H ψ pointwise.
            let h = ramp_weighted_norm(&w, &spec, 0.0).unwrap();
            proptest::prop_assert!(lo <= spec.c.powf(gamma) * lambda.powf(-gamma * spec.p) * h * (1.0 + 1e-12));
        }
    }

    #[test]
    fn theorem_check_rules() {
        let mk = |lambda: f64, residual: f64, m: f64| CheckEntry {
            lambda,
            residual,
            masses: WingMasses {
                m0: m,
                m1: m,
                m2: m,
            },
            wing_present: true,
        };
        let entries: Vec<CheckEntry> = (5..12)
            .map(|l| mk(l as f64, 1e-10, (l as f64).powf(-1.0)))
            .collect();
        let c = theorem_check(&entries, 0.1, 0.5, None).unwrap();
        assert_eq!((c.verdict, c.alarms), (Verdict::Pass, 0));
        // A tiny-mass row with small residual raises an alarm.
        let mut bad = entries.clone();
        bad[3].masses = WingMasses {
            m0: 1e-9,
            m1: 1e-9,
            m2: 1e-9,
        };
        let c = theorem_check(&bad, 0.1, 0.5, None).unwrap();
        assert_eq!((c.verdict, c.alarms), (Verdict::Fail, 1));
        // Same row with a large residual: hypothesis fails, no alarm.
        bad[3].residual = 10.0;
        assert_eq!(theorem_check(&bad, 0.1, 0.5, None).unwrap().alarms, 0);
        let none: Vec<CheckEntry> = entries
            .iter()
            .map(|e| CheckEntry {
                wing_present: false,
                ..*e
            })
            .collect();
        assert_eq!(
            theorem_check(&none, 0.1, 0.5, None).unwrap().verdict,
            Verdict::NotApplicable
        );
        assert!(matches!(
            theorem_check(&entries[..4], 0.1, 0.5, None),
            Err(Error::InsufficientData(_))
        ));
    }
}
