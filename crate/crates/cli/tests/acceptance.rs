//! Acceptance suite: one PASS/FAIL line per criterion. INFO lines are
//! reported but never fail the run.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use wingmass::eigen::{aligned_spacing, assemble, solve_window, SolveOptions};
use wingmass::field::{Field, TensorGrid};
use wingmass::geometry::{DomainProfile, WingProfile, WingSign};
use wingmass::par::Execution;
use wingmass::quad::{gauss_legendre, integrate};
use wingmass::quasimode::{residual_scaling, AlarmRule, CutoffFamily, GridPolicy, SupportPolicy};
use wingmass::scaling::{
    branch_crossing, compute_s_delta, fit_exponent, lower_envelope, s_delta_of_beta,
};
use wingmass::separable::sweep_scaling;
use wingmass::straighten::{
    conjugate_to_u, conjugate_to_v, identity_suite_many, strip_grid, transform_dx, transform_dxx,
    Cutoff, StraightJet,
};

#[derive(Clone, Copy, PartialEq)]
enum Status {
    Pass,
    Fail,
    Info,
}

#[derive(Default)]
struct Suite {
    failed: usize,
}

impl Suite {
    fn record(&mut self, status: Status, name: &str, detail: String) {
        let tag = match status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        };
        if status == Status::Fail {
            self.failed += 1;
        }
        println!("{tag:<4}  {name}: {detail}");
    }

    fn check(&mut self, ok: bool, name: &str, detail: String) {
        self.record(if ok { Status::Pass } else { Status::Fail }, name, detail);
    }

    /// Runs `f`, turning an error into a FAIL line.
    fn run(&mut self, name: &str, f: impl FnOnce(&mut Suite) -> Result<(), String>) {
        let t = Instant::now();
        if let Err(e) = f(self) {
            self.record(Status::Fail, name, e);
        }
        eprintln!("      ({name}: {:.1} s)", t.elapsed().as_secs_f64());
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn power(k: u32, alpha: f64, sign: WingSign) -> DomainProfile {
    DomainProfile::symmetric(
        1.0,
        PI,
        WingProfile::power_law(k, alpha, 0.5, sign),
        Some(2.5),
    )
    .unwrap()
}

fn identity_suite(s: &mut Suite) -> Result<(), String> {
    let mut profiles = vec![DomainProfile::stadium(1.0)];
    for (k, alpha) in [(2, 0.0), (2, 0.5), (3, 0.0), (4, 0.0), (1, 1.0)] {
        for sign in [WingSign::OpensOutward, WingSign::ClosesInward] {
            profiles.push(power(k, alpha, sign));
        }
    }
    for sign in [WingSign::OpensOutward, WingSign::ClosesInward] {
        profiles.push(
            DomainProfile::symmetric(1.0, PI, WingProfile::gevrey0(1.0, 0.5, sign), Some(2.5))
                .map_err(err)?,
        );
    }
    let t = Instant::now();
    let r = identity_suite_many(&profiles, 1000, 2024).map_err(err)?;
    let secs = t.elapsed().as_secs_f64();
    s.check(
        r.samples >= 1000 && r.passes() && secs < 1.0,
        "operator identity suite",
        format!(
            "{} samples over {} profiles, det {:.1e} (<= 1e-13), dx {:.1e} (<= 1e-12), dy {:.1e} (<= 1e-10), {secs:.3} s (< 1 s)",
            r.samples,
            profiles.len(),
            r.det_rel,
            r.dx_residual,
            r.dy_mismatch
        ),
    );
    Ok(())
}

fn lowest(
    profile: &DomainProfile,
    h: f64,
    lambda_max: f64,
    count: usize,
) -> Result<Vec<f64>, String> {
    let op = assemble(profile, h, Execution::default()).map_err(err)?;
    let sol = solve_window(&op, 0.0, lambda_max, 500, &SolveOptions::default()).map_err(err)?;
    if sol.pairs.len() < count {
        return Err(format!(
            "found {} eigenvalues below {lambda_max}, need {count}",
            sol.pairs.len()
        ));
    }
    Ok(sol.pairs.iter().take(count).map(|p| p.lambda_sq).collect())
}

fn max_rel(computed: &[f64], exact: &[f64]) -> f64 {
    computed
        .iter()
        .zip(exact)
        .map(|(c, e)| (c - e).abs() / e)
        .fold(0.0, f64::max)
}

fn rectangle(s: &mut Suite) -> Result<(), String> {
    let mut exact: Vec<f64> = (1..=12)
        .flat_map(|m| {
            (1..=12).map(move |n| (m as f64 * PI / 2.0).powi(2) + (n as f64 / 2.0).powi(2))
        })
        .collect();
    exact.sort_by(f64::total_cmp);
    let h = aligned_spacing(0.01, PI).map_err(err)?;
    let top = 0.5 * (exact[19].sqrt() + exact[20].sqrt());
    let got = lowest(&DomainProfile::rectangle(1.0).map_err(err)?, h, top, 20)?;
    let rel = max_rel(&got, &exact[..20]);
    s.check(
        rel <= 1e-3,
        "solver validation, rectangle",
        format!("lowest 20 at h = {h:.5}: max rel err {rel:.2e} (<= 1e-3)"),
    );
    Ok(())
}

/// `J_m(x) = (1/π) ∫₀^π cos(mτ − x sin τ) dτ`.
fn bessel_j(m: u32, x: f64, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    integrate(|t| (m as f64 * t - x * t.sin()).cos(), 0.0, PI, 16, rule) / PI
}

/// Positive zeros of `J_m` below `x_max`, by scan and bisection.
fn bessel_zeros(m: u32, x_max: f64, rule: &(Vec<f64>, Vec<f64>)) -> Vec<f64> {
    let mut zeros = Vec::new();
    let step = 0.05;
    let mut x = 0.5;
    while x < x_max {
        let (mut lo, mut hi) = (x, x + step);
        if bessel_j(m, lo, rule).signum() != bessel_j(m, hi, rule).signum() {
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if bessel_j(m, lo, rule).signum() == bessel_j(m, mid, rule).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        x += step;
    }
    zeros
}

fn disc(s: &mut Suite) -> Result<(), String> {
    let rule = gauss_legendre(12);
    let r = PI;
    let mut exact = Vec::new();
    for m in 0..6 {
        for j in bessel_zeros(m, 12.0, &rule) {
            let l2 = (j / r).powi(2);
            exact.push(l2);
            if m > 0 {
                exact.push(l2);
            }
        }
    }
    exact.sort_by(f64::total_cmp);
    let ok_oracle = (exact[0].sqrt() * r - 2.404_825_557_695_773).abs() < 1e-12;
    let h = aligned_spacing(0.01, PI).map_err(err)?;
    let top = 0.5 * (exact[4].sqrt() + exact[5].sqrt());
    let got = lowest(&DomainProfile::stadium(0.0), h, top, 5)?;
    let rel = max_rel(&got, &exact[..5]);
    s.check(
        ok_oracle && rel <= 1e-3,
        "solver validation, disc",
        format!(
            "lowest 5 of radius pi at h = {h:.5} vs Bessel zeros: max rel err {rel:.2e} (<= 1e-3)"
        ),
    );
    Ok(())
}

fn orders(errs: &[f64]) -> Vec<f64> {
    errs.windows(2).map(|e| (e[0] / e[1]).log2()).collect()
}

fn conjugation(s: &mut Suite) -> Result<(), String> {
    let p = DomainProfile::stadium(1.0);
    let half: f64 = 1.8;
    let mut round = Vec::new();
    for h in [0.04_f64, 0.02, 0.01] {
        let nx = (2.0 * half / h).round() as usize + 1;
        let ny = (2.0 * PI / h).round() as usize + 1;
        let phys = TensorGrid {
            x0: -half,
            y0: -PI,
            hx: 2.0 * half / (nx - 1) as f64,
            hy: 2.0 * PI / (ny - 1) as f64,
            nx,
            ny,
        };
        let strip = strip_grid(-half, half, nx, ny).map_err(err)?;
        let u = Field::from_fn(phys, |x, y| {
            let w = p.eval_y(x).unwrap();
            if y.abs() < w {
                (w * w - y * y) * (0.8 * x).cos() * (1.0 + 0.2 * y)
            } else {
                0.0
            }
        });
        let back =
            conjugate_to_u(&conjugate_to_v(&u, &p, strip).map_err(err)?, &p, phys).map_err(err)?;
        round.push(
            u.values
                .iter()
                .zip(&back.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        );
    }
    let round_orders = orders(&round);

    let v_of = |x: f64, yp: f64| (1.0 - yp * yp) * (0.9 * x).sin().exp() * (1.0 + 0.3 * yp);
    let jet_of = |x: f64, yp: f64| {
        let e = (0.9 * x).sin().exp();
        let ex = 0.9 * (0.9 * x).cos() * e;
        let exx = (0.81 * (0.9 * x).cos().powi(2) - 0.81 * (0.9 * x).sin()) * e;
        let g = (1.0 - yp * yp) * (1.0 + 0.3 * yp);
        let gy = -2.0 * yp * (1.0 + 0.3 * yp) + 0.3 * (1.0 - yp * yp);
        let gyy = -2.0 * (1.0 + 0.3 * yp) - 1.2 * yp;
        StraightJet {
            v: g * e,
            v_x: g * ex,
            v_y: gy * e,
            v_xx: g * exx,
            v_xy: gy * ex,
            v_yy: gyy * e,
        }
    };
    let mut transform_orders = Vec::new();
    for p in [
        DomainProfile::stadium(1.0),
        power(3, 0.0, WingSign::OpensOutward),
        power(2, 0.5, WingSign::ClosesInward),
    ] {
        for (x, yp) in [(1.5, 0.4), (-1.7, -0.6), (1.2, 0.9)] {
            let y = yp * p.eval_y(x).map_err(err)?;
            let u = |x: f64| {
                let w = p.eval_y(x).unwrap();
                v_of(x, y / w) / w.sqrt()
            };
            let jet = jet_of(x, yp);
            let ux = transform_dx(&p, x, yp, &jet).map_err(err)?;
            let uxx = transform_dxx(&p, x, yp, &jet).map_err(err)?;
            let steps = [0.02, 0.01, 0.005];
            let e1: Vec<f64> = steps
                .iter()
                .map(|&h| ((u(x + h) - u(x - h)) / (2.0 * h) - ux).abs())
                .collect();
            let e2: Vec<f64> = steps
                .iter()
                .map(|&h| ((u(x + h) - 2.0 * u(x) + u(x - h)) / (h * h) - uxx).abs())
                .collect();
            transform_orders.extend(orders(&e1));
            transform_orders.extend(orders(&e2));
        }
    }
    let range = |q: &[f64]| {
        (
            q.iter().cloned().fold(f64::INFINITY, f64::min),
            q.iter().cloned().fold(0.0, f64::max),
        )
    };
    let (r0, r1) = range(&round_orders);
    let (t0, t1) = range(&transform_orders);
    let inside = |q: &[f64]| q.iter().all(|o| (1.7..=2.3).contains(o));
    s.check(
        inside(&round_orders) && inside(&transform_orders),
        "conjugation and transform orders",
        format!("round trip order in [{r0:.2}, {r1:.2}], transforms in [{t0:.2}, {t1:.2}] (within [1.7, 2.3])"),
    );
    Ok(())
}

fn s_delta(s: &mut Suite) -> Result<(), String> {
    let d = 0.1;
    let a = compute_s_delta(1, 1.0, d).map_err(err)?;
    let b = compute_s_delta(2, 1.0, d).map_err(err)?;
    let smooth = compute_s_delta(0, f64::INFINITY, d).map_err(err)?;
    let far = s_delta_of_beta(1e12, d).map_err(err)?;
    let bc = branch_crossing(d);
    let eps = 1e-9;
    let jump = (s_delta_of_beta(bc + eps, d).map_err(err)?
        - s_delta_of_beta(bc - eps, d).map_err(err)?)
    .abs();
    let at = s_delta_of_beta(bc, d).map_err(err)?;
    let ok = (a - 2.2).abs() <= 1e-14
        && (b - (1.0 + 1.1 / 3.0 + 0.1)).abs() <= 1e-14
        && (smooth - 1.1).abs() <= 1e-14
        && (far - 1.1).abs() <= 1e-11
        && jump <= 1e-9
        && (at - (1.1 + 1.0 / bc)).abs() <= 1e-14;
    s.check(
        ok,
        "s_delta formula",
        format!("(1,1): {a}, (2,1): {b}, smooth: {smooth}, k+alpha = 1e12: {far:.12}, jump at {bc:.4}: {jump:.1e}"),
    );
    Ok(())
}

fn fixed_cutoff(s: &mut Suite) -> Result<(), String> {
    let (plateau, width) = (0.5, 0.4);
    let chi = Cutoff::new(plateau, width).map_err(err)?;
    let exact = chi.derivative_l2(2) / chi.derivative_l2(0);
    let scale = chi.derivative_l2(4) / chi.derivative_l2(0);
    let n_list: Vec<u32> = (4..=64).collect();
    let rows = residual_scaling(
        &DomainProfile::stadium(1.0),
        &n_list,
        CutoffFamily::Fixed { plateau, width },
        GridPolicy {
            h_max: 0.05,
            kappa: 1.0,
        },
        SupportPolicy::Strict,
        AlarmRule {
            eps0: 0.5,
            delta: 0.1,
            c_delta: 1e-3,
        },
        Execution::default(),
    )
    .map_err(err)?;
    let worst = rows
        .iter()
        .map(|r| (r.e - exact).abs() / (2.0 * r.h * r.h * scale))
        .fold(0.0, f64::max);
    let max_dev = rows.iter().map(|r| (r.e - exact).abs()).fold(0.0, f64::max);
    s.check(
        rows.len() == n_list.len() && worst <= 1.0,
        "fixed-cutoff quasimode residual",
        format!(
            "n = 4..64: |E - |chi''|/|chi|| <= {max_dev:.3e}, worst fraction of 2 h^2 |chi''''|/|chi| tolerance {worst:.3}"
        ),
    );
    Ok(())
}

fn separable(s: &mut Suite) -> Result<(), String> {
    let n: Vec<u32> = (3..=8).map(|e| 1 << e).collect();
    let mut slopes = Vec::new();
    let mut detail = Vec::new();
    let mut ok = true;
    for (k, alpha) in [(1, 1.0), (2, 1.0), (3, 1.0)] {
        let p = power(k, alpha, WingSign::ClosesInward);
        let rows = sweep_scaling(&p, &n, 0.01, None, Execution::default()).map_err(err)?;
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| (r.lambda, r.wing_mass_left + r.wing_mass_right))
            .collect();
        let fit = fit_exponent(&lower_envelope(&pts, 1.0)).map_err(err)?;
        let sd = compute_s_delta(k, alpha, 0.1).map_err(err)?;
        ok &= fit.slope >= -sd - 0.3;
        detail.push(format!(
            "k+alpha = {}: slope {:.3} (>= {:.3})",
            k as f64 + alpha,
            fit.slope,
            -sd - 0.3
        ));
        slopes.push(fit.slope);
    }
    let monotone = slopes.windows(2).all(|w| w[1] >= w[0]);
    s.check(
        ok && monotone,
        "separable oracle scaling",
        format!("{}; monotone: {monotone}", detail.join(", ")),
    );
    Ok(())
}

fn wingmass_bin(args: &[&str], config: &Path, out: &Path) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_wingmass"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(err)?;
    if o.status.success() {
        Ok(())
    } else {
        Err(format!(
            "wingmass {args:?} exited with {:?}: {}",
            o.status.code(),
            String::from_utf8_lossy(&o.stderr)
        ))
    }
}

fn read_json(p: &Path) -> Result<serde_json::Value, String> {
    serde_json::from_slice(&fs::read(p).map_err(err)?).map_err(err)
}

fn read_table(p: &Path) -> Result<Vec<Vec<(String, String)>>, String> {
    let mut rdr = csv::Reader::from_path(p).map_err(err)?;
    let headers = rdr.headers().map_err(err)?.clone();
    rdr.records()
        .map(|r| {
            r.map(|r| {
                headers
                    .iter()
                    .zip(r.iter())
                    .map(|(h, v)| (h.to_string(), v.to_string()))
                    .collect()
            })
            .map_err(err)
        })
        .collect()
}

fn column(row: &[(String, String)], name: &str) -> f64 {
    row.iter()
        .find(|(h, _)| h == name)
        .and_then(|(_, v)| v.parse().ok())
        .unwrap_or(f64::NAN)
}

const SWEEP: &str = r#"
[profile]
a = 1.0
wing = { kind = "stadium" }

[solver]
lambda_min = 5.0
lambda_max = 40.0
windows = 10
window_modes = 30

[grid]
kappa = 0.2

[analysis]
delta = 0.1
margin = 0.2

[output]
write_fields = false
"#;

/// Stadium sweep: envelope slope of the largest wing mass, alarms, and the
/// weighted-norm ratio trends.
fn theorem_trend(s: &mut Suite, dir: &Path) -> Result<(), String> {
    let cfg = dir.join("sweep.toml");
    fs::write(&cfg, SWEEP).map_err(err)?;
    let out = dir.join("sweep");
    wingmass_bin(&["mass-report"], &cfg, &out)?;
    let rep = read_json(&out.join("scaling_report.json"))?;
    let row = &rep["exponents"][0];
    let slope = row["fitted_slope"].as_f64().ok_or("no fitted slope")?;
    let n_modes = row["n_modes"].as_u64().unwrap_or(0);
    let alarms = rep["theorem_check"]["alarms"]
        .as_u64()
        .ok_or("no alarm count")?;
    let range = &row["lambda_range"];
    s.check(
        slope >= -2.3 && alarms == 0,
        "theorem trend, stadium sweep",
        format!(
            "{n_modes} modes, lambda in [{:.2}, {:.2}]: envelope slope of M_max {slope:.3} (>= -2.3), {alarms} alarms",
            range[0].as_f64().unwrap_or(f64::NAN),
            range[1].as_f64().unwrap_or(f64::NAN)
        ),
    );

    let trends = rep["lemma_ratio_trends"]
        .as_array()
        .ok_or("no ratio trends")?;
    let all: Vec<String> = trends
        .iter()
        .map(|t| {
            format!(
                "{} {:.2}",
                t["name"].as_str().unwrap_or("?"),
                t["slope"].as_f64().unwrap_or(f64::NAN)
            )
        })
        .collect();
    let bounded = trends
        .iter()
        .all(|t| t["slope"].as_f64().is_some_and(|v| v <= 0.1));

    // Same fit restricted to the modes on the lower envelope of M_max, which
    // are the ones closest to bouncing-ball states.
    let masses = read_table(&out.join("mass_report.csv"))?;
    let norms = read_table(&out.join("lemma_norms.csv"))?;
    let mut best: std::collections::BTreeMap<i64, (f64, usize)> = std::collections::BTreeMap::new();
    for (k, r) in masses.iter().enumerate() {
        let (lambda, m) = (column(r, "lambda"), column(r, "M_max"));
        let e = best.entry(lambda.floor() as i64).or_insert((m, k));
        if m < e.0 {
            *e = (m, k);
        }
    }
    let mut env = Vec::new();
    for name in ["ny", "nx", "nxy", "nyy", "nxx"] {
        let pts: Vec<(f64, f64)> = best
            .values()
            .map(|&(_, k)| {
                (
                    column(&norms[k], "lambda"),
                    column(&norms[k], &format!("ratio_{name}")),
                )
            })
            .filter(|p| p.1 > 0.0)
            .collect();
        let slope = fit_exponent(&pts).map(|f| f.slope).unwrap_or(f64::NAN);
        env.push(format!("{name} {slope:.2}"));
    }
    s.record(
        Status::Info,
        "weighted-norm ratio trends",
        format!(
            "{}: slopes over all modes [{}], over envelope modes [{}] (target <= 0.1)",
            if bounded {
                "bounded"
            } else {
                "growth observed"
            },
            all.join(", "),
            env.join(", ")
        ),
    );
    Ok(())
}

const SMALL: &str = r#"
[profile]
a = 1.0
wing = { kind = "power_law", k = 2, alpha = 1.0, coeff = 0.5, sign = "closes_inward" }
x_extent = 2.5

[solver]
lambda_max = 6.0

[grid]
h_max = 0.05

[separable]
n = [8, 16, 32, 64, 128]

[quasimode]
n = [4, 8, 16, 32]

[scaling]
input = "run0/mass-report/mass_report.csv"
"#;

fn csv_files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .map(|d| {
            d.filter_map(|e| e.ok())
                .map(|e| e.file_name().to_string_lossy().into_owned())
                .filter(|n| n.ends_with(".csv"))
                .collect()
        })
        .unwrap_or_default();
    v.sort();
    v
}

fn determinism(s: &mut Suite, dir: &Path) -> Result<(), String> {
    let cfg = dir.join("small.toml");
    fs::write(&cfg, SMALL).map_err(err)?;
    let subs = [
        "validate-operator",
        "eigs",
        "separable",
        "quasimode",
        "mass-report",
        "scaling-fit",
    ];
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for run in ["run0", "run1"] {
        for sub in subs {
            wingmass_bin(&[sub], &cfg, &dir.join(run).join(sub))?;
        }
    }
    for sub in subs {
        let (a, b) = (dir.join("run0").join(sub), dir.join("run1").join(sub));
        let files = csv_files(&a);
        if files != csv_files(&b) {
            mismatches.push(format!("{sub}: file sets differ"));
        }
        for f in files {
            compared += 1;
            if fs::read(a.join(&f)).map_err(err)? != fs::read(b.join(&f)).map_err(err)? {
                mismatches.push(format!("{sub}/{f}"));
            }
        }
    }
    s.check(
        mismatches.is_empty() && compared >= 6,
        "determinism",
        format!(
            "{compared} CSV files from two runs of all six subcommands, mismatches: {mismatches:?}"
        ),
    );
    Ok(())
}

fn main() -> ExitCode {
    let mut s = Suite::default();
    let tmp = tempfile::tempdir().expect("temporary directory");
    s.run("operator identity suite", identity_suite);
    s.run("solver validation, rectangle", rectangle);
    s.run("solver validation, disc", disc);
    s.run("conjugation and transform orders", conjugation);
    s.run("s_delta formula", s_delta);
    s.run("fixed-cutoff quasimode residual", fixed_cutoff);
    s.run("separable oracle scaling", separable);
    s.run("determinism", |s| determinism(s, tmp.path()));
    s.run("theorem trend, stadium sweep", |s| {
        theorem_trend(s, tmp.path())
    });
    if s.failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", s.failed);
        ExitCode::FAILURE
    }
}
