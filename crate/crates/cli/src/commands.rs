//! The six subcommands.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use wingmass::eigen::{read_field, write_field, EigenPair, Grid};
use wingmass::field::Field;
use wingmass::geometry::DomainProfile;
use wingmass::massfunc::{theorem_check, CheckEntry, TheoremCheck, Verdict, LEMMA_NAMES};
use wingmass::par::Execution;
use wingmass::quasimode::{residual_scaling, AlarmRule, GridPolicy};
use wingmass::scaling::{
    exponent_report, fit_exponent, lower_envelope, ExponentRow, ReportVerdict, Sweep,
};
use wingmass::separable::{sweep_scaling, wall_sensitivity, DEFAULT_WALL_SPAN};
use wingmass::straighten::{identity_suite, strip_grid, IdentityReport, StripOperator};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::Outputs;
use crate::pipeline::{
    analyze, lemma_mode, plan_windows, solve, ModeAnalysis, ModeRef, ModeRow, Window,
};

/// Context shared by every subcommand.
pub struct Ctx<'a> {
    pub cfg: &'a RunConfig,
    /// Directory relative input paths are resolved against.
    pub base: PathBuf,
    pub exec: Execution,
}

impl Ctx<'_> {
    fn profile(&self) -> Result<DomainProfile, CliError> {
        self.cfg.profile.build()
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }
}

#[derive(Serialize)]
struct OperatorReport {
    profile: String,
    identities: IdentityReport,
    strip_asymmetry: f64,
    strip_unknowns: usize,
    eigen_asymmetry: f64,
    eigen_unknowns: usize,
    pass: bool,
}

/// Identity suite plus symmetry of both discrete operators.
pub fn validate_operator(ctx: &Ctx, out: &mut Outputs) -> Result<(), CliError> {
    let profile = ctx.profile()?;
    let identities = out.timed("identities", |_| {
        identity_suite(&profile, 1000, ctx.cfg.solver.seed)
    })?;
    let h = ctx.cfg.grid.h.unwrap_or(ctx.cfg.grid.h_max);
    let (strip_asymmetry, strip_unknowns) =
        out.timed("strip_operator", |_| -> Result<_, CliError> {
            let reach = if profile.has_wings() {
                profile.a + (DEFAULT_WALL_SPAN.min(0.9 * (profile.x_extent - profile.a)))
            } else {
                profile.a
            };
            let nx = ((2.0 * reach / h).ceil() as usize + 1).max(3);
            let ny = ((2.0 * profile.half_width / h).ceil() as usize + 1).max(3);
            let op = StripOperator::assemble(&profile, strip_grid(-reach, reach, nx, ny)?)?;
            Ok((op.matrix.asymmetry(), op.matrix.n_rows))
        })?;
    let (eigen_asymmetry, eigen_unknowns) =
        out.timed("eigen_operator", |_| -> Result<_, CliError> {
            let h = wingmass::eigen::aligned_spacing(h, profile.half_width)?;
            let op = wingmass::eigen::assemble(&profile, h, ctx.exec)?;
            Ok((op.matrix.asymmetry(), op.matrix.n_rows))
        })?;
    let pass = identities.passes() && strip_asymmetry == 0.0 && eigen_asymmetry == 0.0;
    let report = OperatorReport {
        profile: profile.label(),
        identities,
        strip_asymmetry,
        strip_unknowns,
        eigen_asymmetry,
        eigen_unknowns,
        pass,
    };
    out.write_json("operator_report.json", &report)?;
    if !pass {
        return Err(CliError::Check(format!(
            "operator validation failed: {}",
            serde_json::to_string(&report).unwrap_or_default()
        )));
    }
    Ok(())
}

/// Appends one row per pair, writing each field when `write_fields`.
fn persist_modes(
    out: &mut Outputs,
    rows: &mut Vec<ModeRow>,
    w: &Window,
    pairs: &[EigenPair],
    write_fields: bool,
) -> Result<(), CliError> {
    for p in pairs {
        let mode_id = rows.len();
        let field_file = if write_fields {
            let name = format!("fields/mode_{mode_id:05}.dat");
            let mut buf = Vec::new();
            write_field(&mut buf, &p.field)?;
            out.write_bytes(&name, &buf)?;
            name
        } else {
            String::new()
        };
        rows.push(ModeRow {
            mode_id,
            window: w.index,
            lambda: p.lambda,
            lambda_sq: p.lambda_sq,
            residual: p.residual,
            parity: p.sector.code(),
            h: w.h,
            field_file,
        });
    }
    Ok(())
}

/// Solves every planned window and persists the modes.
pub fn eigs(ctx: &Ctx, out: &mut Outputs) -> Result<(), CliError> {
    let profile = ctx.profile()?;
    let windows = plan_windows(&profile, &ctx.cfg.solver, &ctx.cfg.grid)?;
    let mut rows = Vec::new();
    for w in &windows {
        out.log(format!(
            "window {}: lambda in [{:.3}, {:.3}), h = {:.5}",
            w.index, w.lambda_min, w.lambda_max, w.h
        ));
        let (solved, warnings) =
            out.timed("solve", |_| solve(&profile, w, &ctx.cfg.solver, ctx.exec))?;
        warnings.into_iter().for_each(|m| out.warn(m));
        let Some((_, pairs)) = solved else { continue };
        persist_modes(out, &mut rows, w, &pairs, ctx.cfg.output.write_fields)?;
    }
    out.write_table("modes.csv", &rows, &ModeRow::COLUMNS)?;
    Ok(())
}

pub fn separable(ctx: &Ctx, out: &mut Outputs) -> Result<(), CliError> {
    let profile = ctx.profile()?;
    let sc = &ctx.cfg.separable;
    let rows = out.timed("sweep", |_| {
        sweep_scaling(&profile, &sc.n, sc.h_max, sc.wall_span, ctx.exec)
    })?;
    out.write_csv("separable.csv", &rows)?;
    if profile.has_wings() {
        let span = sc
            .wall_span
            .unwrap_or(DEFAULT_WALL_SPAN.min(0.9 * (profile.x_extent - profile.a)));
        let n = sc.n[0];
        let sens = out.timed("wall_sensitivity", |_| {
            wall_sensitivity(&profile, n, sc.h_max, span)
        })?;
        if sens > 0.05 {
            out.warn(format!(
                "wing mass of n = {n} moves by {:.1}% when the walls move in by 20%",
                100.0 * sens
            ));
        }
        let points: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| (r.lambda, r.wing_mass_left + r.wing_mass_right))
            .filter(|p| p.1 > 0.0)
            .collect();
        let label = profile.label();
        let sweep = Sweep {
            name: "wing_mass".into(),
            profile: label.clone(),
            regularity: profile.regularity(),
            points,
        };
        let report = SeparableReport {
            profile: label.clone(),
            wall_sensitivity: sens,
            rows: fit_rows(
                &[sweep],
                &label,
                ctx.cfg.analysis.delta,
                ctx.cfg.analysis.margin,
                out,
            ),
        };
        out.write_json("separable_report.json", &report)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SeparableReport {
    profile: String,
    wall_sensitivity: f64,
    rows: Vec<ExponentRow>,
}

/// Exponent rows, downgrading too-short series to a warning.
fn fit_rows(
    sweeps: &[Sweep],
    profile: &str,
    delta: f64,
    margin: f64,
    out: &mut Outputs,
) -> Vec<ExponentRow> {
    let mut rows = Vec::new();
    for s in sweeps {
        match exponent_report(std::slice::from_ref(s), profile, delta, margin) {
            Ok(mut r) => rows.append(&mut r),
            Err(e) => out.warn(format!("series '{}': {e}", s.name)),
        }
    }
    rows
}

pub fn quasimode(ctx: &Ctx, out: &mut Outputs) -> Result<(), CliError> {
    let profile = ctx.profile()?;
    let q = &ctx.cfg.quasimode;
    let a = &ctx.cfg.analysis;
    let rows = out.timed("quasimodes", |_| {
        residual_scaling(
            &profile,
            &q.n,
            q.family.into(),
            GridPolicy {
                h_max: q.h_max,
                kappa: q.kappa,
            },
            q.policy.into(),
            AlarmRule {
                eps0: a.eps0,
                delta: a.delta,
                c_delta: a.c_delta,
            },
            ctx.exec,
        )
    })?;
    let alarms = rows.iter().filter(|r| r.alarm_flag).count();
    if alarms > 0 {
        out.warn(format!("{alarms} theorem-contradiction alarms"));
    }
    out.write_csv("quasimode.csv", &rows)?;
    Ok(())
}

#[derive(Serialize)]
struct MassRow {
    mode_id: usize,
    window: usize,
    lambda: f64,
    #[serde(rename = "E")]
    e: f64,
    #[serde(rename = "M0")]
    m0: f64,
    #[serde(rename = "M1")]
    m1: f64,
    #[serde(rename = "M2")]
    m2: f64,
    #[serde(rename = "M_max")]
    m_max: f64,
    #[serde(rename = "T")]
    t: f64,
    verdict: &'static str,
}

#[derive(Serialize)]
struct LemmaRow {
    mode_id: usize,
    lambda: f64,
    ny: f64,
    nx: f64,
    nxy: f64,
    nyy: f64,
    nxx: f64,
    ceiling_ny: f64,
    ceiling_nx: f64,
    ceiling_nxy: f64,
    ceiling_nyy: f64,
    ceiling_nxx: f64,
    ratio_ny: f64,
    ratio_nx: f64,
    ratio_nxy: f64,
    ratio_nyy: f64,
    ratio_nxx: f64,
    boundary_leak: f64,
}

#[derive(Serialize)]
pub struct RatioTrend {
    pub name: &'static str,
    pub slope: f64,
    pub stderr: f64,
    pub n_points: usize,
    /// Slope at most 0.1.
    pub bounded: bool,
    pub verdict: ReportVerdict,
}

#[derive(Serialize)]
struct TheoremSummary {
    exponent: f64,
    envelope_slope: Option<f64>,
    alarms: usize,
    verdict: Verdict,
    n_modes: usize,
}

#[derive(Serialize)]
struct MassReport {
    profile: String,
    delta: f64,
    eps0: f64,
    theorem_check: Option<TheoremSummary>,
    exponents: Vec<ExponentRow>,
    lemma_ratio_trends: Vec<RatioTrend>,
}

/// Modes persisted by `eigs` in `dir`.
fn load_modes(dir: &Path) -> Result<Vec<(ModeRow, Field)>, CliError> {
    let mut rdr = csv::Reader::from_path(dir.join("modes.csv"))
        .map_err(|e| CliError::Config(format!("cannot read {}/modes.csv: {e}", dir.display())))?;
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let row: ModeRow = row.map_err(|e| CliError::Config(format!("modes.csv: {e}")))?;
        if row.field_file.is_empty() {
            return Err(CliError::Config(format!(
                "mode {} was persisted without its field",
                row.mode_id
            )));
        }
        let f = std::fs::File::open(dir.join(&row.field_file))?;
        let field = read_field(std::io::BufReader::new(f))?;
        out.push((row, field));
    }
    Ok(out)
}

fn lemma_trends(analyses: &[ModeAnalysis], out: &mut Outputs) -> Vec<RatioTrend> {
    let mut trends = Vec::new();
    if analyses.iter().all(|m| m.lemma.is_none()) {
        return trends;
    }
    for (k, name) in LEMMA_NAMES.iter().enumerate() {
        let pts: Vec<(f64, f64)> = analyses
            .iter()
            .filter_map(|m| m.lemma.as_ref().map(|l| (m.lambda, l.ratios[k])))
            .filter(|p| p.1 > 0.0)
            .collect();
        match fit_exponent(&pts) {
            Ok(f) => trends.push(RatioTrend {
                name,
                slope: f.slope,
                stderr: f.stderr_slope,
                n_points: f.n_points,
                bounded: f.slope <= 0.1,
                verdict: ReportVerdict::Info,
            }),
            Err(e) => out.warn(format!("ratio {name}: {e}")),
        }
    }
    trends
}

/// Wing masses, weighted norms and the trend verdicts for a mode sweep.
pub fn mass_report(ctx: &Ctx, out: &mut Outputs) -> Result<(), CliError> {
    let profile = ctx.profile()?;
    let a = &ctx.cfg.analysis;
    let (mode, note) = lemma_mode(&profile, a)?;
    if let Some(n) = note {
        out.warn(n);
    }
    let mut analyses: Vec<ModeAnalysis> = Vec::new();
    if let Some(dir) = &a.modes_dir {
        let dir = ctx.resolve(dir);
        let modes = out.timed("load", |_| load_modes(&dir))?;
        let mut grids: BTreeMap<u64, Grid> = BTreeMap::new();
        let mut by_window: BTreeMap<(usize, u64), Vec<ModeRef>> = BTreeMap::new();
        for (row, field) in &modes {
            if let std::collections::btree_map::Entry::Vacant(e) = grids.entry(row.h.to_bits()) {
                e.insert(Grid::new(&profile, row.h)?);
            }
            if field.grid != grids[&row.h.to_bits()].tensor() {
                return Err(CliError::Config(format!(
                    "field of mode {} does not match the configured profile",
                    row.mode_id
                )));
            }
            by_window
                .entry((row.window, row.h.to_bits()))
                .or_default()
                .push((row.mode_id, row.lambda, row.residual, field));
        }
        for ((window, hb), fields) in &by_window {
            let grid = &grids[hb];
            let res = out.timed("analyze", |_| {
                analyze(&profile, grid, fields, *window, mode, a, ctx.exec)
            })?;
            analyses.extend(res);
        }
    } else {
        let windows = plan_windows(&profile, &ctx.cfg.solver, &ctx.cfg.grid)?;
        let mut mode_rows = Vec::new();
        for w in &windows {
            out.log(format!(
                "window {}: lambda in [{:.3}, {:.3}), h = {:.5}",
                w.index, w.lambda_min, w.lambda_max, w.h
            ));
            let (solved, warnings) =
                out.timed("solve", |_| solve(&profile, w, &ctx.cfg.solver, ctx.exec))?;
            warnings.into_iter().for_each(|m| out.warn(m));
            let Some((op, pairs)) = solved else { continue };
            let base = analyses.len();
            persist_modes(out, &mut mode_rows, w, &pairs, ctx.cfg.output.write_fields)?;
            let fields: Vec<ModeRef> = pairs
                .iter()
                .enumerate()
                .map(|(k, p)| (base + k, p.lambda, p.residual, &p.field))
                .collect();
            let res = out.timed("analyze", |_| {
                analyze(&profile, &op.grid, &fields, w.index, mode, a, ctx.exec)
            })?;
            out.log(format!("window {}: {} modes analyzed", w.index, res.len()));
            analyses.extend(res);
        }
        out.write_table("modes.csv", &mode_rows, &ModeRow::COLUMNS)?;
    }
    analyses.sort_by_key(|m| m.mode_id);

    let wing_present = profile.has_wings();
    let entries: Vec<CheckEntry> = analyses
        .iter()
        .map(|m| CheckEntry {
            lambda: m.lambda,
            residual: m.residual,
            masses: m.masses,
            wing_present,
        })
        .collect();
    let check: Option<TheoremCheck> = match theorem_check(&entries, a.delta, a.eps0, None) {
        Ok(c) => Some(c),
        Err(e @ wingmass::Error::InsufficientData(_)) => {
            out.warn(format!("theorem check skipped: {e}"));
            None
        }
        Err(e) => return Err(e.into()),
    };
    let rows: Vec<MassRow> = analyses
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let (t, alarm) = check.as_ref().map_or(
                (m.masses.max() * m.lambda.powf(2.0 + a.delta), false),
                |c| (c.rows[k].t, c.rows[k].alarm),
            );
            MassRow {
                mode_id: m.mode_id,
                window: m.window,
                lambda: m.lambda,
                e: m.residual,
                m0: m.masses.m0,
                m1: m.masses.m1,
                m2: m.masses.m2,
                m_max: m.masses.max(),
                t,
                verdict: if !wing_present {
                    "NOT-APPLICABLE"
                } else if alarm {
                    "FAIL"
                } else {
                    "PASS"
                },
            }
        })
        .collect();
    out.write_csv("mass_report.csv", &rows)?;

    let lemma_rows: Vec<LemmaRow> = analyses
        .iter()
        .filter_map(|m| {
            m.lemma.as_ref().map(|l| LemmaRow {
                mode_id: m.mode_id,
                lambda: m.lambda,
                ny: l.values[0],
                nx: l.values[1],
                nxy: l.values[2],
                nyy: l.values[3],
                nxx: l.values[4],
                ceiling_ny: l.ceilings[0],
                ceiling_nx: l.ceilings[1],
                ceiling_nxy: l.ceilings[2],
                ceiling_nyy: l.ceilings[3],
                ceiling_nxx: l.ceilings[4],
                ratio_ny: l.ratios[0],
                ratio_nx: l.ratios[1],
                ratio_nxy: l.ratios[2],
                ratio_nyy: l.ratios[3],
                ratio_nxx: l.ratios[4],
                boundary_leak: l.boundary_leak,
            })
        })
        .collect();
    let leaks = analyses
        .iter()
        .filter(|m| m.lemma.as_ref().is_some_and(|l| l.boundary_warning))
        .count();
    if leaks > 0 {
        out.warn(format!(
            "{leaks} straightened modes do not vanish at y' = ±1 within 1e-8"
        ));
    }
    if !lemma_rows.is_empty() {
        out.write_csv("lemma_norms.csv", &lemma_rows)?;
    }

    let label = profile.label();
    let points: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.lambda, r.m_max))
        .filter(|p| p.1 > 0.0)
        .collect();
    let exponents = if wing_present {
        let sweep = Sweep {
            name: "M_max".into(),
            profile: label.clone(),
            regularity: profile.regularity(),
            points: points.clone(),
        };
        fit_rows(&[sweep], &label, a.delta, a.margin, out)
    } else {
        Vec::new()
    };
    let envelope: Vec<EnvelopePoint> = lower_envelope(&points, 1.0)
        .into_iter()
        .map(|(lambda, value)| EnvelopePoint {
            series: "M_max".into(),
            lambda,
            value,
        })
        .collect();
    out.write_csv("scaling_points.csv", &envelope)?;
    let report = MassReport {
        profile: label,
        delta: a.delta,
        eps0: a.eps0,
        theorem_check: check.map(|c| TheoremSummary {
            exponent: c.exponent,
            envelope_slope: c.envelope_slope,
            alarms: c.alarms,
            verdict: c.verdict,
            n_modes: c.rows.len(),
        }),
        exponents,
        lemma_ratio_trends: lemma_trends(&analyses, out),
    };
    out.write_json("scaling_report.json", &report)?;
    Ok(())
}

#[derive(Serialize)]
struct EnvelopePoint {
    series: String,
    lambda: f64,
    value: f64,
}

#[derive(Serialize)]
struct FitReport {
    profile: String,
    delta: f64,
    margin: f64,
    input: String,
    rows: Vec<ExponentRow>,
}

/// Exponent report of columns of an existing CSV.
pub fn scaling_fit(ctx: &Ctx, out: &mut Outputs) -> Result<(), CliError> {
    let profile = ctx.profile()?;
    let sc = &ctx.cfg.scaling;
    let a = &ctx.cfg.analysis;
    let input = sc
        .input
        .as_ref()
        .ok_or_else(|| CliError::Config("scaling.input is required for scaling-fit".into()))?;
    let path = ctx.resolve(input);
    let mut rdr = csv::Reader::from_path(&path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let headers = rdr
        .headers()
        .map_err(|e| CliError::Config(e.to_string()))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Config(format!("{} has no column '{name}'", path.display())))
    };
    let lambda_col = col(&sc.lambda_column)?;
    let value_cols: Vec<(String, usize)> = sc
        .value_columns
        .iter()
        .map(|c| col(c).map(|i| (c.clone(), i)))
        .collect::<Result<_, _>>()?;
    let mut series: Vec<Vec<(f64, f64)>> = vec![Vec::new(); value_cols.len()];
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let num = |i: usize| -> Result<f64, CliError> {
            rec[i]
                .parse::<f64>()
                .map_err(|e| CliError::Config(format!("{}: '{}': {e}", path.display(), &rec[i])))
        };
        let lambda = num(lambda_col)?;
        for (s, (_, i)) in series.iter_mut().zip(&value_cols) {
            s.push((lambda, num(*i)?));
        }
    }
    let label = profile.label();
    let sweeps: Vec<Sweep> = value_cols
        .iter()
        .zip(series)
        .map(|((name, _), points)| Sweep {
            name: name.clone(),
            profile: label.clone(),
            regularity: profile.regularity(),
            points,
        })
        .collect();
    let rows = exponent_report(&sweeps, &label, a.delta, a.margin)?;
    let mut env = Vec::new();
    for s in &sweeps {
        for (lambda, value) in lower_envelope(&s.points, 1.0) {
            env.push(EnvelopePoint {
                series: s.name.clone(),
                lambda,
                value,
            });
        }
    }
    out.write_csv("scaling_points.csv", &env)?;
    out.write_json(
        "scaling_report.json",
        &FitReport {
            profile: label,
            delta: a.delta,
            margin: a.margin,
            input: input.display().to_string(),
            rows,
        },
    )?;
    Ok(())
}
