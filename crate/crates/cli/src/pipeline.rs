//! Window planning, eigen solves and per-mode analysis shared by the
//! subcommands.

use serde::Serialize;
use wingmass::eigen::{aligned_spacing, assemble, solve_window, EigenPair, Grid, SolveOptions};
use wingmass::field::Field;
use wingmass::geometry::{DomainProfile, Regularity};
use wingmass::massfunc::{
    lemma_norms_c11, lemma_norms_cka, straighten_near_rectangle, wing_masses, LemmaNorms,
    WingMasses,
};
use wingmass::par::{self, Execution};
use wingmass::scaling::s_delta_of_beta;
use wingmass::straighten::CutoffSpec;

use crate::config::{AnalysisConfig, GridConfig, SolverConfig};
use crate::error::CliError;

/// One eigen solve: `λ ∈ [lambda_min, lambda_max)` at spacing `h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub index: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub h: f64,
}

fn spacing(profile: &DomainProfile, grid: &GridConfig, lambda_top: f64) -> Result<f64, CliError> {
    let req = match grid.h {
        Some(h) => h,
        None if lambda_top > 0.0 => grid.h_max.min(grid.kappa / lambda_top),
        None => grid.h_max,
    };
    Ok(aligned_spacing(req, profile.half_width)?)
}

/// A single window over the whole range, or `windows` sample windows each
/// holding about `window_modes` modes. Sample windows start at multiples of
/// 1/2 (where bouncing-ball frequencies sit), their starts are spaced
/// geometrically, and none reaches past `lambda_max`.
pub fn plan_windows(
    profile: &DomainProfile,
    solver: &SolverConfig,
    grid: &GridConfig,
) -> Result<Vec<Window>, CliError> {
    let (lo, hi) = (solver.lambda_min, solver.lambda_max);
    if solver.windows == 1 || hi == lo {
        let h = if hi > lo {
            spacing(profile, grid, hi)?
        } else {
            0.0
        };
        return Ok(vec![Window {
            index: 0,
            lambda_min: lo,
            lambda_max: hi,
            h,
        }]);
    }
    let k = 4.0 * std::f64::consts::PI * solver.window_modes / profile.area();
    let last = (hi * hi - k).max(0.0).sqrt();
    if last <= lo.max(0.5) {
        return Err(CliError::Config(format!(
            "solver window [{lo}, {hi}] is too narrow for {} sample windows of {} modes",
            solver.windows, solver.window_modes
        )));
    }
    let first = lo.max(0.5);
    let n = solver.windows;
    let mut out: Vec<Window> = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        let target = first * (last / first).powf(t);
        let mut start = (2.0 * target).floor() / 2.0;
        if let Some(prev) = out.last() {
            start = start.max(prev.lambda_max);
        }
        start = start.max(lo);
        let top = (start * start + k).sqrt().min(hi);
        if top <= start {
            continue;
        }
        out.push(Window {
            index: out.len(),
            lambda_min: start,
            lambda_max: top,
            h: spacing(profile, grid, top)?,
        });
    }
    Ok(out)
}

pub fn solve_options(solver: &SolverConfig, exec: Execution) -> SolveOptions {
    SolveOptions {
        tol_eig: solver.tol_eig,
        seed: solver.seed,
        chunk: solver.chunk,
        restarts: solver.restarts,
        exec,
    }
}

/// Per-mode CSV row of `modes.csv`.
#[derive(Clone, Debug, Serialize, serde::Deserialize)]
pub struct ModeRow {
    pub mode_id: usize,
    pub window: usize,
    pub lambda: f64,
    pub lambda_sq: f64,
    pub residual: f64,
    pub parity: String,
    pub h: f64,
    pub field_file: String,
}

impl ModeRow {
    pub const COLUMNS: [&'static str; 8] = [
        "mode_id",
        "window",
        "lambda",
        "lambda_sq",
        "residual",
        "parity",
        "h",
        "field_file",
    ];
}

/// Operator and pairs of one solved window.
pub type Solved = (wingmass::eigen::Operator, Vec<EigenPair>);

/// `(mode_id, λ, residual, field)` of one mode to analyze.
pub type ModeRef<'a> = (usize, f64, f64, &'a Field);

/// Solves one window; `None` when the window is empty.
pub fn solve(
    profile: &DomainProfile,
    w: &Window,
    solver: &SolverConfig,
    exec: Execution,
) -> Result<(Option<Solved>, Vec<String>), CliError> {
    if w.lambda_max == w.lambda_min {
        return Ok((
            None,
            vec![format!(
                "empty window [{}, {}]: no modes",
                w.lambda_min, w.lambda_max
            )],
        ));
    }
    let op = assemble(profile, w.h, exec)?;
    let sol = solve_window(
        &op,
        w.lambda_min,
        w.lambda_max,
        solver.max_modes,
        &solve_options(solver, exec),
    )?;
    let mut warnings = sol.warnings;
    let weyl = sol.weyl_estimate;
    if (sol.count as f64 - weyl).abs() > 0.5 * weyl.max(4.0) {
        warnings.push(format!(
            "window {}: {} modes against a Weyl estimate of {weyl:.1}",
            w.index, sol.count
        ));
    }
    Ok((Some((op, sol.pairs)), warnings))
}

/// Everything measured on one mode.
#[derive(Clone, Debug)]
pub struct ModeAnalysis {
    pub mode_id: usize,
    pub window: usize,
    pub lambda: f64,
    /// Relative residual `‖(−Δ_h − λ²)u‖ / ‖u‖`.
    pub residual: f64,
    pub masses: WingMasses,
    pub lemma: Option<LemmaNorms>,
}

/// How the weighted derivative norms are evaluated for a profile.
#[derive(Clone, Copy, Debug)]
pub enum LemmaMode {
    C11 { p: f64 },
    Cka { gamma: f64, p: f64, s: f64 },
    Skip,
}

pub fn lemma_mode(
    profile: &DomainProfile,
    a: &AnalysisConfig,
) -> Result<(LemmaMode, Option<String>), CliError> {
    if !a.lemma_norms {
        return Ok((LemmaMode::Skip, None));
    }
    let c11 = LemmaMode::C11 {
        p: a.cutoff_p.unwrap_or(1.0 + a.eps0 / 2.0),
    };
    Ok(match profile.regularity() {
        Regularity::NoWings => (
            LemmaMode::Skip,
            Some("no wings: weighted norms skipped".into()),
        ),
        Regularity::Gevrey => (c11, None),
        Regularity::Holder { k, alpha } => {
            let beta = k as f64 + alpha;
            if beta < 2.0 {
                (
                    LemmaMode::Skip,
                    Some(format!("k + alpha = {beta} < 2: weighted norms skipped")),
                )
            } else if beta == 2.0 && a.gamma.is_none() {
                (c11, None)
            } else {
                let gamma = a.gamma.unwrap_or(beta - 1.0);
                let s = a.s.unwrap_or(s_delta_of_beta(beta, a.delta)?.min(2.0));
                (
                    LemmaMode::Cka {
                        gamma,
                        p: a.cutoff_p.unwrap_or(1.0),
                        s,
                    },
                    None,
                )
            }
        }
    })
}

fn lemma_for(
    field: &Field,
    profile: &DomainProfile,
    lambda: f64,
    h: f64,
    mode: LemmaMode,
    a: &AnalysisConfig,
) -> Result<Option<LemmaNorms>, CliError> {
    let p = match mode {
        LemmaMode::Skip => return Ok(None),
        LemmaMode::C11 { p } | LemmaMode::Cka { p, .. } => p,
    };
    let spec = CutoffSpec::new(profile.a, lambda, p, a.cutoff_c)?.with_grid_spacing(h);
    let v = straighten_near_rectangle(field, profile, &spec)?;
    Ok(Some(match mode {
        LemmaMode::C11 { .. } => lemma_norms_c11(&v, lambda, a.eps0, a.delta, &spec)?,
        LemmaMode::Cka { gamma, p, s } => lemma_norms_cka(&v, lambda, gamma, p, s, &spec)?,
        LemmaMode::Skip => unreachable!(),
    }))
}

/// Wing masses and weighted norms of each pair, in order.
#[allow(clippy::too_many_arguments)]
pub fn analyze(
    profile: &DomainProfile,
    grid: &Grid,
    fields: &[ModeRef],
    window: usize,
    mode: LemmaMode,
    a: &AnalysisConfig,
    exec: Execution,
) -> Result<Vec<ModeAnalysis>, CliError> {
    par::map(exec, fields, |&(mode_id, lambda, residual, field)| {
        let masses = wing_masses(field, lambda, grid, profile.a)?;
        let lemma = lemma_for(field, profile, lambda, grid.h, mode, a)?;
        Ok(ModeAnalysis {
            mode_id,
            window,
            lambda,
            residual,
            masses,
            lemma,
        })
    })
    .into_iter()
    .collect()
}
