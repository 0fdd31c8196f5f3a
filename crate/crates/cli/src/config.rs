//! Run configuration, parsed strictly from TOML.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use wingmass::geometry::{DomainProfile, WingProfile, WingSign};
use wingmass::quasimode::{CutoffFamily, SupportPolicy};

use crate::error::CliError;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub profile: ProfileConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub separable: SeparableConfig,
    #[serde(default)]
    pub quasimode: QuasimodeConfig,
    #[serde(default)]
    pub scaling: ScalingConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WingConfig {
    Stadium,
    Flat,
    PowerLaw {
        k: u32,
        alpha: f64,
        coeff: f64,
        sign: WingSign,
    },
    Gevrey0 {
        tau: f64,
        coeff: f64,
        sign: WingSign,
    },
}

impl WingConfig {
    fn profile(self) -> WingProfile {
        match self {
            WingConfig::Stadium => WingProfile::stadium(),
            WingConfig::Flat => WingProfile::flat(),
            WingConfig::PowerLaw {
                k,
                alpha,
                coeff,
                sign,
            } => WingProfile::power_law(k, alpha, coeff, sign),
            WingConfig::Gevrey0 { tau, coeff, sign } => WingProfile::gevrey0(tau, coeff, sign),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub a: f64,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    pub wing: WingConfig,
    /// Overrides `wing` on the right.
    pub right_wing: Option<WingConfig>,
    pub x_extent: Option<f64>,
}

fn default_half_width() -> f64 {
    PI
}

impl ProfileConfig {
    pub fn build(&self) -> Result<DomainProfile, CliError> {
        let left = self.wing.profile();
        let right = self.right_wing.unwrap_or(self.wing).profile();
        DomainProfile::new(self.a, self.half_width, left, right, self.x_extent)
            .map_err(|e| CliError::Config(format!("[profile]: {e}")))
    }
}

/// `h` if given, else `min(h_max, kappa / λ_top)` per window.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub h: Option<f64>,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_h_max")]
    pub h_max: f64,
}

fn default_kappa() -> f64 {
    0.2
}
fn default_h_max() -> f64 {
    0.05
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            h: None,
            kappa: default_kappa(),
            h_max: default_h_max(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_lambda_min")]
    pub lambda_min: f64,
    #[serde(default = "default_lambda_max")]
    pub lambda_max: f64,
    /// Number of sample windows in `[lambda_min, lambda_max]`; 1 solves the
    /// whole range.
    #[serde(default = "one")]
    pub windows: usize,
    /// Weyl estimate of the modes per sample window.
    #[serde(default = "default_window_modes")]
    pub window_modes: f64,
    #[serde(default = "default_max_modes")]
    pub max_modes: usize,
    #[serde(default = "default_tol_eig")]
    pub tol_eig: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_chunk")]
    pub chunk: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
}

fn default_lambda_min() -> f64 {
    0.0
}
fn default_lambda_max() -> f64 {
    3.0
}
fn one() -> usize {
    1
}
fn default_window_modes() -> f64 {
    30.0
}
fn default_max_modes() -> usize {
    500
}
fn default_tol_eig() -> f64 {
    1e-8
}
fn default_seed() -> u64 {
    0x5eed
}
fn default_chunk() -> usize {
    40
}
fn default_restarts() -> usize {
    6
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            lambda_min: default_lambda_min(),
            lambda_max: default_lambda_max(),
            windows: 1,
            window_modes: default_window_modes(),
            max_modes: default_max_modes(),
            tol_eig: default_tol_eig(),
            seed: default_seed(),
            chunk: default_chunk(),
            restarts: default_restarts(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_eps0")]
    pub eps0: f64,
    #[serde(default = "default_cutoff_c")]
    pub cutoff_c: f64,
    /// Defaults to `1 + eps0/2` for `C^{1,1}` wings and 1 otherwise.
    pub cutoff_p: Option<f64>,
    /// Weighted-norm parameters for smoother wings; `gamma` defaults to
    /// `k + α − 1` and `s` to `min(s_δ, 2)`.
    pub gamma: Option<f64>,
    pub s: Option<f64>,
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default = "default_c_delta")]
    pub c_delta: f64,
    #[serde(default = "yes")]
    pub lemma_norms: bool,
    /// Read modes persisted by `eigs` from this directory instead of solving.
    pub modes_dir: Option<PathBuf>,
}

fn default_delta() -> f64 {
    0.1
}
fn default_eps0() -> f64 {
    0.5
}
fn default_cutoff_c() -> f64 {
    3.0
}
fn default_margin() -> f64 {
    0.2
}
fn default_c_delta() -> f64 {
    1e-3
}
fn yes() -> bool {
    true
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            delta: default_delta(),
            eps0: default_eps0(),
            cutoff_c: default_cutoff_c(),
            cutoff_p: None,
            gamma: None,
            s: None,
            margin: default_margin(),
            c_delta: default_c_delta(),
            lemma_norms: true,
            modes_dir: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparableConfig {
    #[serde(default = "default_separable_n")]
    pub n: Vec<u32>,
    #[serde(default = "default_separable_h_max")]
    pub h_max: f64,
    pub wall_span: Option<f64>,
}

fn default_separable_n() -> Vec<u32> {
    vec![8, 16, 32, 64, 128, 256]
}
fn default_separable_h_max() -> f64 {
    0.01
}

impl Default for SeparableConfig {
    fn default() -> Self {
        SeparableConfig {
            n: default_separable_n(),
            h_max: default_separable_h_max(),
            wall_span: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasimodeConfig {
    #[serde(default = "default_quasimode_n")]
    pub n: Vec<u32>,
    #[serde(default = "default_family")]
    pub family: CutoffFamilyConfig,
    #[serde(default)]
    pub policy: PolicyConfig,
    #[serde(default = "default_h_max")]
    pub h_max: f64,
    #[serde(default = "default_quasimode_kappa")]
    pub kappa: f64,
}

fn default_quasimode_n() -> Vec<u32> {
    vec![4, 8, 16, 32, 64]
}
fn default_quasimode_kappa() -> f64 {
    1.0
}
fn default_family() -> CutoffFamilyConfig {
    CutoffFamilyConfig::Fixed {
        plateau: 0.5,
        width: 0.4,
    }
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CutoffFamilyConfig {
    Fixed { plateau: f64, width: f64 },
    Shrinking { p: f64, c: f64 },
}

impl From<CutoffFamilyConfig> for CutoffFamily {
    fn from(c: CutoffFamilyConfig) -> Self {
        match c {
            CutoffFamilyConfig::Fixed { plateau, width } => CutoffFamily::Fixed { plateau, width },
            CutoffFamilyConfig::Shrinking { p, c } => CutoffFamily::Shrinking { p, c },
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum PolicyConfig {
    #[default]
    Strict,
    Truncate,
}

impl From<PolicyConfig> for SupportPolicy {
    fn from(p: PolicyConfig) -> Self {
        match p {
            PolicyConfig::Strict => SupportPolicy::Strict,
            PolicyConfig::Truncate => SupportPolicy::Truncate,
        }
    }
}

impl Default for QuasimodeConfig {
    fn default() -> Self {
        QuasimodeConfig {
            n: default_quasimode_n(),
            family: default_family(),
            policy: PolicyConfig::Strict,
            h_max: default_h_max(),
            kappa: default_quasimode_kappa(),
        }
    }
}

/// Input of `scaling-fit`: a CSV with a `lambda` column.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub input: Option<PathBuf>,
    #[serde(default = "default_lambda_column")]
    pub lambda_column: String,
    #[serde(default = "default_value_columns")]
    pub value_columns: Vec<String>,
}

fn default_lambda_column() -> String {
    "lambda".into()
}
fn default_value_columns() -> Vec<String> {
    vec!["M_max".into()]
}

impl Default for ScalingConfig {
    fn default() -> Self {
        ScalingConfig {
            input: None,
            lambda_column: default_lambda_column(),
            value_columns: default_value_columns(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "yes")]
    pub write_fields: bool,
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: default_directory(),
            write_fields: true,
        }
    }
}

/// A range violation at a dotted key path.
struct Invalid {
    key: &'static str,
    msg: String,
}

fn invalid(key: &'static str, msg: String) -> Invalid {
    Invalid { key, msg }
}

fn positive(key: &'static str, v: f64) -> Result<(), Invalid> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(
            key,
            format!("{key} = {v} must be positive and finite"),
        ))
    }
}

fn ascending(key: &'static str, n: &[u32]) -> Result<(), Invalid> {
    if n.is_empty() || n[0] == 0 || n.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid(
            key,
            format!("{key} must be a nonempty strictly ascending list of positive integers"),
        ));
    }
    Ok(())
}

/// 1-based line on which the dotted `key` is assigned, if any.
fn locate(text: &str, key: &str) -> Option<usize> {
    let mut table = String::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if let Some(inner) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            table = inner.trim().to_string();
            continue;
        }
        let Some((lhs, _)) = line.split_once('=') else {
            continue;
        };
        let lhs: String = lhs.split('.').map(str::trim).collect::<Vec<_>>().join(".");
        let full = if table.is_empty() {
            lhs
        } else {
            format!("{table}.{lhs}")
        };
        if full == key || key.starts_with(&format!("{full}.")) {
            return Some(n + 1);
        }
    }
    None
}

impl RunConfig {
    /// Parses and validates; errors carry the TOML line and column.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate().map_err(|e| match locate(text, e.key) {
            Some(line) => CliError::Config(format!("line {line}: {}", e.msg)),
            None => CliError::Config(e.msg),
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|e| CliError::Config(format!("{} is not UTF-8: {e}", path.display())))?;
        let cfg = Self::parse(text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        Ok((cfg, bytes))
    }

    fn validate(&self) -> Result<(), Invalid> {
        self.profile
            .build()
            .map_err(|e| invalid("profile", e.to_string()))?;
        if let Some(h) = self.grid.h {
            positive("grid.h", h)?;
        }
        positive("grid.kappa", self.grid.kappa)?;
        positive("grid.h_max", self.grid.h_max)?;
        let s = &self.solver;
        if !(s.lambda_min >= 0.0 && s.lambda_max >= s.lambda_min && s.lambda_max.is_finite()) {
            return Err(invalid(
                "solver.lambda_max",
                format!(
                    "solver window [{}, {}] must satisfy 0 <= lambda_min <= lambda_max",
                    s.lambda_min, s.lambda_max
                ),
            ));
        }
        if s.windows == 0 || s.chunk == 0 || s.max_modes == 0 {
            return Err(invalid(
                "solver",
                "solver.windows, solver.chunk and solver.max_modes must be >= 1".into(),
            ));
        }
        positive("solver.window_modes", s.window_modes)?;
        positive("solver.tol_eig", s.tol_eig)?;
        let a = &self.analysis;
        positive("analysis.delta", a.delta)?;
        positive("analysis.eps0", a.eps0)?;
        positive("analysis.margin", a.margin)?;
        positive("analysis.c_delta", a.c_delta)?;
        if a.cutoff_c < 1.0 {
            return Err(invalid(
                "analysis.cutoff_c",
                format!("analysis.cutoff_c = {} must be >= 1", a.cutoff_c),
            ));
        }
        if let Some(p) = a.cutoff_p {
            positive("analysis.cutoff_p", p)?;
        }
        ascending("separable.n", &self.separable.n)?;
        positive("separable.h_max", self.separable.h_max)?;
        ascending("quasimode.n", &self.quasimode.n)?;
        positive("quasimode.h_max", self.quasimode.h_max)?;
        positive("quasimode.kappa", self.quasimode.kappa)?;
        match self.quasimode.family {
            CutoffFamilyConfig::Fixed { plateau, width } => {
                positive("quasimode.family", width)?;
                if plateau < 0.0 {
                    return Err(invalid(
                        "quasimode.family",
                        format!("quasimode.family.plateau = {plateau} must be >= 0"),
                    ));
                }
            }
            CutoffFamilyConfig::Shrinking { p, c } => {
                positive("quasimode.family", p)?;
                positive("quasimode.family", c)?;
            }
        }
        Ok(())
    }
}
