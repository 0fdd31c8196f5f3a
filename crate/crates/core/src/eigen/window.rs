use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::par::{self, Execution};
use crate::sparse::nested_dissection;

use super::assemble::{sectors, Operator, Sector, SectorOperator};
use super::lanczos::{count_below, window_pairs, LanczosOptions};

/// A discrete Dirichlet eigenpair of `−Δ_h`.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub lambda_sq: f64,
    pub lambda: f64,
    /// Normalized to unit discrete `L²` norm.
    pub field: Field,
    /// `‖(−Δ_h − λ²) u‖₂`.
    pub residual: f64,
    pub sector: Sector,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SolveOptions {
    /// Relative residual tolerance: `residual ≤ tol_eig · λ²`.
    pub tol_eig: f64,
    pub seed: u64,
    /// Eigenvalues per Lanczos run; larger windows are bisected.
    pub chunk: usize,
    pub restarts: usize,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol_eig: 1e-8,
            seed: 0x5eed,
            chunk: 40,
            restarts: 6,
            exec: Execution::default(),
        }
    }
}

/// Result of a window solve.
#[derive(Clone, Debug)]
pub struct WindowSolution {
    pub pairs: Vec<EigenPair>,
    /// Exact number of discrete eigenvalues in the window (by inertia).
    pub count: usize,
    /// `area · (λ_max² − λ_min²) / 4π`.
    pub weyl_estimate: f64,
    pub truncated: bool,
    pub warnings: Vec<String>,
}

/// Weyl estimate of the number of eigenvalues with `λ` in the window.
pub fn weyl_count(area: f64, lambda_min: f64, lambda_max: f64) -> f64 {
    area * (lambda_max * lambda_max - lambda_min * lambda_min) / (4.0 * std::f64::consts::PI)
}

const WEYL_LIMIT: f64 = 500.0;

struct PreparedSector {
    op: SectorOperator,
    perm: Vec<usize>,
}

fn prepare(op: &Operator, exec: Execution) -> Vec<PreparedSector> {
    let secs = sectors(&op.profile);
    par::map(exec, &secs, |&s| {
        let so = SectorOperator::new(op, s);
        let perm = nested_dissection(&so.lattice);
        PreparedSector { op: so, perm }
    })
}

/// Eigenvalue counts below `mu` per sector.
fn counts_below(prepared: &[PreparedSector], mu: f64, exec: Execution) -> Result<Vec<usize>> {
    par::map(exec, prepared, |p| {
        if p.op.dim() == 0 {
            Ok(0)
        } else {
            count_below(&p.op.matrix, &p.perm, mu)
        }
    })
    .into_iter()
    .collect()
}

/// Number of eigenvalues of `−Δ_h` below `mu`.
pub fn eigenvalue_count(op: &Operator, mu: f64, exec: Execution) -> Result<usize> {
    Ok(counts_below(&prepare(op, exec), mu, exec)?.iter().sum())
}

/// Splits `[lo, hi)` until each piece holds at most `chunk` eigenvalues.
fn split(
    p: &PreparedSector,
    lo: f64,
    hi: f64,
    n_lo: usize,
    n_hi: usize,
    chunk: usize,
    out: &mut Vec<(f64, f64, usize)>,
) -> Result<()> {
    let count = n_hi - n_lo;
    if count == 0 {
        return Ok(());
    }
    if count <= chunk || hi - lo <= 1e-9 * hi {
        out.push((lo, hi, count));
        return Ok(());
    }
    let mid = 0.5 * (lo + hi);
    let n_mid = count_below(&p.op.matrix, &p.perm, mid)?;
    split(p, lo, mid, n_lo, n_mid, chunk, out)?;
    split(p, mid, hi, n_mid, n_hi, chunk, out)
}

fn solve_sector(
    op: &Operator,
    p: &PreparedSector,
    lo: f64,
    hi: f64,
    n_lo: usize,
    n_hi: usize,
    opts: &SolveOptions,
) -> Result<Vec<EigenPair>> {
    let mut pieces = Vec::new();
    split(p, lo, hi, n_lo, n_hi, opts.chunk.max(1), &mut pieces)?;
    let mut out = Vec::new();
    for (idx, (a, b, count)) in pieces.into_iter().enumerate() {
        let lopts = LanczosOptions {
            seed: opts.seed ^ ((idx as u64) << 16) ^ sector_salt(p.op.sector),
            tol: opts.tol_eig,
            restarts: opts.restarts,
            exec: opts.exec,
        };
        for (mu, y) in window_pairs(&p.op.matrix, &p.perm, a, b, count, &lopts)? {
            let values = p.op.lift(op, &y);
            let field = op.grid.to_field(&values);
            let mut pair = EigenPair {
                lambda_sq: mu,
                lambda: mu.sqrt(),
                field,
                residual: 0.0,
                sector: p.op.sector,
            };
            pair.residual = residual_check(op, &pair);
            out.push(pair);
        }
    }
    Ok(out)
}

fn sector_salt(s: Sector) -> u64 {
    let x = match s.x {
        None => 0,
        Some(super::Parity::Even) => 1,
        Some(super::Parity::Odd) => 2,
    };
    let y = match s.y {
        super::Parity::Even => 0,
        super::Parity::Odd => 1,
    };
    (x * 2 + y) << 40
}

/// All eigenpairs with `λ ∈ [lambda_min, lambda_max)`, at most `max_modes`
/// of them (the lowest ones), sorted by `λ²` and then by sector.
pub fn solve_window(
    op: &Operator,
    lambda_min: f64,
    lambda_max: f64,
    max_modes: usize,
    opts: &SolveOptions,
) -> Result<WindowSolution> {
    if !(lambda_min >= 0.0 && lambda_max >= lambda_min && lambda_max.is_finite()) {
        return Err(Error::Parameter(format!(
            "invalid window [{lambda_min}, {lambda_max}]"
        )));
    }
    let weyl_estimate = weyl_count(op.profile.area(), lambda_min, lambda_max);
    let mut warnings = Vec::new();
    if lambda_max == lambda_min {
        warnings.push(format!("empty window [{lambda_min}, {lambda_max}]"));
        return Ok(WindowSolution {
            pairs: Vec::new(),
            count: 0,
            weyl_estimate,
            truncated: false,
            warnings,
        });
    }
    if weyl_estimate > WEYL_LIMIT {
        return Err(Error::Parameter(format!(
            "window [{lambda_min}, {lambda_max}] holds about {weyl_estimate:.0} modes; split it (limit {WEYL_LIMIT})"
        )));
    }
    let (lo, hi) = (lambda_min * lambda_min, lambda_max * lambda_max);
    let prepared = prepare(op, opts.exec);
    let n_lo = counts_below(&prepared, lo, opts.exec)?;
    let n_hi = counts_below(&prepared, hi, opts.exec)?;
    let count: usize = n_hi.iter().zip(&n_lo).map(|(a, b)| a - b).sum();

    let mut pairs = Vec::new();
    for (k, p) in prepared.iter().enumerate() {
        if n_hi[k] > n_lo[k] {
            pairs.extend(solve_sector(op, p, lo, hi, n_lo[k], n_hi[k], opts)?);
        }
    }
    pairs.sort_by(|a, b| {
        a.lambda_sq
            .total_cmp(&b.lambda_sq)
            .then(a.sector.cmp(&b.sector))
    });
    if pairs.len() != count {
        return Err(Error::Solver(format!(
            "collected {} pairs for {count} eigenvalues",
            pairs.len()
        )));
    }
    let truncated = pairs.len() > max_modes;
    if truncated {
        warnings.push(format!(
            "window holds {count} modes; keeping the lowest {max_modes}"
        ));
        pairs.truncate(max_modes);
    }
    for p in &pairs {
        if p.residual > opts.tol_eig * p.lambda_sq {
            return Err(Error::Solver(format!(
                "residual {:.3e} exceeds tolerance at lambda^2 = {}",
                p.residual, p.lambda_sq
            )));
        }
    }
    Ok(WindowSolution {
        pairs,
        count,
        weyl_estimate,
        truncated,
        warnings,
    })
}

/// `‖(−Δ_h − λ²) u‖₂ / ‖u‖₂` in the discrete `L²` norm.
pub fn residual_check(op: &Operator, pair: &EigenPair) -> f64 {
    field_residual(op, &pair.field, pair.lambda_sq)
}

/// [`residual_check`] for an arbitrary field and `λ²`.
pub fn field_residual(op: &Operator, field: &Field, lambda_sq: f64) -> f64 {
    let u = op.grid.gather(field);
    let au = op.matrix.mul_vec(Execution::Sequential, &u);
    let num: f64 = au
        .iter()
        .zip(&u)
        .map(|(a, b)| (a - lambda_sq * b).powi(2))
        .sum();
    let den: f64 = u.iter().map(|b| b * b).sum();
    if den == 0.0 {
        return 0.0;
    }
    (num / den).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{assemble, grid::aligned_spacing};
    use crate::geometry::DomainProfile;
    use std::f64::consts::PI;

    #[test]
    fn stadium_window_matches_dense_oracle() {
        let p = DomainProfile::stadium(1.0);
        let h = aligned_spacing(0.1, PI).unwrap();
        let op = assemble(&p, h, Execution::Sequential).unwrap();
        let mut dense: Vec<f64> = op
            .matrix
            .to_dense()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        dense.sort_by(f64::total_cmp);
        let inside: Vec<f64> = dense
            .into_iter()
            .filter(|&v| (9.0..16.0).contains(&v))
            .collect();
        let sol = solve_window(&op, 3.0, 4.0, 500, &SolveOptions::default()).unwrap();
        assert_eq!(sol.count, inside.len());
        for (a, b) in sol.pairs.iter().zip(&inside) {
            assert!((a.lambda_sq - b).abs() < 1e-9 * b);
            assert!(a.residual <= 1e-8 * a.lambda_sq);
            assert!((a.field.l2_norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_window_and_truncation() {
        let p = DomainProfile::stadium(1.0);
        let op = assemble(&p, aligned_spacing(0.1, PI).unwrap(), Execution::Sequential).unwrap();
        let sol = solve_window(&op, 5.0, 5.0, 10, &SolveOptions::default()).unwrap();
        assert!(sol.pairs.is_empty() && !sol.warnings.is_empty());
        let sol = solve_window(&op, 0.0, 2.0, 3, &SolveOptions::default()).unwrap();
        assert!(sol.truncated && sol.pairs.len() == 3 && sol.count > 3);
        assert!(solve_window(&op, 0.0, 40.0, 10, &SolveOptions::default()).is_err());
    }
}
