//! Shift-and-invert Lanczos for the eigenvalues of a sparse SPD matrix that
//! lie in a window, with exact counts from Sylvester inertia.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::sparse::{CsrMatrix, SparseLdl};

/// Number of eigenvalues of `m` below `mu`.
pub(crate) fn count_below(m: &CsrMatrix, perm: &[usize], mu: f64) -> Result<usize> {
    Ok(factor_shifted(m, perm, mu)?.0.inertia().negative)
}

/// Factorizes `m − σ I`, nudging `σ` if it hits a singular leading block.
fn factor_shifted(m: &CsrMatrix, perm: &[usize], sigma: f64) -> Result<(SparseLdl, f64)> {
    let mut s = sigma;
    for attempt in 0..4 {
        match SparseLdl::factor(&m.shifted(s), perm) {
            Ok(f) => return Ok((f, s)),
            Err(Error::Solver(_)) if attempt < 3 => {
                s = sigma * (1.0 + 1e-12 * (attempt + 1) as f64)
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!()
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct LanczosOptions {
    pub seed: u64,
    /// Relative residual `‖S x − μ x‖ ≤ tol μ` for acceptance.
    pub tol: f64,
    pub restarts: usize,
    pub exec: Execution,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for q in basis {
        let c = dot(q, w);
        axpy(-c, q, w);
    }
}

fn normalize(w: &mut [f64]) -> f64 {
    let n = dot(w, w).sqrt();
    if n > 0.0 {
        w.iter_mut().for_each(|v| *v /= n);
    }
    n
}

/// All `expected` eigenpairs of `m` with eigenvalue in `[lo, hi]`, sorted.
/// `expected` must be the exact count (from inertia).
pub(crate) fn window_pairs(
    m: &CsrMatrix,
    perm: &[usize],
    lo: f64,
    hi: f64,
    expected: usize,
    opts: &LanczosOptions,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = m.n_rows;
    if expected == 0 {
        return Ok(Vec::new());
    }
    let (ldl, sigma) = factor_shifted(m, perm, 0.5 * (lo + hi))?;
    let mut locked: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut diagnostics = String::new();

    for attempt in 0..=opts.restarts {
        let remaining = expected - locked.len();
        let cap = (n - locked.len()).min((4 * remaining + 60).max(100));
        let locked_vecs: Vec<Vec<f64>> = locked.iter().map(|p| p.1.clone()).collect();
        let mut q0: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        orthogonalize(&mut q0, &locked_vecs);
        orthogonalize(&mut q0, &locked_vecs);
        normalize(&mut q0);
        let mut basis: Vec<Vec<f64>> = vec![q0];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut found: Vec<(f64, Vec<f64>)>;
        loop {
            let k = basis.len() - 1;
            let mut w = ldl.solve(&basis[k]);
            orthogonalize(&mut w, &locked_vecs);
            let a = dot(&basis[k], &w);
            axpy(-a, &basis[k], &mut w);
            if k > 0 {
                axpy(-beta[k - 1], &basis[k - 1], &mut w);
            }
            // Full reorthogonalization, twice.
            for _ in 0..2 {
                orthogonalize(&mut w, &locked_vecs);
                orthogonalize(&mut w, &basis);
            }
            alpha.push(a);
            let b = normalize(&mut w);
            beta.push(b);
            let steps = alpha.len();
            let exhausted =
                b <= 1e-13 * alpha.iter().fold(0.0_f64, |s, v| s.max(v.abs())) || steps >= cap;
            if steps.is_multiple_of(10)
                || exhausted
                || steps >= remaining + 10 && steps.is_multiple_of(5)
            {
                found = converged_in_window(m, &basis, &alpha, &beta, sigma, lo, hi, opts);
                if found.len() >= remaining || exhausted {
                    break;
                }
            }
            basis.push(w);
        }
        diagnostics.push_str(&format!(
            "attempt {attempt}: {} Lanczos steps, {} new pairs; ",
            alpha.len(),
            found.len()
        ));
        for pair in found {
            let duplicate = locked.iter().any(|(mu, v)| {
                (mu - pair.0).abs() <= 1e-10 * mu.abs() && dot(v, &pair.1).abs() > 1.0 - 1e-12
            });
            if !duplicate && locked.len() < expected {
                locked.push(pair);
            }
        }
        if locked.len() == expected {
            break;
        }
    }
    if locked.len() != expected {
        return Err(Error::Solver(format!(
            "found {} of {expected} eigenvalues in [{lo}, {hi}] (dimension {n}): {diagnostics}",
            locked.len()
        )));
    }
    locked.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(locked)
}

/// Ritz pairs of the current Lanczos basis whose Rayleigh quotient lies in
/// the window and whose true residual meets the tolerance.
#[allow(clippy::too_many_arguments)]
fn converged_in_window(
    m: &CsrMatrix,
    basis: &[Vec<f64>],
    alpha: &[f64],
    beta: &[f64],
    sigma: f64,
    lo: f64,
    hi: f64,
    opts: &LanczosOptions,
) -> Vec<(f64, Vec<f64>)> {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = t.symmetric_eigen();
    let n = basis[0].len();
    let mut out = Vec::new();
    for i in 0..k {
        let theta = eig.eigenvalues[i];
        if theta == 0.0 {
            continue;
        }
        let mu = sigma + 1.0 / theta;
        let slack = 1e-9 * mu.abs();
        if mu < lo - slack || mu > hi + slack {
            continue;
        }
        let estimate = (beta[k - 1] * eig.eigenvectors[(k - 1, i)]).abs();
        if estimate > 1e-6 * theta.abs() {
            continue;
        }
        let s = eig.eigenvectors.column(i);
        let mut x = par::map_range(opts.exec, n, |r| {
            (0..k).map(|j| basis[j][r] * s[j]).sum::<f64>()
        });
        normalize(&mut x);
        let sx = m.mul_vec(opts.exec, &x);
        let rq = dot(&x, &sx);
        if rq < lo || rq > hi {
            continue;
        }
        let res = sx
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - rq * b).powi(2))
            .sum::<f64>()
            .sqrt();
        if res <= opts.tol * rq.abs() {
            out.push((rq, x));
        }
    }
    out
}
