//! Finite-difference discretizations of `Δ̃` on a straightened strip.
//!
//! The canonical one comes from the discrete energy
//!
//! ```text
//! Q(v) = Σ_faces |D v|² K_face  −  Σ_cells 2 (B/Y²) gx gy  −  Σ_nodes V v²
//! ```
//!
//! (5-point faces for the diagonal blocks, cell-centred gradients for the
//! mixed block), so the assembled matrix is the Hessian of a quadratic form
//! and is exactly symmetric. The raw non-divergence form is kept as an
//! independent check.

use crate::error::{Error, Result};
use crate::field::{Field, TensorGrid};
use crate::geometry::{CornerSide, DomainProfile};
use crate::sparse::CsrMatrix;

use super::coeffs::{coeffs_at, dy_coefficient};

/// Strip grid over `[x_lo, x_hi] × [-1, 1]` with `nx × ny` nodes, boundary
/// nodes included.
pub fn strip_grid(x_lo: f64, x_hi: f64, nx: usize, ny: usize) -> Result<TensorGrid> {
    if nx < 3 || ny < 3 || !(x_hi > x_lo) {
        return Err(Error::Parameter(
            "strip grid needs x_hi > x_lo and at least 3 nodes per axis".into(),
        ));
    }
    Ok(TensorGrid {
        x0: x_lo,
        y0: -1.0,
        hx: (x_hi - x_lo) / (nx - 1) as f64,
        hy: 2.0 / (ny - 1) as f64,
        nx,
        ny,
    })
}

fn check_wing_resolution(profile: &DomainProfile, grid: &TensorGrid) -> Result<()> {
    let xs = grid.xs();
    let right = xs.iter().filter(|&&x| x > profile.a).count();
    let left = xs.iter().filter(|&&x| x < -profile.a).count();
    for (side, n) in [("right", right), ("left", left)] {
        if n > 0 && n < 8 {
            return Err(Error::Resolution(format!(
                "only {n} grid columns in the {side} wing (need 8)"
            )));
        }
    }
    Ok(())
}

/// Assembled `Δ̃` on the interior nodes of a strip.
#[derive(Clone, Debug)]
pub struct StripOperator {
    pub grid: TensorGrid,
    pub matrix: CsrMatrix,
}

impl StripOperator {
    pub fn assemble(profile: &DomainProfile, grid: TensorGrid) -> Result<Self> {
        check_wing_resolution(profile, &grid)?;
        let (nx, ny) = (grid.nx, grid.ny);
        let (hx, hy) = (grid.hx, grid.hy);
        let inner = |i: usize, j: usize| -> Option<usize> {
            (i > 0 && i + 1 < nx && j > 0 && j + 1 < ny).then(|| (j - 1) * (nx - 2) + (i - 1))
        };
        let n = (nx - 2) * (ny - 2);
        let mut t: Vec<(usize, usize, f64)> = Vec::with_capacity(n * 13);

        // x-faces: (i, j) -- (i + 1, j), coefficient 1.
        for j in 1..ny - 1 {
            for i in 0..nx - 1 {
                face(&mut t, inner(i, j), inner(i + 1, j), 1.0 / (hx * hx));
            }
        }
        // y-faces: (i, j) -- (i, j + 1), coefficient (1 + A)/Y² at the midpoint.
        for i in 1..nx - 1 {
            let x = grid.x(i);
            for j in 0..ny - 1 {
                let c = coeffs_at(profile, x, grid.y(j) + 0.5 * hy)?;
                face(&mut t, inner(i, j), inner(i, j + 1), c.c_yy / (hy * hy));
            }
        }
        // Cells: mixed block with B/Y² at the centre.
        let ga = [
            -1.0 / (2.0 * hx),
            1.0 / (2.0 * hx),
            -1.0 / (2.0 * hx),
            1.0 / (2.0 * hx),
        ];
        let gb = [
            -1.0 / (2.0 * hy),
            -1.0 / (2.0 * hy),
            1.0 / (2.0 * hy),
            1.0 / (2.0 * hy),
        ];
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let c = coeffs_at(profile, grid.x(i) + 0.5 * hx, grid.y(j) + 0.5 * hy)?;
                if c.c_mix == 0.0 {
                    continue;
                }
                let corners = [
                    inner(i, j),
                    inner(i + 1, j),
                    inner(i, j + 1),
                    inner(i + 1, j + 1),
                ];
                for r in 0..4 {
                    let Some(pr) = corners[r] else { continue };
                    t.push((pr, pr, c.c_mix * 2.0 * ga[r] * gb[r]));
                    for s in r + 1..4 {
                        let Some(ps) = corners[s] else { continue };
                        let v = c.c_mix * (ga[r] * gb[s] + gb[r] * ga[s]);
                        t.push((pr, ps, v));
                        t.push((ps, pr, v));
                    }
                }
            }
        }
        // Potential.
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let c = coeffs_at(profile, grid.x(i), grid.y(j))?;
                t.push((inner(i, j).unwrap(), inner(i, j).unwrap(), c.potential));
            }
        }
        Ok(StripOperator {
            grid,
            matrix: CsrMatrix::from_triplets(n, n, t),
        })
    }

    /// `Δ̃ v` at interior nodes; boundary nodes of the result are zero.
    pub fn apply(&self, v: &Field) -> Result<Field> {
        if v.grid != self.grid {
            return Err(Error::Parameter(
                "field grid does not match the operator grid".into(),
            ));
        }
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut x = Vec::with_capacity((nx - 2) * (ny - 2));
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                x.push(v.at(i, j));
            }
        }
        let y = self.matrix.mul_vec(crate::par::Execution::default(), &x);
        let mut out = Field::zeros(self.grid);
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                *out.at_mut(i, j) = y[(j - 1) * (nx - 2) + (i - 1)];
            }
        }
        Ok(out)
    }
}

/// Adds the contribution of one face `k (v_p - v_q)²`, with `k` already
/// divided by the node area, to the negative-semidefinite second difference.
fn face(t: &mut Vec<(usize, usize, f64)>, p: Option<usize>, q: Option<usize>, k: f64) {
    if let Some(p) = p {
        t.push((p, p, -k));
    }
    if let Some(q) = q {
        t.push((q, q, -k));
    }
    if let (Some(p), Some(q)) = (p, q) {
        t.push((p, q, k));
        t.push((q, p, k));
    }
}

/// Flux-form `Δ̃ v` for a field on a strip grid with zero boundary values.
pub fn apply_tilde_delta(profile: &DomainProfile, v: &Field) -> Result<Field> {
    StripOperator::assemble(profile, v.grid)?.apply(v)
}

/// Raw non-divergence form with centred differences:
/// `v_xx + (1+A)/Y² v_yy − 2B/Y² v_xy − (Y'/Y) v_x + (B Y'/Y³ − y' Y (Y'/Y²)_x) v_y + V v`.
pub fn apply_tilde_delta_raw(profile: &DomainProfile, v: &Field) -> Result<Field> {
    let g = v.grid;
    check_wing_resolution(profile, &g)?;
    let (hx, hy) = (g.hx, g.hy);
    let mut out = Field::zeros(g);
    for j in 1..g.ny - 1 {
        for i in 1..g.nx - 1 {
            let (x, yp) = (g.x(i), g.y(j));
            let c = coeffs_at(profile, x, yp)?;
            let jet = profile.jet(x, CornerSide::Wing)?;
            let vx = (v.at(i + 1, j) - v.at(i - 1, j)) / (2.0 * hx);
            let vy = (v.at(i, j + 1) - v.at(i, j - 1)) / (2.0 * hy);
            let vxx = (v.at(i + 1, j) - 2.0 * v.at(i, j) + v.at(i - 1, j)) / (hx * hx);
            let vyy = (v.at(i, j + 1) - 2.0 * v.at(i, j) + v.at(i, j - 1)) / (hy * hy);
            let vxy = (v.at(i + 1, j + 1) - v.at(i + 1, j - 1) - v.at(i - 1, j + 1)
                + v.at(i - 1, j - 1))
                / (4.0 * hx * hy);
            let dy_coef = c.shear * jet.yp / jet.y.powi(3) + dy_coefficient(profile, x, yp)?;
            *out.at_mut(i, j) = vxx + c.c_yy * vyy - 2.0 * c.c_mix * vxy - jet.yp / jet.y * vx
                + dy_coef * vy
                + c.potential * v.at(i, j);
        }
    }
    Ok(out)
}
