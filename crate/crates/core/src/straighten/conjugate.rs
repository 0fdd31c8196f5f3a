//! The conjugation `v = Y^{1/2} u` between the physical frame and the
//! straightened strip, with piecewise-linear resampling in the transverse
//! variable.

use crate::error::{Error, Result};
use crate::field::{Field, TensorGrid};
use crate::geometry::DomainProfile;

/// Piecewise-linear interpolation on increasing nodes; zero outside.
pub fn interp_linear(xs: &[f64], fs: &[f64], x: f64) -> f64 {
    debug_assert_eq!(xs.len(), fs.len());
    let n = xs.len();
    if n == 0 || x < xs[0] || x > xs[n - 1] {
        return 0.0;
    }
    let k = xs.partition_point(|&t| t <= x);
    if k == n {
        return fs[n - 1];
    }
    let (x0, x1) = (xs[k - 1], xs[k]);
    let s = (x - x0) / (x1 - x0);
    fs[k - 1] + s * (fs[k] - fs[k - 1])
}

fn check_aligned(a: &TensorGrid, b: &TensorGrid) -> Result<()> {
    let tol = 1e-12 * (1.0 + a.x0.abs() + a.hx * a.nx as f64);
    if a.nx != b.nx || (a.x0 - b.x0).abs() > tol || (a.hx - b.hx).abs() > tol {
        return Err(Error::Parameter(
            "physical and strip grids must share their x nodes".into(),
        ));
    }
    Ok(())
}

fn width(profile: &DomainProfile, x: f64) -> Result<f64> {
    let w = profile.eval_y(x)?;
    if w <= 0.0 {
        return Err(Error::Degenerate(format!("Y = 0 at x = {x}")));
    }
    Ok(w)
}

/// `v(x, y') = Y^{1/2}(x) u(x, y' Y(x))` on `strip`. Values of `u` at
/// nodes outside the domain are ignored; `u` is taken to vanish on the
/// boundary `|y| = Y`.
pub fn conjugate_to_v(u: &Field, profile: &DomainProfile, strip: TensorGrid) -> Result<Field> {
    check_aligned(&u.grid, &strip)?;
    let phys = u.grid;
    let mut out = Field::zeros(strip);
    let mut ys = Vec::with_capacity(phys.ny + 2);
    let mut fs = Vec::with_capacity(phys.ny + 2);
    for i in 0..phys.nx {
        let w = width(profile, phys.x(i))?;
        ys.clear();
        fs.clear();
        ys.push(-w);
        fs.push(0.0);
        for j in 0..phys.ny {
            let y = phys.y(j);
            if y.abs() < w {
                ys.push(y);
                fs.push(u.at(i, j));
            }
        }
        ys.push(w);
        fs.push(0.0);
        let root = w.sqrt();
        for j in 0..strip.ny {
            let yp = strip.y(j);
            *out.at_mut(i, j) = root * interp_linear(&ys, &fs, yp * w);
        }
    }
    Ok(out)
}

/// `u(x, y) = Y^{-1/2}(x) v(x, y / Y(x))` on `phys`, zero outside the domain.
pub fn conjugate_to_u(v: &Field, profile: &DomainProfile, phys: TensorGrid) -> Result<Field> {
    check_aligned(&v.grid, &phys)?;
    let strip = v.grid;
    let ys = strip.ys();
    let mut col = vec![0.0; strip.ny];
    let mut out = Field::zeros(phys);
    for i in 0..phys.nx {
        let w = width(profile, phys.x(i))?;
        for (j, c) in col.iter_mut().enumerate() {
            *c = v.at(i, j);
        }
        let inv_root = w.sqrt().recip();
        for j in 0..phys.ny {
            let yp = phys.y(j) / w;
            if yp.abs() < 1.0 {
                *out.at_mut(i, j) = inv_root * interp_linear(&ys, &col, yp);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::WingProfile;
    use crate::straighten::strip_grid;
    use std::f64::consts::PI;

    fn phys_grid(x_lo: f64, x_hi: f64, nx: usize, ny: usize, half: f64) -> TensorGrid {
        TensorGrid {
            x0: x_lo,
            y0: -half,
            hx: (x_hi - x_lo) / (nx - 1) as f64,
            hy: 2.0 * half / (ny - 1) as f64,
            nx,
            ny,
        }
    }

    #[test]
    fn linear_interpolation() {
        let xs = [0.0, 1.0, 3.0];
        let fs = [1.0, 3.0, -1.0];
        assert_eq!(interp_linear(&xs, &fs, 0.5), 2.0);
        assert_eq!(interp_linear(&xs, &fs, 2.0), 1.0);
        assert_eq!(interp_linear(&xs, &fs, 3.0), -1.0);
        assert_eq!(interp_linear(&xs, &fs, 3.5), 0.0);
    }

    #[test]
    fn flat_strip_is_constant_scaling() {
        let p = DomainProfile::symmetric(1.0, PI, WingProfile::flat(), Some(2.0)).unwrap();
        let phys = phys_grid(-1.0, 1.0, 11, 41, PI);
        let strip = strip_grid(-1.0, 1.0, 11, 41).unwrap();
        let u = Field::from_fn(phys, |x, y| (x + 2.0) * (PI * PI - y * y));
        let v = conjugate_to_v(&u, &p, strip).unwrap();
        for j in 0..strip.ny {
            for i in 0..strip.nx {
                let (x, yp) = (strip.x(i), strip.y(j));
                let expected = PI.sqrt() * (x + 2.0) * (PI * PI - (PI * yp).powi(2));
                assert!((v.at(i, j) - expected).abs() < 1e-12 * (1.0 + expected.abs()));
            }
        }
    }

    #[test]
    fn degenerate_width_rejected() {
        let p = DomainProfile::stadium(1.0);
        let tip = p.x_extent;
        let phys = phys_grid(0.0, tip, 11, 11, PI);
        let strip = strip_grid(0.0, tip, 11, 11).unwrap();
        let u = Field::zeros(phys);
        assert!(matches!(
            conjugate_to_v(&u, &p, strip),
            Err(Error::Degenerate(_))
        ));
    }
}
