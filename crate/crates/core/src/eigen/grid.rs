use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, TensorGrid};
use crate::geometry::DomainProfile;

/// Relative distance below which a node counts as lying on the boundary.
const SNAP: f64 = 1e-6;

/// Arm directions of the 5-point stencil: `+x, -x, +y, -y`.
pub const ARMS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Cartesian grid with nodes at integer multiples of `h`, symmetric about
/// the origin, and the cut-cell data of an embedded Dirichlet boundary.
#[derive(Clone, Debug, Serialize)]
pub struct Grid {
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    /// Lattice offsets: node `(i, j)` sits at `((i - half_x) h, (j - half_y) h)`.
    pub half_x: usize,
    pub half_y: usize,
    /// Membership by [`DomainProfile::contains`], minus nodes within
    /// `1e-6 h` of the boundary along an arm.
    pub interior_mask: Vec<bool>,
    /// Per interior node (in interior order), the fractional distance
    /// `θ ∈ (0, 1]` to the boundary along each arm, or `None` when the
    /// neighbour is an interior node.
    pub boundary_distances: Vec<[Option<f64>; 4]>,
    /// Full-grid index of each interior node.
    pub interior_nodes: Vec<usize>,
    /// Interior id of each full-grid node, `usize::MAX` outside.
    pub interior_id: Vec<usize>,
}

/// Spacing not exceeding `h_req` that divides `half_width`, so the flat
/// walls `y = ±half_width` fall on grid lines.
pub fn aligned_spacing(h_req: f64, half_width: f64) -> Result<f64> {
    if !(h_req > 0.0 && h_req.is_finite()) {
        return Err(Error::Parameter(format!(
            "grid spacing h = {h_req} must be positive"
        )));
    }
    Ok(half_width / (half_width / h_req).ceil())
}

/// Largest `Y` over the extent, sampled at 4096 points plus the corners.
fn max_width(profile: &DomainProfile) -> f64 {
    let n = 4096;
    (0..=n)
        .map(|k| -profile.x_extent + 2.0 * profile.x_extent * k as f64 / n as f64)
        .chain([profile.a, -profile.a])
        .map(|x| profile.width_unchecked(x))
        .fold(profile.half_width, f64::max)
}

/// Boundary crossing on the segment from an inside point to an outside one.
fn crossing(profile: &DomainProfile, inside: (f64, f64), outside: (f64, f64)) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let at = |s: f64| {
        (
            inside.0 + s * (outside.0 - inside.0),
            inside.1 + s * (outside.1 - inside.1),
        )
    };
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let (x, y) = at(mid);
        if profile.contains(x, y) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl Grid {
    /// Builds the grid with the requested spacing `h` (used as is).
    pub fn new(profile: &DomainProfile, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Parameter(format!(
                "grid spacing h = {h} must be positive"
            )));
        }
        let half_x = (profile.x_extent / h + 1e-9).floor() as usize;
        let half_y = (max_width(profile) / h + 1e-9).floor() as usize;
        let (nx, ny) = (2 * half_x + 1, 2 * half_y + 1);
        let mut grid = Grid {
            h,
            nx,
            ny,
            half_x,
            half_y,
            interior_mask: vec![false; nx * ny],
            boundary_distances: Vec::new(),
            interior_nodes: Vec::new(),
            interior_id: vec![usize::MAX; nx * ny],
        };
        for j in 0..ny {
            for i in 0..nx {
                let (x, y) = grid.coords(i, j);
                grid.interior_mask[j * nx + i] = profile.contains(x, y);
            }
        }
        // Nodes lying on the boundary up to rounding are boundary nodes.
        let on_boundary: Vec<usize> = (0..nx * ny)
            .filter(|&k| grid.interior_mask[k])
            .filter(|&k| grid.arms(profile, k).iter().flatten().any(|&t| t < SNAP))
            .collect();
        for k in on_boundary {
            grid.interior_mask[k] = false;
        }
        for k in 0..nx * ny {
            if grid.interior_mask[k] {
                grid.interior_id[k] = grid.interior_nodes.len();
                grid.interior_nodes.push(k);
            }
        }
        if grid.interior_nodes.is_empty() {
            return Err(Error::Geometry(format!(
                "no interior grid nodes at h = {h}"
            )));
        }
        grid.boundary_distances = grid
            .interior_nodes
            .iter()
            .map(|&k| grid.arms(profile, k))
            .collect();
        Ok(grid)
    }

    fn arms(&self, profile: &DomainProfile, k: usize) -> [Option<f64>; 4] {
        let (i, j) = ((k % self.nx) as i64, (k / self.nx) as i64);
        let p = self.coords(i as usize, j as usize);
        let h = self.h;
        let mut arms = [None; 4];
        for (arm, (di, dj)) in arms.iter_mut().zip(ARMS) {
            if self.is_interior(i + di, j + dj) {
                continue;
            }
            let q = (p.0 + di as f64 * h, p.1 + dj as f64 * h);
            let theta = if di == 0 && !profile.contains(q.0, q.1) {
                // Vertical arms leave through |y| = Y(x).
                (profile.width_unchecked(p.0) - p.1.abs()) / h
            } else {
                crossing(profile, p, q)
            };
            *arm = Some(theta.clamp(f64::MIN_POSITIVE, 1.0));
        }
        arms
    }

    #[inline]
    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        (
            (i as i64 - self.half_x as i64) as f64 * self.h,
            (j as i64 - self.half_y as i64) as f64 * self.h,
        )
    }

    /// Signed lattice coordinates of a full-grid index.
    #[inline]
    pub fn lattice(&self, k: usize) -> (i64, i64) {
        (
            (k % self.nx) as i64 - self.half_x as i64,
            (k / self.nx) as i64 - self.half_y as i64,
        )
    }

    /// Full-grid index of signed lattice coordinates, if on the grid.
    #[inline]
    pub fn full_index(&self, li: i64, lj: i64) -> Option<usize> {
        let i = li + self.half_x as i64;
        let j = lj + self.half_y as i64;
        (i >= 0 && j >= 0 && (i as usize) < self.nx && (j as usize) < self.ny)
            .then(|| j as usize * self.nx + i as usize)
    }

    fn is_interior(&self, i: i64, j: i64) -> bool {
        i >= 0
            && j >= 0
            && (i as usize) < self.nx
            && (j as usize) < self.ny
            && self.interior_mask[j as usize * self.nx + i as usize]
    }

    pub fn n_interior(&self) -> usize {
        self.interior_nodes.len()
    }

    pub fn tensor(&self) -> TensorGrid {
        let (x0, y0) = self.coords(0, 0);
        TensorGrid {
            x0,
            y0,
            hx: self.h,
            hy: self.h,
            nx: self.nx,
            ny: self.ny,
        }
    }

    /// Scatters interior values into a full field (zero outside).
    pub fn to_field(&self, values: &[f64]) -> Field {
        let mut f = Field::zeros(self.tensor());
        for (&k, &v) in self.interior_nodes.iter().zip(values) {
            f.values[k] = v;
        }
        f
    }

    /// Gathers interior values of a full field.
    pub fn gather(&self, field: &Field) -> Vec<f64> {
        self.interior_nodes
            .iter()
            .map(|&k| field.values[k])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn mask_matches_membership() {
        let p = DomainProfile::stadium(1.0);
        let g = Grid::new(&p, aligned_spacing(0.1, PI).unwrap()).unwrap();
        for j in 0..g.ny {
            for i in 0..g.nx {
                let (x, y) = g.coords(i, j);
                if g.interior_mask[j * g.nx + i] {
                    assert!(p.contains(x, y));
                }
            }
        }
        for arms in &g.boundary_distances {
            for t in arms.iter().flatten() {
                assert!(*t > 0.0 && *t <= 1.0);
            }
        }
    }

    #[test]
    fn rectangle_cut_fractions() {
        let p = DomainProfile::rectangle(1.0).unwrap();
        let h = aligned_spacing(0.1, PI).unwrap();
        let g = Grid::new(&p, h).unwrap();
        // Walls y = ±π are grid lines, so vertical arms are whole cells.
        // The wall x = 1 is cut at the fractional position.
        let expected = (1.0 - (1.0 / h).floor() * h) / h;
        let mut seen = false;
        for (n, arms) in g.boundary_distances.iter().enumerate() {
            let (li, _) = g.lattice(g.interior_nodes[n]);
            if let Some(t) = arms[2] {
                assert!((t - 1.0).abs() < 1e-9);
            }
            if li == (1.0 / h).floor() as i64 {
                assert!((arms[0].unwrap() - expected).abs() < 1e-12);
                seen = true;
            }
        }
        assert!(seen);
    }

    #[test]
    fn boundary_nodes_are_snapped() {
        let p = DomainProfile::rectangle(1.0).unwrap();
        let g = Grid::new(&p, 0.25).unwrap();
        // x = ±1 and y = ±π (up to rounding) are boundary nodes.
        let ny_in = (PI / 0.25).floor() as usize * 2 + 1;
        assert_eq!(g.n_interior(), 7 * ny_in);
        assert!(g
            .boundary_distances
            .iter()
            .flatten()
            .flatten()
            .all(|&t| t >= 1e-6));
    }
}
