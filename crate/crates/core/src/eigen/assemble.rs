use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DomainProfile;
use crate::par::{self, Execution};
use crate::sparse::CsrMatrix;

use super::grid::{Grid, ARMS};

/// `−Δ_h` with symmetric Shortley–Weller cut cells on a [`Grid`].
#[derive(Clone, Debug)]
pub struct Operator {
    pub profile: DomainProfile,
    pub grid: Grid,
    /// Rows and columns in interior order.
    pub matrix: CsrMatrix,
}

/// Builds `−Δ_h`. A cut arm of fraction `θ` contributes `1/(θ h²)` to the
/// diagonal and nothing off it, which keeps the matrix symmetric positive
/// definite.
pub fn assemble(profile: &DomainProfile, h: f64, exec: Execution) -> Result<Operator> {
    if profile.has_wings() {
        let span = (profile.x_extent - profile.a) / h;
        if span < 16.0 {
            return Err(Error::Resolution(format!(
                "wings span {span:.1} cells at h = {h}; at least 16 are required"
            )));
        }
    }
    let grid = Grid::new(profile, h)?;
    let inv_h2 = 1.0 / (h * h);
    let rows: Vec<Vec<(usize, f64)>> = par::map_range(exec, grid.n_interior(), |p| {
        let k = grid.interior_nodes[p];
        let (li, lj) = grid.lattice(k);
        let mut diag = 0.0;
        let mut row = Vec::with_capacity(5);
        for (arm, (di, dj)) in grid.boundary_distances[p].iter().zip(ARMS) {
            match arm {
                Some(theta) => diag += inv_h2 / theta,
                None => {
                    diag += inv_h2;
                    let q = grid
                        .full_index(li + di, lj + dj)
                        .expect("interior neighbour on grid");
                    row.push((grid.interior_id[q], -inv_h2));
                }
            }
        }
        row.push((p, diag));
        row.sort_by_key(|e| e.0);
        row
    });
    let mut row_ptr = Vec::with_capacity(rows.len() + 1);
    row_ptr.push(0);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    for row in rows {
        for (c, v) in row {
            col_idx.push(c);
            values.push(v);
        }
        row_ptr.push(col_idx.len());
    }
    let n = grid.n_interior();
    let matrix = CsrMatrix {
        n_rows: n,
        n_cols: n,
        row_ptr,
        col_idx,
        values,
    };
    Ok(Operator {
        profile: *profile,
        grid,
        matrix,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn label(self) -> char {
        match self {
            Parity::Even => 'e',
            Parity::Odd => 'o',
        }
    }
}

/// Reflection symmetry class: parity in `x` (when the wings agree) and in `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sector {
    pub x: Option<Parity>,
    pub y: Parity,
}

impl Sector {
    /// Two-letter code: x parity (`-` when unused) then y parity.
    pub fn code(&self) -> String {
        let x = self.x.map_or('-', Parity::label);
        format!("{x}{}", self.y.label())
    }

    fn group_order(&self) -> f64 {
        if self.x.is_some() {
            4.0
        } else {
            2.0
        }
    }
}

/// Sectors that together span every grid function.
pub fn sectors(profile: &DomainProfile) -> Vec<Sector> {
    let xs: Vec<Option<Parity>> = if profile.is_x_symmetric() {
        vec![Some(Parity::Even), Some(Parity::Odd)]
    } else {
        vec![None]
    };
    let mut out = Vec::new();
    for x in xs {
        for y in [Parity::Even, Parity::Odd] {
            out.push(Sector { x, y });
        }
    }
    out
}

/// `−Δ_h` restricted to one symmetry sector, symmetrized as
/// `W^{1/2} R W^{-1/2}` with `w = 1/2` per even symmetry line through a node.
#[derive(Clone, Debug)]
pub struct SectorOperator {
    pub sector: Sector,
    pub matrix: CsrMatrix,
    /// Interior id (in the full operator) of each reduced unknown.
    pub reps: Vec<usize>,
    pub weights: Vec<f64>,
    /// Lattice coordinates of each reduced unknown.
    pub lattice: Vec<(i64, i64)>,
}

impl SectorOperator {
    pub fn new(op: &Operator, sector: Sector) -> Self {
        let grid = &op.grid;
        let x_sym = sector.x.is_some();
        let on_odd_line = |li: i64, lj: i64| {
            (lj == 0 && sector.y == Parity::Odd)
                || (x_sym && li == 0 && sector.x == Some(Parity::Odd))
        };
        let mut reduced = vec![usize::MAX; grid.n_interior()];
        let mut reps = Vec::new();
        let mut weights = Vec::new();
        let mut lattice = Vec::new();
        for (p, &k) in grid.interior_nodes.iter().enumerate() {
            let (li, lj) = grid.lattice(k);
            if lj < 0 || (x_sym && li < 0) || on_odd_line(li, lj) {
                continue;
            }
            let mut w = 1.0;
            if lj == 0 {
                w *= 0.5;
            }
            if x_sym && li == 0 {
                w *= 0.5;
            }
            reduced[p] = reps.len();
            reps.push(p);
            weights.push(w);
            lattice.push((li, lj));
        }
        let mut triplets = Vec::with_capacity(5 * reps.len());
        for (r, &p) in reps.iter().enumerate() {
            for (q, v) in op.matrix.row(p) {
                let (mut li, mut lj) = grid.lattice(grid.interior_nodes[q]);
                let mut s = 1.0;
                if lj < 0 {
                    lj = -lj;
                    s *= sector.y.sign();
                }
                if let Some(px) = sector.x {
                    if li < 0 {
                        li = -li;
                        s *= px.sign();
                    }
                }
                if on_odd_line(li, lj) {
                    continue;
                }
                let image = grid
                    .full_index(li, lj)
                    .map(|f| grid.interior_id[f])
                    .expect("mirror image on grid");
                let c = reduced[image];
                debug_assert!(c != usize::MAX);
                // w_r R_rc is symmetric and exact (powers of two); divide by
                // the symmetric factor sqrt(w_r w_c).
                triplets.push((r, c, s * v * weights[r]));
            }
        }
        let mut matrix = CsrMatrix::from_triplets(reps.len(), reps.len(), triplets);
        for r in 0..matrix.n_rows {
            for e in matrix.row_ptr[r]..matrix.row_ptr[r + 1] {
                let c = matrix.col_idx[e];
                matrix.values[e] /= (weights[r] * weights[c]).sqrt();
            }
        }
        SectorOperator {
            sector,
            matrix,
            reps,
            weights,
            lattice,
        }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Expands a reduced vector `y` (unit norm in the symmetrized inner
    /// product) into interior values of a grid function with unit discrete
    /// `L²` norm.
    pub fn lift(&self, op: &Operator, y: &[f64]) -> Vec<f64> {
        let grid = &op.grid;
        let mut out = vec![0.0; grid.n_interior()];
        let scale = 1.0 / (self.sector.group_order().sqrt() * grid.h);
        let sx = self.sector.x.map_or(1.0, Parity::sign);
        let sy = self.sector.y.sign();
        for ((&(li, lj), &w), &v) in self.lattice.iter().zip(&self.weights).zip(y) {
            let value = v / w.sqrt() * scale;
            let mut put = |i: i64, j: i64, s: f64| {
                let k = grid.full_index(i, j).expect("mirror node on grid");
                out[grid.interior_id[k]] = s * value;
            };
            put(li, lj, 1.0);
            put(li, -lj, sy);
            if self.sector.x.is_some() {
                put(-li, lj, sx);
                put(-li, -lj, sx * sy);
            }
        }
        out
    }
}
