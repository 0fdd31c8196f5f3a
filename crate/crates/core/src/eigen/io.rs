//! Binary field files: little-endian `u64 nx, u64 ny, f64 h, f64 x0,
//! f64 y0`, then `nx · ny` row-major `f64` node values.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::field::{Field, TensorGrid};

pub fn write_field(mut w: impl Write, field: &Field) -> Result<()> {
    let g = field.grid;
    if g.hx != g.hy {
        return Err(Error::Parameter(
            "field files need a square grid (hx = hy)".into(),
        ));
    }
    let mut buf = Vec::with_capacity(40 + 8 * field.values.len());
    buf.extend_from_slice(&(g.nx as u64).to_le_bytes());
    buf.extend_from_slice(&(g.ny as u64).to_le_bytes());
    for v in [g.hx, g.x0, g.y0] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for v in &field.values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_field(mut r: impl Read) -> Result<Field> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 40 {
        return Err(Error::Data("field file shorter than its header".into()));
    }
    let word = |k: usize| -> [u8; 8] { bytes[8 * k..8 * k + 8].try_into().expect("8-byte slice") };
    let nx = u64::from_le_bytes(word(0)) as usize;
    let ny = u64::from_le_bytes(word(1)) as usize;
    let (h, x0, y0) = (
        f64::from_le_bytes(word(2)),
        f64::from_le_bytes(word(3)),
        f64::from_le_bytes(word(4)),
    );
    let expected = nx
        .checked_mul(ny)
        .and_then(|n| n.checked_mul(8))
        .and_then(|n| n.checked_add(40));
    if expected != Some(bytes.len()) {
        return Err(Error::Data(format!(
            "field file of {} bytes does not match a {nx}x{ny} grid",
            bytes.len()
        )));
    }
    let values = (0..nx * ny)
        .map(|k| f64::from_le_bytes(word(5 + k)))
        .collect();
    Ok(Field {
        grid: TensorGrid {
            x0,
            y0,
            hx: h,
            hy: h,
            nx,
            ny,
        },
        values,
    })
}
