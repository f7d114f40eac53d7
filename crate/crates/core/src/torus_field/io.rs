//! `WGF1` binary layout and a JSON debug form for [`SpectralField`].
//!
//! Binary: magic `WGF1`, cutoff `u32`, record count `u32`, then records
//! `(n1: i32, n2: i32, re: f64, im: f64)` sorted by `(n1, n2)`. All little-endian.

use std::io::{Read, Write};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{Lattice, SpectralField};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAGIC: &[u8; 4] = b"WGF1";

fn io_err(e: std::io::Error) -> Error {
    Error::Format(e.to_string())
}

pub fn write_wgf1<T: Real, W: Write>(field: &SpectralField<T>, mut w: W) -> Result<()> {
    let lattice = field.lattice();
    w.write_all(MAGIC).map_err(io_err)?;
    w.write_all(&field.cutoff().to_le_bytes()).map_err(io_err)?;
    w.write_all(&(lattice.len() as u32).to_le_bytes())
        .map_err(io_err)?;
    for (p, c) in lattice.points().iter().zip(field.coeffs()) {
        w.write_all(&p[0].to_le_bytes()).map_err(io_err)?;
        w.write_all(&p[1].to_le_bytes()).map_err(io_err)?;
        w.write_all(&c.re.to_f64_lossy().to_le_bytes())
            .map_err(io_err)?;
        w.write_all(&c.im.to_f64_lossy().to_le_bytes())
            .map_err(io_err)?;
    }
    Ok(())
}

fn read_array<const K: usize, R: Read>(r: &mut R) -> Result<[u8; K]> {
    let mut buf = [0u8; K];
    r.read_exact(&mut buf).map_err(io_err)?;
    Ok(buf)
}

/// Reads a field; records may omit zero coefficients but must be sorted and unique.
pub fn read_wgf1<T: Real, R: Read>(mut r: R) -> Result<SpectralField<T>> {
    let magic: [u8; 4] = read_array(&mut r)?;
    if &magic != MAGIC {
        return Err(Error::Format("missing WGF1 magic".into()));
    }
    let cutoff = u32::from_le_bytes(read_array(&mut r)?);
    let count = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let lattice = Lattice::new(cutoff);
    if count > lattice.len() {
        return Err(Error::Format(format!(
            "{count} records exceed the {} lattice points of cutoff {cutoff}",
            lattice.len()
        )));
    }
    let mut field = SpectralField::zeros(cutoff);
    let mut last: Option<[i32; 2]> = None;
    for _ in 0..count {
        let n1 = i32::from_le_bytes(read_array(&mut r)?);
        let n2 = i32::from_le_bytes(read_array(&mut r)?);
        let re = f64::from_le_bytes(read_array(&mut r)?);
        let im = f64::from_le_bytes(read_array(&mut r)?);
        let p = [n1, n2];
        if let Some(q) = last {
            if p <= q {
                return Err(Error::Format(format!("record {p:?} out of order")));
            }
        }
        last = Some(p);
        let i = lattice
            .index(p)
            .ok_or_else(|| Error::Format(format!("{p:?} lies outside |n| ≤ {cutoff}")))?;
        field.coeffs_mut()[i] = Complex::new(T::of(re), T::of(im));
    }
    Ok(field)
}

#[derive(Serialize, Deserialize)]
struct JsonMode {
    n: [i32; 2],
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct JsonField {
    cutoff: u32,
    modes: Vec<JsonMode>,
}

pub fn field_to_json<T: Real>(field: &SpectralField<T>) -> serde_json::Value {
    let modes = field
        .iter()
        .map(|(n, c)| JsonMode {
            n,
            re: c.re.to_f64_lossy(),
            im: c.im.to_f64_lossy(),
        })
        .collect();
    serde_json::to_value(JsonField {
        cutoff: field.cutoff(),
        modes,
    })
    .expect("serializable")
}

pub fn field_from_json<T: Real>(value: &serde_json::Value) -> Result<SpectralField<T>> {
    let parsed: JsonField =
        serde_json::from_value(value.clone()).map_err(|e| Error::Format(e.to_string()))?;
    let mut field = SpectralField::zeros(parsed.cutoff);
    for m in parsed.modes {
        field
            .set(m.n, Complex::new(T::of(m.re), T::of(m.im)))
            .map_err(|e| Error::Format(e.to_string()))?;
    }
    Ok(field)
}
