//! `GridState` files: one JSON header line, then the values as
//! little-endian `f64` pairs `(re, im)`.

use super::GridState;
use crate::error::{Error, Result};
use crate::scalar::Vec3;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

#[derive(Serialize, Deserialize, Debug, PartialEq)]
struct Header {
    dim: usize,
    n: usize,
    half_width: f64,
    time: f64,
    encoding: String,
}

const ENCODING: &str = "f64le-re-im";

pub fn write_state<W: Write>(state: &GridState, mut w: W) -> Result<()> {
    let header = Header {
        dim: state.dim,
        n: state.n,
        half_width: state.half_width,
        time: state.time,
        encoding: ENCODING.into(),
    };
    let line = serde_json::to_string(&header).map_err(|e| Error::Io(e.to_string()))?;
    w.write_all(line.as_bytes())?;
    w.write_all(b"\n")?;
    for v in &state.values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_state<R: BufRead>(mut r: R) -> Result<GridState> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let h: Header = serde_json::from_str(line.trim_end()).map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;
    if h.encoding != ENCODING {
        return Err(Error::Parse { line: 1, msg: format!("unknown encoding {}", h.encoding) });
    }
    let count = h.n.checked_pow(h.dim as u32).ok_or_else(|| Error::Parse { line: 1, msg: "shape overflow".into() })?;
    let mut values = Vec::with_capacity(count);
    let mut buf = [0u8; 16];
    for _ in 0..count {
        r.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf[..8].try_into().expect("8 bytes"));
        let im = f64::from_le_bytes(buf[8..].try_into().expect("8 bytes"));
        values.push(Complex::new(re, im));
    }
    Ok(GridState { dim: h.dim, n: h.n, half_width: h.half_width, time: h.time, values })
}

/// `x1,x2,x3,re,im` rows.
pub fn probes_csv(points: &[Vec3<f64>], values: &[Complex<f64>]) -> String {
    let mut s = String::from("x1,x2,x3,re,im\n");
    for (p, v) in points.iter().zip(values) {
        s.push_str(&format!("{},{},{},{:.12e},{:.12e}\n", p[0], p[1], p[2], v.re, v.im));
    }
    s
}
