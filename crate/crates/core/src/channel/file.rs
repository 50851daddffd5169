//! Text channel format.
//!
//! ```text
//! # cmat v1 B=<int> U=<int>
//! <re> <im>        (B·U lines, column-major: all antennas of UE 1, then UE 2, ...)
//! ```
//!
//! The writer emits 17 significant digits so that `save ∘ load` is the
//! identity on files it produced.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use super::{CMatrix, ChannelMatrix};
use crate::error::{Error, Result};

const MAGIC: &str = "# cmat v1";

pub fn load_channel(path: &Path) -> Result<ChannelMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_channel(&text, path)
}

/// Parse channel text. `origin` is only used to label error messages.
pub fn parse_channel(text: &str, origin: &Path) -> Result<ChannelMatrix> {
    let perr = |line: usize, msg: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| perr(1, "empty file".into()))?;
    let (b, u) = parse_header(header).map_err(|m| perr(1, m))?;
    if u % 2 != 0 {
        return Err(perr(1, format!("U must be even (got U={u})")));
    }
    if b == 0 || u < 2 {
        return Err(perr(1, format!("need B >= 1 and U >= 2 (got B={b}, U={u})")));
    }

    let expected = b * u;
    let mut values = Vec::with_capacity(expected);
    let mut last_line = 1;
    for (no, line) in lines {
        last_line = no;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if values.len() == expected {
            return Err(perr(no, format!("extra data after {expected} entries")));
        }
        let mut parts = line.split_whitespace();
        let (Some(re), Some(im), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(perr(no, "expected `<re> <im>`".into()));
        };
        let re: f64 = re.parse().map_err(|_| perr(no, format!("bad number `{re}`")))?;
        let im: f64 = im.parse().map_err(|_| perr(no, format!("bad number `{im}`")))?;
        if !re.is_finite() || !im.is_finite() {
            return Err(perr(no, "non-finite entry".into()));
        }
        values.push(Complex64::new(re, im));
    }
    if values.len() != expected {
        return Err(perr(
            last_line,
            format!("dimension mismatch: header declares {expected} entries, found {}", values.len()),
        ));
    }
    ChannelMatrix::new(CMatrix::from_vec(b, u, values)).map_err(|e| perr(1, e.to_string()))
}

fn parse_header(line: &str) -> std::result::Result<(usize, usize), String> {
    let rest = line
        .strip_prefix(MAGIC)
        .ok_or_else(|| format!("malformed header, expected `{MAGIC} B=<int> U=<int>`"))?;
    let mut b = None;
    let mut u = None;
    for tok in rest.split_whitespace() {
        match tok.split_once('=') {
            Some(("B", v)) => b = Some(v.parse::<usize>().map_err(|_| format!("bad B value `{v}`"))?),
            Some(("U", v)) => u = Some(v.parse::<usize>().map_err(|_| format!("bad U value `{v}`"))?),
            _ => return Err(format!("unexpected header token `{tok}`")),
        }
    }
    match (b, u) {
        (Some(b), Some(u)) => Ok((b, u)),
        _ => Err("header must declare both B and U".into()),
    }
}

pub fn write_channel<W: Write>(h: &ChannelMatrix, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{MAGIC} B={} U={}", h.antennas(), h.ue_count())?;
    // nalgebra storage is column-major already.
    for z in h.matrix().iter() {
        writeln!(out, "{:.16e} {:.16e}", z.re, z.im)?;
    }
    Ok(())
}

pub fn save_channel(h: &ChannelMatrix, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_channel(h, &mut buf).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}
