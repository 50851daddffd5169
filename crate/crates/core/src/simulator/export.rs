//! Results CSV: `scheduler,K,snr_db,ber,min_sinr_db,obj_evals,realizations,symbols`,
//! one row per (scheduler, K, SNR), floats with 12 significant digits. Cells
//! refused by a scheduler carry `unreached` in `ber`.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SweepResult;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "scheduler,K,snr_db,ber,min_sinr_db,obj_evals,realizations,symbols";
const UNREACHED: &str = "unreached";

/// `%.{digits}g`-style formatting.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub scheduler: String,
    #[serde(rename = "K")]
    pub k: usize,
    pub snr_db: f64,
    /// `None` for `unreached`.
    #[serde(with = "ber_field")]
    pub ber: Option<f64>,
    pub min_sinr_db: f64,
    pub obj_evals: f64,
    pub realizations: usize,
    pub symbols: usize,
}

mod ber_field {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_str(&super::format_sig(*x, 12)),
            None => s.serialize_str(super::UNREACHED),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        let s = String::deserialize(d)?;
        if s == super::UNREACHED {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(serde::de::Error::custom)
        }
    }
}

pub fn write_results<W: Write>(res: &SweepResult, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for c in &res.cells {
        let ber = match c.ber {
            Some(b) => format_sig(b, 12),
            None => UNREACHED.to_string(),
        };
        w.write_record([
            c.scheduler.name().to_string(),
            c.k.to_string(),
            format_sig(c.snr_db, 12),
            ber,
            format_sig(c.mean_min_sinr_db, 12),
            format_sig(c.mean_obj_evals, 12),
            c.realizations.to_string(),
            c.symbols.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn export_results(res: &SweepResult, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_results(res, file)
}

pub fn load_results(path: &Path) -> Result<Vec<CsvRow>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            msg: format!("unexpected header `{}`", header.join(",")),
        });
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}
