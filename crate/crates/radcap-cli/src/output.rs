//! Deterministic report emission. CSV is comma separated with a header row and LF line
//! endings; numbers that may leave `f64` range are written as decimal mantissa and exponent.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use radcap::{LogScalar, Radius};

use crate::error::CliError;

/// Significant digits after the point in CSV numbers.
const DIGITS: usize = 16;

pub fn sci(v: LogScalar) -> String {
    v.to_sci_string(DIGITS)
}

pub fn sci_radius(r: Radius) -> String {
    sci(r.value())
}

pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))
}

pub fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, bytes)?;
        }
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_lf_and_header() {
        let bytes = csv_bytes(&["a", "b"], &[vec!["1".into(), "2".into()]]).unwrap();
        assert_eq!(bytes, b"a,b\n1,2\n");
    }

    #[test]
    fn extreme_values_keep_their_exponent() {
        let ln = -2f64.powi(40);
        let text = sci_radius(Radius::from_ln(ln));
        let (mantissa, exp) = text.split_once('e').unwrap();
        let exp: i64 = exp.parse().unwrap();
        assert_eq!(exp, (ln / std::f64::consts::LN_10).floor() as i64);
        let m: f64 = mantissa.parse().unwrap();
        assert!((1.0..10.0).contains(&m));
        assert_eq!(sci(LogScalar::ZERO), "0");
    }
}
