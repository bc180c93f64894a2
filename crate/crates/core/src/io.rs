//! CSV encodings of signals and atomic report writing.
//!
//! Signals are three-column CSV: `index,re,im` for sequences, `x,re,im` for
//! sampled functions. The header decides which kind is read back.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::{AnySignal, ContinuousSignal, DiscreteSignal, Lattice, Sampled};

pub fn write_signal_csv<W: Write>(out: W, signal: &AnySignal) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let lattice = signal.lattice();
    let first = if lattice.is_discrete() { "index" } else { "x" };
    w.write_record([first, "re", "im"])?;
    for (j, v) in signal.values().iter().enumerate() {
        let pos = match lattice {
            Lattice::Integers { n_min } => (n_min + j as i64).to_string(),
            Lattice::Grid { .. } => lattice.position(j).to_string(),
        };
        w.write_record([pos, v.re.to_string(), v.im.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn signal_csv_string(signal: &AnySignal) -> Result<String> {
    let mut buf = Vec::new();
    write_signal_csv(&mut buf, signal)?;
    Ok(String::from_utf8(buf).expect("csv writer emits utf-8"))
}

fn parse_f64(field: &str, row: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("row {row}: '{field}' is not a number")))
}

pub fn read_signal_csv<R: Read>(input: R) -> Result<AnySignal> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.len() != 3 || &headers[1] != "re" || &headers[2] != "im" {
        return Err(Error::Parse(format!(
            "expected header 'index,re,im' or 'x,re,im', got '{}'",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let discrete = match &headers[0] {
        "index" => true,
        "x" => false,
        other => return Err(Error::Parse(format!("unknown position column '{other}'"))),
    };
    let mut positions = Vec::new();
    let mut values = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(Error::Parse(format!("row {row}: expected 3 fields")));
        }
        positions.push(rec[0].trim().to_string());
        values.push(Complex64::new(parse_f64(&rec[1], row)?, parse_f64(&rec[2], row)?));
    }
    if values.is_empty() {
        return Err(Error::Parse("signal file has no rows".into()));
    }
    if discrete {
        let idx: Vec<i64> = positions
            .iter()
            .enumerate()
            .map(|(row, p)| p.parse::<i64>().map_err(|_| Error::Parse(format!("row {row}: bad index '{p}'"))))
            .collect::<Result<_>>()?;
        if idx.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(Error::Parse("indices must be consecutive integers".into()));
        }
        Ok(DiscreteSignal::new(idx[0], values)?.into())
    } else {
        let xs: Vec<f64> = positions.iter().enumerate().map(|(row, p)| parse_f64(p, row)).collect::<Result<_>>()?;
        if xs.len() < 2 {
            return Err(Error::Parse("a sampled function needs at least two rows to fix its step".into()));
        }
        let step = xs[1] - xs[0];
        let uniform = xs
            .iter()
            .enumerate()
            .all(|(j, &x)| (x - (xs[0] + j as f64 * step)).abs() <= 1e-9 * step.abs().max(1.0) * (j as f64 + 1.0));
        if !uniform {
            return Err(Error::Parse("x column is not a uniform grid".into()));
        }
        Ok(ContinuousSignal::new(xs[0], step, values)?.into())
    }
}

pub fn read_signal_file(path: &Path) -> Result<AnySignal> {
    read_signal_csv(fs::File::open(path)?)
}

/// Write `contents` to `path` through a sibling temporary file and a rename,
/// so readers never observe a partial report.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("'{}' has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Convenience for signals known statically.
pub fn sampled_csv_string<S: Sampled + Into<AnySignal>>(signal: &S) -> Result<String> {
    signal_csv_string(&signal.clone().into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_round_trip() {
        let s = DiscreteSignal::new(-1, vec![Complex64::new(0.5, -1.0), Complex64::new(2.0, 0.0)]).unwrap();
        let text = sampled_csv_string(&s).unwrap();
        assert_eq!(text, "index,re,im\n-1,0.5,-1\n0,2,0\n");
        let back = read_signal_csv(text.as_bytes()).unwrap();
        assert_eq!(back, AnySignal::Discrete(s));
    }

    #[test]
    fn continuous_round_trip() {
        let s = ContinuousSignal::new(0.0, 0.25, vec![Complex64::new(1.0, 0.0); 5]).unwrap();
        let back = read_signal_csv(sampled_csv_string(&s).unwrap().as_bytes()).unwrap();
        match back {
            AnySignal::Continuous(c) => {
                assert_eq!(c.step(), 0.25);
                assert_eq!(c.samples().len(), 5);
            }
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn malformed_inputs() {
        assert!(read_signal_csv("a,b,c\n1,2,3\n".as_bytes()).is_err());
        assert!(read_signal_csv("index,re,im\n0,1,0\n2,1,0\n".as_bytes()).is_err());
        assert!(read_signal_csv("index,re,im\n0,x,0\n".as_bytes()).is_err());
        assert!(read_signal_csv("x,re,im\n0,1,0\n0.1,1,0\n0.5,1,0\n".as_bytes()).is_err());
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("nested").join("r.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
