//! CSV reports: `experiment,p,K,alpha,s,N,seed,k0,R,F_exact,F_float,D_exact,pass`.
//!
//! Rationals are written `num/den` in lowest terms. Fields that do not apply
//! to an experiment are left empty.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use num_rational::Ratio;

use super::config::Experiment;
use crate::error::{Error, Result};
use crate::rational::{format_ratio, format_small_ratio, parse_ratio, parse_small_ratio};
use crate::Rational;

pub const HEADER: [&str; 13] = [
    "experiment", "p", "K", "alpha", "s", "N", "seed", "k0", "R", "F_exact", "F_float", "D_exact",
    "pass",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub experiment: Experiment,
    pub p: u64,
    pub precision: u32,
    pub alpha: Ratio<u64>,
    pub s: Option<Rational>,
    pub n: usize,
    pub seed: Option<u64>,
    pub k0: Option<u32>,
    pub r: Option<u64>,
    pub f_exact: Option<Rational>,
    pub f_float: Option<f64>,
    pub d_exact: Option<Rational>,
    pub pass: bool,
}

impl ReportRow {
    fn to_record(&self) -> [String; 13] {
        fn opt<T>(v: &Option<T>, f: impl Fn(&T) -> String) -> String {
            v.as_ref().map(f).unwrap_or_default()
        }
        [
            self.experiment.name().to_string(),
            self.p.to_string(),
            self.precision.to_string(),
            format_small_ratio(&self.alpha),
            opt(&self.s, format_ratio),
            self.n.to_string(),
            opt(&self.seed, u64::to_string),
            opt(&self.k0, u32::to_string),
            opt(&self.r, u64::to_string),
            opt(&self.f_exact, format_ratio),
            opt(&self.f_float, f64::to_string),
            opt(&self.d_exact, format_ratio),
            self.pass.to_string(),
        ]
    }

    fn from_record(record: &csv::StringRecord, line: usize) -> Result<Self> {
        let err = |column: &str, value: &str| Error::Parse {
            line,
            message: format!("column {column}: cannot parse `{value}`"),
        };
        if record.len() != HEADER.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} columns, found {}", HEADER.len(), record.len()),
            });
        }
        let field = |i: usize| &record[i];
        fn opt<T>(v: &str, parse: impl Fn(&str) -> Option<T>) -> Option<Option<T>> {
            if v.is_empty() {
                Some(None)
            } else {
                parse(v).map(Some)
            }
        }
        macro_rules! req {
            ($i:expr, $parse:expr) => {
                $parse(field($i)).ok_or_else(|| err(HEADER[$i], field($i)))?
            };
        }
        Ok(ReportRow {
            experiment: field(0).parse().map_err(|_| err(HEADER[0], field(0)))?,
            p: req!(1, |v: &str| v.parse().ok()),
            precision: req!(2, |v: &str| v.parse().ok()),
            alpha: req!(3, parse_small_ratio),
            s: req!(4, |v| opt(v, parse_ratio)),
            n: req!(5, |v: &str| v.parse().ok()),
            seed: req!(6, |v| opt(v, |t| t.parse().ok())),
            k0: req!(7, |v| opt(v, |t| t.parse().ok())),
            r: req!(8, |v| opt(v, |t| t.parse().ok())),
            f_exact: req!(9, |v| opt(v, parse_ratio)),
            f_float: req!(10, |v| opt(v, |t| t.parse().ok())),
            d_exact: req!(11, |v| opt(v, parse_ratio)),
            pass: req!(12, |v: &str| v.parse().ok()),
        })
    }
}

pub fn write_report<W: Write>(rows: &[ReportRow], writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(HEADER)?;
    for row in rows {
        csv.write_record(row.to_record())?;
    }
    csv.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_report<R: Read>(reader: R) -> Result<Vec<ReportRow>> {
    let mut csv = csv::Reader::from_reader(reader);
    let header = csv.headers()?.clone();
    if header.iter().ne(HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: "unexpected CSV header".into(),
        });
    }
    csv.records()
        .enumerate()
        .map(|(i, record)| ReportRow::from_record(&record?, i + 2))
        .collect()
}

/// Writes the report to `path`; I/O errors carry the path.
pub fn emit_report(rows: &[ReportRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_report(rows, file).map_err(|e| match e {
        Error::Csv(inner) if inner.is_io_error() => Error::Io {
            path: path.to_path_buf(),
            source: match inner.into_kind() {
                csv::ErrorKind::Io(io) => io,
                _ => unreachable!(),
            },
        },
        other => other,
    })
}

pub fn load_report(path: &Path) -> Result<Vec<ReportRow>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_report(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: usize) -> ReportRow {
        ReportRow {
            experiment: Experiment::RandomPpc,
            p: 3,
            precision: 17,
            alpha: Ratio::new(1, 2),
            s: Some(Rational::new(1.into(), 2.into())),
            n,
            seed: Some(7),
            k0: Some(4),
            r: Some(1234),
            f_exact: Some(Rational::new(1234.into(), 999.into())),
            f_float: Some(1234.0 / 999.0),
            d_exact: None,
            pass: true,
        }
    }

    #[test]
    fn empty_report_is_header_only() {
        let mut buf = Vec::new();
        write_report(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), HEADER.join(",") + "\n");
    }

    #[test]
    fn one_row_two_lines() {
        let mut buf = Vec::new();
        write_report(&[row(10)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(
            text.lines().nth(1).unwrap(),
            format!("random-ppc,3,17,1/2,1/2,10,7,4,1234,1234/999,{},,true", 1234.0 / 999.0)
        );
        assert_eq!(read_report(text.as_bytes()).unwrap(), vec![row(10)]);
    }

    #[test]
    fn malformed_rows() {
        let bad = format!("{}\nrandom-ppc,3,17,1/2,1/2,ten,7,4,1,1/1,1,,true\n", HEADER.join(","));
        assert!(matches!(read_report(bad.as_bytes()), Err(Error::Parse { line: 2, .. })));
        assert!(read_report("a,b\n".as_bytes()).is_err());
    }

    #[test]
    fn emit_reports_path_on_failure() {
        let err = emit_report(&[], Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
