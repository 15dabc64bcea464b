use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::mechanisms::{OutcomeVector, ReportMatrix};

/// Reports read from a CSV file, with the forecaster labels from its first
/// column.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledReports {
    pub labels: Vec<String>,
    pub reports: ReportMatrix,
}

fn parse_error(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    parse_error(line, e.to_string())
}

fn parse_value(field: &str, line: u64, range: (f64, f64)) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_error(line, format!("`{field}` is not a number")))?;
    if !(range.0..=range.1).contains(&v) {
        return Err(parse_error(
            line,
            format!("{v} is outside the report domain [{}, {}]", range.0, range.1),
        ));
    }
    Ok(v)
}

/// Reads a reports table with header `forecaster,e1,…,em`. Values must lie in
/// `range`.
pub fn read_reports_csv<R: Read>(reader: R, range: (f64, f64)) -> Result<LabeledReports> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    if headers.len() < 2 {
        return Err(parse_error(
            1,
            "header must be `forecaster,e1,…,em` with at least one event",
        ));
    }
    let m = headers.len() - 1;
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != m + 1 {
            return Err(parse_error(
                line,
                format!("expected {} fields, found {}", m + 1, record.len()),
            ));
        }
        labels.push(record[0].to_string());
        rows.push(
            record
                .iter()
                .skip(1)
                .map(|f| parse_value(f, line, range))
                .collect::<Result<Vec<f64>>>()?,
        );
    }
    if rows.len() < 2 {
        return Err(parse_error(
            2 + rows.len() as u64,
            format!("need at least two forecasters, found {}", rows.len()),
        ));
    }
    Ok(LabeledReports {
        labels,
        reports: ReportMatrix::new(rows)?,
    })
}

/// [`read_reports_csv`] on a file, with reports in `[0, 1]`.
pub fn parse_reports_csv(path: impl AsRef<Path>) -> Result<LabeledReports> {
    read_reports_csv(File::open(path)?, (0.0, 1.0))
}

/// Writes reports in the format read by [`read_reports_csv`]. Values are
/// printed in their shortest round-trip form, so reading them back is exact.
pub fn write_reports_csv<W: Write>(writer: W, labels: &[String], reports: &ReportMatrix) -> Result<()> {
    if labels.len() != reports.n() {
        return Err(invalid(format!(
            "{} labels for {} forecasters",
            labels.len(),
            reports.n()
        )));
    }
    let mut w = csv::Writer::from_writer(writer);
    let header = std::iter::once("forecaster".to_string()).chain((1..=reports.m()).map(|k| format!("e{k}")));
    w.write_record(header).map_err(csv_error)?;
    for (label, row) in labels.iter().zip(reports.rows()) {
        let fields = std::iter::once(label.clone()).chain(row.iter().map(|v| v.to_string()));
        w.write_record(fields).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a single row of outcomes, optionally preceded by a header row.
pub fn read_outcomes_csv<R: Read>(reader: R, range: (f64, f64)) -> Result<OutcomeVector> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut data: Option<(u64, Vec<f64>)> = None;
    for (r, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(r as u64 + 1, |p| p.line());
        if r == 0 && record.iter().any(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        if data.is_some() {
            return Err(parse_error(line, "outcomes file must hold a single row"));
        }
        let values = record
            .iter()
            .map(|f| parse_value(f, line, range))
            .collect::<Result<Vec<f64>>>()?;
        data = Some((line, values));
    }
    let (_, values) = data.ok_or_else(|| parse_error(1, "outcomes file has no data row"))?;
    Ok(OutcomeVector::new(values))
}

/// [`read_outcomes_csv`] on a file.
pub fn parse_outcomes_csv(path: impl AsRef<Path>, range: (f64, f64)) -> Result<OutcomeVector> {
    read_outcomes_csv(File::open(path)?, range)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str) -> Result<LabeledReports> {
        read_reports_csv(s.as_bytes(), (0.0, 1.0))
    }

    #[test]
    fn two_by_one() {
        let r = read("forecaster,e1\nalice,0.5\nbob,1.0\n").unwrap();
        assert_eq!(r.labels, vec!["alice", "bob"]);
        assert_eq!((r.reports.n(), r.reports.m()), (2, 1));
        assert_eq!(r.reports.column(0), vec![0.5, 1.0]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match read("forecaster,e1\na,0.5\nb,1.5\n") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        match read("forecaster,e1,e2\na,0.5,0.1\nb,0.2\n") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        match read("forecaster,e1\na,x\nb,0.2\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(read("forecaster,e1\n"), Err(Error::Parse { .. })));
        assert!(matches!(read("forecaster,e1\na,0.3\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn round_trip() {
        let reports =
            ReportMatrix::new(vec![vec![0.1, 1.0 / 3.0], vec![0.7, std::f64::consts::FRAC_1_SQRT_2]]).unwrap();
        let labels = vec!["a".to_string(), "b, with comma".to_string()];
        let mut buf = Vec::new();
        write_reports_csv(&mut buf, &labels, &reports).unwrap();
        let back = read_reports_csv(buf.as_slice(), (0.0, 1.0)).unwrap();
        assert_eq!(back.reports, reports);
        assert_eq!(back.labels, labels);
    }

    #[test]
    fn outcomes_with_and_without_header() {
        let a = read_outcomes_csv("1,0,1\n".as_bytes(), (0.0, 1.0)).unwrap();
        let b = read_outcomes_csv("e1,e2,e3\n1,0,1\n".as_bytes(), (0.0, 1.0)).unwrap();
        assert_eq!(a, b);
        assert!(read_outcomes_csv("1,0\n0,1\n".as_bytes(), (0.0, 1.0)).is_err());
        assert!(read_outcomes_csv("e1\n".as_bytes(), (0.0, 1.0)).is_err());
    }
}
