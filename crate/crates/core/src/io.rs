//! CSV reading and writing.
//!
//! One dialect everywhere: comma separator, mandatory header, LF line endings,
//! UTF-8, `.` as the decimal point. Panels carry a leading `date` column with
//! `YYYY-MM` stamps; result tables are plain numeric columns, optionally led by
//! a text label column.

use std::io::Write;

use crate::error::{Error, Result};
use crate::panel::{Panel, YearMonth};

/// Renders a number so that parsing it back yields the identical `f64`.
///
/// Shortest round-trip digits are used; very large or very small magnitudes
/// switch to exponent notation to keep cells short.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-6..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn writer<W: Write>(sink: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink)
}

fn csv_error(err: csv::Error) -> Error {
    let row = err.position().map(|p| p.line() as usize).unwrap_or(0);
    match err.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        csv::ErrorKind::Utf8 { err, .. } => Error::parse(row, None, format!("invalid UTF-8: {err}")),
        other => Error::parse(row, None, format!("{other:?}")),
    }
}

fn parse_value(cell: &str, row: usize, column: usize) -> Result<f64> {
    let v: f64 = cell
        .trim()
        .parse()
        .map_err(|_| Error::parse(row, Some(column), format!("{cell:?} is not a number")))?;
    Ok(v)
}

/// Parses a panel file: header `date,<id1>,...,<idS>` followed by rows
/// `YYYY-MM,<v1>,...,<vS>`.
///
/// Rows are numbered from 1 with the header as row 1; columns from 1 with the
/// date as column 1.
pub fn parse_panel_csv(text: &str) -> Result<Panel> {
    let mut records = reader(text).into_records();

    let header = match records.next() {
        Some(rec) => rec.map_err(csv_error)?,
        None => return Err(Error::parse(1, None, "missing header")),
    };
    if header.get(0).map(str::trim) != Some("date") {
        return Err(Error::parse(1, Some(1), "header must start with `date`"));
    }
    if header.len() < 2 {
        return Err(Error::parse(1, None, "header names no sectors"));
    }
    let sector_ids: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_string()).collect();
    for (j, id) in sector_ids.iter().enumerate() {
        if id.is_empty() {
            return Err(Error::parse(1, Some(j + 2), "empty sector id"));
        }
        if sector_ids[..j].contains(id) {
            return Err(Error::parse(1, Some(j + 2), format!("duplicate sector id {id:?}")));
        }
    }

    let width = header.len();
    let mut dates: Vec<YearMonth> = Vec::new();
    let mut levels: Vec<Vec<f64>> = vec![Vec::new(); sector_ids.len()];
    for rec in records {
        let rec = rec.map_err(csv_error)?;
        let row = rec.position().map(|p| p.line() as usize).unwrap_or(dates.len() + 2);
        if rec.len() != width {
            return Err(Error::parse(
                row,
                None,
                format!("expected {width} fields, found {}", rec.len()),
            ));
        }
        let date: YearMonth = rec[0]
            .trim()
            .parse()
            .map_err(|e: Error| Error::parse(row, Some(1), e.to_string()))?;
        if let Some(prev) = dates.last() {
            if date != prev.next() {
                let problem = if date <= *prev {
                    "is not after"
                } else {
                    "skips months after"
                };
                return Err(Error::parse(row, Some(1), format!("month {date} {problem} {prev}")));
            }
        }
        dates.push(date);
        for (j, column) in levels.iter_mut().enumerate() {
            let v = parse_value(&rec[j + 1], row, j + 2)?;
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::parse(
                    row,
                    Some(j + 2),
                    format!("level {v} is not a positive finite number"),
                ));
            }
            column.push(v);
        }
    }
    Panel::new(sector_ids, dates, levels)
}

/// Writes a panel in the format read by [`parse_panel_csv`].
pub fn write_panel_csv<W: Write>(panel: &Panel, sink: W) -> Result<()> {
    let mut w = writer(sink);
    let mut header = vec!["date".to_string()];
    header.extend(panel.sector_ids().iter().cloned());
    w.write_record(&header).map_err(csv_error)?;
    for (t, date) in panel.dates().iter().enumerate() {
        let mut row = vec![date.to_string()];
        row.extend((0..panel.n_sectors()).map(|i| format_number(panel.level(t, i))));
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn check_table_shape(column_names: &[&str], columns: &[&[f64]], rows: Option<usize>) -> Result<usize> {
    if column_names.len() != columns.len() {
        return Err(Error::LengthMismatch(format!(
            "{} column names for {} columns",
            column_names.len(),
            columns.len()
        )));
    }
    for (j, name) in column_names.iter().enumerate() {
        if column_names[..j].contains(name) {
            return Err(Error::InvalidArgument(format!("duplicate column name {name:?}")));
        }
    }
    let n = rows.or_else(|| columns.first().map(|c| c.len())).unwrap_or(0);
    if let Some((name, col)) = column_names.iter().zip(columns).find(|(_, c)| c.len() != n) {
        return Err(Error::LengthMismatch(format!(
            "column {name:?} has {} values, expected {n}",
            col.len()
        )));
    }
    Ok(n)
}

/// Writes equal-length numeric columns under a header row.
pub fn write_table_csv<W: Write>(column_names: &[&str], columns: &[&[f64]], sink: W) -> Result<()> {
    let n = check_table_shape(column_names, columns, None)?;
    let mut w = writer(sink);
    w.write_record(column_names).map_err(csv_error)?;
    for t in 0..n {
        w.write_record(columns.iter().map(|c| format_number(c[t])))
            .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Like [`write_table_csv`] with a leading text column, one label per row.
pub fn write_labeled_table_csv<W: Write>(
    label_name: &str,
    labels: &[String],
    column_names: &[&str],
    columns: &[&[f64]],
    sink: W,
) -> Result<()> {
    let mut all_names = vec![label_name];
    all_names.extend_from_slice(column_names);
    check_table_shape(&all_names[1..], columns, Some(labels.len()))?;
    if column_names.contains(&label_name) {
        return Err(Error::InvalidArgument(format!("duplicate column name {label_name:?}")));
    }
    let mut w = writer(sink);
    w.write_record(&all_names).map_err(csv_error)?;
    for (t, label) in labels.iter().enumerate() {
        let mut row = vec![label.clone()];
        row.extend(columns.iter().map(|c| format_number(c[t])));
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// A parsed result table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub column_names: Vec<String>,
    /// Text label column, present when read with [`parse_labeled_table_csv`].
    pub labels: Option<Vec<String>>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.column_names
            .iter()
            .position(|n| n == name)
            .map(|j| self.columns[j].as_slice())
    }

    pub fn n_rows(&self) -> usize {
        match &self.labels {
            Some(l) => l.len(),
            None => self.columns.first().map_or(0, Vec::len),
        }
    }
}

fn parse_table(text: &str, labeled: bool) -> Result<Table> {
    let mut records = reader(text).into_records();
    let header = match records.next() {
        Some(rec) => rec.map_err(csv_error)?,
        None => return Err(Error::parse(1, None, "missing header")),
    };
    let skip = usize::from(labeled);
    if header.len() <= skip && labeled {
        return Err(Error::parse(1, None, "header has no label column"));
    }
    let column_names: Vec<String> = header.iter().skip(skip).map(str::to_string).collect();
    let mut labels = labeled.then(Vec::new);
    let mut columns = vec![Vec::new(); column_names.len()];
    for rec in records {
        let rec = rec.map_err(csv_error)?;
        let row = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        if rec.len() != header.len() {
            return Err(Error::parse(
                row,
                None,
                format!("expected {} fields, found {}", header.len(), rec.len()),
            ));
        }
        if let Some(l) = labels.as_mut() {
            l.push(rec[0].to_string());
        }
        for (j, column) in columns.iter_mut().enumerate() {
            column.push(parse_value(&rec[j + skip], row, j + skip + 1)?);
        }
    }
    Ok(Table {
        column_names,
        labels,
        columns,
    })
}

/// Reads a table written by [`write_table_csv`].
pub fn parse_table_csv(text: &str) -> Result<Table> {
    parse_table(text, false)
}

/// Reads a table written by [`write_labeled_table_csv`].
pub fn parse_labeled_table_csv(text: &str) -> Result<Table> {
    parse_table(text, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "date,s1\n1988-01,100.0\n1988-02,101.0\n1988-03,99.5\n1988-04,100.2\n";

    fn parse_err(text: &str) -> (usize, Option<usize>, String) {
        match parse_panel_csv(text) {
            Err(Error::Parse { row, column, message }) => (row, column, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_panel() {
        let p = parse_panel_csv(MINIMAL).unwrap();
        assert_eq!(p.n_sectors(), 1);
        assert_eq!(p.n_months(), 4);
        assert_eq!(p.sector(0), &[100.0, 101.0, 99.5, 100.2]);
        assert_eq!(p.dates()[3].to_string(), "1988-04");
    }

    #[test]
    fn scientific_notation_and_crlf_accepted() {
        let text = "date,a,b\r\n2000-11,1e2,2.5E1\r\n2000-12,1,1\r\n2001-01,1,1\r\n2001-02,1,1\r\n";
        let p = parse_panel_csv(text).unwrap();
        assert_eq!(p.level(0, 0), 100.0);
        assert_eq!(p.level(0, 1), 25.0);
        assert_eq!(p.dates()[2].to_string(), "2001-01");
    }

    #[test]
    fn skipped_month_reports_row() {
        let (row, col, msg) = parse_err("date,s1\n1988-01,1\n1988-03,1\n1988-04,1\n1988-05,1\n");
        assert_eq!((row, col), (3, Some(1)));
        assert!(msg.contains("skips"), "{msg}");
    }

    #[test]
    fn non_monotone_month_reports_row() {
        let (row, _, msg) = parse_err("date,s1\n1988-01,1\n1988-02,1\n1988-02,1\n1988-03,1\n");
        assert_eq!(row, 4);
        assert!(msg.contains("not after"), "{msg}");
    }

    #[test]
    fn zero_level_rejected_with_position() {
        let (row, col, _) = parse_err("date,s1,s2\n1988-01,1,1\n1988-02,1,0.0\n1988-03,1,1\n1988-04,1,1\n");
        assert_eq!((row, col), (3, Some(3)));
        let (row, col, _) = parse_err("date,s1\n1988-01,-4\n1988-02,1\n1988-03,1\n1988-04,1\n");
        assert_eq!((row, col), (2, Some(2)));
    }

    #[test]
    fn non_numeric_and_ragged_rows_rejected() {
        let (row, col, _) = parse_err("date,s1\n1988-01,1\n1988-02,abc\n1988-03,1\n1988-04,1\n");
        assert_eq!((row, col), (3, Some(2)));
        let (row, col, _) = parse_err("date,s1\n1988-01,1\n1988-02,1,2\n1988-03,1\n1988-04,1\n");
        assert_eq!((row, col), (3, None));
        let (row, _, _) = parse_err("date,s1,s2\n1988-01,1\n");
        assert_eq!(row, 2);
    }

    #[test]
    fn malformed_header_rejected() {
        assert_eq!(parse_err("").0, 1);
        assert_eq!(parse_err("month,s1\n1988-01,1\n").0, 1);
        assert_eq!(parse_err("date\n1988-01\n").0, 1);
        assert_eq!(parse_err("date,a,a\n1988-01,1,1\n").1, Some(3));
        assert_eq!(parse_err("date,a,\n1988-01,1,1\n").1, Some(3));
    }

    #[test]
    fn bad_date_rejected() {
        let (row, col, _) = parse_err("date,s1\n1988-01,1\n88-02,1\n");
        assert_eq!((row, col), (3, Some(1)));
    }

    #[test]
    fn too_few_months_rejected() {
        assert!(matches!(
            parse_panel_csv("date,s1\n1988-01,1\n1988-02,1\n1988-03,1\n"),
            Err(Error::InvalidPanel(_))
        ));
    }

    #[test]
    fn table_shape() {
        let mut buf = Vec::new();
        write_table_csv(&["t", "x"], &[&[0.0, 1.0], &[1.5, 2.5]], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "t,x\n0,1.5\n1,2.5\n");
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn empty_table_is_header_only() {
        let mut buf = Vec::new();
        write_table_csv(&["t", "x"], &[&[], &[]], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,x\n");
    }

    #[test]
    fn table_errors() {
        let mut buf = Vec::new();
        assert!(matches!(
            write_table_csv(&["t", "x"], &[&[0.0, 1.0], &[1.5]], &mut buf),
            Err(Error::LengthMismatch(_))
        ));
        assert!(write_table_csv(&["t", "t"], &[&[0.0], &[1.5]], &mut buf).is_err());
        assert!(write_table_csv(&["t"], &[&[0.0], &[1.5]], &mut buf).is_err());
    }

    struct FailingSink;
    impl Write for FailingSink {
        fn write(&mut self, _: &[u8]) -> std::io::Result<usize> {
            Err(std::io::Error::other("disk full"))
        }
        fn flush(&mut self) -> std::io::Result<()> {
            Err(std::io::Error::other("disk full"))
        }
    }

    #[test]
    fn sink_failure_surfaces() {
        let err = write_table_csv(&["t"], &[&[1.0]], FailingSink).unwrap_err();
        assert!(matches!(err, Error::Io(_)), "{err:?}");
    }

    #[test]
    fn labeled_table_roundtrip() {
        let labels = vec!["a".to_string(), "b".to_string()];
        let mut buf = Vec::new();
        write_labeled_table_csv("sector", &labels, &["omega"], &[&[0.1, 0.2]], &mut buf).unwrap();
        let t = parse_labeled_table_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(t.labels.as_deref(), Some(labels.as_slice()));
        assert_eq!(t.column("omega"), Some(&[0.1, 0.2][..]));
        assert_eq!(t.n_rows(), 2);
    }

    #[test]
    fn number_formatting_is_exact() {
        for x in [
            0.0,
            -0.0,
            1.0,
            0.1,
            1.0 / 3.0,
            1e-300,
            6.02e23,
            -2.5e-9,
            f64::MAX,
            f64::MIN_POSITIVE,
        ] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_number(1e-20), "1e-20");
    }
}
