use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use crate::dataset::{Dataset, Matrix};
use crate::error::{Error, Result};

/// Parses a header-first, comma-separated numeric table.
pub fn read_dataset<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(rec) => rec.map_err(csv_error)?,
        None => {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "missing header row".into(),
            })
        }
    };
    let names: Vec<String> = header.iter().map(str::to_owned).collect();
    if names.iter().any(String::is_empty) {
        return Err(Error::Parse {
            line: 1,
            column: names.iter().position(String::is_empty).unwrap_or(0) + 1,
            message: "empty column name".into(),
        });
    }
    let cols = names.len();
    let mut data = Vec::new();
    let mut rows = 0;
    for rec in records {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != cols {
            return Err(Error::Parse {
                line,
                column: rec.len().min(cols) + 1,
                message: format!("expected {cols} fields, found {}", rec.len()),
            });
        }
        for (c, field) in rec.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                column: c + 1,
                message: format!("not a number: {field:?}"),
            })?;
            data.push(v);
        }
        rows += 1;
    }
    Dataset::new(names, Matrix::from_vec(rows, cols, data)?)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    read_dataset(BufReader::new(File::open(path)?))
}

/// Writes values with the shortest representation that parses back to the
/// same `f64`.
pub fn write_dataset<W: Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(data.names()).map_err(csv_error)?;
    let mut buf = Vec::with_capacity(data.dim());
    for row in data.iter() {
        buf.clear();
        buf.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&buf).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_dataset(data: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    write_dataset(data, File::create(path)?)
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse {
            line,
            column: 0,
            message: format!("{other:?}"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Dataset> {
        read_dataset(s.as_bytes())
    }

    #[test]
    fn two_by_two() {
        let d = parse("a,b\n1,2\n3.5,-4e-3\n").unwrap();
        assert_eq!(d.names(), ["a", "b"]);
        assert_eq!(d.len(), 2);
        assert_eq!(d.row(1), [3.5, -0.004]);
    }

    #[test]
    fn header_only() {
        let d = parse("x,y,z\n").unwrap();
        assert!(d.is_empty());
        assert_eq!(d.dim(), 3);
    }

    #[test]
    fn ragged_row_reports_line() {
        match parse("a,b\n1,2\n3\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_cell_reports_line_and_column() {
        match parse("a,b\n1,2\n3,x\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 2)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse(""), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn round_trip_is_bitwise() {
        let vals = vec![vec![0.1, 1.0 / 3.0], vec![-2.5e-300, 12345.678901234567]];
        let d = Dataset::from_rows(&vals).unwrap();
        let mut buf = Vec::new();
        write_dataset(&d, &mut buf).unwrap();
        let back = read_dataset(buf.as_slice()).unwrap();
        for (a, b) in d.iter().flatten().zip(back.iter().flatten()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back.names(), d.names());
    }
}
