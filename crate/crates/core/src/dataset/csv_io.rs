use std::path::Path;

use super::Dataset;
use crate::error::{Error, Result};

const DEFAULT_LABEL_COLUMN: &str = "label";

/// Reads a rectangular numeric CSV.
///
/// A first record containing any non-numeric field is taken as the header.
/// The column named `label_column` (default `"label"`) becomes the labels,
/// every other column a coordinate. Asking for a label column by name in a
/// file that lacks it is an error; the default simply yields no labels.
pub fn load_csv(path: impl AsRef<Path>, label_column: Option<&str>) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;

    let mut records = Vec::new();
    for rec in reader.records() {
        records.push(rec.map_err(|e| csv_error(path, e))?);
    }
    let Some(first) = records.first() else {
        return Err(Error::Parse {
            row: 1,
            column: 1,
            message: "empty CSV".into(),
        });
    };
    let header: Option<Vec<String>> = first
        .iter()
        .any(|f| f.parse::<f64>().is_err())
        .then(|| first.iter().map(str::to_owned).collect());
    let width = first.len();
    let body_start = usize::from(header.is_some());

    let label_idx = match (&header, label_column) {
        (Some(h), name) => {
            let wanted = name.unwrap_or(DEFAULT_LABEL_COLUMN);
            let idx = h.iter().position(|c| c == wanted);
            if idx.is_none() && name.is_some() {
                return Err(Error::invalid(format!("label column {wanted:?} not in header")));
            }
            idx
        }
        (None, Some(name)) => {
            return Err(Error::invalid(format!(
                "label column {name:?} requested but the CSV has no header"
            )))
        }
        (None, None) => None,
    };

    let n = records.len() - body_start;
    let d = width - usize::from(label_idx.is_some());
    let mut points = Vec::with_capacity(n * d);
    let mut labels = label_idx.map(|_| Vec::with_capacity(n));
    for (r, rec) in records.iter().enumerate().skip(body_start) {
        let row = r + 1;
        if rec.len() != width {
            return Err(Error::Parse {
                row,
                column: rec.len().min(width) + 1,
                message: format!("expected {width} fields, found {}", rec.len()),
            });
        }
        for (c, field) in rec.iter().enumerate() {
            if Some(c) == label_idx {
                let v: f64 = field.parse().map_err(|_| Error::Parse {
                    row,
                    column: c + 1,
                    message: format!("label {field:?} is not a number"),
                })?;
                if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
                    return Err(Error::Parse {
                        row,
                        column: c + 1,
                        message: format!("label {field:?} is not a non-negative integer"),
                    });
                }
                labels.as_mut().unwrap().push(v as usize);
            } else {
                let v: f64 = field.parse().map_err(|_| Error::Parse {
                    row,
                    column: c + 1,
                    message: format!("{field:?} is not a number"),
                })?;
                points.push(v);
            }
        }
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Dataset::new(name, points, n, d, labels)
}

/// Writes `x0..x{d-1}[,label]` with a header line. Floats use the shortest
/// representation that parses back to the same `f64`.
pub fn save_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut header: Vec<String> = (0..ds.dim()).map(|j| format!("x{j}")).collect();
    if ds.labels().is_some() {
        header.push(DEFAULT_LABEL_COLUMN.into());
    }
    w.write_record(&header).map_err(|e| csv_error(path, e))?;
    for i in 0..ds.n() {
        let mut rec: Vec<String> = ds.row(i).iter().map(|x| x.to_string()).collect();
        if let Some(l) = ds.labels() {
            rec.push(l[i].to_string());
        }
        w.write_record(&rec).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let pos = e.position().map(|p| p.line() as usize).unwrap_or(0);
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        }
    } else {
        Error::Parse {
            row: pos,
            column: 0,
            message: e.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn header_with_label_column() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "a.csv", "x,y,label\n0,0,0\n1,1,1\n");
        let ds = load_csv(&p, None).unwrap();
        assert_eq!((ds.n(), ds.dim()), (2, 2));
        assert_eq!(ds.labels(), Some(&[0, 1][..]));
        assert_eq!(ds.points(), &[0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn label_column_in_the_middle_by_name() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "a.csv", "a,cls,b\n1,3,2\n4,0,5\n");
        let ds = load_csv(&p, Some("cls")).unwrap();
        assert_eq!(ds.points(), &[1.0, 2.0, 4.0, 5.0]);
        assert_eq!(ds.labels(), Some(&[3, 0][..]));
        assert!(load_csv(&p, Some("nope")).is_err());
    }

    #[test]
    fn headerless_has_no_labels() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "a.csv", "0.5,1\n2,3\n");
        let ds = load_csv(&p, None).unwrap();
        assert!(ds.labels().is_none());
        assert_eq!(ds.points(), &[0.5, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn ragged_and_non_numeric_rows_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "r.csv", "x,y\n1,2\n3\n");
        match load_csv(&p, None) {
            Err(Error::Parse { row, .. }) => assert_eq!(row, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        let p = write(&dir, "s.csv", "x,y\n1,2\n3,abc\n");
        match load_csv(&p, None) {
            Err(Error::Parse { row, column, .. }) => assert_eq!((row, column), (3, 2)),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn csv_round_trip_matches_mnde_source() {
        use crate::dataset::{read_embeddings, write_embeddings};
        let dir = tempfile::tempdir().unwrap();
        let spec = crate::dataset::SyntheticMixtureSpec { k: 3, d: 4, n: 30, overlap: 2.0, seed: 5 };
        let ds = crate::dataset::generate_synthetic_mixture(&spec).unwrap();
        let from_mnde = read_embeddings(&write_embeddings(&ds).unwrap(), "s").unwrap();
        let p = dir.path().join("s.csv");
        save_csv(&from_mnde, &p).unwrap();
        let back = load_csv(&p, None).unwrap();
        assert_eq!(back.labels(), from_mnde.labels());
        for (a, b) in back.points().iter().zip(from_mnde.points()) {
            assert!((a - b).abs() <= f32::EPSILON as f64 * b.abs().max(1.0));
        }
    }
}
