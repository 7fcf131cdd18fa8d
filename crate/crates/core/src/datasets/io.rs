//! Points CSV and profile CSV.
//!
//! Points: one point per row, `.` decimal, scientific notation accepted. A
//! header row is recognized by a non-numeric first cell; if its last column is
//! named `label`, that column holds integer cluster tags.
//! Profiles: header `sigma,weight`, one atom per row.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::Array2;

use super::{PointCloud, Profile};
use crate::error::{Error, Result};

pub fn load_csv<P: AsRef<Path>>(path: P) -> Result<PointCloud> {
    read_csv(File::open(path)?)
}

pub fn read_csv<R: Read>(reader: R) -> Result<PointCloud> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut width: Option<usize> = None;
    let mut has_label = false;
    let mut values: Vec<f64> = Vec::new();
    let mut labels: Vec<i64> = Vec::new();
    let mut rows = 0usize;

    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::Parse { row, col: 1, msg: e.to_string() })?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if i == 0 && rec.get(0).is_some_and(|c| c.parse::<f64>().is_err()) {
            has_label = rec.iter().next_back().is_some_and(|c| c.eq_ignore_ascii_case("label"));
            width = Some(rec.len());
            continue;
        }
        let expected = *width.get_or_insert(rec.len());
        if rec.len() != expected {
            return Err(Error::Parse {
                row,
                col: rec.len().min(expected) + 1,
                msg: format!("expected {expected} fields, found {}", rec.len()),
            });
        }
        let n_coords = if has_label { expected - 1 } else { expected };
        for (j, cell) in rec.iter().enumerate() {
            let col = j + 1;
            if j < n_coords {
                let v: f64 = cell
                    .parse()
                    .map_err(|_| Error::Parse { row, col, msg: format!("not a number: {cell:?}") })?;
                if !v.is_finite() {
                    return Err(Error::Parse { row, col, msg: format!("non-finite value {cell:?}") });
                }
                values.push(v);
            } else {
                labels.push(
                    cell.parse()
                        .map_err(|_| Error::Parse { row, col, msg: format!("label is not an integer: {cell:?}") })?,
                );
            }
        }
        rows += 1;
    }

    let width = width.unwrap_or(0);
    let n_coords = if has_label { width.saturating_sub(1) } else { width };
    if rows == 0 || n_coords == 0 {
        return Err(Error::Parse { row: 1, col: 1, msg: "no data rows".into() });
    }
    let data = Array2::from_shape_vec((rows, n_coords), values).expect("rows checked for equal width");
    let cloud = PointCloud::from_parts(data, false, None);
    if has_label {
        cloud.with_labels(labels)
    } else {
        Ok(cloud)
    }
}

/// Write a cloud with an `x1,...,xm[,label]` header.
pub fn write_csv<W: Write>(cloud: &PointCloud, mut w: W) -> Result<()> {
    let m = cloud.dim();
    let mut header: Vec<String> = (1..=m).map(|j| format!("x{j}")).collect();
    if cloud.labels().is_some() {
        header.push("label".into());
    }
    writeln!(w, "{}", header.join(","))?;
    let mut line = String::new();
    for (i, row) in cloud.data().rows().into_iter().enumerate() {
        line.clear();
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&v.to_string());
        }
        if let Some(labels) = cloud.labels() {
            line.push(',');
            line.push_str(&labels[i].to_string());
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_profile_csv<W: Write>(profile: &Profile, mut w: W) -> Result<()> {
    writeln!(w, "sigma,weight")?;
    for a in profile.atoms() {
        writeln!(w, "{},{}", a.sigma, a.weight)?;
    }
    Ok(())
}

pub fn read_profile_csv<R: Read>(reader: R) -> Result<Profile> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Parse { row: 1, col: 1, msg: e.to_string() })?;
    if headers.iter().collect::<Vec<_>>() != ["sigma", "weight"] {
        return Err(Error::Parse { row: 1, col: 1, msg: "expected header sigma,weight".into() });
    }
    let mut atoms = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::Parse { row, col: 1, msg: e.to_string() })?;
        let cell = |col: usize| -> Result<f64> {
            rec.get(col - 1)
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| Error::Parse { row, col, msg: "expected a number".into() })
        };
        atoms.push((cell(1)?, cell(2)?));
    }
    Profile::new(atoms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{center, gen_two_cluster};

    #[test]
    fn reads_plain_rows() {
        let c = read_csv("1,2\n3,4\n".as_bytes()).unwrap();
        assert_eq!(c.n(), 2);
        assert!(!c.is_centered());
        let c = center(&c);
        assert_eq!(c.data().row(0).to_vec(), vec![-1.0, -1.0]);
    }

    #[test]
    fn header_and_scientific() {
        let c = read_csv("a,b\n1e-3,2.5E2\n-4,0\n".as_bytes()).unwrap();
        assert_eq!(c.data()[[0, 0]], 1e-3);
        assert_eq!(c.data()[[0, 1]], 250.0);
        assert!(c.labels().is_none());
    }

    #[test]
    fn label_column() {
        let c = read_csv("x1,x2,label\n1,2,0\n3,4,1\n".as_bytes()).unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.labels(), Some(&[0i64, 1][..]));
    }

    #[test]
    fn ragged_row_position() {
        let err = read_csv("1,2\n3,4,5\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 2, col: 3, .. }), "{err}");
    }

    #[test]
    fn non_numeric_position() {
        let err = read_csv("1,2\n3,x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 2, col: 2, .. }), "{err}");
    }

    #[test]
    fn empty_file() {
        assert!(matches!(read_csv("".as_bytes()), Err(Error::Parse { row: 1, col: 1, .. })));
        assert!(matches!(read_csv("a,b\n".as_bytes()), Err(Error::Parse { .. })));
    }

    #[test]
    fn round_trip_with_labels() {
        let c = gen_two_cluster(3, 6, 1.0, 2).unwrap();
        let mut buf = Vec::new();
        write_csv(&c, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.data(), c.data());
        assert_eq!(back.labels(), c.labels());
    }

    #[test]
    fn profile_csv_round_trip() {
        let p = Profile::new([(0.5, 0.25), (2.0, 0.75)]).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&p, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "sigma,weight\n0.5,0.25\n2,0.75\n");
        assert_eq!(read_profile_csv(buf.as_slice()).unwrap(), p);
        assert!(read_profile_csv("s,w\n1,1\n".as_bytes()).is_err());
    }
}
