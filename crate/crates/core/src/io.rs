//! CSV exchange for complex vectors, frames and Zak arrays. Every complex
//! column is written as a `_re`, `_im` pair.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::zak::{CMatrix, ZakT};
use crate::{Setting, Vector};

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

fn pair_header(prefix: &str, count: usize) -> Vec<String> {
    (0..count)
        .flat_map(|j| [format!("{prefix}{j}_re"), format!("{prefix}{j}_im")])
        .collect()
}

/// One row per point, one `re,im` column pair per vector.
pub fn write_vectors_csv<W: Write>(out: W, vectors: &[Vector]) -> Result<()> {
    let rows = vectors.first().map_or(0, |v| v.len());
    for v in vectors {
        Error::check_len(rows, v.len())?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(pair_header("v", vectors.len())).map_err(io_err)?;
    for i in 0..rows {
        let rec: Vec<String> = vectors
            .iter()
            .flat_map(|v| [v[i].re.to_string(), v[i].im.to_string()])
            .collect();
        w.write_record(rec).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn write_frame_csv<W: Write>(out: W, frame: &CMatrix) -> Result<()> {
    let cols: Vec<Vector> = frame.column_iter().map(|c| c.into_owned()).collect();
    if cols.is_empty() {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(std::iter::empty::<&str>()).map_err(io_err)?;
        return w.flush().map_err(io_err);
    }
    write_vectors_csv(out, &cols)
}

/// Reads the format of [`write_vectors_csv`]; the header row is required and
/// must have an even number of columns.
pub fn read_vectors_csv<R: Read>(input: R) -> Result<Vec<Vector>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let width = r.headers().map_err(io_err)?.len();
    if width % 2 != 0 {
        return Err(Error::Io(format!("expected re/im column pairs, found {width} columns")));
    }
    let mut columns: Vec<Vec<Complex64>> = vec![Vec::new(); width / 2];
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(io_err)?;
        if rec.len() != width {
            return Err(Error::Io(format!("row {} has {} fields, expected {width}", line + 1, rec.len())));
        }
        let parse = |k: usize| -> Result<f64> {
            rec[k]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Io(format!("row {}, column {}: {e}", line + 1, k + 1)))
        };
        for (j, col) in columns.iter_mut().enumerate() {
            col.push(Complex64::new(parse(2 * j)?, parse(2 * j + 1)?));
        }
    }
    Ok(columns.into_iter().map(Vector::from_vec).collect())
}

/// `Z_T[f]` with one row per dual point (labelled by its coordinates) and one
/// `re,im` pair per point of `C_T`.
pub fn write_zak_t_csv<W: Write>(out: W, s: &Setting, z: &ZakT) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["tau_hat".to_string()];
    header.extend(s.tiling().c_t().iter().flat_map(|c| [format!("x{c}_re"), format!("x{c}_im")]));
    w.write_record(&header).map_err(io_err)?;
    for th in 0..z.values.nrows() {
        let mut rec = vec![s.group().element(th).to_string()];
        for c in 0..z.values.ncols() {
            let v = z.values[(th, c)];
            rec.push(v.re.to_string());
            rec.push(v.im.to_string());
        }
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}
