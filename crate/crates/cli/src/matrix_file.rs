//! JSON matrix files.
//!
//! Full form: `{"rows": 2, "cols": 2, "entries": [[re, im], ...]}`, row-major.
//! Shorthand for real input: `{"entries": [[a, b], [c, d]]}`, one array per row.
//! Files are always written in the full form.

use std::fs;
use std::path::Path;

use alpha_compound::{Matrix, C64};
use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
struct Full {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
struct Shorthand {
    entries: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnyForm {
    Full(Full),
    Shorthand(Shorthand),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(AnyForm),
    Many(Vec<AnyForm>),
}

fn to_matrix(form: AnyForm) -> Result<Matrix> {
    match form {
        AnyForm::Full(f) => {
            if f.entries.len() != f.rows * f.cols {
                bail!("matrix declares {}x{} but lists {} entries", f.rows, f.cols, f.entries.len());
            }
            if f.entries.iter().flatten().any(|v| !v.is_finite()) {
                bail!("matrix entries must be finite");
            }
            let data = f.entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
            Ok(Matrix::new(f.rows, f.cols, data)?)
        }
        AnyForm::Shorthand(s) => {
            let rows = s.entries.len();
            let cols = s.entries.first().map_or(0, Vec::len);
            if let Some(i) = s.entries.iter().position(|r| r.len() != cols) {
                bail!("row {} has {} entries, row 1 has {cols}", i + 1, s.entries[i].len());
            }
            let flat: Vec<f64> = s.entries.into_iter().flatten().collect();
            if flat.iter().any(|v| !v.is_finite()) {
                bail!("matrix entries must be finite");
            }
            Ok(Matrix::from_real(rows, cols, &flat)?)
        }
    }
}

pub fn parse(text: &str) -> Result<Matrix> {
    let form: AnyForm = serde_json::from_str(text).context("not a matrix document")?;
    to_matrix(form)
}

/// One matrix, or a JSON array of them.
pub fn parse_many(text: &str) -> Result<Vec<Matrix>> {
    match serde_json::from_str(text).context("not a matrix document or array of them")? {
        OneOrMany::One(f) => Ok(vec![to_matrix(f)?]),
        OneOrMany::Many(fs) => fs.into_iter().map(to_matrix).collect(),
    }
}

pub fn read(path: &Path) -> Result<Matrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_many(path: &Path) -> Result<Vec<Matrix>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_many(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn to_json(m: &Matrix) -> String {
    let full = Full {
        rows: m.rows(),
        cols: m.cols(),
        entries: m.as_slice().iter().map(|z| [z.re, z.im]).collect(),
    };
    serde_json::to_string(&full).expect("plain numbers serialize")
}

pub fn write(path: &Path, m: &Matrix) -> Result<()> {
    fs::write(path, to_json(m) + "\n").with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_and_full_agree() {
        let short = parse(r#"{"entries": [[1, 2], [3.5, -4]]}"#).unwrap();
        let full = parse(r#"{"rows": 2, "cols": 2, "entries": [[1,0],[2,0],[3.5,0],[-4,0]]}"#).unwrap();
        assert_eq!(short, full);
    }

    #[test]
    fn round_trip_is_exact() {
        let m = Matrix::new(2, 1, vec![C64::new(0.1, -1.0 / 3.0), C64::new(1e-300, 7.0)]).unwrap();
        assert_eq!(parse(&to_json(&m)).unwrap(), m);
    }

    #[test]
    fn bad_shapes_rejected() {
        assert!(parse(r#"{"rows": 2, "cols": 2, "entries": [[1,0]]}"#).is_err());
        assert!(parse(r#"{"entries": [[1, 2], [3]]}"#).is_err());
        assert!(parse(r#"{"entries": "x"}"#).is_err());
    }

    #[test]
    fn arrays_of_matrices() {
        let ms = parse_many(r#"[{"entries": [[1]]}, {"entries": [[2]]}]"#).unwrap();
        assert_eq!(ms.len(), 2);
        assert_eq!(parse_many(r#"{"entries": [[1]]}"#).unwrap().len(), 1);
    }
}
