//! CSV import/export and the JSON regeneration descriptor.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{GaussianMatrix, MatrixView};
use crate::error::{Error, Result};

/// `{"n": .., "m": .., "seed": ..}`: enough to regenerate a matrix exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDescriptor {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

impl MatrixDescriptor {
    pub fn regenerate(&self) -> Result<GaussianMatrix> {
        GaussianMatrix::generate(self.n, self.m, self.seed)
    }
}

impl GaussianMatrix {
    /// One row per line, comma separated, no header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        for i in 0..self.n_rows() {
            // Debug formatting is the shortest string that parses back exactly.
            let record: Vec<String> = self.row(i).iter().map(|v| format!("{v:?}")).collect();
            writer.write_record(&record).map_err(csv_err)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut out = Vec::new();
        self.write_csv(&mut out)?;
        String::from_utf8(out).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(input);
        let mut rows = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(csv_err)?;
            let row = record
                .iter()
                .map(|field| {
                    field.parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {field:?}: {e}", line + 1)))
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse("empty matrix file".into()));
        }
        Self::from_rows(&rows)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let g = GaussianMatrix::generate(4, 3, 17).unwrap();
        let text = g.to_csv_string().unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(!text.contains(' '));
        let back = GaussianMatrix::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back.entries(), g.entries());
        assert_eq!(back.seed(), None);
    }

    #[test]
    fn descriptor_regenerates() {
        let g = GaussianMatrix::generate(2, 5, 3).unwrap();
        let d = g.descriptor().unwrap();
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, r#"{"n":2,"m":5,"seed":3}"#);
        let back: MatrixDescriptor = serde_json::from_str(&json).unwrap();
        assert_eq!(back.regenerate().unwrap(), g);
    }

    #[test]
    fn ragged_or_bad_csv_is_rejected() {
        assert!(GaussianMatrix::read_csv("1,2\n3\n".as_bytes()).is_err());
        assert!(GaussianMatrix::read_csv("1,x\n".as_bytes()).is_err());
        assert!(GaussianMatrix::read_csv("".as_bytes()).is_err());
        let m = GaussianMatrix::read_csv("1.5, -2\n3e2,4\n".as_bytes()).unwrap();
        assert_eq!(m.entries(), &[1.5, -2.0, 300.0, 4.0]);
    }
}
