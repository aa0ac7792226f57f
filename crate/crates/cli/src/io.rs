use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use isoatlas::linalg::{Permutation, SymTridiagonal};
use isoatlas::toda::ParticleState;
use serde::{Deserialize, Serialize};

use crate::exit::ParseError;

/// Optional chart data stored next to a matrix.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<Permutation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
}

/// A symmetric tridiagonal matrix on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub n: usize,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

impl MatrixDocument {
    pub fn from_matrix(t: &SymTridiagonal, metadata: Option<Metadata>) -> Self {
        Self {
            n: t.n(),
            diag: t.diag().to_vec(),
            off: t.off().to_vec(),
            metadata,
        }
    }

    pub fn to_matrix(&self) -> Result<SymTridiagonal> {
        if self.diag.len() != self.n || self.off.len() + 1 != self.n.max(1) {
            return Err(ParseError(format!(
                "matrix document with n = {} has {} diagonal and {} off-diagonal entries",
                self.n,
                self.diag.len(),
                self.off.len()
            ))
            .into());
        }
        SymTridiagonal::new(self.diag.clone(), self.off.clone()).map_err(|e| ParseError(e.to_string()).into())
    }
}

/// Particle positions and velocities on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleDocument {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl ParticleDocument {
    /// Centred state; non-centred input is shifted to zero mean.
    pub fn to_state(&self) -> Result<ParticleState> {
        ParticleState::centred(self.x.clone(), self.y.clone()).map_err(|e| ParseError(e.to_string()).into())
    }
}

/// Input that is either a matrix or a particle state.
pub enum Initial {
    Matrix(MatrixDocument),
    Particles(ParticleDocument),
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, path: &Path) -> Result<T> {
    serde_json::from_str(text).map_err(|e| ParseError(format!("{}: {e}", path.display())).into())
}

pub fn read_matrix(path: &Path) -> Result<MatrixDocument> {
    parse_json(&read_text(path)?, path)
}

pub fn read_particles(path: &Path) -> Result<ParticleDocument> {
    parse_json(&read_text(path)?, path)
}

pub fn read_initial(path: &Path) -> Result<Initial> {
    let text = read_text(path)?;
    let value: serde_json::Value = parse_json(&text, path)?;
    if value.get("x").is_some() {
        Ok(Initial::Particles(parse_json(&text, path)?))
    } else {
        Ok(Initial::Matrix(parse_json(&text, path)?))
    }
}

/// Comma-separated reals, e.g. `"4,5,7"`.
pub fn parse_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| ParseError(format!("{what}: {t:?} is not a number ({e})")).into())
        })
        .collect()
}

pub fn parse_permutation(text: &str) -> Result<Permutation> {
    text.parse::<Permutation>().map_err(|e| ParseError(e.to_string()).into())
}

/// Writes to `output` or stdout.
pub fn emit(output: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match output {
        Some(path) => fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn emit_json<T: Serialize>(output: &Option<PathBuf>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(output, text.as_bytes())
}

/// Shortest representation that parses back to the same double.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// CSV with a header row.
pub fn csv_bytes<I, R>(header: &[&str], rows: I) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| anyhow::anyhow!(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_document_round_trip_is_bit_exact() {
        let t = SymTridiagonal::new(vec![0.1, 1.0 / 3.0, -2.5e-300], vec![std::f64::consts::PI, 1e-17]).unwrap();
        let doc = MatrixDocument::from_matrix(
            &t,
            Some(Metadata {
                spectrum: None,
                pi: Some("3,1,2".parse().unwrap()),
                beta: Some(vec![0.7, -1.0 / 7.0]),
            }),
        );
        let text = serde_json::to_string(&doc).unwrap();
        let back: MatrixDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_matrix().unwrap(), t);
        assert!(text.contains("[3,1,2]"));
    }

    #[test]
    fn csv_floats_round_trip() {
        let rows = [vec![1.0 / 3.0, 1e-300, -0.0]];
        let bytes = csv_bytes(&["a", "b", "c"], rows.iter().map(|r| r.iter().map(|&x| num(x)))).unwrap();
        let mut r = csv::Reader::from_reader(bytes.as_slice());
        let rec = r.records().next().unwrap().unwrap();
        let back: Vec<f64> = rec.iter().map(|s| s.parse().unwrap()).collect();
        assert_eq!(back[0].to_bits(), rows[0][0].to_bits());
        assert_eq!(back[1].to_bits(), rows[0][1].to_bits());
        assert_eq!(back[2].to_bits(), rows[0][2].to_bits());
    }

    #[test]
    fn inconsistent_document_is_a_parse_error() {
        let doc = MatrixDocument {
            n: 3,
            diag: vec![1.0, 2.0],
            off: vec![0.0],
            metadata: None,
        };
        assert!(doc.to_matrix().unwrap_err().downcast_ref::<ParseError>().is_some());
    }
}
