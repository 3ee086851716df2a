//! JSON input files and the result document written to stdout.

use std::io::Read;

use midrange_core::{PositiveVector, SpdMatrix, SymMatrix};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::CliError;

/// Entries of a loaded matrix may differ from their transpose by this much.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub matrices: Vec<NamedMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub name: String,
    pub data: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorFile {
    pub n: usize,
    pub vectors: Vec<NamedVector>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NamedVector {
    pub name: String,
    pub data: Vec<f64>,
}

/// Reads `path`, or stdin when `path` is `-`.
pub fn read_source(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::validation(format!("cannot read stdin: {e}")))?;
        return Ok(text);
    }
    std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {path}: {e}")))
}

/// Parses a matrix file. A result document whose `outputs` hold a matrix
/// file is accepted too, so outputs can be fed back in.
pub fn parse_matrix_file(text: &str) -> Result<MatrixFile, CliError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::validation(format!("invalid JSON: {e}")))?;
    let body = if value.get("matrices").is_none() && value.get("outputs").is_some() {
        &value["outputs"]
    } else {
        &value
    };
    let file: MatrixFile = serde_json::from_value(body.clone())
        .map_err(|e| CliError::validation(format!("not a matrix file: {e}")))?;
    if file.matrices.is_empty() {
        return Err(CliError::validation("the file holds no matrices"));
    }
    let mut names = std::collections::HashSet::new();
    for m in &file.matrices {
        if !names.insert(m.name.as_str()) {
            return Err(CliError::validation(format!(
                "duplicate matrix name {:?}",
                m.name
            )));
        }
        if m.data.len() != file.n || m.data.iter().any(|row| row.len() != file.n) {
            return Err(CliError::validation(format!(
                "matrix {:?} is not {}x{}",
                m.name, file.n, file.n
            )));
        }
        for i in 0..file.n {
            for j in 0..i {
                let (a, b) = (m.data[i][j], m.data[j][i]);
                if (a - b).abs() > SYMMETRY_TOL {
                    return Err(CliError::validation(format!(
                        "matrix {:?} is not symmetric: entries ({i},{j}) and ({j},{i}) differ by {:e}",
                        m.name,
                        (a - b).abs()
                    )));
                }
            }
        }
    }
    Ok(file)
}

impl MatrixFile {
    pub fn names(&self) -> Vec<String> {
        self.matrices.iter().map(|m| m.name.clone()).collect()
    }

    pub fn symmetric(&self, name: &str) -> Result<SymMatrix, CliError> {
        let m = self
            .matrices
            .iter()
            .find(|m| m.name == name)
            .ok_or_else(|| CliError::validation(format!("no matrix named {name:?}")))?;
        Ok(SymMatrix::from_rows(&m.data)?)
    }

    pub fn spd(&self, name: &str) -> Result<SpdMatrix, CliError> {
        SpdMatrix::new(self.symmetric(name)?)
            .map_err(|e| CliError::validation(format!("matrix {name:?}: {e}")))
    }

    pub fn all_spd(&self) -> Result<Vec<SpdMatrix>, CliError> {
        self.matrices.iter().map(|m| self.spd(&m.name)).collect()
    }
}

pub fn parse_vector_file(text: &str) -> Result<VectorFile, CliError> {
    let file: VectorFile = serde_json::from_str(text)
        .map_err(|e| CliError::validation(format!("not a vector file: {e}")))?;
    if file.vectors.is_empty() {
        return Err(CliError::validation("the file holds no vectors"));
    }
    if let Some(bad) = file.vectors.iter().find(|v| v.data.len() != file.n) {
        return Err(CliError::validation(format!(
            "vector {:?} does not have {} entries",
            bad.name, file.n
        )));
    }
    Ok(file)
}

impl VectorFile {
    pub fn positive(&self) -> Result<Vec<PositiveVector>, CliError> {
        self.vectors
            .iter()
            .map(|v| {
                PositiveVector::new(v.data.clone())
                    .map_err(|e| CliError::validation(format!("vector {:?}: {e}", v.name)))
            })
            .collect()
    }
}

/// `x` rounded to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

pub fn number(x: f64) -> Value {
    let x = sig12(x);
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn rows(rows: &[Vec<f64>]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| Value::Array(r.iter().map(|&x| number(x)).collect()))
            .collect(),
    )
}

/// A matrix file body holding the given named matrices.
pub fn matrix_outputs(n: usize, named: &[(String, &SymMatrix)]) -> Value {
    let matrices: Vec<Value> = named
        .iter()
        .map(|(name, m)| json!({"name": name, "data": rows(&m.to_rows())}))
        .collect();
    json!({"n": n, "matrices": matrices})
}

/// The document printed on stdout by every command.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultDocument {
    pub command: String,
    pub inputs: Vec<String>,
    pub outputs: Map<String, Value>,
    pub diagnostics: Map<String, Value>,
}

impl ResultDocument {
    pub fn new(command: &str, inputs: Vec<String>) -> Self {
        Self {
            command: command.to_string(),
            inputs,
            outputs: Map::new(),
            diagnostics: Map::new(),
        }
    }

    pub fn output(&mut self, key: &str, value: Value) -> &mut Self {
        self.outputs.insert(key.to_string(), value);
        self
    }

    pub fn diagnostic(&mut self, key: &str, value: Value) -> &mut Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "diagnostics": self.diagnostics,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_to_twelve_significant_digits() {
        assert_eq!(sig12(4f64.ln()), 1.38629436112);
        assert_eq!(sig12(-1234567.891234567), -1234567.89123);
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(1e-300 / 3.0), 3.33333333333e-301);
    }

    #[test]
    fn rounding_is_idempotent() {
        for x in [std::f64::consts::PI, 1.0 / 7.0, 6.02214076e23, -2.5e-9] {
            assert_eq!(sig12(sig12(x)), sig12(x));
        }
    }

    #[test]
    fn loads_and_symmetrizes_within_tolerance() {
        let text =
            r#"{"n": 2, "matrices": [{"name": "A", "data": [[2, 1], [1.0000000000001, 3]]}]}"#;
        let file = parse_matrix_file(text).unwrap();
        let a = file.spd("A").unwrap();
        assert_eq!(a.matrix()[(0, 1)], a.matrix()[(1, 0)]);
    }

    #[test]
    fn rejects_malformed_files() {
        let asym = r#"{"n": 2, "matrices": [{"name": "A", "data": [[2, 1], [1.1, 3]]}]}"#;
        let ragged = r#"{"n": 2, "matrices": [{"name": "A", "data": [[2, 1], [1]]}]}"#;
        let dup =
            r#"{"n": 1, "matrices": [{"name": "A", "data": [[1]]}, {"name": "A", "data": [[2]]}]}"#;
        let empty = r#"{"n": 1, "matrices": []}"#;
        for text in [asym, ragged, dup, empty, "not json"] {
            assert_eq!(
                parse_matrix_file(text).unwrap_err().exit_code(),
                2,
                "{text}"
            );
        }
        let indefinite = r#"{"n": 2, "matrices": [{"name": "A", "data": [[1, 2], [2, 1]]}]}"#;
        let file = parse_matrix_file(indefinite).unwrap();
        assert_eq!(file.spd("A").unwrap_err().exit_code(), 2);
        assert_eq!(file.spd("B").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn accepts_result_documents_holding_matrices() {
        let m = SymMatrix::identity(2);
        let mut doc = ResultDocument::new("midpoint", vec![]);
        for (k, v) in matrix_outputs(2, &[("M".into(), &m)]).as_object().unwrap() {
            doc.output(k, v.clone());
        }
        let file = parse_matrix_file(&doc.to_json().to_string()).unwrap();
        assert_eq!(file.names(), vec!["M".to_string()]);
    }

    #[test]
    fn vector_files_are_checked() {
        let ok = r#"{"n": 2, "vectors": [{"name": "a", "data": [1, 8]}, {"name": "b", "data": [4, 2]}]}"#;
        assert_eq!(parse_vector_file(ok).unwrap().positive().unwrap().len(), 2);
        let short = r#"{"n": 2, "vectors": [{"name": "a", "data": [1]}]}"#;
        assert!(parse_vector_file(short).is_err());
        let negative = r#"{"n": 1, "vectors": [{"name": "a", "data": [-1]}]}"#;
        assert!(parse_vector_file(negative).unwrap().positive().is_err());
    }
}
