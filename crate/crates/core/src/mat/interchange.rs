//! Matrix interchange format.
//!
//! A matrix travels as a JSON document with a `dim` field and `rows` of
//! entries. Entries are `[re, im]` pairs in the floating-point variant and
//! `[num_re, den_re, num_im, den_im]` integer quadruples in the exact
//! variant; arity distinguishes the two. POVMs and unitaries that need
//! well-defined code lengths are exchanged in the exact variant.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::complexmat::ComplexMatrix;
use crate::error::{Error, Result};
use crate::rational::{ElementaryMatrix, GaussianRational};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FloatDoc {
    dim: usize,
    rows: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ExactDoc {
    dim: usize,
    rows: Vec<Vec<[i64; 4]>>,
}

/// A parsed matrix document, either floating-point or exact-rational.
#[derive(Debug, Clone)]
pub enum MatrixDocument {
    Float { dim: usize, matrix: ComplexMatrix },
    Exact { dim: usize, matrix: ElementaryMatrix },
}

impl MatrixDocument {
    pub fn from_complex(m: &ComplexMatrix) -> Self {
        MatrixDocument::Float {
            dim: m.rows(),
            matrix: m.clone(),
        }
    }

    pub fn from_elementary(m: &ElementaryMatrix) -> Self {
        MatrixDocument::Exact {
            dim: m.dim(),
            matrix: m.clone(),
        }
    }

    /// Both variants produce a complex matrix.
    pub fn to_complex(&self) -> ComplexMatrix {
        match self {
            MatrixDocument::Float { matrix, .. } => matrix.clone(),
            MatrixDocument::Exact { matrix, .. } => matrix.to_complex_matrix(),
        }
    }

    /// Only the exact variant carries an elementary matrix.
    pub fn to_elementary(&self) -> Result<ElementaryMatrix> {
        match self {
            MatrixDocument::Exact { matrix, .. } => Ok(matrix.clone()),
            MatrixDocument::Float { .. } => Err(Error::Other(
                "float matrix document cannot be interpreted exactly; use the exact variant".into(),
            )),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let text = match self {
            MatrixDocument::Float { dim, matrix } => {
                let rows = (0..*dim)
                    .map(|r| {
                        (0..*dim)
                            .map(|c| {
                                let z = matrix[(r, c)];
                                [z.re, z.im]
                            })
                            .collect()
                    })
                    .collect();
                serde_json::to_string_pretty(&FloatDoc { dim: *dim, rows })?
            }
            MatrixDocument::Exact { dim, matrix } => {
                let mut rows = Vec::with_capacity(*dim);
                for r in 0..*dim {
                    let mut row = Vec::with_capacity(*dim);
                    for c in 0..*dim {
                        let (a, b, x, y) = matrix.get(r, c).to_i64_parts()?;
                        row.push([a, b, x, y]);
                    }
                    rows.push(row);
                }
                serde_json::to_string_pretty(&ExactDoc { dim: *dim, rows })?
            }
        };
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        // Try the exact variant first: its arity-4 entries do not parse as
        // [re, im] pairs, while integer pairs would parse as floats.
        if let Ok(doc) = serde_json::from_str::<ExactDoc>(text) {
            return exact_from_doc(doc);
        }
        let doc: FloatDoc = serde_json::from_str(text)
            .map_err(|e| Error::Decode(format!("matrix document: {e}")))?;
        float_from_doc(doc)
    }
}

fn float_from_doc(doc: FloatDoc) -> Result<MatrixDocument> {
    let dim = doc.dim;
    if doc.rows.len() != dim || doc.rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Decode("matrix document rows do not match dim".into()));
    }
    let matrix = ComplexMatrix::from_fn(dim, dim, |r, c| {
        let [re, im] = doc.rows[r][c];
        Complex64::new(re, im)
    });
    Ok(MatrixDocument::Float { dim, matrix })
}

fn exact_from_doc(doc: ExactDoc) -> Result<MatrixDocument> {
    let dim = doc.dim;
    if doc.rows.len() != dim || doc.rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Decode("matrix document rows do not match dim".into()));
    }
    if !dim.is_power_of_two() {
        return Err(Error::Decode(format!(
            "exact matrix dimension {dim} is not a power of two"
        )));
    }
    let qubits = dim.trailing_zeros();
    let mut matrix = ElementaryMatrix::zeros(qubits);
    for (r, row) in doc.rows.iter().enumerate() {
        for (c, &[a, b, x, y]) in row.iter().enumerate() {
            matrix.set(r, c, GaussianRational::from_i64_parts(a, b, x, y)?);
        }
    }
    Ok(MatrixDocument::Exact { dim, matrix })
}

/// Writes a matrix document to a file.
pub fn save_matrix_document(path: &std::path::Path, doc: &MatrixDocument) -> Result<()> {
    std::fs::write(path, doc.to_json()?)?;
    Ok(())
}

/// Reads a matrix document from a file.
pub fn load_matrix_document(path: &std::path::Path) -> Result<MatrixDocument> {
    let text = std::fs::read_to_string(path)?;
    MatrixDocument::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_round_trip() {
        let m = ComplexMatrix::from_fn(2, 2, |r, c| Complex64::new(r as f64 + 0.5, c as f64 - 0.25));
        let doc = MatrixDocument::from_complex(&m);
        let text = doc.to_json().unwrap();
        let back = MatrixDocument::from_json(&text).unwrap();
        assert!(back.to_complex().max_abs_diff(&m) == 0.0);
    }

    #[test]
    fn exact_round_trip_preserves_rationals() {
        let mut m = ElementaryMatrix::zeros(1);
        m.set(0, 0, GaussianRational::from_i64_parts(3, 5, 0, 1).unwrap());
        m.set(0, 1, GaussianRational::from_i64_parts(4, 5, 0, 1).unwrap());
        m.set(1, 0, GaussianRational::from_i64_parts(-4, 5, 0, 1).unwrap());
        m.set(1, 1, GaussianRational::from_i64_parts(3, 5, 0, 1).unwrap());
        let doc = MatrixDocument::from_elementary(&m);
        let text = doc.to_json().unwrap();
        let back = MatrixDocument::from_json(&text).unwrap();
        assert_eq!(back.to_elementary().unwrap(), m);
    }

    #[test]
    fn arity_disambiguates_variants() {
        let float_text = r#"{"dim":1,"rows":[[[0.5,0.0]]]}"#;
        assert!(matches!(
            MatrixDocument::from_json(float_text).unwrap(),
            MatrixDocument::Float { .. }
        ));
        let exact_text = r#"{"dim":1,"rows":[[[1,2,0,1]]]}"#;
        assert!(matches!(
            MatrixDocument::from_json(exact_text).unwrap(),
            MatrixDocument::Exact { .. }
        ));
    }
}
