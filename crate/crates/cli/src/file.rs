//! JSON file format for superoperators.
//!
//! Complex numbers are `[re, im]` pairs and matrices are arrays of rows.
//! Entry `images[n]` holds `ψ(e_pq)` for one input block, with one matrix
//! per output block.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use extremal_core::{BlockElement, BlockShape, CMatrix, CVector, Superoperator, C64};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

pub type Pair = [f64; 2];
pub type JsonMatrix = Vec<Vec<Pair>>;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
}

impl FileError {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for FileError {
    fn from(err: serde_json::Error) -> Self {
        let (line, column) = (err.line(), err.column());
        let full = err.to_string();
        let suffix = format!(" at line {line} column {column}");
        let message = full.strip_suffix(&suffix).unwrap_or(&full).to_string();
        Self::Parse {
            line,
            column,
            message,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperoperatorFile {
    pub v: u32,
    pub in_blocks: Vec<usize>,
    pub out_blocks: Vec<usize>,
    pub images: Vec<ImageEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageEntry {
    pub block: usize,
    pub p: usize,
    pub q: usize,
    pub value: Vec<JsonMatrix>,
}

impl SuperoperatorFile {
    pub fn parse(text: &str) -> Result<Self, FileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, FileError> {
        let text = fs::read_to_string(path).map_err(|source| FileError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn from_superoperator(psi: &Superoperator) -> Self {
        let in_shape = psi.in_shape();
        let mut images = Vec::new();
        for block in 0..in_shape.num_blocks() {
            let n = in_shape.dim(block);
            for p in 0..n {
                for q in 0..n {
                    let value = psi.image(block, p, q).blocks().iter().map(matrix_to_json).collect();
                    images.push(ImageEntry { block, p, q, value });
                }
            }
        }
        Self {
            v: FORMAT_VERSION,
            in_blocks: in_shape.dims().to_vec(),
            out_blocks: psi.out_shape().dims().to_vec(),
            images,
        }
    }

    /// Validates the document and builds the superoperator.
    pub fn to_superoperator(&self) -> Result<Superoperator, FileError> {
        if self.v != FORMAT_VERSION {
            return Err(FileError::invalid(
                "v",
                format!("unsupported version {}, expected {FORMAT_VERSION}", self.v),
            ));
        }
        let in_shape = shape("in_blocks", &self.in_blocks)?;
        let out_shape = shape("out_blocks", &self.out_blocks)?;

        let mut seen: BTreeMap<(usize, usize, usize), BlockElement> = BTreeMap::new();
        for (n, entry) in self.images.iter().enumerate() {
            let field = format!("images[{n}]");
            if entry.block >= in_shape.num_blocks() {
                return Err(FileError::invalid(
                    format!("{field}.block"),
                    format!("input block {} does not exist", entry.block),
                ));
            }
            let k = in_shape.dim(entry.block);
            for (name, index) in [("p", entry.p), ("q", entry.q)] {
                if index >= k {
                    return Err(FileError::invalid(
                        format!("{field}.{name}"),
                        format!("index {index} out of range for input block of size {k}"),
                    ));
                }
            }
            if entry.value.len() != out_shape.num_blocks() {
                return Err(FileError::invalid(
                    format!("{field}.value"),
                    format!(
                        "expected {} output-block matrices, got {}",
                        out_shape.num_blocks(),
                        entry.value.len()
                    ),
                ));
            }
            let blocks = entry
                .value
                .iter()
                .enumerate()
                .map(|(o, m)| {
                    let h = out_shape.dim(o);
                    matrix_from_json(&format!("{field}.value[{o}]"), m, h, h)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let element = BlockElement::new(out_shape.clone(), blocks)
                .map_err(|e| FileError::invalid(format!("{field}.value"), e.to_string()))?;
            if seen.insert((entry.block, entry.p, entry.q), element).is_some() {
                return Err(FileError::invalid(
                    field,
                    format!(
                        "duplicate image for block {} (p = {}, q = {})",
                        entry.block, entry.p, entry.q
                    ),
                ));
            }
        }

        for block in 0..in_shape.num_blocks() {
            let k = in_shape.dim(block);
            for p in 0..k {
                for q in 0..k {
                    if !seen.contains_key(&(block, p, q)) {
                        return Err(FileError::invalid(
                            "images",
                            format!("missing image for block {block} (p = {p}, q = {q})"),
                        ));
                    }
                }
            }
        }
        let images = (0..in_shape.num_blocks())
            .map(|block| {
                let k = in_shape.dim(block);
                (0..k * k)
                    .map(|idx| seen[&(block, idx / k, idx % k)].clone())
                    .collect()
            })
            .collect();
        Superoperator::new(in_shape, out_shape, images)
            .map_err(|e| FileError::invalid("images", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("file serializes");
        text.push('\n');
        text
    }
}

fn shape(field: &str, dims: &[usize]) -> Result<BlockShape, FileError> {
    BlockShape::new(dims.to_vec()).map_err(|e| FileError::invalid(field, e.to_string()))
}

pub fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

fn complex(field: &str, p: &Pair) -> Result<C64, FileError> {
    if !p[0].is_finite() || !p[1].is_finite() {
        return Err(FileError::invalid(field, "non-finite number"));
    }
    Ok(C64::new(p[0], p[1]))
}

pub fn matrix_to_json(m: &CMatrix) -> JsonMatrix {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| pair(m[(r, c)])).collect())
        .collect()
}

pub fn matrix_from_json(
    field: &str,
    rows: &JsonMatrix,
    nrows: usize,
    ncols: usize,
) -> Result<CMatrix, FileError> {
    if rows.len() != nrows {
        return Err(FileError::invalid(
            field,
            format!("expected {nrows} rows, got {}", rows.len()),
        ));
    }
    let mut m = CMatrix::zeros(nrows, ncols);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(FileError::invalid(
                format!("{field}[{r}]"),
                format!("expected {ncols} entries, got {}", row.len()),
            ));
        }
        for (c, p) in row.iter().enumerate() {
            m[(r, c)] = complex(&format!("{field}[{r}][{c}]"), p)?;
        }
    }
    Ok(m)
}

/// Matrix whose shape is taken from the data; rows must be non-empty and
/// of equal length.
pub fn matrix_from_json_any(field: &str, rows: &JsonMatrix) -> Result<CMatrix, FileError> {
    let ncols = rows.first().map(Vec::len).unwrap_or(0);
    if ncols == 0 {
        return Err(FileError::invalid(field, "empty matrix"));
    }
    matrix_from_json(field, rows, rows.len(), ncols)
}

pub fn vector_to_json(v: &CVector) -> Vec<Pair> {
    v.iter().map(|&z| pair(z)).collect()
}

pub fn vector_from_json(field: &str, v: &[Pair]) -> Result<CVector, FileError> {
    let entries = v
        .iter()
        .enumerate()
        .map(|(i, p)| complex(&format!("{field}[{i}]"), p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CVector::from_vec(entries))
}
