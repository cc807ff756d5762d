//! Serializable reports and their text rendering.

use std::fmt::Write as _;

use extremal_core::extremal::{
    Certificate, ExtremalError, Form1Certificate, Form2Certificate, Witness,
};
use serde::{Deserialize, Serialize};

use crate::file::{
    matrix_from_json_any, matrix_to_json, vector_from_json, vector_to_json, FileError, JsonMatrix,
    Pair,
};

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CertificateJson {
    Form1 {
        input_block: usize,
        u: JsonMatrix,
        v: JsonMatrix,
        transposed: bool,
    },
    Form2 {
        input_block: usize,
        w: Vec<Pair>,
        frame: JsonMatrix,
        adjoint_variant: bool,
    },
}

impl From<&Certificate> for CertificateJson {
    fn from(cert: &Certificate) -> Self {
        match cert {
            Certificate::Form1(f) => Self::Form1 {
                input_block: f.input_block,
                u: matrix_to_json(&f.u),
                v: matrix_to_json(&f.v),
                transposed: f.transposed,
            },
            Certificate::Form2(f) => Self::Form2 {
                input_block: f.input_block,
                w: vector_to_json(&f.w),
                frame: matrix_to_json(&f.frame),
                adjoint_variant: f.adjoint_variant,
            },
        }
    }
}

impl CertificateJson {
    pub fn to_certificate(&self) -> Result<Certificate, FileError> {
        Ok(match self {
            Self::Form1 {
                input_block,
                u,
                v,
                transposed,
            } => Certificate::Form1(Form1Certificate {
                input_block: *input_block,
                u: matrix_from_json_any("certificate.u", u)?,
                v: matrix_from_json_any("certificate.v", v)?,
                transposed: *transposed,
            }),
            Self::Form2 {
                input_block,
                w,
                frame,
                adjoint_variant,
            } => Certificate::Form2(Form2Certificate {
                input_block: *input_block,
                w: vector_from_json("certificate.w", w)?,
                frame: matrix_from_json_any("certificate.frame", frame)?,
                adjoint_variant: *adjoint_variant,
            }),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub out_block: usize,
    pub u: Vec<Pair>,
    pub v: Vec<Pair>,
    pub confirmed: bool,
}

impl From<&Witness> for WitnessJson {
    fn from(w: &Witness) -> Self {
        Self {
            out_block: w.out_block,
            u: vector_to_json(&w.u),
            v: vector_to_json(&w.v),
            confirmed: w.confirmed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub out_block: usize,
    pub accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub form: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub input_block: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<CertificateJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<WitnessJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub e_blocks: Vec<usize>,
    pub degenerate_blocks: Vec<usize>,
    /// Per E-block: whether `α_b` is the transpose.
    pub antimultiplicative: Vec<bool>,
    pub assembly_residual: f64,
    pub partial_isometry_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureWitnessJson {
    pub out_block: usize,
    pub x: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JordanJson {
    pub is_jordan: bool,
    pub labels: Vec<String>,
    pub trials: usize,
    pub star_defect: f64,
    pub jordan_defect: f64,
    pub unit_defect: f64,
    pub compression_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub v: u32,
    pub mode: String,
    pub tol: f64,
    pub seed: u64,
    pub accepted: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub blocks: Vec<BlockReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub decomposition: Option<DecompositionReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pure_witness: Option<PureWitnessJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub jordan: Option<JordanJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscReport {
    pub v: u32,
    pub accepted: bool,
    pub grid: usize,
    pub tol: f64,
    pub worst_t: f64,
    pub worst_deviation: f64,
    pub multiplier_deviation: f64,
    pub symbol_deviation: f64,
}

pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

fn pairs(v: &[Pair]) -> String {
    let parts: Vec<String> = v.iter().map(|[re, im]| format!("{re:+.6}{im:+.6}i")).collect();
    format!("[{}]", parts.join(", "))
}

impl ClassifyReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mode: {}", self.mode);
        let _ = writeln!(out, "tol: {:e}", self.tol);
        let _ = writeln!(out, "seed: {}", self.seed);
        for b in &self.blocks {
            if b.accepted {
                let _ = writeln!(
                    out,
                    "block {}: form {} from input block {} (residual {:.3e})",
                    b.out_block,
                    b.form.as_deref().unwrap_or("?"),
                    b.input_block.unwrap_or(0),
                    b.residual.unwrap_or(0.0)
                );
            } else {
                let _ = writeln!(
                    out,
                    "block {}: rejected: {}",
                    b.out_block,
                    b.reason.as_deref().unwrap_or("")
                );
                if let Some(w) = &b.witness {
                    let _ = writeln!(out, "  witness u = {}", pairs(&w.u));
                    let _ = writeln!(out, "  witness v = {}", pairs(&w.v));
                    let _ = writeln!(out, "  witness confirmed: {}", w.confirmed);
                }
            }
        }
        if let Some(d) = &self.decomposition {
            let _ = writeln!(out, "non-degenerate blocks: {:?}", d.e_blocks);
            let _ = writeln!(out, "degenerate blocks: {:?}", d.degenerate_blocks);
            let _ = writeln!(out, "assembly residual: {:.3e}", d.assembly_residual);
        }
        if let Some(j) = &self.jordan {
            let _ = writeln!(out, "block labels: {}", j.labels.join(", "));
            let _ = writeln!(out, "jordan defect: {:.3e}", j.jordan_defect);
            let _ = writeln!(out, "star defect: {:.3e}", j.star_defect);
            let _ = writeln!(out, "unit projection defect: {:.3e}", j.unit_defect);
        }
        if let Some(w) = &self.pure_witness {
            let _ = writeln!(out, "pure state on block {} pulls back to a mixed functional", w.out_block);
            let _ = writeln!(out, "  x = {}", pairs(&w.x));
        }
        if let Some(reason) = &self.reason {
            let _ = writeln!(out, "reason: {reason}");
        }
        let _ = writeln!(out, "verdict: {}", if self.accepted { "accepted" } else { "rejected" });
        out
    }
}

impl DiscReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "grid: {}", self.grid);
        let _ = writeln!(out, "multiplier deviation: {:.3e}", self.multiplier_deviation);
        let _ = writeln!(out, "symbol deviation: {:.3e}", self.symbol_deviation);
        let _ = writeln!(out, "worst point: t = {:.6}", self.worst_t);
        let _ = writeln!(out, "worst deviation: {:.3e}", self.worst_deviation);
        let _ = writeln!(out, "verdict: {}", if self.accepted { "accepted" } else { "rejected" });
        out
    }
}

/// Rebuilds a block from a report certificate and returns its largest
/// matrix-unit distance to the corresponding block of `psi`.
pub fn replay_residual(
    psi: &extremal_core::Superoperator,
    out_block: usize,
    cert: &CertificateJson,
) -> Result<f64, ReplayError> {
    let cert = cert.to_certificate()?;
    let rebuilt = cert.reconstruct()?;
    let input = cert.input_block();
    let fits = input < psi.in_shape().num_blocks()
        && out_block < psi.out_shape().num_blocks()
        && psi.in_shape().dim(input) == rebuilt.k()
        && psi.out_shape().dim(out_block) == rebuilt.h();
    if !fits {
        return Err(ReplayError::Mismatch { out_block });
    }
    let original = psi.restrict(input, out_block);
    Ok(original.max_image_distance(&rebuilt))
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error(transparent)]
    File(#[from] FileError),
    #[error(transparent)]
    Extremal(#[from] ExtremalError),
    #[error("certificate does not fit output block {out_block}")]
    Mismatch { out_block: usize },
}
