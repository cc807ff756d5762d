//! Maps whose adjoints preserve extreme points of the dual unit ball.
//!
//! The classifier works block by block. For an output block `M_h` fed by an
//! input block `M_k`, the adjoint images of the matrix-unit functionals
//! `S_ij = ψ*(e_i ⊗ e_j)` determine whether the block map is a rotated
//! compression `T ↦ Uᴴ T V` (possibly transposed) or a rank-one-range map
//! `T ↦ mat(F T w)` (possibly adjointed). Accepted blocks come with a
//! certificate that reproduces the map; rejected blocks come with a pair of
//! vectors whose pull-back is not an extreme point.

mod classify;
mod forms;
mod superop;
mod witness;

use thiserror::Error;

use crate::algebra::{AlgebraError, BlockElement, BlockShape};
use crate::numkit::{CMatrix, C64};

pub use classify::{
    classify, classify_block_with, classify_single_block, BlockVerdict, ClassificationResult,
    ClassifyConfig, RejectReason, Rejection, RANDOM_WITNESS_SAMPLES,
};
pub use forms::{
    build_form1, build_form2, reconstruct, Certificate, Form1Certificate, Form2Certificate,
    CERTIFICATE_TOL,
};
pub use superop::{BlockMap, Superoperator};
pub use witness::{extremity_defect, find_witness, search_witness, Witness};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtremalError {
    #[error("invalid superoperator: {0}")]
    InvalidSuperoperator(String),
    #[error("output block {out_block} receives input from blocks {blocks:?}")]
    MultiInputSupport { out_block: usize, blocks: Vec<usize> },
    #[error("rank-one-range form requires k >= h^2 (k = {k}, h = {h})")]
    DimensionObstruction { k: usize, h: usize },
    #[error("invalid isometry: {0}")]
    InvalidIsometry(String),
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("vector is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("schur counterexample needs h >= 2, got {0}")]
    TooSmall(usize),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Adjoint images `S_ij ∈ M_k` of the matrix-unit functionals on one output
/// block, `images[i * h + j]`, with `tr(S_ij T) = ⟨ψ(T) e_i, e_j⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointImages {
    pub input_block: usize,
    pub h: usize,
    pub images: Vec<CMatrix>,
}

impl AdjointImages {
    pub fn get(&self, i: usize, j: usize) -> &CMatrix {
        &self.images[i * self.h + j]
    }
}

/// Computes `ψ*(e_i ⊗ e_j)` for the output block, after locating the single
/// input block that reaches it. A map that sends nothing to the block uses
/// input block 0 (all images are then zero).
pub fn adjoint_images(
    psi: &Superoperator,
    out_block: usize,
    tol: f64,
) -> Result<AdjointImages, ExtremalError> {
    let blocks = psi.contributing_blocks(out_block, tol);
    let input_block = match blocks.as_slice() {
        [] => 0,
        [b] => *b,
        _ => return Err(ExtremalError::MultiInputSupport { out_block, blocks }),
    };
    let map = psi.restrict(input_block, out_block);
    let h = map.h();
    let images = (0..h * h)
        .map(|idx| map.adjoint_unit(idx / h, idx % h))
        .collect();
    Ok(AdjointImages {
        input_block,
        h,
        images,
    })
}

/// Schur multiplier `T ↦ ε ∘ T` on `M_h` with `ε₁₁ = ε₁₂ = ε₂₁ = 1`,
/// `ε₂₂ = −1` and all other coefficients one.
///
/// Each matrix-unit adjoint image is rank one, yet the map is not
/// extremal-preserving: combined vectors expose the phase defect.
pub fn schur_counterexample(h: usize) -> Result<Superoperator, ExtremalError> {
    if h < 2 {
        return Err(ExtremalError::TooSmall(h));
    }
    let shape = BlockShape::single(h);
    Superoperator::from_fn(shape.clone(), shape.clone(), |_, p, q| {
        let sign = if p == 1 && q == 1 { -1.0 } else { 1.0 };
        let mut e = BlockElement::zeros(&shape);
        e.block_mut(0)[(p, q)] = C64::new(sign, 0.0);
        e
    })
}
