//! Classification of a single block map `M_k → M_h` into one of the two
//! canonical forms, from the adjoint images `S_ij = ψ*(e_i ⊗ e_j)`.
//!
//! Every `S_ij` must be a rank-one unit `a_ij b_ijᴴ`. Comparing the factors
//! along the first row and column decides the case:
//!
//! | row 0         | column 0      | case                         |
//! |---------------|---------------|------------------------------|
//! | left parallel | right parallel| Form 1, `S_ij = (Ve_i)(Ue_j)ᴴ` |
//! | right parallel| left parallel | Form 1 transposed            |
//! | left parallel | left parallel | Form 2, common left `w`      |
//! | right parallel| right parallel| Form 2 adjoint, common right |
//!
//! The recovered certificate is then checked by reconstruction.

use std::fmt;

use crate::numkit::{
    basis, isometry_defect, nearest_isometry, parallel, rank_one_factor, CMatrix, CVector,
    NumError, RankOneFactor, C64,
};

use super::forms::{Certificate, Form1Certificate, Form2Certificate};
use super::witness::{search_witness, Witness};
use super::{adjoint_images, BlockMap, ExtremalError, Superoperator};

/// Random pairs tried after the structured witness candidates.
pub const RANDOM_WITNESS_SAMPLES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyConfig {
    pub tol: f64,
    pub seed: u64,
    pub random_witness_samples: usize,
}

impl ClassifyConfig {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            seed: 0,
            random_witness_samples: RANDOM_WITNESS_SAMPLES,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Acceptance bound on the reconstruction residual.
    pub fn residual_bound(&self) -> f64 {
        10.0 * self.tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RejectReason {
    /// `ψ*(e_i ⊗ e_j)` is not a rank-one unit.
    UnitImageNotExtreme { i: usize, j: usize, sigma1: f64, sigma2: f64 },
    /// The first row and column fit none of the four cases.
    InconsistentCase,
    /// The Schur phases `ε_ij` are not all equal.
    PhaseDefect { i: usize, j: usize, deviation: f64 },
    /// Recovered vectors are not orthonormal.
    NotOrthonormal { defect: f64 },
    /// A frame was required but `k < h²`.
    DimensionObstruction { k: usize, h: usize },
    /// The certificate does not reproduce the map.
    Residual { residual: f64 },
    /// Several input blocks reach this output block.
    MultiInputSupport { blocks: Vec<usize> },
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnitImageNotExtreme { i, j, sigma1, sigma2 } => write!(
                f,
                "adjoint image of e_{i} x e_{j} is not a rank-one unit (sigma1 {sigma1:.3e}, sigma2 {sigma2:.3e})"
            ),
            Self::InconsistentCase => f.write_str("matrix-unit images fit no canonical case"),
            Self::PhaseDefect { i, j, deviation } => {
                write!(f, "Schur phase at ({i}, {j}) deviates by {deviation:.3e}")
            }
            Self::NotOrthonormal { defect } => {
                write!(f, "recovered vectors not orthonormal (defect {defect:.3e})")
            }
            Self::DimensionObstruction { k, h } => {
                write!(f, "rank-one-range form needs k >= h^2, got k = {k}, h = {h}")
            }
            Self::Residual { residual } => write!(f, "reconstruction residual {residual:.3e}"),
            Self::MultiInputSupport { blocks } => {
                write!(f, "output block fed by input blocks {blocks:?}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    pub reason: RejectReason,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BlockVerdict {
    Accepted { certificate: Certificate, residual: f64 },
    Rejected(Rejection),
}

impl BlockVerdict {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Self::Accepted { certificate, .. } => Some(certificate),
            Self::Rejected(_) => None,
        }
    }

    pub fn rejection(&self) -> Option<&Rejection> {
        match self {
            Self::Rejected(r) => Some(r),
            Self::Accepted { .. } => None,
        }
    }

    pub fn is_accepted(&self) -> bool {
        matches!(self, Self::Accepted { .. })
    }
}

/// Per-output-block verdicts for a whole superoperator.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult {
    pub verdicts: Vec<BlockVerdict>,
    /// Largest matrix-unit residual over the accepted blocks.
    pub residual: f64,
}

impl ClassificationResult {
    pub fn is_accepted(&self) -> bool {
        self.verdicts.iter().all(BlockVerdict::is_accepted)
    }

    pub fn first_rejection(&self) -> Option<&Rejection> {
        self.verdicts.iter().find_map(BlockVerdict::rejection)
    }
}

/// Classifies a single block map with the default seed.
pub fn classify_single_block(map: &BlockMap, tol: f64) -> Result<BlockVerdict, ExtremalError> {
    classify_block_with(map, &ClassifyConfig::new(tol))
}

pub fn classify_block_with(
    map: &BlockMap,
    config: &ClassifyConfig,
) -> Result<BlockVerdict, ExtremalError> {
    let tol = config.tol;
    let h = map.h();
    let mut images = Vec::with_capacity(h * h);
    let mut factors = Vec::with_capacity(h * h);
    for i in 0..h {
        for j in 0..h {
            let s = map.adjoint_unit(i, j);
            match rank_one_factor(&s, tol) {
                Ok(f) => factors.push(f),
                Err(err) => {
                    let (sigma1, sigma2) = match err {
                        NumError::NotRankOneUnit { sigma1, sigma2 } => (sigma1, sigma2),
                        _ => (0.0, 0.0),
                    };
                    let witness = Witness {
                        out_block: 0,
                        u: basis(h, i),
                        v: basis(h, j),
                        confirmed: true,
                    };
                    return Ok(BlockVerdict::Rejected(Rejection {
                        reason: RejectReason::UnitImageNotExtreme { i, j, sigma1, sigma2 },
                        witness,
                    }));
                }
            }
            images.push(s);
        }
    }
    let grid = Grid { h, images, factors };

    let candidate = if h == 1 {
        let f = grid.factor(0, 0);
        Ok(Certificate::Form1(Form1Certificate {
            input_block: 0,
            u: CMatrix::from_column_slice(map.k(), 1, f.right.as_slice()),
            v: CMatrix::from_column_slice(map.k(), 1, f.left.as_slice()),
            transposed: false,
        }))
    } else {
        recover(&grid, map.k(), tol)
    };

    match candidate {
        Ok(certificate) => {
            let rebuilt = certificate.reconstruct()?;
            let residual = map.max_image_distance(&rebuilt);
            if residual <= config.residual_bound() {
                Ok(BlockVerdict::Accepted {
                    certificate,
                    residual,
                })
            } else {
                Ok(reject(map, config, RejectReason::Residual { residual }))
            }
        }
        Err(Recovery::Dimension { k, h }) => Err(ExtremalError::DimensionObstruction { k, h }),
        Err(Recovery::Reject(reason)) => Ok(reject(map, config, reason)),
    }
}

fn reject(map: &BlockMap, config: &ClassifyConfig, reason: RejectReason) -> BlockVerdict {
    let psi = map.to_superoperator();
    let witness = search_witness(&psi, 0, config.tol, config.seed, config.random_witness_samples);
    BlockVerdict::Rejected(Rejection { reason, witness })
}

/// Classifies every output block of `psi`.
///
/// Each output block must be reached from a single input block; the block
/// map between them is then classified on its own.
pub fn classify(psi: &Superoperator, config: &ClassifyConfig) -> ClassificationResult {
    let mut verdicts = Vec::with_capacity(psi.out_shape().num_blocks());
    let mut residual: f64 = 0.0;
    for out_block in 0..psi.out_shape().num_blocks() {
        let verdict = classify_output_block(psi, out_block, config);
        if let BlockVerdict::Accepted { residual: r, .. } = &verdict {
            residual = residual.max(*r);
        }
        verdicts.push(verdict);
    }
    ClassificationResult { verdicts, residual }
}

fn classify_output_block(
    psi: &Superoperator,
    out_block: usize,
    config: &ClassifyConfig,
) -> BlockVerdict {
    let global_reject = |reason: RejectReason| {
        let witness = search_witness(
            psi,
            out_block,
            config.tol,
            config.seed,
            config.random_witness_samples,
        );
        BlockVerdict::Rejected(Rejection { reason, witness })
    };
    let adjoint = match adjoint_images(psi, out_block, config.tol) {
        Ok(a) => a,
        Err(ExtremalError::MultiInputSupport { blocks, .. }) => {
            return global_reject(RejectReason::MultiInputSupport { blocks })
        }
        Err(other) => unreachable!("adjoint_images only fails on multi-block support: {other}"),
    };
    let map = psi.restrict(adjoint.input_block, out_block);
    match classify_block_with(&map, config) {
        Ok(BlockVerdict::Accepted {
            mut certificate,
            residual,
        }) => {
            certificate.set_input_block(adjoint.input_block);
            BlockVerdict::Accepted {
                certificate,
                residual,
            }
        }
        Ok(BlockVerdict::Rejected(mut rejection)) => {
            rejection.witness.out_block = out_block;
            rejection.witness.confirmed = rejection.witness.replay(psi, config.tol);
            BlockVerdict::Rejected(rejection)
        }
        Err(ExtremalError::DimensionObstruction { k, h }) => {
            global_reject(RejectReason::DimensionObstruction { k, h })
        }
        Err(other) => unreachable!("certificates are polished before reconstruction: {other}"),
    }
}

struct Grid {
    h: usize,
    images: Vec<CMatrix>,
    factors: Vec<RankOneFactor>,
}

impl Grid {
    fn image(&self, i: usize, j: usize) -> &CMatrix {
        &self.images[i * self.h + j]
    }

    fn factor(&self, i: usize, j: usize) -> &RankOneFactor {
        &self.factors[i * self.h + j]
    }
}

enum Recovery {
    Reject(RejectReason),
    Dimension { k: usize, h: usize },
}

fn recover(grid: &Grid, k: usize, tol: f64) -> Result<Certificate, Recovery> {
    let h = grid.h;
    let anchor = grid.factor(0, 0);
    let row_left = (1..h).all(|j| parallel(&anchor.left, &grid.factor(0, j).left, tol));
    let row_right = (1..h).all(|j| parallel(&anchor.right, &grid.factor(0, j).right, tol));
    let col_left = (1..h).all(|i| parallel(&anchor.left, &grid.factor(i, 0).left, tol));
    let col_right = (1..h).all(|i| parallel(&anchor.right, &grid.factor(i, 0).right, tol));

    match (row_left, row_right, col_left, col_right) {
        (true, _, _, true) => recover_form1(grid, tol, false),
        (_, true, true, _) => recover_form1(grid, tol, true),
        (true, _, true, _) => recover_form2(grid, k, tol, false),
        (_, true, _, true) => recover_form2(grid, k, tol, true),
        _ => Err(Recovery::Reject(RejectReason::InconsistentCase)),
    }
}

/// Plain case: `S_ij = x_i y_jᴴ` with `x_i = V e_i`, `y_j = U e_j`.
/// Transposed case: `S_ij = x_j y_iᴴ` with `x_j = conj(U e_j)`,
/// `y_i = conj(V e_i)`.
///
/// With `ŷ₀` the right factor of `S₀₀`, the plain case takes
/// `x̂_i = S_i0 ŷ₀` and `ŷ_j = S_0jᴴ x̂₀`; both carry the same unimodular
/// offset, so the Schur phases `ε_ij = x̂_iᴴ S_ij ŷ_j` all equal one exactly
/// when the map has Form 1.
fn recover_form1(grid: &Grid, tol: f64, transposed: bool) -> Result<Certificate, Recovery> {
    let h = grid.h;
    let y0 = &grid.factor(0, 0).right;
    // `along(m)` is S_{0m} in the transposed case and S_{m0} otherwise.
    let along = |m: usize| if transposed { grid.image(0, m) } else { grid.image(m, 0) };
    let across = |m: usize| if transposed { grid.image(m, 0) } else { grid.image(0, m) };

    let xs: Vec<CVector> = (0..h).map(|m| along(m) * y0).collect();
    let ys: Vec<CVector> = (0..h).map(|m| across(m).adjoint() * &xs[0]).collect();

    let one = C64::new(1.0, 0.0);
    let mut worst = (0usize, 0usize, 0.0f64);
    for i in 0..h {
        for j in 0..h {
            let (xi, yj) = if transposed { (&xs[j], &ys[i]) } else { (&xs[i], &ys[j]) };
            let eps = xi.dotc(&(grid.image(i, j) * yj));
            let deviation = (eps - one).norm();
            if deviation > worst.2 {
                worst = (i, j, deviation);
            }
        }
    }
    if worst.2 > 10.0 * tol {
        let (i, j, deviation) = worst;
        return Err(Recovery::Reject(RejectReason::PhaseDefect { i, j, deviation }));
    }

    let x_mat = CMatrix::from_columns(&xs);
    let y_mat = CMatrix::from_columns(&ys);
    let defect = isometry_defect(&x_mat).max(isometry_defect(&y_mat));
    if defect > 10.0 * tol {
        return Err(Recovery::Reject(RejectReason::NotOrthonormal { defect }));
    }
    let x_mat = nearest_isometry(&x_mat);
    let y_mat = nearest_isometry(&y_mat);
    let (u, v) = if transposed {
        (x_mat.map(|z| z.conj()), y_mat.map(|z| z.conj()))
    } else {
        (y_mat, x_mat)
    };
    Ok(Certificate::Form1(Form1Certificate {
        input_block: 0,
        u,
        v,
        transposed,
    }))
}

/// Plain case: `S_ij = w (Fᴴ vec(e_j e_iᴴ))ᴴ`, so row `a h + b` of the frame
/// is `ŵᴴ S_ba`. Adjoint case: `S_ij = (Fᴴ vec(e_i e_jᴴ)) wᴴ`, so row
/// `i h + j` is `(S_ij ŵ)ᴴ`.
fn recover_form2(
    grid: &Grid,
    k: usize,
    tol: f64,
    adjoint_variant: bool,
) -> Result<Certificate, Recovery> {
    let h = grid.h;
    if k < h * h {
        return Err(Recovery::Dimension { k, h });
    }
    let anchor = grid.factor(0, 0);
    let w = if adjoint_variant {
        anchor.right.clone()
    } else {
        anchor.left.clone()
    };
    let mut frame = CMatrix::zeros(h * h, k);
    for a in 0..h {
        for b in 0..h {
            let row: CVector = if adjoint_variant {
                grid.image(a, b) * &w
            } else {
                grid.image(b, a).adjoint() * &w
            };
            // `row` holds the conjugate of the frame row in both cases.
            for col in 0..k {
                frame[(a * h + b, col)] = row[col].conj();
            }
        }
    }
    let defect = isometry_defect(&frame.adjoint());
    if defect > 10.0 * tol {
        return Err(Recovery::Reject(RejectReason::NotOrthonormal { defect }));
    }
    let frame = nearest_isometry(&frame.adjoint()).adjoint();
    Ok(Certificate::Form2(Form2Certificate {
        input_block: 0,
        w: w.normalize(),
        frame,
        adjoint_variant,
    }))
}
