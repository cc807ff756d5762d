//! Finite-dimensional C*-algebras `⊕ᵢ M_{nᵢ}` and their duals.
//!
//! A functional is stored as one matrix per block under the trace pairing
//! `ρ(A) = Σᵢ tr(Sᵢ Aᵢ)`. With this pairing the vector functional
//! `A ↦ ⟨A u, v⟩` on a block has representative `u vᴴ`, and the functional
//! norm is the sum of the trace norms of the representatives.

use std::fmt;

use thiserror::Error;

use crate::numkit::{
    self, complete_to_unitary, hermitian_defect, inner, rank_one_factor, trace_norm, CMatrix,
    CVector, NumError, C64,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("block shape must be a nonempty list of positive sizes")]
    InvalidShape,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("block {block} is not a projection (defect {defect:e})")]
    NotProjection { block: usize, defect: f64 },
    #[error("functional is not an extreme point of the dual ball ({0})")]
    NotExtremal(NotExtremeReason),
    #[error(transparent)]
    Numeric(#[from] NumError),
}

/// Block sizes `[n₁, …, n_m]` of `⊕ᵢ M_{nᵢ}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockShape {
    dims: Vec<usize>,
}

impl BlockShape {
    pub fn new(dims: Vec<usize>) -> Result<Self, AlgebraError> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(AlgebraError::InvalidShape);
        }
        Ok(Self { dims })
    }

    /// One full matrix block `M_n`.
    pub fn single(n: usize) -> Self {
        Self::new(vec![n]).expect("block size must be positive")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_blocks(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self, block: usize) -> usize {
        self.dims[block]
    }

    /// Complex dimension of the algebra, `Σ nᵢ²`.
    pub fn algebra_dim(&self) -> usize {
        self.dims.iter().map(|n| n * n).sum()
    }

    fn check_block(&self, block: usize, m: &CMatrix) -> Result<(), AlgebraError> {
        let n = self.dims[block];
        if m.nrows() != n || m.ncols() != n {
            return Err(AlgebraError::ShapeMismatch(format!(
                "block {block} must be {n}x{n}, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(())
    }

    fn ensure_same(&self, other: &BlockShape) -> Result<(), AlgebraError> {
        if self != other {
            return Err(AlgebraError::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }
}

impl fmt::Display for BlockShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.dims)
    }
}

/// Element of a block algebra: one square matrix per block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockElement {
    shape: BlockShape,
    blocks: Vec<CMatrix>,
}

impl BlockElement {
    pub fn new(shape: BlockShape, blocks: Vec<CMatrix>) -> Result<Self, AlgebraError> {
        if blocks.len() != shape.num_blocks() {
            return Err(AlgebraError::ShapeMismatch(format!(
                "expected {} blocks, got {}",
                shape.num_blocks(),
                blocks.len()
            )));
        }
        for (i, m) in blocks.iter().enumerate() {
            shape.check_block(i, m)?;
        }
        Ok(Self { shape, blocks })
    }

    pub fn zeros(shape: &BlockShape) -> Self {
        let blocks = shape.dims.iter().map(|&n| CMatrix::zeros(n, n)).collect();
        Self {
            shape: shape.clone(),
            blocks,
        }
    }

    pub fn identity(shape: &BlockShape) -> Self {
        let blocks = shape
            .dims
            .iter()
            .map(|&n| CMatrix::identity(n, n))
            .collect();
        Self {
            shape: shape.clone(),
            blocks,
        }
    }

    /// Matrix unit `e_{pq}` placed in `block`, zero elsewhere.
    pub fn unit(shape: &BlockShape, block: usize, p: usize, q: usize) -> Self {
        let mut e = Self::zeros(shape);
        e.blocks[block][(p, q)] = C64::new(1.0, 0.0);
        e
    }

    pub fn shape(&self) -> &BlockShape {
        &self.shape
    }

    pub fn blocks(&self) -> &[CMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CMatrix {
        &self.blocks[i]
    }

    pub fn block_mut(&mut self, i: usize) -> &mut CMatrix {
        &mut self.blocks[i]
    }

    pub fn into_blocks(self) -> Vec<CMatrix> {
        self.blocks
    }

    pub fn adjoint(&self) -> Self {
        self.map_blocks(|m| m.adjoint())
    }

    pub fn scale(&self, z: C64) -> Self {
        self.map_blocks(|m| m * z)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.shape.ensure_same(&other.shape)?;
        Ok(self.zip_blocks(other, |a, b| a * b))
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.shape.ensure_same(&other.shape)?;
        Ok(self.zip_blocks(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.shape.ensure_same(&other.shape)?;
        Ok(self.zip_blocks(other, |a, b| a - b))
    }

    /// Frobenius norm over all blocks.
    pub fn norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(|m| m.norm_squared())
            .sum::<f64>()
            .sqrt()
    }

    /// C*-norm: the largest operator norm among the blocks.
    pub fn operator_norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(numkit::operator_norm)
            .fold(0.0, f64::max)
    }

    /// Largest per-block `‖E² − E‖_F + ‖E − Eᴴ‖_F`.
    pub fn projection_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|e| (e * e - e).norm() + hermitian_defect(e))
            .fold(0.0, f64::max)
    }

    fn map_blocks(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    fn zip_blocks(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Self {
        Self {
            shape: self.shape.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }
}

/// Linear functional on a block algebra, `ρ(A) = Σᵢ tr(Sᵢ Aᵢ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    shape: BlockShape,
    reps: Vec<CMatrix>,
}

impl Functional {
    pub fn new(shape: BlockShape, reps: Vec<CMatrix>) -> Result<Self, AlgebraError> {
        let element = BlockElement::new(shape, reps)?;
        Ok(Self {
            shape: element.shape,
            reps: element.blocks,
        })
    }

    pub fn zero(shape: &BlockShape) -> Self {
        let element = BlockElement::zeros(shape);
        Self {
            shape: element.shape,
            reps: element.blocks,
        }
    }

    /// Single-block functional with representative `rep` on `block`.
    pub fn on_block(shape: &BlockShape, block: usize, rep: CMatrix) -> Result<Self, AlgebraError> {
        shape.check_block(block, &rep)?;
        let mut f = Self::zero(shape);
        f.reps[block] = rep;
        Ok(f)
    }

    /// `A ↦ ⟨A_block u, v⟩`, representative `u vᴴ`.
    pub fn vector_functional(
        shape: &BlockShape,
        block: usize,
        u: &CVector,
        v: &CVector,
    ) -> Result<Self, AlgebraError> {
        Self::on_block(shape, block, u * v.adjoint())
    }

    /// Vector state `A ↦ ⟨A_block x, x⟩`.
    pub fn vector_state(shape: &BlockShape, block: usize, x: &CVector) -> Result<Self, AlgebraError> {
        Self::vector_functional(shape, block, x, x)
    }

    pub fn shape(&self) -> &BlockShape {
        &self.shape
    }

    pub fn reps(&self) -> &[CMatrix] {
        &self.reps
    }

    pub fn rep(&self, block: usize) -> &CMatrix {
        &self.reps[block]
    }

    pub fn apply(&self, a: &BlockElement) -> Result<C64, AlgebraError> {
        functional_apply(self, a)
    }

    /// Dual norm, `Σᵢ ‖Sᵢ‖₁`.
    pub fn norm(&self) -> f64 {
        self.reps.iter().map(trace_norm).sum()
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.shape.ensure_same(&other.shape)?;
        Ok(Self {
            shape: self.shape.clone(),
            reps: self.reps.iter().zip(&other.reps).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            shape: self.shape.clone(),
            reps: self.reps.iter().map(|m| m * z).collect(),
        }
    }

    /// `A ↦ ρ(X A)`
    pub fn left_translate(&self, x: &BlockElement) -> Result<Self, AlgebraError> {
        self.shape.ensure_same(x.shape())?;
        Ok(Self {
            shape: self.shape.clone(),
            reps: self.reps.iter().zip(x.blocks()).map(|(s, x)| s * x).collect(),
        })
    }
}

pub fn functional_apply(rho: &Functional, a: &BlockElement) -> Result<C64, AlgebraError> {
    rho.shape.ensure_same(&a.shape)?;
    Ok(rho
        .reps
        .iter()
        .zip(&a.blocks)
        .map(|(s, x)| (s * x).trace())
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NotExtremeReason {
    MultiBlockSupport,
    RankExceedsOne,
    NormNotOne,
}

impl fmt::Display for NotExtremeReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::MultiBlockSupport => "support spans several blocks",
            Self::RankExceedsOne => "representative has rank above one",
            Self::NormNotOne => "norm differs from one",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Extremity {
    /// `ρ(A) = ⟨A_block · left, right⟩` up to the accepted tolerance.
    Extreme {
        block: usize,
        left: CVector,
        right: CVector,
    },
    NotExtreme(NotExtremeReason),
}

impl Extremity {
    pub fn is_extreme(&self) -> bool {
        matches!(self, Self::Extreme { .. })
    }
}

/// Decides whether `rho` is an extreme point of the dual unit ball: it must
/// live on a single block with a rank-one representative of trace norm one.
pub fn functional_extremity(rho: &Functional, tol: f64) -> Extremity {
    let support: Vec<usize> = rho
        .reps
        .iter()
        .enumerate()
        .filter(|(_, s)| trace_norm(s) > tol)
        .map(|(i, _)| i)
        .collect();
    let block = match support.as_slice() {
        [] => return Extremity::NotExtreme(NotExtremeReason::NormNotOne),
        [b] => *b,
        _ => return Extremity::NotExtreme(NotExtremeReason::MultiBlockSupport),
    };
    match rank_one_factor(&rho.reps[block], tol) {
        Ok(f) => Extremity::Extreme {
            block,
            left: f.left,
            right: f.right,
        },
        Err(NumError::NotRankOneUnit { sigma2, .. }) if sigma2 > tol => {
            Extremity::NotExtreme(NotExtremeReason::RankExceedsOne)
        }
        Err(_) => Extremity::NotExtreme(NotExtremeReason::NormNotOne),
    }
}

/// Positive semidefinite within `tol`: hermitian defect and negative
/// eigenvalues both bounded by `tol`.
fn is_psd(s: &CMatrix, tol: f64) -> bool {
    if hermitian_defect(s) > tol {
        return false;
    }
    // λ_min(H) > −tol exactly when H + tol·I admits a Cholesky factor.
    let n = s.nrows();
    let shifted = (s + s.adjoint()) * C64::new(0.5, 0.0) + CMatrix::identity(n, n) * C64::new(tol, 0.0);
    shifted.cholesky().is_some()
}

/// Positive functional of norm one: every representative PSD and the total
/// trace equal to one.
pub fn is_state(rho: &Functional, tol: f64) -> bool {
    if !rho.reps.iter().all(|s| is_psd(s, tol)) {
        return false;
    }
    let total: C64 = rho.reps.iter().map(|s| s.trace()).sum();
    (total - C64::new(1.0, 0.0)).norm() <= tol
}

/// Returns the unit vector `x` with `ρ = ⟨· x, x⟩` when `rho` is a pure
/// state, `None` otherwise.
pub fn is_pure_state(rho: &Functional, tol: f64) -> Option<(usize, CVector)> {
    let support: Vec<usize> = rho
        .reps
        .iter()
        .enumerate()
        .filter(|(_, s)| trace_norm(s) > tol)
        .map(|(i, _)| i)
        .collect();
    let [block] = support.as_slice() else {
        return None;
    };
    let s = &rho.reps[*block];
    if !is_psd(s, tol) || (s.trace() - C64::new(1.0, 0.0)).norm() > tol {
        return None;
    }
    let factor = numkit::top_singular_pair(s, tol).ok()?;
    if factor.sigma2 > tol {
        return None;
    }
    // For a PSD rank-one S the gauge of the top pair makes left = right.
    let x = factor.right;
    Some((*block, x))
}

/// Pure state `ω = ⟨· x, x⟩` and unitary `V` on the supporting block with
/// `ω(A) = ρ(V A)` and `ρ(A) = ⟨A x, V x⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarFactorization {
    pub block_index: usize,
    pub x: CVector,
    pub v: CMatrix,
}

impl PolarFactorization {
    /// The unitary as a block element: `V` on the supporting block and the
    /// identity elsewhere.
    pub fn unitary_element(&self, shape: &BlockShape) -> BlockElement {
        let mut e = BlockElement::identity(shape);
        *e.block_mut(self.block_index) = self.v.clone();
        e
    }

    pub fn pure_state(&self, shape: &BlockShape) -> Functional {
        Functional::vector_state(shape, self.block_index, &self.x)
            .expect("factorization vector matches its block")
    }
}

pub fn polar_factorize(rho: &Functional, tol: f64) -> Result<PolarFactorization, AlgebraError> {
    match functional_extremity(rho, tol) {
        Extremity::Extreme { block, left, right } => {
            let v = complete_to_unitary(&left, &right)?;
            Ok(PolarFactorization {
                block_index: block,
                x: left,
                v,
            })
        }
        Extremity::NotExtreme(reason) => Err(AlgebraError::NotExtremal(reason)),
    }
}

/// Pulls `omega` back along the compression `A ↦ E A E`.
pub fn compress_functional(
    omega: &Functional,
    e: &BlockElement,
    tol: f64,
) -> Result<Functional, AlgebraError> {
    omega.shape.ensure_same(e.shape())?;
    for (block, p) in e.blocks().iter().enumerate() {
        let defect = (p * p - p).norm() + hermitian_defect(p);
        if defect > tol {
            return Err(AlgebraError::NotProjection { block, defect });
        }
    }
    Ok(Functional {
        shape: omega.shape.clone(),
        reps: omega
            .reps
            .iter()
            .zip(e.blocks())
            .map(|(s, p)| p * s * p)
            .collect(),
    })
}

/// Dual norm of `ρ₁ − ρ₂`.
pub fn extremal_distance(rho1: &Functional, rho2: &Functional) -> Result<f64, AlgebraError> {
    Ok(rho1.sub(rho2)?.norm())
}

/// Three unit vectors from `omega` to a phase-adjusted `z` whose successive
/// squared distances are at most `2 − √2`.
///
/// Inputs must be unit vectors of equal length. When `z` is parallel to
/// `omega` the chain is constant up to the phase of `z`.
pub fn pure_state_chain(omega: &CVector, z: &CVector) -> Result<[CVector; 3], AlgebraError> {
    if omega.len() != z.len() {
        return Err(NumError::LengthMismatch {
            left: omega.len(),
            right: z.len(),
        }
        .into());
    }
    for v in [omega, z] {
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(NumError::NotUnit { norm }.into());
        }
    }
    let overlap = inner(z, omega);
    let w3 = z * numkit::phase_of(overlap).conj();
    let residual = &w3 - omega * inner(&w3, omega);
    let residual_norm = residual.norm();
    if residual_norm <= 1e-12 {
        return Ok([omega.clone(), omega.clone(), w3]);
    }
    // ⟨w3, x⟩ = ‖residual‖ ≥ 0 by construction.
    let x = residual / C64::new(residual_norm, 0.0);
    let w2 = (omega + x) * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Ok([omega.clone(), w2, w3])
}
