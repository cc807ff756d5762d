//! Dense complex linear algebra used throughout the crate: rank-one
//! certification through the SVD, unitary completion and trace norms.

mod jacobi;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub use jacobi::{svd, Svd};
use jacobi::singular_values as jacobi_values;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Acceptance band used when the caller has no better value.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Tolerance on the norm of vectors handed to [`complete_to_unitary`].
const UNIT_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumError {
    #[error("matrix is zero (Frobenius norm {norm:e})")]
    ZeroMatrix { norm: f64 },
    #[error("not a rank-one unit matrix: sigma1 = {sigma1}, sigma2 = {sigma2}")]
    NotRankOneUnit { sigma1: f64, sigma2: f64 },
    #[error("vector is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

/// Top singular triple of a matrix together with the second singular value.
///
/// `left` and `right` are unit vectors with `M ≈ sigma1 · left · rightᴴ`
/// whenever `sigma2` is negligible.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneFactor {
    pub left: CVector,
    pub right: CVector,
    pub sigma1: f64,
    pub sigma2: f64,
}

impl RankOneFactor {
    pub fn is_rank_one_unit(&self, tol: f64) -> bool {
        (self.sigma1 - 1.0).abs() <= tol && self.sigma2 <= tol
    }

    /// `sigma1 · left · rightᴴ`
    pub fn outer(&self) -> CMatrix {
        (&self.left * self.right.adjoint()).scale(self.sigma1)
    }
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Standard basis vector `e_i` of `C^n`.
pub fn basis(n: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[i] = C64::new(1.0, 0.0);
    v
}

/// Matrix unit `e_{pq}` of `M_n`.
pub fn matrix_unit(n: usize, p: usize, q: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(p, q)] = C64::new(1.0, 0.0);
    m
}

/// Hermitian inner product `⟨x, y⟩ = yᴴx`.
pub fn inner(x: &CVector, y: &CVector) -> C64 {
    y.dotc(x)
}

/// Unit complex number with the phase of `z` (1 when `z` is zero).
pub fn phase_of(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        z / r
    }
}

/// Parallelism test for unit vectors: `|⟨x, y⟩| ≥ 1 − tol`.
pub fn parallel(x: &CVector, y: &CVector, tol: f64) -> bool {
    inner(x, y).norm() >= 1.0 - tol
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    jacobi_values(m)
}

pub fn trace_norm(m: &CMatrix) -> f64 {
    singular_values(m).iter().sum()
}

pub fn operator_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Numerical rank: number of singular values above `tol · max(1, σ₁)`.
pub fn rank(m: &CMatrix, tol: f64) -> usize {
    let values = singular_values(m);
    let cutoff = tol * values.first().copied().unwrap_or(0.0).max(1.0);
    values.iter().filter(|&&s| s > cutoff).count()
}

/// Computes the top singular pair of `m` without judging it.
///
/// The phase gauge makes the first component of `right` whose modulus
/// exceeds `tol` real and positive; the phase is moved into `left`.
pub fn top_singular_pair(m: &CMatrix, tol: f64) -> Result<RankOneFactor, NumError> {
    let norm = m.norm();
    if norm <= tol {
        return Err(NumError::ZeroMatrix { norm });
    }
    let decomposition = svd(m);
    let sigma1 = decomposition.singular_values[0];
    let sigma2 = decomposition.singular_values.get(1).copied().unwrap_or(0.0);
    let mut left: CVector = decomposition.u.column(0).into_owned();
    let mut right: CVector = decomposition.v.column(0).into_owned();

    if let Some(anchor) = right.iter().find(|z| z.norm() > tol).copied() {
        let gauge = phase_of(anchor).conj();
        right *= gauge;
        left *= gauge;
    }
    Ok(RankOneFactor {
        left,
        right,
        sigma1,
        sigma2,
    })
}

/// Accepts `m` iff it is a rank-one operator of norm one within `tol`.
pub fn rank_one_factor(m: &CMatrix, tol: f64) -> Result<RankOneFactor, NumError> {
    let factor = top_singular_pair(m, tol)?;
    if factor.is_rank_one_unit(tol) {
        Ok(factor)
    } else {
        Err(NumError::NotRankOneUnit {
            sigma1: factor.sigma1,
            sigma2: factor.sigma2,
        })
    }
}

/// Complex Householder reflection `H` with `H x = −e^{i arg x₀} e₀`.
///
/// Returns the reflection and the scalar `a` with `H x = a e₀`.
fn householder_to_e0(x: &CVector) -> (CMatrix, C64) {
    let n = x.len();
    let theta = phase_of(x[0]);
    let mut v = x.clone();
    v[0] += theta;
    let vv = v.norm_squared();
    let h = CMatrix::identity(n, n) - (&v * v.adjoint()).scale(2.0 / vv);
    (h, -theta)
}

/// Builds a unitary `V` with `V x = y` for unit vectors `x`, `y`.
///
/// When `y = λx` for a unimodular `λ` the result is `λ I`; otherwise it is
/// a composition of two Householder reflections and a diagonal phase.
pub fn complete_to_unitary(x: &CVector, y: &CVector) -> Result<CMatrix, NumError> {
    if x.len() != y.len() {
        return Err(NumError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    for v in [x, y] {
        let norm = v.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(NumError::NotUnit { norm });
        }
    }
    let x = x.normalize();
    let y = y.normalize();
    let n = x.len();

    let lambda = inner(&y, &x);
    if (&y - &x * lambda).norm() <= 1e-14 {
        return Ok(CMatrix::identity(n, n) * phase_of(lambda));
    }

    let (hx, a) = householder_to_e0(&x);
    let (hy, b) = householder_to_e0(&y);
    let mut d = CMatrix::identity(n, n);
    d[(0, 0)] = b / a;
    Ok(hy * d * hx)
}

/// Nearest matrix with orthonormal columns (polar factor), for `rows ≥ cols`.
pub fn nearest_isometry(m: &CMatrix) -> CMatrix {
    let decomposition = svd(m);
    decomposition.u * decomposition.v.adjoint()
}

/// `‖MᴴM − I‖_F`
pub fn isometry_defect(m: &CMatrix) -> f64 {
    let n = m.ncols();
    (m.adjoint() * m - CMatrix::identity(n, n)).norm()
}

/// `‖M − Mᴴ‖_F`
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}
