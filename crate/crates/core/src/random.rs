//! Seeded random sampling of vectors, isometries and frames.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numkit::{nearest_isometry, CMatrix, CVector, C64};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-distributed unit vector in `C^n`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    loop {
        let v = CVector::from_fn(n, |_, _| gaussian(rng));
        let norm = v.norm();
        if norm > 1e-6 {
            return v / C64::new(norm, 0.0);
        }
    }
}

pub fn unimodular<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    C64::from_polar(1.0, t)
}

/// Random `rows × cols` matrix with orthonormal columns (`rows ≥ cols`).
pub fn isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    nearest_isometry(&gaussian_matrix(rng, rows, cols))
}

pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    isometry(rng, n, n)
}

/// Random `rows × cols` matrix with orthonormal rows (`rows ≤ cols`).
pub fn coisometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    isometry(rng, cols, rows).adjoint()
}

/// Random orthogonal projection of the given rank in `M_n`.
pub fn projection<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> CMatrix {
    let q = isometry(rng, n, rank);
    &q * q.adjoint()
}
