//! One-sided Jacobi (Hestenes) SVD for small dense complex matrices.
//!
//! Columns are orthogonalized pairwise by complex plane rotations until
//! every pair is orthogonal to working precision. The method is slow for
//! large matrices but accurate for the tiny ones used here, including
//! rank-deficient inputs.

use super::{CMatrix, C64};

const MAX_SWEEPS: usize = 80;
const ORTHO_EPS: f64 = 1e-15;

/// Thin SVD `M = U diag(σ) Vᴴ` with `r = min(rows, cols)` columns in `U`
/// and `V` and singular values in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

pub fn svd(m: &CMatrix) -> Svd {
    if m.nrows() < m.ncols() {
        let t = svd(&m.adjoint());
        return Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Svd {
            u: CMatrix::zeros(rows, 0),
            singular_values: Vec::new(),
            v: CMatrix::zeros(0, 0),
        };
    }
    let mut a = m.clone();
    let mut v = CMatrix::identity(cols, cols);
    orthogonalize(&mut a, Some(&mut v));

    let norms: Vec<f64> = (0..cols).map(|k| a.column(k).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let largest = norms[order[0]];

    let mut u = CMatrix::zeros(rows, cols);
    let mut v_sorted = CMatrix::zeros(cols, cols);
    let mut singular_values = Vec::with_capacity(cols);
    let mut missing = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        singular_values.push(sigma);
        v_sorted.set_column(dst, &v.column(src));
        if sigma > largest * 1e-14 && sigma > 0.0 {
            u.set_column(dst, &(a.column(src) / C64::new(sigma, 0.0)));
        } else {
            missing.push(dst);
        }
    }
    complete_columns(&mut u, &missing);
    Svd {
        u,
        singular_values,
        v: v_sorted,
    }
}

/// Singular values only, in descending order. Skips accumulating the
/// singular vectors.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut a = if m.nrows() < m.ncols() {
        m.adjoint()
    } else {
        m.clone()
    };
    orthogonalize(&mut a, None);
    let mut values: Vec<f64> = (0..a.ncols()).map(|k| a.column(k).norm()).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    values
}

/// Rotates column pairs of `a` until they are mutually orthogonal, applying
/// the same rotations to `v` when given.
fn orthogonalize(a: &mut CMatrix, mut v: Option<&mut CMatrix>) {
    let cols = a.ncols();
    // Columns below this squared norm are zero to working precision.
    let floor = (f64::EPSILON * a.norm()).powi(2);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let alpha = a.column(i).norm_squared();
                let beta = a.column(j).norm_squared();
                let gamma = a.column(i).dotc(&a.column(j));
                let g = gamma.norm();
                if g == 0.0 || alpha <= floor || beta <= floor || g <= ORTHO_EPS * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotating column j by conj(phase) makes ⟨a_i, a_j⟩ real.
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(a, i, j, phase, c, s);
                if let Some(v) = v.as_deref_mut() {
                    rotate(v, i, j, phase, c, s);
                }
            }
        }
        if !rotated {
            break;
        }
    }
}

/// Replaces `(x_i, x_j)` by `(c x_i − s φ x_j, s x_i + c φ x_j)`.
fn rotate(m: &mut CMatrix, i: usize, j: usize, phase: C64, c: f64, s: f64) {
    for r in 0..m.nrows() {
        let xi = m[(r, i)];
        let xj = m[(r, j)] * phase;
        m[(r, i)] = xi * c - xj * s;
        m[(r, j)] = xi * s + xj * c;
    }
}

/// Fills the listed columns with unit vectors orthogonal to all others, by
/// Gram–Schmidt on the standard basis.
fn complete_columns(u: &mut CMatrix, missing: &[usize]) {
    let rows = u.nrows();
    for &col in missing {
        for e in 0..rows {
            let mut x = CMatrix::zeros(rows, 1);
            x[(e, 0)] = C64::new(1.0, 0.0);
            for other in 0..u.ncols() {
                if other == col {
                    continue;
                }
                let q = u.column(other).into_owned();
                let proj = q.dotc(&x.column(0));
                x.set_column(0, &(x.column(0) - q * proj));
            }
            // Second pass for numerical orthogonality.
            for other in 0..u.ncols() {
                if other == col {
                    continue;
                }
                let q = u.column(other).into_owned();
                let proj = q.dotc(&x.column(0));
                x.set_column(0, &(x.column(0) - q * proj));
            }
            let norm = x.norm();
            if norm > 1e-6 {
                u.set_column(col, &(x.column(0) / C64::new(norm, 0.0)));
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::isometry_defect;
    use crate::random::{gaussian_matrix, seeded, unit_vector};
    use proptest::prelude::*;

    fn recompose(s: &Svd) -> CMatrix {
        let sigma = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            s.singular_values.len(),
            s.singular_values.iter().map(|&x| C64::new(x, 0.0)),
        ));
        &s.u * sigma * s.v.adjoint()
    }

    #[test]
    fn rank_one_products_have_exact_norm() {
        let mut rng = seeded(77);
        for n in 1..=9 {
            for _ in 0..50 {
                let x = unit_vector(&mut rng, n);
                let y = unit_vector(&mut rng, n);
                let m = &x * y.adjoint();
                let s = svd(&m);
                assert!((s.singular_values[0] - 1.0).abs() < 1e-13);
                assert!(s.singular_values.iter().skip(1).all(|&v| v < 1e-13));
                assert!((recompose(&s) - &m).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn empty_matrices_have_no_singular_values() {
        let s = svd(&CMatrix::zeros(3, 0));
        assert!(s.singular_values.is_empty());
        assert_eq!(s.u.shape(), (3, 0));
        assert_eq!(svd(&CMatrix::zeros(0, 2)).v.shape(), (2, 0));
    }

    #[test]
    fn zero_matrix_gets_orthonormal_factors() {
        let s = svd(&CMatrix::zeros(4, 3));
        assert!(s.singular_values.iter().all(|&v| v == 0.0));
        assert!(isometry_defect(&s.u) < 1e-14);
        assert!(isometry_defect(&s.v) < 1e-14);
    }

    proptest! {
        #[test]
        fn backward_error_is_small(seed in any::<u64>(), rows in 1usize..10, cols in 1usize..10) {
            let mut rng = seeded(seed);
            let m = gaussian_matrix(&mut rng, rows, cols);
            let s = svd(&m);
            prop_assert!((recompose(&s) - &m).norm() <= 1e-12 * m.norm().max(1.0));
            prop_assert!(isometry_defect(&s.u) < 1e-12);
            prop_assert!(isometry_defect(&s.v) < 1e-12);
            prop_assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
