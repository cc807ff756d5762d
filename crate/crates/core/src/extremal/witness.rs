use crate::algebra::{functional_extremity, Extremity, Functional};
use crate::numkit::{self, basis, trace_norm, CVector, C64};
use crate::random::{seeded, unit_vector};

use super::Superoperator;

/// A pair of unit vectors `(u, v)` on an output block such that `ψ*(u ⊗ v)`
/// is expected to fail the extremity test.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub out_block: usize,
    pub u: CVector,
    pub v: CVector,
    /// Whether replaying the witness at the classification tolerance
    /// actually produced a non-extreme functional.
    pub confirmed: bool,
}

impl Witness {
    /// Recomputes `ψ*(u ⊗ v)` and reports whether it is non-extreme.
    pub fn replay(&self, psi: &Superoperator, tol: f64) -> bool {
        psi.pullback_vectors(self.out_block, &self.u, &self.v)
            .map(|f| !functional_extremity(&f, tol).is_extreme())
            .unwrap_or(false)
    }
}

/// How far `rho` is from an extreme point: mass outside the dominant block
/// plus the gap between its top singular value and one. Zero iff extreme.
pub fn extremity_defect(rho: &Functional) -> f64 {
    let norms: Vec<f64> = rho.reps().iter().map(trace_norm).collect();
    let (main, _) = norms
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("shape has at least one block");
    let sigma1 = numkit::operator_norm(rho.rep(main));
    (norms.iter().sum::<f64>() - sigma1) + (sigma1 - 1.0).abs()
}

/// Candidate vectors in search order: basis vectors, then
/// `(e_i + φ e_{i'})/√2` for `i < i'` and `φ ∈ {1, i, −1, −i}`.
fn structured_vectors(h: usize) -> Vec<CVector> {
    let mut out: Vec<CVector> = (0..h).map(|i| basis(h, i)).collect();
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let phases = [
        C64::new(1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(-1.0, 0.0),
        C64::new(0.0, -1.0),
    ];
    for i in 0..h {
        for j in i + 1..h {
            for phase in phases {
                out.push((basis(h, i) + basis(h, j) * phase) * s);
            }
        }
    }
    out
}

/// Searches output block `out_block` for a witness: matrix units first,
/// then two-index combinations, then `random_samples` seeded random pairs.
///
/// Always returns a pair; if none fails the test the one with the largest
/// [`extremity_defect`] is returned with `confirmed = false`.
pub fn search_witness(
    psi: &Superoperator,
    out_block: usize,
    tol: f64,
    seed: u64,
    random_samples: usize,
) -> Witness {
    let h = psi.out_shape().dim(out_block);
    let vectors = structured_vectors(h);
    let units = h;

    let mut best: Option<(f64, CVector, CVector)> = None;
    let mut consider = |u: &CVector, v: &CVector| -> Option<Witness> {
        let rho = psi
            .pullback_vectors(out_block, u, v)
            .expect("candidate vectors match the output block");
        if !functional_extremity(&rho, tol).is_extreme() {
            return Some(Witness {
                out_block,
                u: u.clone(),
                v: v.clone(),
                confirmed: true,
            });
        }
        let defect = extremity_defect(&rho);
        if best.as_ref().is_none_or(|(d, _, _)| defect > *d) {
            best = Some((defect, u.clone(), v.clone()));
        }
        None
    };

    for u in &vectors[..units] {
        for v in &vectors[..units] {
            if let Some(w) = consider(u, v) {
                return w;
            }
        }
    }
    for (a, u) in vectors.iter().enumerate() {
        for (b, v) in vectors.iter().enumerate() {
            if a < units && b < units {
                continue;
            }
            if let Some(w) = consider(u, v) {
                return w;
            }
        }
    }
    let mut rng = seeded(seed ^ (out_block as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    for _ in 0..random_samples {
        let u = unit_vector(&mut rng, h);
        let v = unit_vector(&mut rng, h);
        if let Some(w) = consider(&u, &v) {
            return w;
        }
    }
    let (_, u, v) = best.expect("at least one candidate was examined");
    Witness {
        out_block,
        u,
        v,
        confirmed: false,
    }
}

/// Randomized oracle: draws `samples` Haar-random pairs per output block and
/// returns the first `(u, v)` whose pull-back is not an extreme point.
pub fn find_witness(psi: &Superoperator, samples: usize, seed: u64, tol: f64) -> Option<Witness> {
    let mut rng = seeded(seed);
    for out_block in 0..psi.out_shape().num_blocks() {
        let h = psi.out_shape().dim(out_block);
        for _ in 0..samples {
            let u = unit_vector(&mut rng, h);
            let v = unit_vector(&mut rng, h);
            let rho = psi
                .pullback_vectors(out_block, &u, &v)
                .expect("sampled vectors match the output block");
            if let Extremity::NotExtreme(_) = functional_extremity(&rho, tol) {
                return Some(Witness {
                    out_block,
                    u,
                    v,
                    confirmed: true,
                });
            }
        }
    }
    None
}
