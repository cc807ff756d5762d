#![allow(dead_code)]

use extremal_core::extremal::{build_form1, build_form2, BlockMap};
use extremal_core::numkit::operator_norm;
use extremal_core::random::{coisometry, gaussian_matrix, isometry, unit_vector, SeededRng};
use extremal_core::{BlockElement, BlockShape, CMatrix, Superoperator, C64};
use rand::Rng;

/// Canonical form tag used by the generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    One { transposed: bool },
    Two { adjoint: bool },
}

impl Form {
    pub fn label(self) -> &'static str {
        match self {
            Form::One { transposed: false } => "1",
            Form::One { transposed: true } => "1t",
            Form::Two { adjoint: false } => "2",
            Form::Two { adjoint: true } => "2a",
        }
    }

    pub fn is_form1(self) -> bool {
        matches!(self, Form::One { .. })
    }
}

pub fn random_block_map(rng: &mut SeededRng, form: Form, k: usize, h: usize) -> BlockMap {
    let psi = match form {
        Form::One { transposed } => {
            let u = isometry(rng, k, h);
            let v = isometry(rng, k, h);
            build_form1(&u, &v, transposed)
        }
        Form::Two { adjoint } => {
            let frame = coisometry(rng, h * h, k);
            let w = unit_vector(rng, k);
            build_form2(&w, &frame, adjoint)
        }
    };
    psi.expect("generated factors are exact").restrict(0, 0)
}

/// Dimensions `(k, h)` with `2 ≤ h ≤ 3`, `k ≤ 9`, valid for the form.
pub fn random_dims(rng: &mut SeededRng, form: Form) -> (usize, usize) {
    let h = rng.random_range(2..=3);
    let k_min = if form.is_form1() { h } else { h * h };
    (rng.random_range(k_min..=9), h)
}

/// Random map on a random input shape whose output blocks mix both forms.
/// Returns the map and the output blocks generated in Form 1.
pub fn random_mixed_map(rng: &mut SeededRng) -> (Superoperator, Vec<usize>) {
    let blocks = rng.random_range(1..=3);
    let mut dims: Vec<usize> = (0..blocks).map(|_| rng.random_range(1..=6)).collect();
    // At least one input block must be large enough for a frame.
    let big = rng.random_range(0..blocks);
    dims[big] = rng.random_range(4..=9);
    let in_shape = BlockShape::new(dims.clone()).unwrap();

    let outputs = rng.random_range(2..=4);
    let mut parts = Vec::with_capacity(outputs);
    let mut form1_blocks = Vec::new();
    for out in 0..outputs {
        // The first two output blocks force one of each form.
        let want_form2 = match out {
            0 => false,
            1 => true,
            _ => rng.random_bool(0.5),
        };
        let flag = rng.random_bool(0.5);
        if want_form2 {
            let j = big;
            let k = dims[j];
            let h = if k >= 9 && rng.random_bool(0.3) { 3 } else { 2 };
            parts.push((j, random_block_map(rng, Form::Two { adjoint: flag }, k, h)));
        } else {
            let j = rng.random_range(0..blocks);
            let k = dims[j];
            let h = rng.random_range(1..=k.min(3));
            parts.push((j, random_block_map(rng, Form::One { transposed: flag }, k, h)));
            form1_blocks.push(out);
        }
    }
    (Superoperator::from_block_maps(in_shape, &parts).unwrap(), form1_blocks)
}

/// `A ↦ ⊕_b U_bᴴ α_b(A) U_b` with each `α_b` the identity or the transpose
/// on a random input block. Both kinds occur when there are two or more
/// output blocks.
pub fn random_jordan_compression(rng: &mut SeededRng) -> Superoperator {
    let blocks = rng.random_range(1..=3);
    let dims: Vec<usize> = (0..blocks).map(|_| rng.random_range(1..=5)).collect();
    let in_shape = BlockShape::new(dims.clone()).unwrap();
    let outputs = rng.random_range(1..=4);
    let parts: Vec<(usize, BlockMap)> = (0..outputs)
        .map(|out| {
            let j = rng.random_range(0..blocks);
            let k = dims[j];
            let h = rng.random_range(1..=k);
            let transposed = match out {
                0 => false,
                1 => true,
                _ => rng.random_bool(0.5),
            };
            let u = isometry(rng, k, h);
            let psi = build_form1(&u, &u, transposed).unwrap();
            (j, psi.restrict(0, 0))
        })
        .collect();
    Superoperator::from_block_maps(in_shape, &parts).unwrap()
}

/// Random element of C*-norm one.
pub fn random_unit_ball_element(rng: &mut SeededRng, shape: &BlockShape) -> BlockElement {
    let blocks = shape
        .dims()
        .iter()
        .map(|&n| gaussian_matrix(rng, n, n))
        .collect();
    let x = BlockElement::new(shape.clone(), blocks).unwrap();
    let norm = x.operator_norm();
    x.scale(C64::new(1.0 / norm, 0.0))
}

/// Largest `‖ψ(A)‖` over `samples` random inputs of norm one.
pub fn sampled_induced_norm(psi: &Superoperator, rng: &mut SeededRng, samples: usize) -> f64 {
    (0..samples)
        .map(|_| {
            let a = random_unit_ball_element(rng, psi.in_shape());
            psi.apply(&a).unwrap().operator_norm()
        })
        .fold(0.0, f64::max)
}

/// Adds independent complex Gaussian noise of the given scale to every
/// matrix-unit image.
pub fn perturb(map: &BlockMap, rng: &mut SeededRng, scale: f64) -> BlockMap {
    let h = map.h();
    BlockMap::from_fn(map.k(), h, |p, q| {
        map.image(p, q) + gaussian_matrix(rng, h, h) * C64::new(scale, 0.0)
    })
}

pub fn frobenius_rank_one_norm(m: &CMatrix) -> f64 {
    m.norm()
}

pub fn operator_norm_of(m: &CMatrix) -> f64 {
    operator_norm(m)
}
