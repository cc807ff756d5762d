mod common;

use std::f64::consts::SQRT_2;

use common::{
    perturb, random_block_map, random_jordan_compression, random_mixed_map,
    sampled_induced_norm, Form,
};
use extremal_core::algebra::{
    compress_functional, extremal_distance, functional_apply, functional_extremity, is_pure_state,
    is_state, polar_factorize, pure_state_chain, BlockElement, BlockShape, Functional,
};
use extremal_core::disc::{
    boundary_extremality_check, circle_grid, comp_op_adjoint_on_evaluation, comp_op_apply,
    BlaschkeProduct, DiscCompositionOp, DiscFunction, Polynomial,
};
use extremal_core::extremal::{
    build_form1, classify, schur_counterexample, BlockMap, ClassifyConfig, Superoperator,
};
use extremal_core::numkit::{
    complete_to_unitary, isometry_defect, matrix_unit, operator_norm, rank_one_factor,
    trace_norm, CMatrix, C64, DEFAULT_TOL,
};
use extremal_core::random::{
    gaussian_matrix, isometry, projection, seeded, unimodular, unit_vector, SeededRng,
};
use extremal_core::structure::{
    check_pure_preserving_sampled, classify_extremal_global, classify_pure_preserving,
};
use proptest::prelude::*;
use rand::Rng;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig::with_cases(cases)
}

fn random_shape(rng: &mut SeededRng, max_blocks: usize, max_dim: usize) -> BlockShape {
    let blocks = rng.random_range(1..=max_blocks);
    BlockShape::new((0..blocks).map(|_| rng.random_range(1..=max_dim)).collect()).unwrap()
}

fn random_state(rng: &mut SeededRng, shape: &BlockShape) -> Functional {
    let reps: Vec<CMatrix> = shape
        .dims()
        .iter()
        .map(|&n| {
            let g = gaussian_matrix(rng, n, n);
            &g * g.adjoint()
        })
        .collect();
    let total: f64 = reps.iter().map(|s| s.trace().re).sum();
    let reps = reps.into_iter().map(|s| s / C64::new(total, 0.0)).collect();
    Functional::new(shape.clone(), reps).unwrap()
}

fn random_extreme(rng: &mut SeededRng, shape: &BlockShape) -> Functional {
    let b = rng.random_range(0..shape.num_blocks());
    let n = shape.dim(b);
    let x = unit_vector(rng, n) * unimodular(rng);
    Functional::vector_functional(shape, b, &x, &unit_vector(rng, n)).unwrap()
}

// numkit

proptest! {
    #![proptest_config(cfg(256))]

    #[test]
    fn trace_norm_dominates_frobenius_and_operator_norms(seed in any::<u64>(), rows in 1usize..8, cols in 1usize..8) {
        let mut rng = seeded(seed);
        let m = gaussian_matrix(&mut rng, rows, cols);
        let t = trace_norm(&m);
        prop_assert!(t >= m.norm() / (rows.min(cols) as f64).sqrt() - 1e-12);
        prop_assert!(t >= operator_norm(&m) - 1e-12);
    }

    #[test]
    fn accepted_rank_one_factors_reconstruct(seed in any::<u64>(), rows in 1usize..8, cols in 1usize..8, noise in 0.0f64..1e-9) {
        let mut rng = seeded(seed);
        let x = unit_vector(&mut rng, rows) * unimodular(&mut rng);
        let y = unit_vector(&mut rng, cols);
        let m = &x * y.adjoint() + gaussian_matrix(&mut rng, rows, cols) * C64::new(noise, 0.0);
        let f = rank_one_factor(&m, DEFAULT_TOL).unwrap();
        let rebuilt = &f.left * f.right.adjoint() * C64::new(f.sigma1, 0.0);
        prop_assert!((m - rebuilt).norm() <= 10.0 * DEFAULT_TOL);
        prop_assert!(f.sigma1 >= f.sigma2);
    }
}

#[test]
fn complete_to_unitary_maps_x_to_y() {
    let mut rng = seeded(3);
    for trial in 0..1000 {
        let n = 1 + trial % 8;
        let x = unit_vector(&mut rng, n);
        let y = match trial % 5 {
            0 => &x * unimodular(&mut rng),
            1 => x.clone(),
            _ => unit_vector(&mut rng, n),
        };
        let v = complete_to_unitary(&x, &y).unwrap();
        assert!(isometry_defect(&v) <= 1e-10, "trial {trial}");
        assert!((&v * &x - &y).norm() <= 1e-10, "trial {trial}");
    }
}

// algebra

#[test]
fn states_form_a_face_of_the_dual_ball() {
    let mut rng = seeded(5);
    let mut hits = 0;
    for trial in 0..600 {
        let shape = random_shape(&mut rng, 3, 4);
        let lambda = rng.random_range(0.05..0.95);
        // Half the instances come from genuine convex splittings so the
        // hypothesis is actually met; the rest are arbitrary ball points.
        let (omega, rho1) = if trial % 2 == 0 {
            let s1 = random_state(&mut rng, &shape);
            let s2 = random_state(&mut rng, &shape);
            let omega = Functional::new(
                shape.clone(),
                s1.reps()
                    .iter()
                    .zip(s2.reps())
                    .map(|(a, b)| a * C64::new(lambda, 0.0) + b * C64::new(1.0 - lambda, 0.0))
                    .collect(),
            )
            .unwrap();
            (omega, s1)
        } else {
            let omega = random_state(&mut rng, &shape);
            let reps: Vec<CMatrix> = shape.dims().iter().map(|&n| gaussian_matrix(&mut rng, n, n)).collect();
            let raw = Functional::new(shape.clone(), reps).unwrap();
            let scale = rng.random_range(0.1..1.0) / raw.norm();
            (omega, raw.scale(C64::new(scale, 0.0)))
        };
        let rho2 = omega
            .sub(&rho1.scale(C64::new(lambda, 0.0)))
            .unwrap()
            .scale(C64::new(1.0 / (1.0 - lambda), 0.0));
        if rho1.norm() <= 1.0 + 1e-12 && rho2.norm() <= 1.0 + 1e-12 {
            hits += 1;
            assert!(is_state(&rho1, 1e-8), "trial {trial}: rho1 not a state");
            assert!(is_state(&rho2, 1e-8), "trial {trial}: rho2 not a state");
        }
    }
    assert!(hits >= 300, "only {hits} instances met the hypothesis");
}

proptest! {
    #![proptest_config(cfg(256))]

    #[test]
    fn polar_factorization_round_trips(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let shape = random_shape(&mut rng, 3, 5);
        let rho = random_extreme(&mut rng, &shape);
        let polar = polar_factorize(&rho, DEFAULT_TOL).unwrap();
        let b = polar.block_index;
        let vx = &polar.v * &polar.x;
        for p in 0..shape.dim(b) {
            for q in 0..shape.dim(b) {
                let a = BlockElement::unit(&shape, b, p, q);
                let expected = functional_apply(&rho, &a).unwrap();
                let got = vx[p].conj() * polar.x[q];
                prop_assert!((expected - got).norm() <= 1e-8);
            }
        }
    }

    #[test]
    fn compression_preserves_purity(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let shape = random_shape(&mut rng, 3, 5);
        let b = rng.random_range(0..shape.num_blocks());
        let blocks: Vec<CMatrix> = shape
            .dims()
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let r = if i == b { rng.random_range(1..=n) } else { rng.random_range(0..=n) };
                projection(&mut rng, n, r)
            })
            .collect();
        let x = (&blocks[b] * unit_vector(&mut rng, shape.dim(b))).normalize();
        let e = BlockElement::new(shape.clone(), blocks).unwrap();
        let omega = Functional::vector_state(&shape, b, &x).unwrap();
        let compressed = compress_functional(&omega, &e, 1e-10).unwrap();
        prop_assert!(is_pure_state(&compressed, DEFAULT_TOL).is_some());
    }

    #[test]
    fn extremal_distance_is_a_metric(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let shape = random_shape(&mut rng, 3, 4);
        let f: Vec<Functional> = (0..3).map(|_| random_extreme(&mut rng, &shape)).collect();
        let d = |i: usize, j: usize| extremal_distance(&f[i], &f[j]).unwrap();
        prop_assert!(d(0, 0) <= 1e-12);
        prop_assert!((d(0, 1) - d(1, 0)).abs() <= 1e-12);
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-12);
    }

    #[test]
    fn chain_steps_never_exceed_the_bound(seed in any::<u64>(), n in 1usize..8, parallel in any::<bool>()) {
        let mut rng = seeded(seed);
        let omega = unit_vector(&mut rng, n);
        let z = if parallel { &omega * unimodular(&mut rng) } else { unit_vector(&mut rng, n) };
        let chain = pure_state_chain(&omega, &z).unwrap();
        for w in chain.windows(2) {
            prop_assert!((&w[0] - &w[1]).norm_squared() <= 2.0 - SQRT_2 + 1e-12);
        }
        prop_assert!((chain[2].dotc(&z).norm() - 1.0).abs() <= 1e-12);
        prop_assert!((&chain[0] - &omega).norm() == 0.0);
    }
}

// extremal

const FORMS: [Form; 4] = [
    Form::One { transposed: false },
    Form::One { transposed: true },
    Form::Two { adjoint: false },
    Form::Two { adjoint: true },
];

fn small_dims(rng: &mut SeededRng, form: Form, max_k: usize) -> (usize, usize) {
    match form {
        Form::One { .. } => {
            let k = rng.random_range(1..=max_k);
            (k, rng.random_range(1..=k))
        }
        Form::Two { .. } => {
            let h = if max_k >= 9 { rng.random_range(2..=3) } else { 2 };
            (rng.random_range(h * h..=max_k), h)
        }
    }
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn accepted_maps_pull_back_extreme_points(seed in any::<u64>(), form in 0usize..4) {
        let mut rng = seeded(seed);
        let (k, h) = small_dims(&mut rng, FORMS[form], 6);
        let psi = random_block_map(&mut rng, FORMS[form], k, h).to_superoperator();
        let result = classify(&psi, &ClassifyConfig::new(DEFAULT_TOL));
        prop_assert!(result.is_accepted());
        for _ in 0..1000 {
            let u = unit_vector(&mut rng, h) * unimodular(&mut rng);
            let v = unit_vector(&mut rng, h);
            let rho = psi.pullback_vectors(0, &u, &v).unwrap();
            prop_assert!(functional_extremity(&rho, 1e-7).is_extreme());
        }
    }

    #[test]
    fn canonical_forms_are_recognized(seed in any::<u64>(), form in 0usize..4) {
        let mut rng = seeded(seed);
        let (k, h) = small_dims(&mut rng, FORMS[form], 9);
        let psi = random_block_map(&mut rng, FORMS[form], k, h).to_superoperator();
        let result = classify(&psi, &ClassifyConfig::new(DEFAULT_TOL));
        let cert = result.verdicts[0].certificate().expect("accepted");
        prop_assert!(result.residual <= 1e-8);
        if h > 1 {
            prop_assert_eq!(cert.form_label(), FORMS[form].label());
        }
    }

    #[test]
    fn accepted_maps_are_contractive(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let (psi, _) = random_mixed_map(&mut rng);
        prop_assert!(classify(&psi, &ClassifyConfig::new(DEFAULT_TOL)).is_accepted());
        prop_assert!(sampled_induced_norm(&psi, &mut rng, 1000) <= 1.0 + 1e-8);
    }

    #[test]
    fn rejections_carry_replayable_witnesses(seed in any::<u64>(), kind in 0usize..3) {
        let mut rng = seeded(seed);
        let psi = match kind {
            0 => {
                let k = rng.random_range(1..=5);
                let h = rng.random_range(2..=4);
                BlockMap::from_fn(k, h, |_, _| gaussian_matrix(&mut rng, h, h)).to_superoperator()
            }
            1 => {
                let form = FORMS[rng.random_range(0..4)];
                let (k, h) = small_dims(&mut rng, form, 6);
                let h = h.max(2).min(k);
                let clean = random_block_map(&mut rng, form, k.max(h), h);
                perturb(&clean, &mut rng, 1e-2).to_superoperator()
            }
            _ => schur_counterexample(rng.random_range(2..=4)).unwrap(),
        };
        let result = classify(&psi, &ClassifyConfig::new(DEFAULT_TOL).with_seed(seed));
        let rejection = result.first_rejection().expect("rejected");
        prop_assert!(rejection.witness.confirmed);
        prop_assert!(rejection.witness.replay(&psi, DEFAULT_TOL));
    }

    #[test]
    fn certificates_are_gauge_invariant(seed in any::<u64>(), transposed in any::<bool>()) {
        let mut rng = seeded(seed);
        let k = rng.random_range(1..=6);
        let h = rng.random_range(1..=k);
        let lambda = unimodular(&mut rng);
        let u = isometry(&mut rng, k, h);
        let v = isometry(&mut rng, k, h);
        let plain = build_form1(&u, &v, transposed).unwrap();
        let gauged = build_form1(&(&u * lambda), &(&v * lambda), transposed).unwrap();
        let result = classify(&gauged, &ClassifyConfig::new(DEFAULT_TOL));
        let rebuilt = result.verdicts[0].certificate().unwrap().reconstruct().unwrap();
        prop_assert!(rebuilt.max_image_distance(&gauged.restrict(0, 0)) <= 1e-8);
        prop_assert!(plain.max_image_distance(&gauged).unwrap() <= 1e-12);
    }
}

// structure

/// Small maps for the pure-state oracles: Jordan compressions, scaled and
/// rotated Form 1 maps, and Form 2 maps.
fn pure_candidate(rng: &mut SeededRng, kind: usize) -> Superoperator {
    match kind {
        0 => random_jordan_compression(rng),
        1 => {
            let k = rng.random_range(1..=4);
            let h = rng.random_range(1..=k);
            let u = isometry(rng, k, h);
            let v = isometry(rng, k, h);
            build_form1(&u, &v, rng.random_bool(0.5)).unwrap()
        }
        2 => {
            let k = rng.random_range(1..=4);
            let h = rng.random_range(1..=k);
            let u = isometry(rng, k, h);
            build_form1(&u, &(&u * unimodular(rng)), rng.random_bool(0.5)).unwrap()
        }
        _ => {
            let form = FORMS[2 + rng.random_range(0..2)];
            random_block_map(rng, form, 4, 2).to_superoperator()
        }
    }
}

proptest! {
    #![proptest_config(cfg(200))]

    #[test]
    fn pure_preserving_maps_are_extremal_preserving(seed in any::<u64>(), kind in 0usize..4) {
        let mut rng = seeded(seed);
        let psi = pure_candidate(&mut rng, kind);
        if classify_pure_preserving(&psi, DEFAULT_TOL).is_ok() {
            prop_assert!(classify_extremal_global(&psi, DEFAULT_TOL).is_ok());
        }
    }

    #[test]
    fn pure_classifier_agrees_with_sampling(seed in any::<u64>(), kind in 0usize..4) {
        let mut rng = seeded(seed);
        let psi = pure_candidate(&mut rng, kind);
        let exact = classify_pure_preserving(&psi, DEFAULT_TOL).is_ok();
        let sampled = check_pure_preserving_sampled(&psi, 2000, seed, DEFAULT_TOL).is_ok();
        prop_assert_eq!(exact, sampled);
    }

    #[test]
    fn jordan_compressions_are_compressions(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let psi = random_jordan_compression(&mut rng);
        let cert = classify_pure_preserving(&psi, DEFAULT_TOL).unwrap();
        let unit = psi.apply(&BlockElement::identity(psi.in_shape())).unwrap();
        prop_assert!(unit.projection_defect() <= 1e-8);
        prop_assert!(cert.compression_defect(&psi) <= 1e-8);
        for block in &cert.blocks {
            prop_assert!((&block.e * &block.e - &block.e).norm() <= 1e-8);
            prop_assert!((&block.e - block.e.adjoint()).norm() <= 1e-8);
            let k = block.u.nrows();
            for p in 0..k {
                for q in 0..k {
                    let image = psi.image(block.input_block, p, q).block(block.out_block);
                    let lhs = block.identify(image);
                    prop_assert!((lhs - block.compressed(&matrix_unit(k, p, q))).norm() <= 1e-8);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(cfg(100))]

    #[test]
    fn global_decomposition_round_trips(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let (psi, form1_blocks) = random_mixed_map(&mut rng);
        let cert = classify_extremal_global(&psi, DEFAULT_TOL).unwrap();
        prop_assert_eq!(&cert.e_blocks, &form1_blocks);
        let rebuilt = cert.reconstruct().unwrap();
        prop_assert!(rebuilt.max_image_distance(&psi).unwrap() <= 1e-8);
        prop_assert!(cert.assembly_residual <= 1e-8);
        prop_assert!(cert.partial_isometry_defect() <= 1e-10);
        if let Some(w) = cert.partial_isometry() {
            for m in w.blocks() {
                let e1 = m.adjoint() * m;
                prop_assert!((&e1 * &e1 - &e1).norm() <= 1e-10);
            }
        }
    }
}

// disc

fn random_op(rng: &mut SeededRng) -> DiscCompositionOp {
    let dm = rng.random_range(0..=6);
    let ds = rng.random_range(0..=6);
    let psi = BlaschkeProduct::random(rng, dm, 0.95);
    let phi = BlaschkeProduct::random(rng, ds, 0.95);
    DiscCompositionOp::new(psi, phi)
}

proptest! {
    #![proptest_config(cfg(200))]

    #[test]
    fn blaschke_products_are_inner(seed in any::<u64>(), degree in 0usize..=6) {
        let mut rng = seeded(seed);
        let b = BlaschkeProduct::random(&mut rng, degree, 0.95);
        for z in circle_grid(4096) {
            prop_assert!((b.value(z).norm() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn composition_operators_are_contractive(seed in any::<u64>(), degree in 0usize..6) {
        let mut rng = seeded(seed);
        let op = random_op(&mut rng);
        prop_assert!(boundary_extremality_check(&op, 4096, 1e-10).unwrap().accepted);
        // Nonnegative coefficients after a rotation: sup |f| on the circle
        // is exactly their sum.
        let rot = unimodular(&mut rng);
        let mut power = C64::new(1.0, 0.0);
        let mut sup = 0.0;
        let coeffs = (0..=degree)
            .map(|_| {
                let a: f64 = rng.random_range(0.0..1.0);
                sup += a;
                let c = power * a;
                power *= rot;
                c
            })
            .collect();
        let f = Polynomial::new(coeffs);
        let values = comp_op_apply(&op, &f, &circle_grid(4096)).unwrap();
        let image_sup = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(image_sup <= sup + 1e-9);
    }
}

#[test]
fn adjoint_maps_boundary_evaluations_to_boundary_evaluations() {
    let mut rng = seeded(11);
    for _ in 0..20 {
        let op = random_op(&mut rng);
        for _ in 0..4096 {
            let lambda = unimodular(&mut rng);
            let x = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
            let (mu, y) = comp_op_adjoint_on_evaluation(&op, lambda, x).unwrap();
            assert!((mu.norm() - 1.0).abs() <= 1e-10);
            assert!((y.norm() - 1.0).abs() <= 1e-10);
        }
    }
}
