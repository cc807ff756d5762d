//! Jordan *-morphisms and the global shape of extremal-preserving maps.
//!
//! An extremal-preserving map splits along its output blocks into a
//! degenerate part (rank-one-range blocks, Form 2) and a non-degenerate part
//! (Form 1 blocks). On the non-degenerate part the map is a rotated
//! compression of a Jordan *-morphism `φ`: with `ψ_b(A) = Uᴴ α_b(A) V` the
//! partial isometry is `W = V Uᴴ` and
//!
//! ```text
//! V ψ_b(A) Vᴴ = E₂ W φ(A) E₂,   E₁ = WᴴW = UUᴴ,   E₂ = WWᴴ = VVᴴ.
//! ```
//!
//! Pure-state preserving maps are the case `U = V`, where the rotation is
//! trivial and `U ψ(A) Uᴴ = E φ(A) E`.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::algebra::{is_pure_state, AlgebraError, BlockElement, BlockShape, Functional};
use crate::extremal::{
    classify, BlockVerdict, Certificate, ClassifyConfig, ExtremalError, Form1Certificate,
    Rejection, Superoperator,
};
use crate::numkit::{matrix_unit, rank, CMatrix, CVector, C64};
use crate::random::{gaussian_matrix, seeded, unit_vector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructureError {
    #[error("map is not a Jordan *-morphism (labels {labels:?})")]
    NotJordan { labels: Vec<BlockLabel> },
    #[error(transparent)]
    Extremal(#[from] ExtremalError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Multiplicative behaviour of one output block of a map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockLabel {
    Homomorphism,
    Antihomomorphism,
    /// Both identities hold, which happens when the block's range commutes.
    Both,
    Neither,
}

impl fmt::Display for BlockLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Homomorphism => "hom",
            Self::Antihomomorphism => "anti",
            Self::Both => "both",
            Self::Neither => "neither",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JordanReport {
    pub is_jordan: bool,
    /// `ψ(I)`
    pub unit_projection: BlockElement,
    pub block_labels: Vec<BlockLabel>,
    /// Largest `‖ψ(Aᴴ) − ψ(A)ᴴ‖_F` over the tested elements.
    pub star_defect: f64,
    /// Largest `‖ψ(AB + BA) − ψ(A)ψ(B) − ψ(B)ψ(A)‖_F` over the tested pairs.
    pub jordan_defect: f64,
    /// Projection defect of `ψ(I)`.
    pub unit_defect: f64,
    /// Largest `‖ψ(A) − ψ(I)ψ(A)ψ(I)‖_F` over the tested elements.
    pub compression_defect: f64,
}

impl JordanReport {
    /// Whether the Jordan identity and *-preservation hold, regardless of
    /// whether every block is multiplicative or anti-multiplicative.
    pub fn jordan_identity_holds(&self, tol: f64) -> bool {
        self.star_defect <= tol && self.jordan_defect <= tol
    }
}

/// Per-block running maxima of the multiplicativity defects.
struct Defects {
    hom: Vec<f64>,
    anti: Vec<f64>,
    jordan: f64,
}

impl Defects {
    fn new(blocks: usize) -> Self {
        Self {
            hom: vec![0.0; blocks],
            anti: vec![0.0; blocks],
            jordan: 0.0,
        }
    }

    /// Records one pair given `ψ(A)`, `ψ(B)`, `ψ(AB)` and `ψ(BA)`.
    fn record(
        &mut self,
        pa: &BlockElement,
        pb: &BlockElement,
        pab: &BlockElement,
        pba: &BlockElement,
    ) {
        for o in 0..self.hom.len() {
            let ab = pa.block(o) * pb.block(o);
            let ba = pb.block(o) * pa.block(o);
            self.hom[o] = self.hom[o].max((pab.block(o) - &ab).norm());
            self.anti[o] = self.anti[o].max((pab.block(o) - &ba).norm());
            let jordan = (pab.block(o) + pba.block(o) - ab - ba).norm();
            self.jordan = self.jordan.max(jordan);
        }
    }

    fn labels(&self, tol: f64) -> Vec<BlockLabel> {
        self.hom
            .iter()
            .zip(&self.anti)
            .map(|(&h, &a)| match (h <= tol, a <= tol) {
                (true, true) => BlockLabel::Both,
                (true, false) => BlockLabel::Homomorphism,
                (false, true) => BlockLabel::Antihomomorphism,
                (false, false) => BlockLabel::Neither,
            })
            .collect()
    }
}

/// Tests the Jordan identity and *-preservation on every pair of matrix
/// units and on `trials` random pairs, and labels each output block.
pub fn is_jordan_morphism(
    phi: &Superoperator,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<JordanReport, StructureError> {
    let in_shape = phi.in_shape().clone();
    let out_shape = phi.out_shape();
    let zero = BlockElement::zeros(out_shape);
    let units: Vec<(usize, usize, usize)> = (0..in_shape.num_blocks())
        .flat_map(|b| {
            let n = in_shape.dim(b);
            (0..n * n).map(move |idx| (b, idx / n, idx % n))
        })
        .collect();

    let mut defects = Defects::new(out_shape.num_blocks());
    let mut star_defect: f64 = 0.0;
    for &(b, p, q) in &units {
        let image = phi.image(b, p, q);
        star_defect = star_defect.max(image.adjoint().sub(phi.image(b, q, p))?.norm());
        for &(b2, r, s) in &units {
            // e_pq e_rs = δ_qr e_ps and e_rs e_pq = δ_sp e_rq within one block.
            let same = b == b2;
            let pab = if same && q == r { phi.image(b, p, s) } else { &zero };
            let pba = if same && s == p { phi.image(b, r, q) } else { &zero };
            defects.record(image, phi.image(b2, r, s), pab, pba);
        }
    }

    let unit_projection = phi.apply(&BlockElement::identity(&in_shape))?;
    let unit_defect = unit_projection.projection_defect();
    let compress = |x: &BlockElement| -> Result<f64, StructureError> {
        let sandwiched = unit_projection.mul(x)?.mul(&unit_projection)?;
        Ok(x.sub(&sandwiched)?.norm())
    };
    let mut compression_defect: f64 = 0.0;
    for &(b, p, q) in &units {
        compression_defect = compression_defect.max(compress(phi.image(b, p, q))?);
    }

    let mut rng = seeded(seed);
    for _ in 0..trials {
        let a = random_element(&mut rng, &in_shape);
        let b = random_element(&mut rng, &in_shape);
        let pa = phi.apply(&a)?;
        let pb = phi.apply(&b)?;
        let pab = phi.apply(&a.mul(&b)?)?;
        let pba = phi.apply(&b.mul(&a)?)?;
        defects.record(&pa, &pb, &pab, &pba);
        let star = phi.apply(&a.adjoint())?.sub(&pa.adjoint())?.norm();
        star_defect = star_defect.max(star);
        compression_defect = compression_defect.max(compress(&pa)?);
    }

    let block_labels = defects.labels(tol);
    let is_jordan = star_defect <= tol
        && defects.jordan <= tol
        && unit_defect <= tol
        && compression_defect <= tol
        && !block_labels.contains(&BlockLabel::Neither);
    Ok(JordanReport {
        is_jordan,
        unit_projection,
        block_labels,
        star_defect,
        jordan_defect: defects.jordan,
        unit_defect,
        compression_defect,
    })
}

/// Random element with Frobenius norm one.
fn random_element<R: Rng + ?Sized>(rng: &mut R, shape: &BlockShape) -> BlockElement {
    let blocks = shape
        .dims()
        .iter()
        .map(|&n| gaussian_matrix(rng, n, n))
        .collect();
    let x = BlockElement::new(shape.clone(), blocks).expect("blocks match the shape");
    let norm = x.norm();
    x.scale(C64::new(1.0 / norm, 0.0))
}

/// Splits the output blocks of a Jordan *-morphism into the multiplicative
/// and the anti-multiplicative part. Blocks with commutative range go to
/// the multiplicative side.
pub fn split_hom_antihom(
    phi: &Superoperator,
    tol: f64,
) -> Result<(Vec<usize>, Vec<usize>), StructureError> {
    let report = is_jordan_morphism(phi, 0, 0, tol)?;
    if !report.is_jordan {
        return Err(StructureError::NotJordan {
            labels: report.block_labels,
        });
    }
    let (hom, anti): (Vec<usize>, Vec<usize>) = (0..report.block_labels.len())
        .partition(|&o| report.block_labels[o] != BlockLabel::Antihomomorphism);
    Ok((hom, anti))
}

/// Non-degenerate data of one Form 1 output block.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanBlock {
    pub out_block: usize,
    pub input_block: usize,
    /// `α_b` is the transpose on its input block rather than the identity.
    pub antimultiplicative: bool,
    pub u: CMatrix,
    pub v: CMatrix,
    /// `W = V Uᴴ`
    pub w: CMatrix,
    /// `E₁ = WᴴW = UUᴴ`
    pub e1: CMatrix,
    /// `E₂ = WWᴴ = VVᴴ`
    pub e2: CMatrix,
}

impl JordanBlock {
    fn new(out_block: usize, cert: &Form1Certificate) -> Self {
        let w = &cert.v * cert.u.adjoint();
        Self {
            out_block,
            input_block: cert.input_block,
            antimultiplicative: cert.transposed,
            e1: w.adjoint() * &w,
            e2: &w * w.adjoint(),
            u: cert.u.clone(),
            v: cert.v.clone(),
            w,
        }
    }

    /// `α_b` on the input block.
    pub fn alpha(&self, a: &CMatrix) -> CMatrix {
        if self.antimultiplicative {
            a.transpose()
        } else {
            a.clone()
        }
    }

    /// `E₂ W α_b(A) E₂`
    pub fn lifted(&self, a: &CMatrix) -> CMatrix {
        &self.e2 * &self.w * self.alpha(a) * &self.e2
    }

    /// `V T Vᴴ`, the spatial identification of `M_h` with `E₂ M_k E₂`.
    pub fn identify(&self, t: &CMatrix) -> CMatrix {
        &self.v * t * self.v.adjoint()
    }
}

/// Global decomposition of an extremal-preserving map.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalCertificate {
    pub in_shape: BlockShape,
    pub out_shape: BlockShape,
    /// Output blocks of the non-degenerate part, ascending.
    pub e_blocks: Vec<usize>,
    /// Output blocks of the degenerate part, ascending.
    pub degenerate_blocks: Vec<usize>,
    /// One certificate per output block.
    pub certificates: Vec<Certificate>,
    /// Non-degenerate data in the order of `e_blocks`.
    pub jordan_blocks: Vec<JordanBlock>,
    /// Largest matrix-unit residual of the per-block classification.
    pub residual: f64,
    /// Largest `‖V ψ_b(e_pq) Vᴴ − E₂ W φ(e_pq) E₂‖_F` over the E-blocks.
    pub assembly_residual: f64,
}

impl GlobalCertificate {
    /// Block sizes of `ℛ = ⊕_{b∈E} M_{k_b}`, or `None` when `E` is empty.
    pub fn target_shape(&self) -> Option<BlockShape> {
        let dims = self.jordan_blocks.iter().map(|j| j.u.nrows()).collect();
        BlockShape::new(dims).ok()
    }

    /// The Jordan *-morphism `φ = ⊕ α_b` into `ℛ`.
    pub fn jordan_map(&self) -> Option<Superoperator> {
        let target = self.target_shape()?;
        let map = Superoperator::from_fn(self.in_shape.clone(), target.clone(), |b, p, q| {
            let mut e = BlockElement::zeros(&target);
            for (slot, j) in self.jordan_blocks.iter().enumerate() {
                if j.input_block == b {
                    let (r, s) = if j.antimultiplicative { (q, p) } else { (p, q) };
                    e.block_mut(slot)[(r, s)] = C64::new(1.0, 0.0);
                }
            }
            e
        });
        Some(map.expect("jordan map images match the target shape"))
    }

    /// `W = ⊕ V_b U_bᴴ` as an element of `ℛ`.
    pub fn partial_isometry(&self) -> Option<BlockElement> {
        let target = self.target_shape()?;
        let blocks = self.jordan_blocks.iter().map(|j| j.w.clone()).collect();
        BlockElement::new(target, blocks).ok()
    }

    /// `‖WᴴWWᴴW − WᴴW‖_F`
    pub fn partial_isometry_defect(&self) -> f64 {
        self.jordan_blocks
            .iter()
            .map(|j| (&j.e1 * &j.e1 - &j.e1).norm())
            .fold(0.0, f64::max)
    }

    /// Rebuilds the whole map from the certificates.
    pub fn reconstruct(&self) -> Result<Superoperator, ExtremalError> {
        let parts = self
            .certificates
            .iter()
            .map(|c| Ok((c.input_block(), c.reconstruct()?)))
            .collect::<Result<Vec<_>, ExtremalError>>()?;
        Superoperator::from_block_maps(self.in_shape.clone(), &parts)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GlobalError {
    #[error("output block {out_block} rejected: {}", rejection.reason)]
    Rejected { out_block: usize, rejection: Rejection },
    #[error("output block {out_block}: recovered representation fails {what} (defect {defect:e})")]
    Assembly {
        out_block: usize,
        what: &'static str,
        defect: f64,
    },
}

/// Classifies every output block and assembles the global decomposition.
pub fn classify_extremal_global(
    psi: &Superoperator,
    tol: f64,
) -> Result<GlobalCertificate, GlobalError> {
    classify_extremal_global_with(psi, &ClassifyConfig::new(tol))
}

pub fn classify_extremal_global_with(
    psi: &Superoperator,
    config: &ClassifyConfig,
) -> Result<GlobalCertificate, GlobalError> {
    let result = classify(psi, config);
    let mut certificates = Vec::with_capacity(result.verdicts.len());
    for (out_block, verdict) in result.verdicts.into_iter().enumerate() {
        match verdict {
            BlockVerdict::Accepted { certificate, .. } => certificates.push(certificate),
            BlockVerdict::Rejected(rejection) => {
                return Err(GlobalError::Rejected {
                    out_block,
                    rejection,
                })
            }
        }
    }

    let mut e_blocks = Vec::new();
    let mut degenerate_blocks = Vec::new();
    let mut jordan_blocks = Vec::new();
    let mut assembly_residual: f64 = 0.0;
    for (out_block, cert) in certificates.iter().enumerate() {
        let Certificate::Form1(f) = cert else {
            degenerate_blocks.push(out_block);
            continue;
        };
        let block = JordanBlock::new(out_block, f);
        check_alpha(&block, config.tol)?;
        let k = psi.in_shape().dim(block.input_block);
        for p in 0..k {
            for q in 0..k {
                let image = psi.image(block.input_block, p, q).block(out_block);
                let lifted = block.lifted(&matrix_unit(k, p, q));
                assembly_residual = assembly_residual.max((block.identify(image) - lifted).norm());
            }
        }
        e_blocks.push(out_block);
        jordan_blocks.push(block);
    }
    Ok(GlobalCertificate {
        in_shape: psi.in_shape().clone(),
        out_shape: psi.out_shape().clone(),
        e_blocks,
        degenerate_blocks,
        certificates,
        jordan_blocks,
        residual: result.residual,
        assembly_residual,
    })
}

/// Checks that `α_b` is multiplicative (or anti-multiplicative) on matrix
/// units and that its images span the whole block.
fn check_alpha(block: &JordanBlock, tol: f64) -> Result<(), GlobalError> {
    let k = block.u.nrows();
    let images: Vec<CMatrix> = (0..k * k)
        .map(|idx| block.alpha(&matrix_unit(k, idx / k, idx % k)))
        .collect();
    let mut defect: f64 = 0.0;
    for x in 0..k * k {
        for y in 0..k * k {
            let (p, q, r, s) = (x / k, x % k, y / k, y % k);
            let product = if q == r { matrix_unit(k, p, s) } else { CMatrix::zeros(k, k) };
            let expected = if block.antimultiplicative {
                &images[y] * &images[x]
            } else {
                &images[x] * &images[y]
            };
            defect = defect.max((block.alpha(&product) - expected).norm());
        }
    }
    if defect > tol {
        return Err(GlobalError::Assembly {
            out_block: block.out_block,
            what: "the (anti)multiplicativity test",
            defect,
        });
    }
    let span = CMatrix::from_fn(k * k, k * k, |row, col| images[col][(row / k, row % k)]);
    let span_rank = rank(&span, tol);
    if span_rank != k * k {
        return Err(GlobalError::Assembly {
            out_block: block.out_block,
            what: "the density test",
            defect: (k * k - span_rank) as f64,
        });
    }
    Ok(())
}

/// One block of a pure-state preserving map: `ψ_b(A) = Uᴴ α_b(A) U`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureBlock {
    pub out_block: usize,
    pub input_block: usize,
    pub antimultiplicative: bool,
    pub u: CMatrix,
    /// `E = UUᴴ`
    pub e: CMatrix,
}

impl PureBlock {
    /// `E α_b(A) E`
    pub fn compressed(&self, a: &CMatrix) -> CMatrix {
        let alpha = if self.antimultiplicative { a.transpose() } else { a.clone() };
        &self.e * alpha * &self.e
    }

    /// `U T Uᴴ`
    pub fn identify(&self, t: &CMatrix) -> CMatrix {
        &self.u * t * self.u.adjoint()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureCertificate {
    pub global: GlobalCertificate,
    pub blocks: Vec<PureBlock>,
}

impl PureCertificate {
    pub fn jordan_map(&self) -> Option<Superoperator> {
        self.global.jordan_map()
    }

    /// Largest `‖U ψ_b(e_pq) Uᴴ − E φ(e_pq) E‖_F` plus the largest
    /// `‖U ψ_b(I) Uᴴ − E‖_F`.
    pub fn compression_defect(&self, psi: &Superoperator) -> f64 {
        let mut worst: f64 = 0.0;
        for block in &self.blocks {
            let k = block.u.nrows();
            let mut unit_image = CMatrix::zeros(block.u.ncols(), block.u.ncols());
            for p in 0..k {
                for q in 0..k {
                    let image = psi.image(block.input_block, p, q).block(block.out_block);
                    if p == q {
                        unit_image += image;
                    }
                    let d = (block.identify(image) - block.compressed(&matrix_unit(k, p, q))).norm();
                    worst = worst.max(d);
                }
            }
            worst = worst.max((block.identify(&unit_image) - &block.e).norm());
        }
        worst
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PureError {
    #[error("degenerate output blocks present: {blocks:?}")]
    DegenerateBlockPresent { blocks: Vec<usize> },
    #[error("output block {out_block} carries a nontrivial rotation (‖UᴴV − I‖ = {defect:e})")]
    RotationNontrivial { out_block: usize, defect: f64 },
    #[error(transparent)]
    Global(#[from] GlobalError),
}

/// Accepts exactly the compressions `A ↦ Uᴴ φ(A) U` of Jordan *-morphisms.
pub fn classify_pure_preserving(
    psi: &Superoperator,
    tol: f64,
) -> Result<PureCertificate, PureError> {
    let global = classify_extremal_global(psi, tol)?;
    if !global.degenerate_blocks.is_empty() {
        return Err(PureError::DegenerateBlockPresent {
            blocks: global.degenerate_blocks.clone(),
        });
    }
    let mut blocks = Vec::with_capacity(global.jordan_blocks.len());
    for j in &global.jordan_blocks {
        let h = j.u.ncols();
        let defect = (j.u.adjoint() * &j.v - CMatrix::identity(h, h)).norm();
        if defect > 10.0 * tol {
            return Err(PureError::RotationNontrivial {
                out_block: j.out_block,
                defect,
            });
        }
        blocks.push(PureBlock {
            out_block: j.out_block,
            input_block: j.input_block,
            antimultiplicative: j.antimultiplicative,
            u: j.u.clone(),
            e: j.e1.clone(),
        });
    }
    Ok(PureCertificate { global, blocks })
}

/// Pure state `⟨· x, x⟩` on `out_block` whose pull-back is not pure.
#[derive(Debug, Clone, PartialEq)]
pub struct PureWitness {
    pub out_block: usize,
    pub x: CVector,
    pub pulled_back: Functional,
}

/// Draws random pure states on the output algebra and checks that each
/// pulls back to a pure state. Returns the first failure.
pub fn check_pure_preserving_sampled(
    psi: &Superoperator,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<(), PureWitness> {
    let out_shape = psi.out_shape();
    let mut rng = seeded(seed);
    for _ in 0..samples.max(1) {
        let out_block = rng.random_range(0..out_shape.num_blocks());
        let x = unit_vector(&mut rng, out_shape.dim(out_block));
        let pulled_back = psi
            .pullback_vectors(out_block, &x, &x)
            .expect("sampled vectors fit the output block");
        if is_pure_state(&pulled_back, tol).is_none() {
            return Err(PureWitness {
                out_block,
                x,
                pulled_back,
            });
        }
    }
    Ok(())
}
