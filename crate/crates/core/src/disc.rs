//! Composition-multiplication operators `f ↦ ψ · (f ∘ φ)` on the disc
//! algebra.
//!
//! Extreme points of the dual ball of the disc algebra are the functionals
//! `λ δ_x` with `|λ| = 1` and `|x| = 1`. The adjoint sends `λ δ_x` to
//! `λ ψ(x) δ_{φ(x)}`, so the operator preserves extreme points exactly when
//! `ψ` and `φ` are unimodular on the circle. Finite Blaschke products are the
//! first-class inputs; polynomials stand in for arbitrary boundary data.

use std::f64::consts::TAU;

use rand::Rng;
use thiserror::Error;

use crate::numkit::C64;

/// Slack allowed when a point is required to lie in the closed disc or on
/// the circle.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Largest polynomial degree accepted by [`comp_op_apply`].
pub const MAX_DEGREE: usize = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiscError {
    #[error("point {z} lies outside the closed unit disc")]
    OutsideDisc { z: C64 },
    #[error("zero {zero} (index {index}) is not strictly inside the unit disc")]
    ZeroOutsideDisc { index: usize, zero: C64 },
    #[error("point {x} is not on the unit circle")]
    NotBoundary { x: C64 },
    #[error("scalar {lambda} is not unimodular")]
    NotUnimodular { lambda: C64 },
    #[error("grid must have at least 8 points, got {0}")]
    GridTooSmall(usize),
    #[error("polynomial degree {0} exceeds {MAX_DEGREE}")]
    DegreeTooLarge(usize),
}

/// Anything that can be evaluated on the closed disc.
pub trait DiscFunction {
    fn value(&self, z: C64) -> C64;
}

/// `e^{iθ} ∏ (z − aᵢ) / (1 − āᵢ z)`
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    phase: f64,
    zeros: Vec<C64>,
}

impl BlaschkeProduct {
    pub fn new(phase: f64, zeros: Vec<C64>) -> Result<Self, DiscError> {
        for (index, &zero) in zeros.iter().enumerate() {
            if !(zero.norm() < 1.0 - BOUNDARY_TOL) {
                return Err(DiscError::ZeroOutsideDisc { index, zero });
            }
        }
        Ok(Self { phase, zeros })
    }

    /// `z ↦ z`
    pub fn identity() -> Self {
        Self {
            phase: 0.0,
            zeros: vec![C64::new(0.0, 0.0)],
        }
    }

    /// The unimodular constant `e^{iθ}`.
    pub fn constant(phase: f64) -> Self {
        Self {
            phase,
            zeros: Vec::new(),
        }
    }

    /// Random product of the given degree with zeros of modulus below
    /// `radius`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, degree: usize, radius: f64) -> Self {
        let zeros = (0..degree)
            .map(|_| {
                let r = radius * rng.random::<f64>().sqrt();
                C64::from_polar(r, rng.random_range(0.0..TAU))
            })
            .collect();
        Self {
            phase: rng.random_range(0.0..TAU),
            zeros,
        }
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn eval(&self, z: C64) -> Result<C64, DiscError> {
        if z.norm() > 1.0 + BOUNDARY_TOL {
            return Err(DiscError::OutsideDisc { z });
        }
        Ok(self.value(z))
    }
}

impl DiscFunction for BlaschkeProduct {
    fn value(&self, z: C64) -> C64 {
        self.zeros
            .iter()
            .fold(C64::from_polar(1.0, self.phase), |acc, &a| {
                acc * (z - a) / (C64::new(1.0, 0.0) - a.conj() * z)
            })
    }
}

pub fn blaschke_eval(b: &BlaschkeProduct, z: C64) -> Result<C64, DiscError> {
    b.eval(z)
}

/// Polynomial with coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

impl DiscFunction for Polynomial {
    fn value(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Multiplier {
    Blaschke(BlaschkeProduct),
    /// Arbitrary boundary data, used to exhibit non-inner multipliers.
    Sampled(Polynomial),
}

impl DiscFunction for Multiplier {
    fn value(&self, z: C64) -> C64 {
        match self {
            Self::Blaschke(b) => b.value(z),
            Self::Sampled(p) => p.value(z),
        }
    }
}

/// `Φ = M_ψ C_φ`, i.e. `Φ(f) = ψ · (f ∘ φ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscCompositionOp {
    pub multiplier: Multiplier,
    pub symbol: BlaschkeProduct,
}

impl DiscCompositionOp {
    pub fn new(multiplier: BlaschkeProduct, symbol: BlaschkeProduct) -> Self {
        Self {
            multiplier: Multiplier::Blaschke(multiplier),
            symbol,
        }
    }

    pub fn with_sampled_multiplier(multiplier: Polynomial, symbol: BlaschkeProduct) -> Self {
        Self {
            multiplier: Multiplier::Sampled(multiplier),
            symbol,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryReport {
    pub accepted: bool,
    /// Grid angle where the deviation is largest.
    pub worst_t: f64,
    /// Largest `||ψ(e^{it})| − 1|` or `||φ(e^{it})| − 1|` on the grid.
    pub worst_deviation: f64,
    pub multiplier_deviation: f64,
    pub symbol_deviation: f64,
    pub grid: usize,
}

/// Samples `|ψ|` and `|φ|` at `grid` equally spaced points of the circle
/// and accepts iff both stay within `tol` of one.
pub fn boundary_extremality_check(
    op: &DiscCompositionOp,
    grid: usize,
    tol: f64,
) -> Result<BoundaryReport, DiscError> {
    if grid < 8 {
        return Err(DiscError::GridTooSmall(grid));
    }
    let mut report = BoundaryReport {
        accepted: false,
        worst_t: 0.0,
        worst_deviation: 0.0,
        multiplier_deviation: 0.0,
        symbol_deviation: 0.0,
        grid,
    };
    for k in 0..grid {
        let t = TAU * k as f64 / grid as f64;
        let x = C64::from_polar(1.0, t);
        let dm = (op.multiplier.value(x).norm() - 1.0).abs();
        let ds = (op.symbol.value(x).norm() - 1.0).abs();
        report.multiplier_deviation = report.multiplier_deviation.max(dm);
        report.symbol_deviation = report.symbol_deviation.max(ds);
        let d = dm.max(ds);
        if d > report.worst_deviation {
            report.worst_deviation = d;
            report.worst_t = t;
        }
    }
    report.accepted = report.worst_deviation <= tol;
    Ok(report)
}

/// `Φ*(λ δ_x) = λ ψ(x) δ_{φ(x)}`, returned as `(λ ψ(x), φ(x))`.
pub fn comp_op_adjoint_on_evaluation(
    op: &DiscCompositionOp,
    lambda: C64,
    x: C64,
) -> Result<(C64, C64), DiscError> {
    if (lambda.norm() - 1.0).abs() > BOUNDARY_TOL {
        return Err(DiscError::NotUnimodular { lambda });
    }
    if (x.norm() - 1.0).abs() > BOUNDARY_TOL {
        return Err(DiscError::NotBoundary { x });
    }
    Ok((lambda * op.multiplier.value(x), op.symbol.value(x)))
}

/// `ψ(x) f(φ(x))` at every sample point.
pub fn comp_op_apply(
    op: &DiscCompositionOp,
    f: &Polynomial,
    points: &[C64],
) -> Result<Vec<C64>, DiscError> {
    if f.degree() > MAX_DEGREE {
        return Err(DiscError::DegreeTooLarge(f.degree()));
    }
    Ok(points
        .iter()
        .map(|&x| op.multiplier.value(x) * f.value(op.symbol.value(x)))
        .collect())
}

/// `n` equally spaced points of the unit circle starting at 1.
pub fn circle_grid(n: usize) -> Vec<C64> {
    (0..n)
        .map(|k| C64::from_polar(1.0, TAU * k as f64 / n as f64))
        .collect()
}
