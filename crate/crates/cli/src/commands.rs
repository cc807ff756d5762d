//! The three subcommands as plain functions returning an exit code and the
//! text destined for standard output.

use std::fs;
use std::path::{Path, PathBuf};

use extremal_core::disc::{
    boundary_extremality_check, BlaschkeProduct, DiscCompositionOp, DiscError,
};
use extremal_core::extremal::{
    build_form1, build_form2, classify, BlockMap, BlockVerdict, ClassificationResult,
    ClassifyConfig,
};
use extremal_core::random::{coisometry, isometry, seeded, unit_vector};
use extremal_core::structure::{
    check_pure_preserving_sampled, classify_extremal_global_with, classify_pure_preserving,
    is_jordan_morphism, GlobalCertificate, PureError,
};
use extremal_core::{BlockShape, Superoperator, C64};
use thiserror::Error;

use crate::file::{vector_to_json, FileError, SuperoperatorFile};
use crate::report::{
    to_json, BlockReport, ClassifyReport, DecompositionReport, DiscReport, JordanJson,
    PureWitnessJson, REPORT_VERSION,
};

pub const EXIT_ACCEPT: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_REJECT: i32 = 2;

/// Random pairs tested by the Jordan mode on top of all matrix-unit pairs.
pub const JORDAN_TRIALS: usize = 64;
/// Pure states drawn when looking for a witness against purity.
pub const PURE_SAMPLES: usize = 2000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    File(#[from] FileError),
    #[error("dimension obstruction: form 2 needs k >= h^2, got k = {k}, h = {h}")]
    DimensionObstruction { k: usize, h: usize },
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Disc(#[from] DiscError),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Extremal,
    Pure,
    Jordan,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Self::Extremal => "extremal",
            Self::Pure => "pure",
            Self::Jordan => "jordan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    One,
    OneTransposed,
    Two,
    TwoAdjoint,
}

impl std::str::FromStr for Form {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "1" => Ok(Self::One),
            "1t" => Ok(Self::OneTransposed),
            "2" => Ok(Self::Two),
            "2a" => Ok(Self::TwoAdjoint),
            other => Err(CliError::InvalidArgument(format!(
                "unknown form {other:?}, expected one of 1, 1t, 2, 2a"
            ))),
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

pub struct ClassifyArgs {
    pub path: PathBuf,
    pub tol: f64,
    pub mode: Mode,
    pub format: Format,
    pub seed: u64,
}

pub fn run_classify(args: &ClassifyArgs) -> Result<Outcome, CliError> {
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(CliError::InvalidArgument(format!(
            "--tol must be positive, got {}",
            args.tol
        )));
    }
    let psi = SuperoperatorFile::load(&args.path)?.to_superoperator()?;
    let report = classify_report(&psi, args.mode, args.tol, args.seed);
    let stdout = match args.format {
        Format::Json => to_json(&report),
        Format::Text => report.to_text(),
    };
    let code = if report.accepted { EXIT_ACCEPT } else { EXIT_REJECT };
    Ok(Outcome { code, stdout })
}

pub fn classify_report(psi: &Superoperator, mode: Mode, tol: f64, seed: u64) -> ClassifyReport {
    let config = ClassifyConfig::new(tol).with_seed(seed);
    let mut report = ClassifyReport {
        v: REPORT_VERSION,
        mode: mode.name().to_string(),
        tol,
        seed,
        accepted: false,
        residual: None,
        reason: None,
        blocks: Vec::new(),
        decomposition: None,
        pure_witness: None,
        jordan: None,
    };
    match mode {
        Mode::Extremal => {
            let result = classify(psi, &config);
            report.blocks = block_reports(&result);
            report.residual = Some(result.residual);
            if result.is_accepted() {
                match classify_extremal_global_with(psi, &config) {
                    Ok(global) => {
                        report.decomposition = Some(decomposition(&global));
                        report.accepted = true;
                    }
                    Err(err) => report.reason = Some(err.to_string()),
                }
            }
        }
        Mode::Pure => {
            let result = classify(psi, &config);
            report.blocks = block_reports(&result);
            report.residual = Some(result.residual);
            match classify_pure_preserving(psi, tol) {
                Ok(cert) => {
                    report.decomposition = Some(decomposition(&cert.global));
                    report.accepted = true;
                }
                Err(err) => {
                    if matches!(err, PureError::RotationNontrivial { .. }) {
                        if let Err(w) = check_pure_preserving_sampled(psi, PURE_SAMPLES, seed, tol) {
                            report.pure_witness = Some(PureWitnessJson {
                                out_block: w.out_block,
                                x: vector_to_json(&w.x),
                            });
                        }
                    }
                    report.reason = Some(err.to_string());
                }
            }
        }
        Mode::Jordan => {
            // Only fails on shape mismatches, which a validated file excludes.
            let jr = is_jordan_morphism(psi, JORDAN_TRIALS, seed, tol)
                .expect("validated superoperator has consistent shapes");
            report.accepted = jr.is_jordan;
            report.jordan = Some(JordanJson {
                is_jordan: jr.is_jordan,
                labels: jr.block_labels.iter().map(ToString::to_string).collect(),
                trials: JORDAN_TRIALS,
                star_defect: jr.star_defect,
                jordan_defect: jr.jordan_defect,
                unit_defect: jr.unit_defect,
                compression_defect: jr.compression_defect,
            });
        }
    }
    report
}

fn block_reports(result: &ClassificationResult) -> Vec<BlockReport> {
    result
        .verdicts
        .iter()
        .enumerate()
        .map(|(out_block, verdict)| match verdict {
            BlockVerdict::Accepted {
                certificate,
                residual,
            } => BlockReport {
                out_block,
                accepted: true,
                form: Some(certificate.form_label().to_string()),
                input_block: Some(certificate.input_block()),
                residual: Some(*residual),
                certificate: Some(certificate.into()),
                reason: None,
                witness: None,
            },
            BlockVerdict::Rejected(rejection) => BlockReport {
                out_block,
                accepted: false,
                form: None,
                input_block: None,
                residual: None,
                certificate: None,
                reason: Some(rejection.reason.to_string()),
                witness: Some((&rejection.witness).into()),
            },
        })
        .collect()
}

fn decomposition(global: &GlobalCertificate) -> DecompositionReport {
    DecompositionReport {
        e_blocks: global.e_blocks.clone(),
        degenerate_blocks: global.degenerate_blocks.clone(),
        antimultiplicative: global
            .jordan_blocks
            .iter()
            .map(|j| j.antimultiplicative)
            .collect(),
        assembly_residual: global.assembly_residual,
        partial_isometry_defect: global.partial_isometry_defect(),
    }
}

/// Builds a single-input-block map `M_k → ⊕ M_h` with one output block per
/// requested form, all drawn from one seeded stream.
pub fn generate(forms: &[Form], k: usize, h: usize, seed: u64) -> Result<Superoperator, CliError> {
    if forms.is_empty() {
        return Err(CliError::InvalidArgument("no forms requested".into()));
    }
    if k == 0 || h == 0 {
        return Err(CliError::InvalidArgument(format!(
            "dimensions must be positive, got k = {k}, h = {h}"
        )));
    }
    let mut rng = seeded(seed);
    let mut parts = Vec::with_capacity(forms.len());
    for &form in forms {
        let map = match form {
            Form::One | Form::OneTransposed => {
                if k < h {
                    return Err(CliError::InvalidArgument(format!(
                        "form 1 needs k >= h, got k = {k}, h = {h}"
                    )));
                }
                let u = isometry(&mut rng, k, h);
                let v = isometry(&mut rng, k, h);
                build_form1(&u, &v, form == Form::OneTransposed)
            }
            Form::Two | Form::TwoAdjoint => {
                if k < h * h {
                    return Err(CliError::DimensionObstruction { k, h });
                }
                let frame = coisometry(&mut rng, h * h, k);
                let w = unit_vector(&mut rng, k);
                build_form2(&w, &frame, form == Form::TwoAdjoint)
            }
        };
        let map: BlockMap = map.expect("generated factors are exact").restrict(0, 0);
        parts.push((0, map));
    }
    Ok(Superoperator::from_block_maps(BlockShape::single(k), &parts)
        .expect("generated blocks share the input size"))
}

pub fn parse_forms(list: &str) -> Result<Vec<Form>, CliError> {
    list.split(',').map(str::parse).collect()
}

pub fn run_generate(
    forms: &[Form],
    k: usize,
    h: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let psi = generate(forms, k, h, seed)?;
    let text = SuperoperatorFile::from_superoperator(&psi).to_json();
    match out {
        Some(path) => {
            fs::write(path, &text).map_err(|source| CliError::Write {
                path: path.display().to_string(),
                source,
            })?;
            Ok(Outcome {
                code: EXIT_ACCEPT,
                stdout: String::new(),
            })
        }
        None => Ok(Outcome {
            code: EXIT_ACCEPT,
            stdout: text,
        }),
    }
}

/// Parses `"[0.5, 0.3+0.2i, -i]"`; the brackets are optional.
pub fn parse_zeros(text: &str) -> Result<Vec<C64>, CliError> {
    let inner = text.trim();
    let inner = inner.strip_prefix('[').unwrap_or(inner);
    let inner = inner.strip_suffix(']').unwrap_or(inner);
    inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<C64>()
                .map_err(|_| CliError::InvalidArgument(format!("cannot parse complex number {s:?}")))
        })
        .collect()
}

pub struct DiscArgs {
    pub psi_zeros: Vec<C64>,
    pub psi_phase: f64,
    pub phi_zeros: Vec<C64>,
    pub phi_phase: f64,
    pub grid: usize,
    pub tol: f64,
    pub format: Format,
}

pub fn run_disc(args: &DiscArgs) -> Result<Outcome, CliError> {
    let psi = BlaschkeProduct::new(args.psi_phase, args.psi_zeros.clone())?;
    let phi = BlaschkeProduct::new(args.phi_phase, args.phi_zeros.clone())?;
    let check = boundary_extremality_check(&DiscCompositionOp::new(psi, phi), args.grid, args.tol)?;
    let report = DiscReport {
        v: REPORT_VERSION,
        accepted: check.accepted,
        grid: check.grid,
        tol: args.tol,
        worst_t: check.worst_t,
        worst_deviation: check.worst_deviation,
        multiplier_deviation: check.multiplier_deviation,
        symbol_deviation: check.symbol_deviation,
    };
    let stdout = match args.format {
        Format::Json => to_json(&report),
        Format::Text => report.to_text(),
    };
    let code = if report.accepted { EXIT_ACCEPT } else { EXIT_REJECT };
    Ok(Outcome { code, stdout })
}
