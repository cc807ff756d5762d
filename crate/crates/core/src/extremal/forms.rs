//! The two canonical shapes of a map `M_k → M_h` whose adjoint sends
//! extreme points of the dual ball to extreme points.
//!
//! * Form 1: `ψ(T) = Uᴴ T V` or `ψ(T) = Uᴴ Tᵗ V` with `U`, `V` of size
//!   `k × h` having orthonormal columns.
//! * Form 2: `ψ(T) = mat(F T w)` or `ψ(T) = mat(F Tᴴ w)ᴴ`, where `w` is a
//!   unit vector of `C^k`, `F` is an `h² × k` matrix with orthonormal rows
//!   and `mat` reshapes a vector of length `h²` row-major into `M_h`.

use crate::numkit::{isometry_defect, CMatrix, CVector};

use super::{BlockMap, ExtremalError, Superoperator};

/// Largest isometry or frame defect a certificate may carry.
pub const CERTIFICATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Form1Certificate {
    pub input_block: usize,
    pub u: CMatrix,
    pub v: CMatrix,
    pub transposed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Form2Certificate {
    pub input_block: usize,
    pub w: CVector,
    /// `h² × k`, orthonormal rows.
    pub frame: CMatrix,
    pub adjoint_variant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    Form1(Form1Certificate),
    Form2(Form2Certificate),
}

impl Form1Certificate {
    pub fn k(&self) -> usize {
        self.u.nrows()
    }

    pub fn h(&self) -> usize {
        self.u.ncols()
    }

    pub fn validate(&self) -> Result<(), ExtremalError> {
        let (k, h) = (self.u.nrows(), self.u.ncols());
        if self.v.nrows() != k || self.v.ncols() != h || h == 0 || k < h {
            return Err(ExtremalError::InvalidIsometry(format!(
                "U is {}x{}, V is {}x{}",
                k,
                h,
                self.v.nrows(),
                self.v.ncols()
            )));
        }
        for (name, m) in [("U", &self.u), ("V", &self.v)] {
            let defect = isometry_defect(m);
            if defect > CERTIFICATE_TOL {
                return Err(ExtremalError::InvalidIsometry(format!(
                    "{name} has isometry defect {defect:e}"
                )));
            }
        }
        Ok(())
    }

    /// `ψ(e_pq) = Uᴴ e_pq V`, or `Uᴴ e_qp V` when transposed.
    pub fn reconstruct(&self) -> Result<BlockMap, ExtremalError> {
        self.validate()?;
        let (k, h) = (self.k(), self.h());
        Ok(BlockMap::from_fn(k, h, |p, q| {
            let (row_u, row_v) = if self.transposed { (q, p) } else { (p, q) };
            CMatrix::from_fn(h, h, |a, b| self.u[(row_u, a)].conj() * self.v[(row_v, b)])
        }))
    }
}

impl Form2Certificate {
    pub fn k(&self) -> usize {
        self.frame.ncols()
    }

    pub fn h(&self) -> usize {
        integer_sqrt(self.frame.nrows())
    }

    pub fn validate(&self) -> Result<(), ExtremalError> {
        let rows = self.frame.nrows();
        let h = integer_sqrt(rows);
        if h == 0 || h * h != rows {
            return Err(ExtremalError::InvalidFrame(format!(
                "frame has {rows} rows, which is not a positive square"
            )));
        }
        if self.frame.ncols() < rows {
            return Err(ExtremalError::DimensionObstruction {
                k: self.frame.ncols(),
                h,
            });
        }
        let defect = isometry_defect(&self.frame.adjoint());
        if defect > CERTIFICATE_TOL {
            return Err(ExtremalError::InvalidFrame(format!(
                "frame rows have orthonormality defect {defect:e}"
            )));
        }
        if self.w.len() != self.frame.ncols() {
            return Err(ExtremalError::InvalidFrame(format!(
                "w has length {}, frame has {} columns",
                self.w.len(),
                self.frame.ncols()
            )));
        }
        let norm = self.w.norm();
        if (norm - 1.0).abs() > CERTIFICATE_TOL {
            return Err(ExtremalError::NotUnit { norm });
        }
        Ok(())
    }

    /// `ψ(e_pq)_{ab} = F[ah+b, p] w_q`; the adjoint variant is
    /// `ψ(e_pq)_{ab} = conj(F[bh+a, q] w_p)`.
    pub fn reconstruct(&self) -> Result<BlockMap, ExtremalError> {
        self.validate()?;
        let (k, h) = (self.k(), self.h());
        Ok(BlockMap::from_fn(k, h, |p, q| {
            CMatrix::from_fn(h, h, |a, b| {
                if self.adjoint_variant {
                    (self.frame[(b * h + a, q)] * self.w[p]).conj()
                } else {
                    self.frame[(a * h + b, p)] * self.w[q]
                }
            })
        }))
    }
}

impl Certificate {
    pub fn input_block(&self) -> usize {
        match self {
            Self::Form1(c) => c.input_block,
            Self::Form2(c) => c.input_block,
        }
    }

    pub fn set_input_block(&mut self, block: usize) {
        match self {
            Self::Form1(c) => c.input_block = block,
            Self::Form2(c) => c.input_block = block,
        }
    }

    pub fn reconstruct(&self) -> Result<BlockMap, ExtremalError> {
        match self {
            Self::Form1(c) => c.reconstruct(),
            Self::Form2(c) => c.reconstruct(),
        }
    }

    /// Short label: `1`, `1t`, `2` or `2a`.
    pub fn form_label(&self) -> &'static str {
        match self {
            Self::Form1(c) if c.transposed => "1t",
            Self::Form1(_) => "1",
            Self::Form2(c) if c.adjoint_variant => "2a",
            Self::Form2(_) => "2",
        }
    }
}

pub fn reconstruct(cert: &Certificate) -> Result<BlockMap, ExtremalError> {
    cert.reconstruct()
}

/// The map `T ↦ Uᴴ T V` (or `Uᴴ Tᵗ V`) on a single block.
pub fn build_form1(u: &CMatrix, v: &CMatrix, transposed: bool) -> Result<Superoperator, ExtremalError> {
    let cert = Form1Certificate {
        input_block: 0,
        u: u.clone(),
        v: v.clone(),
        transposed,
    };
    Ok(cert.reconstruct()?.to_superoperator())
}

/// The map `T ↦ mat(F T w)` (or `mat(F Tᴴ w)ᴴ`) on a single block.
pub fn build_form2(
    w: &CVector,
    frame: &CMatrix,
    adjoint_variant: bool,
) -> Result<Superoperator, ExtremalError> {
    let cert = Form2Certificate {
        input_block: 0,
        w: w.clone(),
        frame: frame.clone(),
        adjoint_variant,
    };
    Ok(cert.reconstruct()?.to_superoperator())
}

fn integer_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}
