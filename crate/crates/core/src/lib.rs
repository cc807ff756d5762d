//! Linear maps between finite-dimensional C*-algebras whose adjoints send
//! extreme points of the dual unit ball to extreme points.
//!
//! Algebras are finite direct sums of full matrix algebras `⊕ᵢ M_{nᵢ}`.
//! The crate decides, block by block, whether a map has this property and
//! when it does emits a certificate: a rotated compression `T ↦ Uᴴ T V`
//! (possibly transposed) or a rank-one-range map `T ↦ mat(F T w)`.
//! On top of that sit the global decomposition into a Jordan part and a
//! degenerate part, the pure-state-preserving special case, and the
//! commutative case of composition operators on the disc algebra.

pub mod algebra;
pub mod disc;
pub mod extremal;
pub mod numkit;
pub mod random;
pub mod structure;

pub use algebra::{BlockElement, BlockShape, Functional};
pub use extremal::{BlockMap, Certificate, Superoperator};
pub use numkit::{CMatrix, CVector, C64, DEFAULT_TOL};
