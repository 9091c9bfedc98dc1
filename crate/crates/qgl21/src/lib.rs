//! Exact finite-dimensional representations of the quantum superalgebra
//! Uq[gl(2|1)] built from a q-boson plus two-fermion realization.
//!
//! The crate is organised bottom-up:
//!
//! * [`qfield`]: exact scalars in ℚ(z) with z = q^(1/2), q-numbers and q-powers.
//! * [`fock`]: the Fock space of the quantum Heisenberg superalgebra.
//! * [`coeff`]: coefficient functions of the boson number operator.
//! * [`realization`]: the boson-fermion realization Γ of all generators.
//! * [`repbuilder`]: the 8J₁+4 dimensional module, matrices via Γ and via closed forms.
//! * [`structure`]: typical/nontypical classification, invariant subspaces, quotients.
//! * [`verify`]: defining relations, Serre relations and the classical limit on matrices.
//!
//! All arithmetic is exact; there is no floating point anywhere.

pub mod acceptance;
pub mod coeff;
pub mod exec;
pub mod fock;
pub mod matrix;
pub mod qfield;
pub mod realization;
pub mod repbuilder;
pub mod report;
pub mod structure;
pub mod verify;

pub use coeff::{standard_d, CoeffError, CoeffFamily, CoeffFn};
pub use exec::Exec;
pub use fock::{FockMonomial, FockVector, LadderOp};
pub use matrix::{SparseMatrix, SparseVec};
pub use realization::{Generator, RealizationError, RealizationParams};
pub use repbuilder::{build_basis, build_rep, closed_form_rep, BasisLabel, RepError, Representation};
pub use structure::{classify, RepClass, RepKind, Subspace};
pub use verify::VerifyError;
pub use qfield::{qfact, qint, qpow, HalfInt, QFieldError, QScalar};
pub use report::{Check, Report};
