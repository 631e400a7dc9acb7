//! Entanglement detection from matrices of moments of bosonic ladder
//! operators.
//!
//! States live on a truncated Fock space ([`fock`]). From a state and an
//! operator class `f = (f_1, ..., f_n)` one builds the Hermitian matrix
//! `M_ij = <f_i^dag f_j>` ([`moments`]), reorders it by partial
//! transposition or realignment ([`reorder`]), applies positive maps to one
//! tensor factor ([`posmaps`]) and turns the results into verdicts
//! ([`criteria`]). [`reconstruct`] goes the other way, from moments back to
//! a density matrix.
//!
//! Everything numerical is generic over `f32`/`f64` through [`Real`]; the
//! `*64` and `*32` aliases below fix the scalar.
//!
//! ```
//! use momsep::{criteria, library};
//!
//! let singlet = library::singlet::<f64>();
//! let v = criteria::pt_norm_test(&singlet, &library::class_basic(), 1e-9).unwrap();
//! assert!(v.is_entangled());
//! assert!((v.value() - (1.0 + 2f64.sqrt()) / 2.0).abs() < 1e-9);
//! ```

pub mod criteria;
pub mod error;
pub mod fock;
pub mod library;
pub mod linalg;
pub mod moments;
pub mod posmaps;
pub mod random;
pub mod reconstruct;
pub mod regression;
pub mod reorder;
pub mod scalar;

pub use criteria::{Outcome, Provenance, Verdict};
pub use error::{Error, Result};
pub use fock::{
    make_coherent_superposition, make_fock_state, superpose, DensityMatrix, HermitianOperator, ModeCutoffs,
    MonomialSpec, StateVector,
};
pub use linalg::{CMatrix, CVector};
pub use moments::{
    build_generic_moment_matrix, build_moment_matrix, build_moment_matrix_of_pt_state, moment, Expectation,
    GenericClass, MomentMatrix, OperatorClass, Side, State,
};
pub use posmaps::{BreuerParams, CatalogMap, ChoiParams, KossakowskiParams, PositiveMap};
pub use reconstruct::{MomentSource, MomentTable};
pub use reorder::{nu_gamma, nu_r, realign, RealignedMatrix};
pub use scalar::{Real, C};

pub type StateVector64 = StateVector<f64>;
pub type StateVector32 = StateVector<f32>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type DensityMatrix32 = DensityMatrix<f32>;
pub type State64 = State<f64>;
pub type State32 = State<f32>;
pub type MomentMatrix64 = MomentMatrix<f64>;
pub type MomentMatrix32 = MomentMatrix<f32>;
pub type MomentTable64 = MomentTable<f64>;
pub type MomentTable32 = MomentTable<f32>;
pub type Verdict64 = Verdict<f64>;
pub type Verdict32 = Verdict<f32>;
pub type CMatrix64 = CMatrix<f64>;
pub type CMatrix32 = CMatrix<f32>;
pub type Complex64 = C<f64>;
pub type Complex32 = C<f32>;
