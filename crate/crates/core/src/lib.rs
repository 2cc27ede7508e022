//! Exact dynamics of few-photon light coupled to ensembles of two-level
//! atoms, in the regime where closed-form solutions exist.
//!
//! The library has two deliberately independent halves:
//!
//! * [`closedform`] evolves states analytically on the invariant
//!   two-dimensional subspaces of the one-photon, Raman, M-photon and
//!   three-photon parametric interactions, resting on the sparse state
//!   machinery in [`hilbert`] and the symmetric-sector algebra in [`dicke`];
//! * [`oracle`] builds the same Hamiltonians as dense matrices and evolves
//!   by Hermitian eigendecomposition, providing the ground truth the
//!   analytic route is verified against ([`verify`]).
//!
//! On top of the closed forms, [`protocols`] implements W-state preparation
//! and disentanglement, Dicke ladder steps, optical qubit storage and
//! retrieval, the two-ensemble cascade and the atomic chain. [`serialize`]
//! fixes the JSON schemas shared with the command-line front end.

pub mod closedform;
pub mod dicke;
pub mod hilbert;
pub mod oracle;
pub mod protocols;
pub mod serialize;
pub mod verify;

pub use hilbert::{
    AtomLabel, AtomRep, BasisLabel, ModeSpec, SpaceConfig, StateVector,
};
pub use num_complex::Complex64;
