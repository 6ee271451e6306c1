//! Simulation of fully mixed multi-photon Fock states through sequential
//! beam-splitter networks.
//!
//! The crate is organised bottom-up:
//!
//! * [`fock`] enumerates fixed-photon-number occupation bases.
//! * [`mesh`] builds single-particle transfer matrices for beam splitters and
//!   chains of them, plus the closed-form chain coefficients.
//! * [`lift`] lifts a transfer matrix to the multi-photon Fock space, either
//!   through matrix permanents or by sequential two-mode updates.
//! * [`symop`] is a normal-ordered bosonic operator algebra used as a third,
//!   symbolic evolution backend.
//! * [`states`] holds the mixed input, Bell/NOON targets, partial traces and
//!   fidelities.
//! * [`sweep`] tabulates target probabilities over an angle grid and refines
//!   extrema.
//! * [`cli`] is the command-line front end.

pub mod cli;
pub mod error;
pub mod fock;
pub mod lift;
pub mod mesh;
pub mod states;
pub mod sweep;
pub mod symop;

pub use error::{Error, Result};
pub use fock::{binomial, enumerate_basis, hardcore_vectors, FockBasis, OccupationVector};
pub use lift::{
    apply_bs_sequential, evolve_density, evolve_state, lift_unitary, network_operator, permanent, Backend,
    FockOperator, StateVector,
};
pub use mesh::{
    bs_transfer, closed_form_column, closed_form_f, compose_chain, BeamSplitterSpec, LabelledSum, NetworkSpec,
    TransferMatrix,
};
pub use states::{
    mixed_input, partial_trace, probability, DensityBasis, DensityOperator, ReducedBasis, TargetKind, TargetState,
};
pub use sweep::{find_extrema, sweep_theta, Extremum, ExtremumKind, GridSpec, SweepConfig, SweepResult};
pub use symop::{
    expand_product, general_output_density, general_output_state, transformed_annihilation, transformed_creation,
    OperatorPolynomial,
};

pub use num_complex::Complex64;

/// Dense complex matrix used for every operator in the crate.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `max |(M M†) - I|` over all entries.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    let prod = m * m.adjoint();
    let id = CMatrix::identity(m.nrows(), m.ncols());
    max_abs_diff(&prod, &id)
}
