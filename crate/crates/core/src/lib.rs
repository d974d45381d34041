//! Numerical simulator of a trapped-ion entangled-photon source.
//!
//! Ions sit one per microtrap, each inside its own two-mode microcavity. A
//! magnetic field gradient plus Coulomb repulsion produce an always-on Ising
//! coupling between the ion qubits. Each ion emits one photon through a
//! cavity-assisted Raman process, the ions are then entangled with CNOTs built
//! from the Ising coupling, and measuring the ions projects the photons onto
//! one of `2^N` entangled states.
//!
//! The crate is organised bottom-up:
//!
//! * [`crystal`] ion-chain statics, normal modes, Ising couplings and
//!   gradient-induced Lamb-Dicke parameters.
//! * [`cavity`] conditional (no-jump) dynamics of the Raman emission in a
//!   leaky two-mode cavity, optimal emission time and success probability.
//! * [`gates`] spin-photon statevector, pulse sequences, CNOT compilation and
//!   refocusing of the always-on couplings.
//! * [`protocol`] the end-to-end N-ion pipeline, outcome tables and Monte Carlo
//!   sampling.
//! * [`cli`] configuration files, presets and report bundles behind the
//!   `ion-photon` binary.
//!
//! All internal quantities are SI: metres, kilograms, seconds, and angular
//! frequencies in rad/s.

// NaN must fail the range checks, and small dense kernels index by position.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cavity;
pub mod cli;
pub mod config;
pub mod constants;
pub mod crystal;
pub mod error;
pub mod format;
pub mod gates;
pub mod linalg;
pub mod protocol;

pub use error::{Error, Result};
