//! Resonant two-atom Tavis-Cummings dynamics and an unambiguous atomic Bell
//! measurement built from coherent-state projections of two cavity fields.
//!
//! The crate is organised bottom-up:
//!
//! - [`fock`]: field, atomic and joint state vectors, coherent states,
//!   displacement and partial traces.
//! - [`dynamics`]: closed-form evolution under the interaction-picture
//!   Hamiltonian `g Σ (σ⁺a + σ⁻a†)` plus a block-diagonalisation propagator
//!   used as an independent check.
//! - [`approx`]: the large-photon-number approximate state vector.
//! - [`overlaps`]: overlaps of the rotating field branches with `|±α⟩`.
//! - [`wigner`]: Wigner function of a reduced field state on a grid.
//! - [`protocol`]: the two-cavity postselection sequence and its sweeps.
//! - [`sweep`]: tabular results and the shared CSV number format.
//! - [`config`] / [`cli`]: JSON run configuration and the CSV-emitting
//!   subcommands behind the `tavis-bell` binary.
//!
//! Time is measured in units of `1/g`, and most entry points take the scaled
//! time `τ = t / t_r` where `t_r` is the revival time.

pub mod approx;
pub mod cli;
pub mod config;
pub mod dynamics;
mod error;
pub mod fock;
pub mod overlaps;
pub mod protocol;
pub mod sweep;
pub mod wigner;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
