//! State representations for one cavity mode and two two-level atoms.
//!
//! Atomic computational states are ordered `|0,0⟩, |0,1⟩, |1,0⟩, |1,1⟩` with
//! `|i,j⟩ = |i⟩_A |j⟩_B` (0 = ground, 1 = excited). The Bell basis is ordered
//! `Ψ⁻, Ψ⁺, Φ⁻_φ, Φ⁺_φ` where
//!
//! ```text
//! Ψ±   = (|0,1⟩ ± |1,0⟩) / √2
//! Φ±_φ = (e^{-iφ}|0,0⟩ ± e^{iφ}|1,1⟩) / √2
//! ```

mod atomic;
mod density;
pub(crate) mod displacement;
mod field;
mod joint;

pub use atomic::{bell_basis_matrix, bell_to_computational, computational_to_bell, AtomicState};
pub use density::{partial_trace_field, DensityMatrix};
pub use displacement::{displace, displacement_matrix};
pub use field::{coherent_state, default_cutoff, inner_product, poisson_tail, FieldState};
pub use joint::{AtomBasis, JointState};

/// Normalization tolerance for states declared normalized.
pub const NORM_TOL: f64 = 1e-10;

/// Largest Poisson mass allowed beyond the Fock cutoff of a coherent state.
pub const TAIL_BOUND: f64 = 1e-12;

/// Largest norm allowed to leak out of the truncated space under displacement.
pub const DISPLACE_TAIL_BOUND: f64 = 1e-8;
