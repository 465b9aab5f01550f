//! Large-`n̄` approximation of the joint state vector.
//!
//! Expanding `ω_n` to second order around `n̄+1` splits the state into three
//! branches, each an atomic Bell superposition times a field state:
//!
//! ```text
//! (c⁻Ψ⁻ + d⁻Φ⁻_φ) |α⟩
//! + (c⁺-d⁺)/2 · (Ψ⁺ - Φ⁺_{φ+2πτ}) |α⁺_τ⟩
//! + (c⁺+d⁺)/2 · (Ψ⁺ + Φ⁺_{φ-2πτ}) |α⁻_τ⟩
//! ```
//!
//! all divided by `N_τ`, with `φ = arg α` and `|α^±_τ⟩` from
//! [`photon_branch`]. The expansion holds for `τ ≪ √n̄/(2π)`.

use std::f64::consts::PI;

use crate::dynamics::{evolve_exact, unscaled_time, ModelParams};
use crate::fock::{coherent_state, AtomBasis, AtomicState, FieldState, JointState};
use crate::overlaps::{branch_phase, overlap_exact, OverlapParams};
use crate::{Error, Result, C64};

/// `|α^±_τ⟩`: the coherent amplitudes with level-dependent phases
/// `e^{±i2πτ[n̄+1+n-(n-n̄)²/(4n̄+2)]}`.
pub fn photon_branch(alpha: C64, tau: f64, sign: i32, cutoff: usize) -> Result<FieldState> {
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidParameter(format!("sign must be ±1, got {sign}")));
    }
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be non-negative, got {tau}")));
    }
    let nbar = alpha.norm_sqr();
    let base = coherent_state(alpha, cutoff)?;
    let s = sign as f64;
    let amplitudes = base
        .into_amplitudes()
        .into_iter()
        .enumerate()
        .map(|(n, p)| p * C64::from_polar(1.0, s * branch_phase(nbar, tau, n)))
        .collect();
    FieldState::from_amplitudes(amplitudes)
}

/// `τ < √n̄/(2π)`, where the second-order expansion of `ω_n` is valid.
pub fn within_validity(nbar: f64, tau: f64) -> bool {
    2.0 * PI * tau < nbar.sqrt()
}

/// One atomic companion and its field state. The atomic part is not
/// normalized.
#[derive(Clone, Debug)]
pub struct Branch {
    pub atom: AtomicState,
    pub field: FieldState,
}

#[derive(Clone, Debug)]
pub struct ApproxState {
    pub alpha: C64,
    pub tau: f64,
    /// `(c⁻Ψ⁻ + d⁻Φ⁻_φ)|α⟩`
    pub stationary: Branch,
    /// `(c⁺-d⁺)/2 (Ψ⁺ - Φ⁺_{φ+2πτ}) |α⁺_τ⟩`
    pub plus: Branch,
    /// `(c⁺+d⁺)/2 (Ψ⁺ + Φ⁺_{φ-2πτ}) |α⁻_τ⟩`
    pub minus: Branch,
    /// `N_τ`, the norm of the unnormalized three-branch sum.
    pub norm: f64,
    /// See [`within_validity`].
    pub valid: bool,
}

impl ApproxState {
    /// The normalized state in the computational atomic basis.
    pub fn joint(&self) -> JointState {
        let mut out = self.unnormalized();
        let scale = C64::new(1.0 / self.norm, 0.0);
        let amps: Vec<C64> = out.amplitudes().iter().map(|a| a * scale).collect();
        out = JointState::from_amplitudes(AtomBasis::Computational, out.cutoff(), amps)
            .expect("dimensions unchanged");
        out
    }

    fn unnormalized(&self) -> JointState {
        let cutoff = self.stationary.field.cutoff();
        let mut out = JointState::zeros(AtomBasis::Computational, cutoff);
        for branch in [&self.stationary, &self.plus, &self.minus] {
            out.add_scaled(&JointState::product(&branch.atom, &branch.field), C64::new(1.0, 0.0));
        }
        out
    }
}

fn combine(a: AtomicState, sa: f64, b: AtomicState, phi: f64, weight: C64) -> AtomicState {
    let ca = a.to_computational();
    let cb = b.to_computational();
    AtomicState::from_computational(std::array::from_fn(|k| weight * (ca[k] + sa * cb[k])), phi)
}

/// Builds the three-branch approximation; `N_τ` is taken from the numerical
/// norm of the sum.
pub fn approx_state(atom: &AtomicState, alpha: C64, tau: f64, cutoff: usize) -> Result<ApproxState> {
    atom.require_normalized()?;
    let phi = alpha.arg();
    let nbar = alpha.norm_sqr();
    let a = atom.rephased(phi);
    let zero = C64::default();
    let stationary = Branch {
        atom: AtomicState::new(a.cminus, zero, a.dminus, zero, phi),
        field: coherent_state(alpha, cutoff)?,
    };
    let twist = 2.0 * PI * tau;
    let plus = Branch {
        atom: combine(
            AtomicState::psi_plus(),
            -1.0,
            AtomicState::phi_plus(phi + twist),
            phi,
            (a.cplus - a.dplus) / 2.0,
        ),
        field: photon_branch(alpha, tau, 1, cutoff)?,
    };
    let minus = Branch {
        atom: combine(
            AtomicState::psi_plus(),
            1.0,
            AtomicState::phi_plus(phi - twist),
            phi,
            (a.cplus + a.dplus) / 2.0,
        ),
        field: photon_branch(alpha, tau, -1, cutoff)?,
    };
    let mut state = ApproxState {
        alpha,
        tau,
        stationary,
        plus,
        minus,
        norm: 1.0,
        valid: within_validity(nbar, tau),
    };
    state.norm = state.unnormalized().norm_sqr().sqrt();
    Ok(state)
}

/// `N_τ` from the closed form
///
/// ```text
/// N_τ² = 1 + Re[(c⁺+d⁺)* (c⁺-d⁺) ⟨α⁻_τ|α⁺_τ⟩] sin²(2πτ)
///          + 2 Re[d⁻ d⁺*] Im⟨α⁻_τ|α⟩ sin(2πτ)
///          + 2 Im[c⁺* d⁻] Re⟨α⁻_τ|α⟩ sin(2πτ)
/// ```
///
/// with `⟨α⁻_τ|α⟩ = ⟨α|α⁺_τ⟩` and `⟨α⁻_τ|α⁺_τ⟩ = ⟨α|α⁺_{2τ}⟩`, both summed
/// exactly by [`overlap_exact`].
pub fn normalization_closed_form(atom: &AtomicState, alpha: C64, tau: f64, cutoff: usize) -> Result<f64> {
    let nbar = alpha.norm_sqr();
    let a = atom.rephased(alpha.arg());
    let w = overlap_exact(&OverlapParams::new(nbar, tau, 1, 1)?, cutoff)?;
    let cross = overlap_exact(&OverlapParams::new(nbar, 2.0 * tau, 1, 1)?, cutoff)?;
    let s = (2.0 * PI * tau).sin();
    let n_sqr = 1.0
        + ((a.cplus + a.dplus).conj() * (a.cplus - a.dplus) * cross).re * s * s
        + 2.0 * (a.dminus * a.dplus.conj()).re * w.im * s
        + 2.0 * (a.cplus.conj() * a.dminus).im * w.re * s;
    Ok(n_sqr.sqrt())
}

/// `F(τ) = |⟨Ψ^A_τ|Ψ_{t_r τ}⟩|²` against [`evolve_exact`] with `g = 1`.
pub fn approximation_fidelity(atom: &AtomicState, alpha: C64, tau: f64, cutoff: usize) -> Result<f64> {
    let approx = approx_state(atom, alpha, tau, cutoff)?;
    let params = ModelParams::from_alpha(alpha);
    let field = coherent_state(alpha, cutoff)?;
    let exact = evolve_exact(atom, &field, params.g, unscaled_time(tau, &params))?;
    approx.joint().fidelity(&exact)
}
