//! Overlaps `⟨jα|α^±_τ⟩` (`j = ±1`) between the coherent states `|±α⟩` and
//! the rotating field branches of the approximate state vector.
//!
//! The branch amplitudes are `p_n exp(±i2πτ[n̄+1+n-(n-n̄)²/(4n̄+2)])`, so
//! every overlap is a Poisson-weighted phase sum. For large `n̄` a Gaussian
//! approximation followed by Poisson summation leaves one dominant term,
//! implemented in [`overlap_approx`].

use std::f64::consts::PI;

use crate::fock::{poisson_tail, TAIL_BOUND};
use crate::{Error, Result, C64};

/// Which overlap to evaluate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapParams {
    pub nbar: f64,
    pub tau: f64,
    /// `+1` for `⟨α|`, `-1` for `⟨-α|`.
    pub j: i32,
    /// `+1` for `|α^+_τ⟩`, `-1` for `|α^-_τ⟩`.
    pub sign: i32,
}

impl OverlapParams {
    pub fn new(nbar: f64, tau: f64, j: i32, sign: i32) -> Result<Self> {
        if j != 1 && j != -1 {
            return Err(Error::InvalidParameter(format!("j must be ±1, got {j}")));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidParameter(format!("sign must be ±1, got {sign}")));
        }
        if !(nbar.is_finite() && nbar >= 0.0) || !tau.is_finite() {
            return Err(Error::InvalidParameter(format!("bad nbar {nbar} or tau {tau}")));
        }
        Ok(Self { nbar, tau, j, sign })
    }
}

/// Phase `2πτ[n̄+1+n-(n-n̄)²/(4n̄+2)]` carried by level `n` of `|α^+_τ⟩`.
pub fn branch_phase(nbar: f64, tau: f64, n: usize) -> f64 {
    let nf = n as f64;
    2.0 * PI * tau * (nbar + 1.0 + nf - (nf - nbar).powi(2) / (4.0 * nbar + 2.0))
}

/// Direct sum `Σ_n e^{-n̄} n̄ⁿ jⁿ/n! · e^{±i·branch_phase(n)}` over `0..=cutoff`.
pub fn overlap_exact(params: &OverlapParams, cutoff: usize) -> Result<C64> {
    let OverlapParams { nbar, tau, j, sign } = *params;
    let tail = poisson_tail(nbar, cutoff);
    if tail > TAIL_BOUND {
        return Err(Error::Truncation { cutoff, tail, bound: TAIL_BOUND });
    }
    if nbar == 0.0 {
        return Ok(C64::from_polar(1.0, sign as f64 * branch_phase(nbar, tau, 0)));
    }
    let ln_nbar = nbar.ln();
    let mut ln_weight = -nbar;
    let mut sum = C64::default();
    for n in 0..=cutoff {
        if n > 0 {
            ln_weight += ln_nbar - (n as f64).ln();
        }
        let parity = if j < 0 && n % 2 == 1 { -1.0 } else { 1.0 };
        sum += C64::from_polar(parity * ln_weight.exp(), sign as f64 * branch_phase(nbar, tau, n));
    }
    Ok(sum)
}

/// `x - floor(x)`, always in `[0, 1)`.
pub fn frac(x: f64) -> f64 {
    x - x.floor()
}

/// `f_j(τ) = frac(τ + (1-j)/4 + 1/2) - 1/2`, the offset of `τ + (1-j)/4` from
/// its nearest integer; lies in `[-1/2, 1/2)`.
pub fn fractional_offset(tau: f64, j: i32) -> f64 {
    frac(tau + (1 - j) as f64 / 4.0 + 0.5) - 0.5
}

/// Result of [`overlap_approx`] together with its validity flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxOverlap {
    pub value: C64,
    /// `false` when `4n̄ ≤ 100τ²`, where the dominant-term reduction is not
    /// trustworthy.
    pub valid: bool,
}

/// Dominant Poisson-summation term
/// `e^{±i2π[n̄f_j(τ)+(n̄+1)τ]} / √(1±iπτ) · exp(-2π²n̄f_j(τ)²/(1±iπτ))`.
///
/// `√` is the principal branch.
pub fn overlap_approx(params: &OverlapParams) -> ApproxOverlap {
    let OverlapParams { nbar, tau, j, sign } = *params;
    let s = sign as f64;
    let f = fractional_offset(tau, j);
    let denom = C64::new(1.0, s * PI * tau);
    let phase = C64::from_polar(1.0, s * 2.0 * PI * (nbar * f + (nbar + 1.0) * tau));
    let gauss = (C64::new(-2.0 * PI * PI * nbar * f * f, 0.0) / denom).exp();
    ApproxOverlap { value: phase / denom.sqrt() * gauss, valid: 4.0 * nbar > 100.0 * tau * tau }
}

/// `b = 2/√(4+π²)`, the success-probability penalty of the `|-α⟩` projection.
pub fn b_factor() -> f64 {
    2.0 / (4.0 + PI * PI).sqrt()
}

/// `n̄ = m + arctan(π/2)/(2π)`, the mean photon numbers at which
/// `⟨-α|α^±_{1/2}⟩` is real.
pub fn magic_nbar(m: u32) -> f64 {
    m as f64 + (PI / 2.0).atan() / (2.0 * PI)
}
