use nalgebra::DMatrix;

use crate::{Error, Result, C64};

use super::{FieldState, DISPLACE_TAIL_BOUND};

const RESCALE: f64 = 1e100;

/// Fills `out[m] = √(m!/(m+k)!) x^{k/2} e^{-x/2} L_m^{(k)}(x)` for
/// `m = 0..out.len()`.
///
/// These are the moduli of the displacement matrix elements
/// `⟨m+k|D(γ)|m⟩` with `x = |γ|²`. The three-term Laguerre recurrence runs on
/// a mantissa with a separately tracked log scale, so neither the `e^{-x/2}`
/// prefactor nor the growth of `L_m^{(k)}` leaves the f64 range.
pub(crate) fn scaled_laguerre(k: usize, x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    if x == 0.0 {
        out.fill(if k == 0 { 1.0 } else { 0.0 });
        return;
    }
    let kf = k as f64;
    let ln_k_fact: f64 = (2..=k).map(|i| (i as f64).ln()).sum();
    let mut scale = 0.5 * kf * x.ln() - 0.5 * x - 0.5 * ln_k_fact;
    let mut prev = 0.0f64;
    let mut cur = 1.0f64;
    out[0] = scale.exp();
    for m in 0..out.len() - 1 {
        let mf = m as f64;
        let next = ((2.0 * mf + 1.0 + kf - x) * cur - (mf * (mf + kf)).sqrt() * prev)
            / ((mf + 1.0) * (mf + 1.0 + kf)).sqrt();
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            scale += RESCALE.ln();
        }
        out[m + 1] = if cur == 0.0 { 0.0 } else { cur.signum() * (cur.abs().ln() + scale).exp() };
    }
}

/// Matrix of `D(β) = exp(βa† - β*a)` restricted to `0..dim`, from the
/// analytic Fock matrix elements.
pub fn displacement_matrix(beta: C64, dim: usize) -> DMatrix<C64> {
    let x = beta.norm_sqr();
    let theta = beta.arg();
    let mut d = DMatrix::<C64>::zeros(dim, dim);
    let mut column = vec![0.0; dim];
    for k in 0..dim {
        let len = dim - k;
        scaled_laguerre(k, x, &mut column[..len]);
        let below = C64::from_polar(1.0, k as f64 * theta);
        let above = if k % 2 == 0 { below.conj() } else { -below.conj() };
        for m in 0..len {
            d[(m + k, m)] = below * column[m];
            if k > 0 {
                d[(m, m + k)] = above * column[m];
            }
        }
    }
    d
}

/// `D(β)|ψ⟩` on the truncated space, renormalized after checking that at most
/// [`DISPLACE_TAIL_BOUND`] of the norm left the retained levels.
pub fn displace(state: &FieldState, beta: C64) -> Result<FieldState> {
    let dim = state.dim();
    let d = displacement_matrix(beta, dim);
    let psi = nalgebra::DVector::from_column_slice(state.amplitudes());
    let out = d * psi;
    let kept: f64 = out.iter().map(|a| a.norm_sqr()).sum();
    let tail = state.norm_sqr() - kept;
    if tail > DISPLACE_TAIL_BOUND {
        return Err(Error::Truncation { cutoff: state.cutoff(), tail, bound: DISPLACE_TAIL_BOUND });
    }
    FieldState::from_amplitudes(out.iter().copied().collect())?.normalized()
}
