use crate::{Error, Result, C64};

use super::{NORM_TOL, TAIL_BOUND};

/// Photon-number amplitudes of a single cavity mode, truncated at `cutoff`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    amplitudes: Vec<C64>,
}

impl FieldState {
    /// Wraps raw amplitudes for `n = 0..amplitudes.len()`. No normalization
    /// is applied.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter("field state needs at least one level".into()));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite field amplitude".into()));
        }
        Ok(Self { amplitudes })
    }

    /// Fock state `|n⟩`.
    pub fn fock(n: usize, cutoff: usize) -> Result<Self> {
        if n > cutoff {
            return Err(Error::InvalidParameter(format!(
                "Fock level {n} above cutoff {cutoff}"
            )));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); cutoff + 1];
        amplitudes[n] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn vacuum(cutoff: usize) -> Self {
        Self::fock(0, cutoff).expect("level 0 is always in range")
    }

    /// Largest retained photon number `N_max`.
    pub fn cutoff(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, n: usize) -> C64 {
        self.amplitudes.get(n).copied().unwrap_or_default()
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < NORM_TOL
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() < NORM_TOL {
            Ok(())
        } else {
            Err(Error::NotNormalized { norm_sqr })
        }
    }

    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::NotNormalized { norm_sqr: 0.0 });
        }
        self.amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(self)
    }

    pub fn mean_photon_number(&self) -> f64 {
        let n_sqr = self.norm_sqr();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, a)| n as f64 * a.norm_sqr())
            .sum::<f64>()
            / n_sqr
    }

    pub fn photon_number_variance(&self) -> f64 {
        let n_sqr = self.norm_sqr();
        let mean = self.mean_photon_number();
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(n, a)| (n as f64 - mean).powi(2) * a.norm_sqr())
            .sum::<f64>()
            / n_sqr
    }

    /// Probability carried by the `levels` highest Fock levels.
    pub fn edge_mass(&self, levels: usize) -> f64 {
        let start = self.amplitudes.len().saturating_sub(levels);
        self.amplitudes[start..].iter().map(|a| a.norm_sqr()).sum()
    }

    /// Fails if more than [`TAIL_BOUND`] sits in the top `levels` levels,
    /// where any ladder operator would push it out of the truncated space.
    pub(crate) fn require_edge_clear(&self, levels: usize) -> Result<()> {
        let tail = self.edge_mass(levels);
        if tail > TAIL_BOUND {
            Err(Error::Truncation { cutoff: self.cutoff(), tail, bound: TAIL_BOUND })
        } else {
            Ok(())
        }
    }
}

/// Default Fock cutoff `⌈n̄ + 10√n̄ + 20⌉`.
pub fn default_cutoff(nbar: f64) -> usize {
    (nbar + 10.0 * nbar.sqrt() + 20.0).ceil() as usize
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Poisson mass `Σ_{n > cutoff} e^{-n̄} n̄ⁿ / n!`, summed directly from the
/// first omitted term.
pub fn poisson_tail(nbar: f64, cutoff: usize) -> f64 {
    if nbar <= 0.0 {
        return 0.0;
    }
    let mut n = cutoff + 1;
    let mut ln_term = n as f64 * nbar.ln() - nbar - ln_factorial(n);
    let mut tail = 0.0;
    loop {
        let term = ln_term.exp();
        tail += term;
        if n as f64 > nbar && term <= tail * 1e-17 {
            break;
        }
        n += 1;
        ln_term += nbar.ln() - (n as f64).ln();
    }
    tail
}

/// Coherent state `|α⟩` on `0..=cutoff`, renormalized over the retained
/// levels.
///
/// Amplitudes follow `a_n = a_{n-1} α/√n` with `a_0 = e^{-|α|²/2}`; the
/// recurrence runs on `ln|a_n|` so it neither overflows nor underflows for
/// large `n`.
pub fn coherent_state(alpha: C64, cutoff: usize) -> Result<FieldState> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite alpha {alpha}")));
    }
    let nbar = alpha.norm_sqr();
    let tail = poisson_tail(nbar, cutoff);
    if tail > TAIL_BOUND {
        return Err(Error::Truncation { cutoff, tail, bound: TAIL_BOUND });
    }
    if nbar == 0.0 {
        return Ok(FieldState::vacuum(cutoff));
    }
    let ln_mod = alpha.norm().ln();
    let arg = alpha.arg();
    let mut ln_amp = -0.5 * nbar;
    let mut amplitudes = Vec::with_capacity(cutoff + 1);
    for n in 0..=cutoff {
        if n > 0 {
            ln_amp += ln_mod - 0.5 * (n as f64).ln();
        }
        amplitudes.push(C64::from_polar(ln_amp.exp(), n as f64 * arg));
    }
    FieldState { amplitudes }.normalized()
}

/// `⟨a|b⟩ = Σ_n conj(a_n) b_n`.
pub fn inner_product(a: &FieldState, b: &FieldState) -> Result<C64> {
    if a.cutoff() != b.cutoff() {
        return Err(Error::CutoffMismatch { left: a.cutoff(), right: b.cutoff() });
    }
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn vacuum_from_zero_alpha() {
        let s = coherent_state(C64::new(0.0, 0.0), 10).unwrap();
        assert_eq!(s.amplitude(0), C64::new(1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn fig1_mean_photon_number() {
        let alpha = C64::from_polar(36.16f64.sqrt(), 1.37);
        let s = coherent_state(alpha, 160).unwrap();
        assert!((s.mean_photon_number() - 36.16).abs() < 1e-6);
        assert!((s.photon_number_variance() - 36.16).abs() < 1e-6);
        assert!(s.is_normalized());
    }

    #[test]
    fn poisson_weight_at_four() {
        let s = coherent_state(C64::new(2.0, 0.0), 40).unwrap();
        // e^{-4} 4^4 / 4!
        let expected = (-4.0f64).exp() * 256.0 / 24.0;
        assert!((s.amplitude(4).norm_sqr() - expected).abs() < 1e-12);
        assert!((expected - 0.19537).abs() < 1e-5);
    }

    #[test]
    fn cutoff_too_small_is_rejected() {
        let err = coherent_state(C64::new(6.0, 0.0), 40).unwrap_err();
        assert!(matches!(err, Error::Truncation { cutoff: 40, .. }));
    }

    #[test]
    fn default_cutoff_satisfies_tail_bound() {
        for nbar in [0.0, 0.16, 1.0, 12.16, 36.16, 80.0, 100.0, 160.0] {
            let cutoff = default_cutoff(nbar);
            assert!(poisson_tail(nbar, cutoff) < TAIL_BOUND, "nbar {nbar}");
        }
    }

    #[test]
    fn poisson_tail_matches_complement() {
        // n̄ = 4, cutoff 5: tail is 1 - Σ_{n≤5} P(n), summed directly here
        let nbar = 4.0f64;
        let mut p = (-nbar).exp();
        let mut head = p;
        for n in 1..=5 {
            p *= nbar / n as f64;
            head += p;
        }
        assert!((poisson_tail(nbar, 5) - (1.0 - head)).abs() < 1e-14);
    }

    #[test]
    fn large_alpha_does_not_underflow() {
        let nbar: f64 = 900.0;
        let s = coherent_state(C64::new(nbar.sqrt(), 0.0), default_cutoff(nbar)).unwrap();
        assert!((s.mean_photon_number() - nbar).abs() < 1e-6);
    }

    #[test]
    fn self_overlap_and_opposite_overlap() {
        let alpha = C64::new(2.0, 0.0);
        let a = coherent_state(alpha, 60).unwrap();
        let b = coherent_state(-alpha, 60).unwrap();
        assert!((inner_product(&a, &a).unwrap() - 1.0).norm() < 1e-10);
        let o = inner_product(&a, &b).unwrap();
        assert!((o.re - (-8.0f64).exp()).abs() < 1e-12);
        assert!(o.im.abs() < 1e-15);
    }

    #[test]
    fn mismatched_cutoffs() {
        let a = FieldState::vacuum(5);
        let b = FieldState::vacuum(6);
        assert!(matches!(inner_product(&a, &b), Err(Error::CutoffMismatch { .. })));
    }

    proptest! {
        #[test]
        fn inner_product_is_conjugate_symmetric(
            re in proptest::collection::vec(-1.0f64..1.0, 12),
            im in proptest::collection::vec(-1.0f64..1.0, 12),
        ) {
            let a: Vec<C64> = re[..6].iter().zip(&im[..6]).map(|(r, i)| C64::new(*r, *i)).collect();
            let b: Vec<C64> = re[6..].iter().zip(&im[6..]).map(|(r, i)| C64::new(*r, *i)).collect();
            let a = FieldState::from_amplitudes(a).unwrap();
            let b = FieldState::from_amplitudes(b).unwrap();
            let ab = inner_product(&a, &b).unwrap();
            let ba = inner_product(&b, &a).unwrap();
            prop_assert!((ab - ba.conj()).norm() < 1e-14);
        }

        #[test]
        fn coherent_states_are_poissonian(r in 0.0f64..8.0, theta in -3.2f64..3.2) {
            let alpha = C64::from_polar(r, theta);
            let s = coherent_state(alpha, default_cutoff(r * r)).unwrap();
            prop_assert!(s.is_normalized());
            prop_assert!((s.mean_photon_number() - r * r).abs() < 1e-6);
            prop_assert!((s.photon_number_variance() - r * r).abs() < 1e-6);
        }
    }
}
