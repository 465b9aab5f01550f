use std::f64::consts::FRAC_1_SQRT_2;

use crate::{Error, Result, C64};

use super::NORM_TOL;

/// Two-atom pure state stored as Bell-basis amplitudes referenced to `phi`.
///
/// The computational-basis amplitudes are a view, see
/// [`AtomicState::to_computational`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AtomicState {
    /// Amplitude of Ψ⁻.
    pub cminus: C64,
    /// Amplitude of Ψ⁺.
    pub cplus: C64,
    /// Amplitude of Φ⁻_φ.
    pub dminus: C64,
    /// Amplitude of Φ⁺_φ.
    pub dplus: C64,
    /// Reference phase φ of the Φ states.
    pub phi: f64,
}

/// Columns are `Ψ⁻, Ψ⁺, Φ⁻_φ, Φ⁺_φ` expanded over `|00⟩, |01⟩, |10⟩, |11⟩`.
pub fn bell_basis_matrix(phi: f64) -> [[C64; 4]; 4] {
    let h = FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    let r = C64::new(h, 0.0);
    let em = C64::from_polar(h, -phi);
    let ep = C64::from_polar(h, phi);
    [
        [z, z, em, em],
        [r, r, z, z],
        [-r, r, z, z],
        [z, z, -ep, ep],
    ]
}

/// Bell amplitudes `[c⁻, c⁺, d⁻_φ, d⁺_φ]` to computational amplitudes.
pub fn bell_to_computational(bell: [C64; 4], phi: f64) -> [C64; 4] {
    let u = bell_basis_matrix(phi);
    std::array::from_fn(|row| (0..4).map(|col| u[row][col] * bell[col]).sum())
}

/// Inverse of [`bell_to_computational`], i.e. multiplication by `U†`.
pub fn computational_to_bell(comp: [C64; 4], phi: f64) -> [C64; 4] {
    let u = bell_basis_matrix(phi);
    std::array::from_fn(|col| (0..4).map(|row| u[row][col].conj() * comp[row]).sum())
}

impl AtomicState {
    pub fn new(cminus: C64, cplus: C64, dminus: C64, dplus: C64, phi: f64) -> Self {
        Self { cminus, cplus, dminus, dplus, phi }
    }

    pub fn from_bell(bell: [C64; 4], phi: f64) -> Self {
        Self::new(bell[0], bell[1], bell[2], bell[3], phi)
    }

    pub fn from_computational(comp: [C64; 4], phi: f64) -> Self {
        Self::from_bell(computational_to_bell(comp, phi), phi)
    }

    pub fn psi_minus() -> Self {
        Self::from_bell([C64::new(1.0, 0.0), 0.0.into(), 0.0.into(), 0.0.into()], 0.0)
    }

    pub fn psi_plus() -> Self {
        Self::from_bell([0.0.into(), C64::new(1.0, 0.0), 0.0.into(), 0.0.into()], 0.0)
    }

    pub fn phi_minus(phi: f64) -> Self {
        Self::from_bell([0.0.into(), 0.0.into(), C64::new(1.0, 0.0), 0.0.into()], phi)
    }

    pub fn phi_plus(phi: f64) -> Self {
        Self::from_bell([0.0.into(), 0.0.into(), 0.0.into(), C64::new(1.0, 0.0)], phi)
    }

    pub fn bell(&self) -> [C64; 4] {
        [self.cminus, self.cplus, self.dminus, self.dplus]
    }

    pub fn to_computational(&self) -> [C64; 4] {
        bell_to_computational(self.bell(), self.phi)
    }

    /// Same physical state expressed in the Bell basis referenced to `phi`.
    pub fn rephased(&self, phi: f64) -> Self {
        Self::from_computational(self.to_computational(), phi)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.bell().iter().map(|a| a.norm_sqr()).sum()
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

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized { norm_sqr: norm * norm });
        }
        Ok(self.scaled(C64::new(1.0 / norm, 0.0)))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self::from_bell(self.bell().map(|a| a * factor), self.phi)
    }

    /// `⟨self|other⟩`, independent of either state's reference phase.
    pub fn inner(&self, other: &AtomicState) -> C64 {
        self.to_computational()
            .iter()
            .zip(other.to_computational())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &AtomicState) -> f64 {
        self.inner(other).norm_sqr()
    }
}
