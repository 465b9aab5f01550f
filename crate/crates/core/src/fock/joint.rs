use crate::{Error, Result, C64};

use super::atomic::{bell_to_computational, computational_to_bell};
use super::{AtomicState, FieldState, NORM_TOL};

/// Ordered atomic basis of a [`JointState`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AtomBasis {
    /// `|0,0⟩, |0,1⟩, |1,0⟩, |1,1⟩`
    Computational,
    /// `Ψ⁻, Ψ⁺, Φ⁻_φ, Φ⁺_φ`
    Bell { phi: f64 },
}

/// Atoms ⊗ field amplitudes, `4 × (cutoff + 1)`, atomic index major.
#[derive(Clone, Debug, PartialEq)]
pub struct JointState {
    basis: AtomBasis,
    dim: usize,
    amplitudes: Vec<C64>,
}

impl JointState {
    /// `amplitudes[k * (cutoff + 1) + n]` is the amplitude of atomic basis
    /// state `k` with `n` photons.
    pub fn from_amplitudes(basis: AtomBasis, cutoff: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let dim = cutoff + 1;
        if amplitudes.len() != 4 * dim {
            return Err(Error::InvalidParameter(format!(
                "joint state needs {} amplitudes, got {}",
                4 * dim,
                amplitudes.len()
            )));
        }
        Ok(Self { basis, dim, amplitudes })
    }

    pub fn zeros(basis: AtomBasis, cutoff: usize) -> Self {
        Self { basis, dim: cutoff + 1, amplitudes: vec![C64::default(); 4 * (cutoff + 1)] }
    }

    /// Product state `atom ⊗ field`, in the atom's Bell basis.
    pub fn product(atom: &AtomicState, field: &FieldState) -> Self {
        let dim = field.dim();
        let mut amplitudes = Vec::with_capacity(4 * dim);
        for c in atom.bell() {
            amplitudes.extend(field.amplitudes().iter().map(|p| c * p));
        }
        Self { basis: AtomBasis::Bell { phi: atom.phi }, dim, amplitudes }
    }

    pub fn basis(&self) -> AtomBasis {
        self.basis
    }

    pub fn cutoff(&self) -> usize {
        self.dim - 1
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Field amplitudes accompanying atomic basis state `k`.
    pub fn component(&self, k: usize) -> &[C64] {
        &self.amplitudes[k * self.dim..(k + 1) * self.dim]
    }

    pub fn component_mut(&mut self, k: usize) -> &mut [C64] {
        &mut self.amplitudes[k * self.dim..(k + 1) * self.dim]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < NORM_TOL
    }

    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::NotNormalized { norm_sqr: 0.0 });
        }
        self.amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(self)
    }

    /// Re-expresses the state in `basis`.
    pub fn convert(&self, basis: AtomBasis) -> Self {
        if basis == self.basis {
            return self.clone();
        }
        let mut out = Self::zeros(basis, self.cutoff());
        for n in 0..self.dim {
            let here: [C64; 4] = std::array::from_fn(|k| self.amplitudes[k * self.dim + n]);
            let comp = match self.basis {
                AtomBasis::Computational => here,
                AtomBasis::Bell { phi } => bell_to_computational(here, phi),
            };
            let there = match basis {
                AtomBasis::Computational => comp,
                AtomBasis::Bell { phi } => computational_to_bell(comp, phi),
            };
            for (k, a) in there.into_iter().enumerate() {
                out.amplitudes[k * self.dim + n] = a;
            }
        }
        out
    }

    pub fn to_computational(&self) -> Self {
        self.convert(AtomBasis::Computational)
    }

    /// `⟨self|other⟩`, converting `other` to this state's basis first.
    pub fn inner(&self, other: &JointState) -> Result<C64> {
        if self.dim != other.dim {
            return Err(Error::CutoffMismatch { left: self.cutoff(), right: other.cutoff() });
        }
        let other = other.convert(self.basis);
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &JointState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Atomic amplitudes of `(I ⊗ ⟨target|) |self⟩`, expressed in this state's
    /// atomic basis.
    pub fn field_overlap(&self, target: &FieldState) -> Result<[C64; 4]> {
        if target.cutoff() != self.cutoff() {
            return Err(Error::CutoffMismatch { left: self.cutoff(), right: target.cutoff() });
        }
        Ok(std::array::from_fn(|k| {
            self.component(k)
                .iter()
                .zip(target.amplitudes())
                .map(|(a, t)| t.conj() * a)
                .sum()
        }))
    }

    /// `(I ⊗ (1 - |target⟩⟨target|)) |self⟩`; `target` must be normalized.
    pub fn without_field(&self, target: &FieldState) -> Result<Self> {
        let overlap = self.field_overlap(target)?;
        let mut out = self.clone();
        for (k, c) in overlap.into_iter().enumerate() {
            for (a, t) in out.component_mut(k).iter_mut().zip(target.amplitudes()) {
                *a -= c * t;
            }
        }
        Ok(out)
    }

    pub(crate) fn add_scaled(&mut self, other: &JointState, factor: C64) {
        let other = other.convert(self.basis);
        for (a, b) in self.amplitudes.iter_mut().zip(&other.amplitudes) {
            *a += factor * b;
        }
    }
}
