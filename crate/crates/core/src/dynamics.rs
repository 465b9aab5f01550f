//! Coherent evolution under `H = g Σ_{i=A,B} (σ⁺_i a + σ⁻_i a†)` (ħ = 1).
//!
//! `H` conserves the excitation number `a†a + Σ σ⁺σ⁻`. In the sector with
//! `n` excitations it couples `|0,0,n⟩`, `|Ψ⁺,n-1⟩` and `|1,1,n-2⟩` with
//! eigenfrequencies `0, ±ω_n`, `ω_n = g√(4n-2)`, while `|Ψ⁻,m⟩` is an
//! eigenstate with eigenvalue zero.
//!
//! [`evolve_exact`] writes the solution in closed form; [`evolve_oracle`]
//! diagonalizes each excitation block numerically in the computational basis
//! and serves as an independent check.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::fock::{AtomBasis, AtomicState, FieldState, JointState};
use crate::{Error, Result, C64};

/// Coupling `g`, mean photon number `n̄` and coherent phase `φ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub g: f64,
    pub nbar: f64,
    pub phi: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { g: 1.0, nbar: 0.0, phi: 0.0 }
    }
}

impl ModelParams {
    pub fn new(g: f64, nbar: f64, phi: f64) -> Result<Self> {
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::InvalidParameter(format!("coupling g must be positive, got {g}")));
        }
        if !(nbar.is_finite() && nbar >= 0.0) {
            return Err(Error::InvalidParameter(format!("nbar must be non-negative, got {nbar}")));
        }
        Ok(Self { g, nbar, phi })
    }

    /// `g = 1`, `n̄ = |α|²`, `φ = arg α`.
    pub fn from_alpha(alpha: C64) -> Self {
        Self { g: 1.0, nbar: alpha.norm_sqr(), phi: alpha.arg() }
    }

    /// `α = √n̄ e^{iφ}`.
    pub fn alpha(&self) -> C64 {
        C64::from_polar(self.nbar.sqrt(), self.phi)
    }
}

/// `t_r = (π/g)√(4n̄+2)`.
pub fn revival_time(params: &ModelParams) -> f64 {
    PI / params.g * (4.0 * params.nbar + 2.0).sqrt()
}

/// `t_c = 1/(√2 g)`.
pub fn collapse_time(params: &ModelParams) -> f64 {
    FRAC_1_SQRT_2 / params.g
}

/// `τ = t / t_r`.
pub fn scaled_time(t: f64, params: &ModelParams) -> f64 {
    t / revival_time(params)
}

/// Inverse of [`scaled_time`].
pub fn unscaled_time(tau: f64, params: &ModelParams) -> f64 {
    tau * revival_time(params)
}

fn check_inputs(atom: &AtomicState, field: &FieldState, g: f64, t: f64) -> Result<()> {
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::InvalidParameter(format!("coupling g must be positive, got {g}")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
    }
    atom.require_normalized()?;
    field.require_normalized()?;
    // H moves one photon per step; the top two levels feed states outside
    // the truncated space.
    field.require_edge_clear(2)
}

/// Closed-form `e^{-iHt} (atom ⊗ field)` in the computational basis.
///
/// With `c₀, c₁` the `|0,0⟩, |1,1⟩` amplitudes, `c±` the Ψ± amplitudes and
/// `p_n` the field amplitudes (zero outside `0..=cutoff`):
///
/// ```text
/// ξ±_n = e^{±iω_n t}/2 · (c₊ p_{n-1} ∓ (√n c₀ p_n + √(n-1) c₁ p_{n-2})/√(2n-1))
/// ξ_n  = (√(n-1) c₀ p_n - √n c₁ p_{n-2})/√(2n-1)
/// χ⁰_n     = (√n (ξ⁻_n - ξ⁺_n) + √(n-1) ξ_n)/√(2n-1),  n ≥ 1;  χ⁰_0 = c₀ p₀
/// χ¹_{n-2} = (√(n-1) (ξ⁻_n - ξ⁺_n) - √n ξ_n)/√(2n-1),  n ≥ 2
/// χ⁺_{n-1} = ξ⁻_n + ξ⁺_n,                               n ≥ 1
/// |Ψ_t⟩ = |0,0⟩|χ⁰⟩ + |1,1⟩|χ¹⟩ + |Ψ⁺⟩|χ⁺⟩ + c₋|Ψ⁻⟩|field⟩
/// ```
pub fn evolve_exact(atom: &AtomicState, field: &FieldState, g: f64, t: f64) -> Result<JointState> {
    check_inputs(atom, field, g, t)?;
    let cutoff = field.cutoff();
    let comp = atom.to_computational();
    let (c0, c1) = (comp[0], comp[3]);
    let cplus = (comp[1] + comp[2]) * FRAC_1_SQRT_2;
    let cminus = (comp[1] - comp[2]) * FRAC_1_SQRT_2;
    let p = |n: isize| -> C64 {
        if n < 0 {
            C64::default()
        } else {
            field.amplitude(n as usize)
        }
    };

    let mut chi0 = vec![C64::default(); cutoff + 1];
    let mut chi1 = vec![C64::default(); cutoff + 1];
    let mut chip = vec![C64::default(); cutoff + 1];
    chi0[0] = c0 * p(0);
    for n in 1..=cutoff + 2 {
        let ni = n as isize;
        let nf = n as f64;
        let sn = nf.sqrt();
        let sn1 = (nf - 1.0).sqrt();
        let s2n1 = (2.0 * nf - 1.0).sqrt();
        let omega = g * (4.0 * nf - 2.0).sqrt();
        let phase = C64::from_polar(0.5, omega * t);

        let mixed = (c0 * p(ni) * sn + c1 * p(ni - 2) * sn1) / s2n1;
        let stay = cplus * p(ni - 1);
        let xi_plus = phase * (stay - mixed);
        let xi_minus = phase.conj() * (stay + mixed);
        let xi = (c0 * p(ni) * sn1 - c1 * p(ni - 2) * sn) / s2n1;
        let diff = xi_minus - xi_plus;

        if n <= cutoff {
            chi0[n] = (diff * sn + xi * sn1) / s2n1;
        }
        if n - 1 <= cutoff {
            chip[n - 1] = xi_minus + xi_plus;
        }
        if n >= 2 && n - 2 <= cutoff {
            chi1[n - 2] = (diff * sn1 - xi * sn) / s2n1;
        }
    }

    let mut out = JointState::zeros(AtomBasis::Computational, cutoff);
    out.component_mut(0).copy_from_slice(&chi0);
    out.component_mut(3).copy_from_slice(&chi1);
    for (n, &plus) in chip.iter().enumerate() {
        let stationary = cminus * field.amplitude(n);
        out.component_mut(1)[n] = (plus + stationary) * FRAC_1_SQRT_2;
        out.component_mut(2)[n] = (plus - stationary) * FRAC_1_SQRT_2;
    }
    Ok(out)
}

/// Basis states `(atomic index, photons)` of the block with `excitations`
/// quanta that fit below `cutoff`.
fn excitation_block(excitations: usize, cutoff: usize) -> Vec<(usize, usize)> {
    // atomic index -> number of atomic excitations
    const ATOM_EXCITATIONS: [usize; 4] = [0, 1, 1, 2];
    (0..4)
        .filter_map(|k| {
            let photons = excitations.checked_sub(ATOM_EXCITATIONS[k])?;
            (photons <= cutoff).then_some((k, photons))
        })
        .collect()
}

/// `⟨j|H|i⟩` for computational basis states, `H` real symmetric.
fn hamiltonian_element(g: f64, (ki, ni): (usize, usize), (kj, nj): (usize, usize)) -> f64 {
    // σ⁺ on one atom with a photon absorbed: |0,0⟩→|0,1⟩,|1,0⟩ and |0,1⟩,|1,0⟩→|1,1⟩
    let raises = |lo: usize, hi: usize| matches!((lo, hi), (0, 1) | (0, 2) | (1, 3) | (2, 3));
    if raises(ki, kj) && nj + 1 == ni {
        g * (ni as f64).sqrt()
    } else if raises(kj, ki) && ni + 1 == nj {
        g * (nj as f64).sqrt()
    } else {
        0.0
    }
}

/// `e^{-iHt} (atom ⊗ field)` by numerical diagonalization of every
/// excitation-number block of the truncated Hamiltonian.
///
/// Blocks are at most 4×4 (Ψ⁻ is not singled out), so the cost is linear
/// in the cutoff. Blocks at the top of the truncated space lose the states
/// above the cutoff; [`FieldState`] inputs are required to have no weight
/// there.
pub fn evolve_oracle(atom: &AtomicState, field: &FieldState, g: f64, t: f64) -> Result<JointState> {
    check_inputs(atom, field, g, t)?;
    let input = JointState::product(atom, field).to_computational();
    evolve_state_oracle(&input, g, t)
}

/// Block-diagonalization propagator applied to an arbitrary joint state.
pub fn evolve_state_oracle(input: &JointState, g: f64, t: f64) -> Result<JointState> {
    let input = input.to_computational();
    let cutoff = input.cutoff();
    let mut out = JointState::zeros(AtomBasis::Computational, cutoff);
    for excitations in 0..=cutoff + 2 {
        let block = excitation_block(excitations, cutoff);
        let size = block.len();
        let h = DMatrix::from_fn(size, size, |i, j| hamiltonian_element(g, block[i], block[j]));
        let eig = SymmetricEigen::new(h);
        let v = &eig.eigenvectors;
        let amps: Vec<C64> = block.iter().map(|&(k, n)| input.component(k)[n]).collect();
        // U = V e^{-iΛt} Vᵀ
        let projected: Vec<C64> = (0..size)
            .map(|e| {
                let c: C64 = (0..size).map(|i| amps[i] * v[(i, e)]).sum();
                c * C64::from_polar(1.0, -eig.eigenvalues[e] * t)
            })
            .collect();
        for (i, &(k, n)) in block.iter().enumerate() {
            out.component_mut(k)[n] = (0..size).map(|e| projected[e] * v[(i, e)]).sum();
        }
    }
    Ok(out)
}

/// `H|ψ⟩` on the truncated space, in the computational basis.
pub fn apply_hamiltonian(state: &JointState, g: f64) -> JointState {
    let state = state.to_computational();
    let cutoff = state.cutoff();
    let mut out = JointState::zeros(AtomBasis::Computational, cutoff);
    for excitations in 0..=cutoff + 2 {
        let block = excitation_block(excitations, cutoff);
        for &(ki, ni) in &block {
            let mut acc = C64::default();
            for &(kj, nj) in &block {
                let h = hamiltonian_element(g, (ki, ni), (kj, nj));
                if h != 0.0 {
                    acc += state.component(kj)[nj] * h;
                }
            }
            out.component_mut(ki)[ni] = acc;
        }
    }
    out
}

/// `⟨ψ|H|ψ⟩`.
pub fn energy(state: &JointState, g: f64) -> f64 {
    let h_psi = apply_hamiltonian(state, g);
    state
        .to_computational()
        .inner(&h_psi)
        .map(|e| e.re)
        .unwrap_or(f64::NAN)
}

/// `⟨a†a + Σ σ⁺σ⁻⟩`.
pub fn excitation_number(state: &JointState) -> f64 {
    const ATOM_EXCITATIONS: [f64; 4] = [0.0, 1.0, 1.0, 2.0];
    let state = state.to_computational();
    (0..4)
        .map(|k| {
            state
                .component(k)
                .iter()
                .enumerate()
                .map(|(n, a)| (n as f64 + ATOM_EXCITATIONS[k]) * a.norm_sqr())
                .sum::<f64>()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, default_cutoff};

    fn fig1_atom() -> AtomicState {
        AtomicState::new(
            C64::new(0.5554, 0.0),
            C64::new(0.3213, 0.5004),
            C64::new(-0.2053, 0.3726),
            C64::new(0.1046, 0.3819),
            1.37,
        )
        .normalized()
        .unwrap()
    }

    #[test]
    fn time_scales() {
        let p = ModelParams::new(1.0, 0.0, 0.0).unwrap();
        assert!((revival_time(&p) - PI * 2f64.sqrt()).abs() < 1e-14);
        let p = ModelParams::new(1.0, 36.16, 0.0).unwrap();
        assert!((revival_time(&p) - PI * 146.64f64.sqrt()).abs() < 1e-12);
        assert!((revival_time(&p) - 38.043).abs() < 1e-3);
        assert!((unscaled_time(0.5, &p) - 19.0216).abs() < 1e-3);
        let p2 = ModelParams::new(2.0, 36.16, 0.0).unwrap();
        assert!((revival_time(&p2) - revival_time(&p) / 2.0).abs() < 1e-12);
        assert!((collapse_time(&p2) - collapse_time(&p) / 2.0).abs() < 1e-15);
        assert_eq!(scaled_time(0.0, &p), 0.0);
        assert!((scaled_time(revival_time(&p), &p) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scaled_time_round_trip() {
        let p = ModelParams::new(1.3, 12.16, 0.0).unwrap();
        for t in [0.0, 0.1, 3.7, 55.0] {
            assert!((unscaled_time(scaled_time(t, &p), &p) - t).abs() < 1e-14 * t.max(1.0));
        }
    }

    #[test]
    fn invalid_params() {
        assert!(ModelParams::new(0.0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, -1.0, 0.0).is_err());
    }

    #[test]
    fn zero_time_is_identity() {
        let alpha = C64::from_polar(36.16f64.sqrt(), 1.37);
        let field = coherent_state(alpha, 160).unwrap();
        let atom = fig1_atom();
        let out = evolve_exact(&atom, &field, 1.0, 0.0).unwrap();
        let input = JointState::product(&atom, &field);
        assert!((input.fidelity(&out).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn psi_minus_fock_states_are_stationary() {
        for n in 0..=10 {
            let field = FieldState::fock(n, 14).unwrap();
            let atom = AtomicState::psi_minus();
            let input = JointState::product(&atom, &field);
            for t in [0.3, 2.0, 17.0] {
                let a = evolve_exact(&atom, &field, 1.0, t).unwrap();
                let b = evolve_oracle(&atom, &field, 1.0, t).unwrap();
                assert!((input.fidelity(&a).unwrap() - 1.0).abs() < 1e-12);
                assert!((input.fidelity(&b).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn single_excitation_rabi_oscillation() {
        // |0,0,1⟩ ↔ |Ψ⁺,0⟩ with frequency g√2
        let field = FieldState::fock(1, 6).unwrap();
        let ground = AtomicState::from_computational(
            [C64::new(1.0, 0.0), 0.0.into(), 0.0.into(), 0.0.into()],
            0.0,
        );
        let g = 0.7;
        for t in [0.2, 1.0, 2.5] {
            let out = evolve_exact(&ground, &field, g, t).unwrap();
            let p = out.component(0)[1].norm_sqr();
            assert!((p - (2f64.sqrt() * g * t).cos().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_matches_closed_form_at_half_revival() {
        let alpha = C64::from_polar(36.16f64.sqrt(), 1.37);
        let field = coherent_state(alpha, 160).unwrap();
        let params = ModelParams::from_alpha(alpha);
        let t = unscaled_time(0.5, &params);
        let atom = fig1_atom();
        let a = evolve_exact(&atom, &field, 1.0, t).unwrap();
        let b = evolve_oracle(&atom, &field, 1.0, t).unwrap();
        assert!(a.fidelity(&b).unwrap() > 1.0 - 1e-8);
    }

    #[test]
    fn edge_weight_is_rejected() {
        let field = FieldState::fock(5, 5).unwrap();
        let err = evolve_exact(&AtomicState::psi_plus(), &field, 1.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }));
    }

    #[test]
    fn conserved_quantities() {
        let nbar: f64 = 5.0;
        let alpha = C64::from_polar(nbar.sqrt(), 0.4);
        let field = coherent_state(alpha, default_cutoff(nbar)).unwrap();
        let atom = fig1_atom();
        let start = JointState::product(&atom, &field);
        let e0 = energy(&start, 1.0);
        let x0 = excitation_number(&start);
        for t in [0.5, 3.0, 11.0] {
            for s in [evolve_exact(&atom, &field, 1.0, t).unwrap(), evolve_oracle(&atom, &field, 1.0, t).unwrap()] {
                assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
                assert!((energy(&s, 1.0) - e0).abs() < 1e-8);
                assert!((excitation_number(&s) - x0).abs() < 1e-8);
            }
        }
    }
}
