//! Unambiguous Bell measurement with two cavities.
//!
//! The atoms cross a first cavity prepared in `|α⟩` and a second one
//! prepared in `|iα⟩`, each for scaled time `τ` (nominally 1/2). After each
//! passage the field is projected onto the initial coherent state and, if
//! that fails, onto its mirror image:
//!
//! | D1     | D2      | Bell state | probability (ideal) |
//! |--------|---------|------------|---------------------|
//! | `α`    | `iα`    | Ψ⁻         | `|c⁻|²`             |
//! | `α`    | `-iα`   | Φ⁻_φ       | `b|d⁻|²`            |
//! | `-α`   | `iα`    | Φ⁺_φ       | `b|d⁺|²`            |
//! | `-α`   | `-iα`   | Ψ⁺         | `b²|c⁺|²`           |
//!
//! with `b = 2/√(4+π²)` and `φ = arg α`. Everything else is a failure. The
//! probability tree is evaluated exhaustively from exact conditional states.

use rayon::prelude::*;

use crate::approx::approx_state;
use crate::dynamics::{evolve_exact, unscaled_time, ModelParams};
use crate::fock::{coherent_state, default_cutoff, AtomBasis, AtomicState, FieldState, JointState};
use crate::sweep::SweepResult;
use crate::{Error, Result, C64};

/// Branches below this probability are not renormalized.
pub const PROBABILITY_FLOOR: f64 = 1e-14;

/// Which propagator drives each cavity passage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Engine {
    #[default]
    Exact,
    Approx,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub atom: AtomicState,
    /// First cavity amplitude; the second cavity starts in `|iα⟩`.
    pub alpha: C64,
    pub tau1: f64,
    pub tau2: f64,
    pub engine: Engine,
    pub g: f64,
    /// Fock cutoff for both cavities, [`default_cutoff`] when `None`.
    pub cutoff: Option<usize>,
    /// Phase `θ = ωτ_f` of free evolution between the cavities. It acts as
    /// `e^{-iθ(a†a + Σσ⁺σ⁻)}` on the atoms and the second cavity, whose
    /// projection targets co-rotate.
    pub free_phase: f64,
}

impl ProtocolConfig {
    /// Defaults: `τ₁ = τ₂ = 1/2`, exact engine, `g = 1`.
    pub fn new(atom: AtomicState, alpha: C64) -> Self {
        Self {
            atom,
            alpha,
            tau1: 0.5,
            tau2: 0.5,
            engine: Engine::Exact,
            g: 1.0,
            cutoff: None,
            free_phase: 0.0,
        }
    }

    pub fn with_taus(mut self, tau1: f64, tau2: f64) -> Self {
        self.tau1 = tau1;
        self.tau2 = tau2;
        self
    }

    pub fn with_engine(mut self, engine: Engine) -> Self {
        self.engine = engine;
        self
    }

    pub fn with_cutoff(mut self, cutoff: Option<usize>) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn nbar(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    pub fn effective_cutoff(&self) -> usize {
        self.cutoff.unwrap_or_else(|| default_cutoff(self.nbar()))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, tau) in [("tau1", self.tau1), ("tau2", self.tau2)] {
            if !(tau > 0.0 && tau < 1.0) {
                return Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {tau}")));
            }
        }
        if !(self.nbar().is_finite() && self.nbar() > 0.0) {
            return Err(Error::InvalidParameter("|alpha|² must be positive".into()));
        }
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(Error::InvalidParameter(format!("g must be positive, got {}", self.g)));
        }
        self.atom.require_normalized()
    }
}

/// Detector outcome: projection onto the cavity's initial coherent state
/// (`Same`) or onto its negative (`Opposite`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Detection {
    Same,
    Opposite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellLabel {
    PsiMinus,
    PhiMinus,
    PhiPlus,
    PsiPlus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [Self::PsiMinus, Self::PhiMinus, Self::PhiPlus, Self::PsiPlus];

    /// Heralded state for a pair of detections.
    pub fn heralded(d1: Detection, d2: Detection) -> Self {
        match (d1, d2) {
            (Detection::Same, Detection::Same) => Self::PsiMinus,
            (Detection::Same, Detection::Opposite) => Self::PhiMinus,
            (Detection::Opposite, Detection::Same) => Self::PhiPlus,
            (Detection::Opposite, Detection::Opposite) => Self::PsiPlus,
        }
    }

    pub fn detections(self) -> (Detection, Detection) {
        match self {
            Self::PsiMinus => (Detection::Same, Detection::Same),
            Self::PhiMinus => (Detection::Same, Detection::Opposite),
            Self::PhiPlus => (Detection::Opposite, Detection::Same),
            Self::PsiPlus => (Detection::Opposite, Detection::Opposite),
        }
    }

    pub fn state(self, phi: f64) -> AtomicState {
        match self {
            Self::PsiMinus => AtomicState::psi_minus().rephased(phi),
            Self::PhiMinus => AtomicState::phi_minus(phi),
            Self::PhiPlus => AtomicState::phi_plus(phi),
            Self::PsiPlus => AtomicState::psi_plus().rephased(phi),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::PsiMinus => "psi_minus",
            Self::PhiMinus => "phi_minus",
            Self::PhiPlus => "phi_plus",
            Self::PsiPlus => "psi_plus",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Success { d1: Detection, d2: Detection },
    Fail,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolOutcome {
    pub branch: Branch,
    pub probability: f64,
    /// Normalized conditional atomic state, referenced to `φ = arg α`.
    pub postselected_atom: Option<AtomicState>,
    pub bell_label: Option<BellLabel>,
    /// `|⟨Bell|ψ⟩|²`.
    pub fidelity: Option<f64>,
}

/// Where the failure probability comes from.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FailureBreakdown {
    /// Neither `|α⟩` nor `|-α⟩` found in the first cavity.
    pub first_cavity: f64,
    /// First cavity gave `|α⟩`, second cavity neither `|iα⟩` nor `|-iα⟩`.
    pub second_after_same: f64,
    /// First cavity gave `|-α⟩`, second cavity neither.
    pub second_after_opposite: f64,
}

impl FailureBreakdown {
    pub fn total(&self) -> f64 {
        self.first_cavity + self.second_after_same + self.second_after_opposite
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolRun {
    /// Success branches Ψ⁻, Φ⁻, Φ⁺, Ψ⁺, then `Fail`.
    pub outcomes: Vec<ProtocolOutcome>,
    pub failures: FailureBreakdown,
}

impl ProtocolRun {
    pub fn outcome(&self, label: BellLabel) -> &ProtocolOutcome {
        self.outcomes
            .iter()
            .find(|o| o.bell_label == Some(label))
            .expect("every label has a branch")
    }

    pub fn fail(&self) -> &ProtocolOutcome {
        self.outcomes.last().expect("fail branch is last")
    }

    pub fn success_probability(&self) -> f64 {
        self.outcomes[..4].iter().map(|o| o.probability).sum()
    }
}

/// Conditional atomic amplitudes after a field projection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projection {
    /// `(I ⊗ ⟨target|)|Ψ⟩`, not normalized.
    pub atom: AtomicState,
    pub probability: f64,
}

impl Projection {
    pub fn is_negligible(&self) -> bool {
        self.probability < PROBABILITY_FLOOR
    }

    pub fn normalized(&self) -> Result<AtomicState> {
        if self.is_negligible() {
            return Err(Error::ZeroProbability { probability: self.probability });
        }
        self.atom.normalized()
    }
}

/// Applies `I ⊗ |target⟩⟨target|` and returns the atomic amplitudes and the
/// branch probability. The atomic state is referenced to the joint state's
/// Bell phase, or `φ = 0` for a computational-basis joint state.
pub fn project_field(joint: &JointState, target: &FieldState) -> Result<Projection> {
    target.require_normalized()?;
    let amps = joint.field_overlap(target)?;
    let atom = match joint.basis() {
        AtomBasis::Bell { phi } => AtomicState::from_bell(amps, phi),
        AtomBasis::Computational => AtomicState::from_computational(amps, 0.0),
    };
    let probability = atom.norm_sqr();
    Ok(Projection { atom, probability })
}

struct Stage {
    same: Projection,
    opposite: Projection,
    fail: f64,
}

/// One cavity passage starting from `atom ⊗ |beta⟩`, followed by the
/// sequential measurement `|β⟩`, then `|-β⟩` on the remainder.
fn run_stage(config: &ProtocolConfig, atom: &AtomicState, beta: C64, tau: f64) -> Result<Stage> {
    let cutoff = config.effective_cutoff();
    let joint = match config.engine {
        Engine::Exact => {
            let field = coherent_state(beta, cutoff)?;
            let params = ModelParams { g: config.g, nbar: beta.norm_sqr(), phi: beta.arg() };
            evolve_exact(atom, &field, config.g, unscaled_time(tau, &params))?
        }
        Engine::Approx => approx_state(atom, beta, tau, cutoff)?.joint(),
    };
    let same_target = coherent_state(beta, cutoff)?;
    let opposite_target = coherent_state(-beta, cutoff)?;
    let same = project_field(&joint, &same_target)?;
    let rest = joint.without_field(&same_target)?;
    let opposite = project_field(&rest, &opposite_target)?;
    let fail = rest.without_field(&opposite_target)?.norm_sqr();
    Ok(Stage { same, opposite, fail })
}

/// `e^{-iθ Σσ⁺σ⁻}` on the atoms.
fn free_rotate(atom: &AtomicState, theta: f64) -> AtomicState {
    let c = atom.to_computational();
    let one = C64::from_polar(1.0, -theta);
    let two = C64::from_polar(1.0, -2.0 * theta);
    AtomicState::from_computational([c[0], c[1] * one, c[2] * one, c[3] * two], atom.phi)
}

/// Runs the full two-cavity sequence and returns the five outcomes.
pub fn run_protocol(config: &ProtocolConfig) -> Result<ProtocolRun> {
    config.validate()?;
    let phi = config.alpha.arg();
    let theta = config.free_phase;
    let beta2 = C64::i() * config.alpha * C64::from_polar(1.0, -theta);

    let first = run_stage(config, &config.atom, config.alpha, config.tau1)?;
    let mut outcomes = Vec::with_capacity(5);
    let mut failures = FailureBreakdown { first_cavity: first.fail, ..Default::default() };

    for (d1, proj1) in [(Detection::Same, first.same), (Detection::Opposite, first.opposite)] {
        let second = if proj1.is_negligible() {
            None
        } else {
            let atom = free_rotate(&proj1.normalized()?, theta);
            Some(run_stage(config, &atom, beta2, config.tau2)?)
        };
        let stage_fail = second.as_ref().map_or(0.0, |s| s.fail) * proj1.probability;
        match d1 {
            Detection::Same => failures.second_after_same = stage_fail,
            Detection::Opposite => failures.second_after_opposite = stage_fail,
        }
        for d2 in [Detection::Same, Detection::Opposite] {
            let label = BellLabel::heralded(d1, d2);
            let proj2 = second.as_ref().map(|s| match d2 {
                Detection::Same => s.same,
                Detection::Opposite => s.opposite,
            });
            let probability = proj2.map_or(0.0, |p| p.probability) * proj1.probability;
            let atom = match proj2 {
                Some(p) if !p.is_negligible() => Some(free_rotate(&p.normalized()?, -theta).rephased(phi)),
                _ => None,
            };
            let fidelity = atom.map(|a| label.state(phi).fidelity(&a));
            outcomes.push(ProtocolOutcome {
                branch: Branch::Success { d1, d2 },
                probability,
                postselected_atom: atom,
                bell_label: Some(label),
                fidelity,
            });
        }
    }
    let success: f64 = outcomes.iter().map(|o| o.probability).sum();
    outcomes.push(ProtocolOutcome {
        branch: Branch::Fail,
        probability: 1.0 - success,
        postselected_atom: None,
        bell_label: None,
        fidelity: None,
    });
    Ok(ProtocolRun { outcomes, failures })
}

fn sweep_columns(first: &str) -> Vec<String> {
    let mut cols = vec![first.to_string()];
    cols.extend(BellLabel::ALL.iter().map(|l| format!("fb_{}", l.name())));
    cols.extend(BellLabel::ALL.iter().map(|l| format!("p_{}", l.name())));
    cols.push("p_fail".into());
    cols
}

fn sweep_row(x: f64, run: &ProtocolRun) -> Vec<f64> {
    let mut row = vec![x];
    row.extend(BellLabel::ALL.iter().map(|&l| run.outcome(l).fidelity.unwrap_or(f64::NAN)));
    row.extend(BellLabel::ALL.iter().map(|&l| run.outcome(l).probability));
    row.push(run.fail().probability);
    row
}

/// Exact-engine protocol at each `n̄`, with `α = √n̄ e^{iφ}` and `φ` the
/// atom's reference phase.
pub fn fidelity_vs_nbar(atom: &AtomicState, nbars: &[f64], tau: f64, g: f64) -> Result<SweepResult> {
    let rows: Result<Vec<Vec<f64>>> = nbars
        .par_iter()
        .map(|&nbar| {
            let mut config = ProtocolConfig::new(*atom, C64::from_polar(nbar.sqrt(), atom.phi))
                .with_taus(tau, tau);
            config.g = g;
            Ok(sweep_row(nbar, &run_protocol(&config)?))
        })
        .collect();
    let mut out = SweepResult::new(sweep_columns("nbar"));
    rows?.into_iter().for_each(|r| out.push(r));
    Ok(out)
}

/// Exact-engine protocol with `τ₁ = τ₂ = τ` for each `τ`.
pub fn fidelity_vs_tau(atom: &AtomicState, nbar: f64, taus: &[f64], g: f64, cutoff: Option<usize>) -> Result<SweepResult> {
    let rows: Result<Vec<Vec<f64>>> = taus
        .par_iter()
        .map(|&tau| {
            let mut config = ProtocolConfig::new(*atom, C64::from_polar(nbar.sqrt(), atom.phi))
                .with_taus(tau, tau)
                .with_cutoff(cutoff);
            config.g = g;
            Ok(sweep_row(tau, &run_protocol(&config)?))
        })
        .collect();
    let mut out = SweepResult::new(sweep_columns("tau"));
    rows?.into_iter().for_each(|r| out.push(r));
    Ok(out)
}

/// Peak spacing estimate used for the `τ` oscillation: mean distance between
/// consecutive local maxima of `ys` inside `window`.
pub fn mean_peak_spacing(xs: &[f64], ys: &[f64], window: (f64, f64)) -> Option<f64> {
    let peaks: Vec<f64> = crate::sweep::local_maxima(xs, ys)
        .into_iter()
        .map(|(x, _)| x)
        .filter(|x| *x >= window.0 && *x <= window.1)
        .collect();
    if peaks.len() < 2 {
        return None;
    }
    Some((peaks[peaks.len() - 1] - peaks[0]) / (peaks.len() - 1) as f64)
}

/// Ideal branch probabilities `{|c⁻|², b|d⁻|², b|d⁺|², b²|c⁺|²}` and the ideal
/// failure probability, for an atom referenced to `φ = arg α`.
pub fn ideal_probabilities(atom: &AtomicState, phi: f64) -> ([f64; 4], f64) {
    let b = crate::overlaps::b_factor();
    let a = atom.rephased(phi);
    let (cm, cp, dm, dp) = (a.cminus.norm_sqr(), a.cplus.norm_sqr(), a.dminus.norm_sqr(), a.dplus.norm_sqr());
    ([cm, b * dm, b * dp, b * b * cp], (1.0 - b) * (dm + dp) + (1.0 - b * b) * cp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::overlaps::{b_factor, magic_nbar};

    fn example_atom() -> AtomicState {
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

    fn magic_config(m: u32) -> ProtocolConfig {
        let atom = example_atom();
        ProtocolConfig::new(atom, C64::from_polar(magic_nbar(m).sqrt(), atom.phi))
    }

    #[test]
    fn table_probabilities_at_magic_nbar() {
        let run = run_protocol(&magic_config(36)).unwrap();
        let expected = [0.3085, 0.0972, 0.0842, 0.1020];
        for (label, p) in BellLabel::ALL.iter().zip(expected) {
            let got = run.outcome(*label).probability;
            assert!((got - p).abs() < 0.01, "{label:?}: {got} vs {p}");
        }
        let (_, ideal_fail) = ideal_probabilities(&example_atom(), example_atom().phi);
        assert!((run.fail().probability - ideal_fail).abs() < 0.01);
        let total: f64 = run.outcomes.iter().map(|o| o.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!((run.failures.total() - run.fail().probability).abs() < 1e-10);
    }

    #[test]
    fn first_cavity_success() {
        let run = run_protocol(&magic_config(36)).unwrap();
        let p1 = run.outcome(BellLabel::PsiMinus).probability + run.outcome(BellLabel::PhiMinus).probability
            + run.failures.second_after_same;
        assert!((p1 - 0.4895).abs() < 0.01, "{p1}");
    }

    #[test]
    fn psi_minus_is_heralded_perfectly() {
        let atom = AtomicState::psi_minus().rephased(0.4);
        let config = ProtocolConfig::new(atom, C64::from_polar(20.0f64.sqrt(), 0.4));
        let run = run_protocol(&config).unwrap();
        let o = run.outcome(BellLabel::PsiMinus);
        assert!((o.probability - 1.0).abs() < 1e-10);
        assert!((o.fidelity.unwrap() - 1.0).abs() < 1e-10);
        assert!(run.outcome(BellLabel::PsiPlus).fidelity.is_none());
    }

    #[test]
    fn heralded_states_are_bell_like_at_large_nbar() {
        let run = run_protocol(&magic_config(60)).unwrap();
        for label in BellLabel::ALL {
            let f = run.outcome(label).fidelity.unwrap();
            assert!(f > 0.8, "{label:?}: {f}");
        }
    }

    #[test]
    fn global_phase_covariance() {
        let base = magic_config(12);
        let a = run_protocol(&base).unwrap();
        let shift = 0.77;
        let mut rotated = base;
        rotated.atom.phi = base.atom.phi + shift;
        rotated.alpha = base.alpha * C64::from_polar(1.0, shift);
        let b = run_protocol(&rotated).unwrap();
        for (x, y) in a.outcomes.iter().zip(&b.outcomes) {
            assert!((x.probability - y.probability).abs() < 1e-8);
            if let (Some(fx), Some(fy)) = (x.fidelity, y.fidelity) {
                assert!((fx - fy).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn free_evolution_is_invisible() {
        let base = magic_config(8);
        let a = run_protocol(&base).unwrap();
        for theta in [0.3, 1.9, -2.4] {
            let mut shifted = base;
            shifted.free_phase = theta;
            let b = run_protocol(&shifted).unwrap();
            for (x, y) in a.outcomes.iter().zip(&b.outcomes) {
                assert!((x.probability - y.probability).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn ideal_totals_at_large_magic_nbar() {
        let atom = example_atom();
        let (ideal, ideal_fail) = ideal_probabilities(&atom, atom.phi);
        let b = b_factor();
        let a = atom.rephased(atom.phi);
        let pt = b + (1.0 - b) * (a.cminus.norm_sqr() - b * a.cplus.norm_sqr());
        assert!((ideal.iter().sum::<f64>() - pt).abs() < 1e-12);
        assert!((pt + ideal_fail - 1.0).abs() < 1e-12);
        for m in [30, 45] {
            let run = run_protocol(&magic_config(m)).unwrap();
            assert!((run.success_probability() - pt).abs() < 0.01, "m={m}");
        }
    }

    #[test]
    fn approx_engine_tracks_exact() {
        let exact = run_protocol(&magic_config(36)).unwrap();
        let approx = run_protocol(&magic_config(36).with_engine(Engine::Approx)).unwrap();
        for (x, y) in exact.outcomes.iter().zip(&approx.outcomes) {
            assert!((x.probability - y.probability).abs() < 0.03);
        }
    }

    #[test]
    fn rejects_bad_times() {
        let c = magic_config(4).with_taus(0.0, 0.5);
        assert!(matches!(run_protocol(&c), Err(Error::InvalidParameter(_))));
        let c = magic_config(4).with_taus(0.5, 1.0);
        assert!(run_protocol(&c).is_err());
    }

    #[test]
    fn projection_floor() {
        let p = Projection { atom: AtomicState::psi_plus().scaled(C64::new(1e-8, 0.0)), probability: 1e-16 };
        assert!(matches!(p.normalized(), Err(Error::ZeroProbability { .. })));
    }
}
