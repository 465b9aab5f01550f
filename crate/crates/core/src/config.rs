//! File-backed run configuration (JSON).
//!
//! Every field has a default, so `{}` is a valid config describing the
//! reference atom at `n̄ = 36.16`. Complex numbers are `[re, im]` pairs.
//!
//! ```json
//! {
//!   "atom": { "cminus": [0.5554, 0.0], "cplus": [0.3213, 0.5004],
//!             "dminus": [-0.2053, 0.3726], "dplus": [0.1046, 0.3819], "phi": 1.37 },
//!   "nbar": 36.16, "g": 1.0, "cutoff": null,
//!   "tau1": 0.5, "tau2": 0.5, "engine": "exact", "free_phase": 0.0,
//!   "grid": null,
//!   "sweeps": { ... },
//!   "output": null
//! }
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::fock::{default_cutoff, AtomicState};
use crate::protocol::{Engine, ProtocolConfig};
use crate::wigner::GridSpec;
use crate::{Error, Result, C64};

/// Deviation of `Σ|c|²` from 1 above which loading reports a renormalization.
pub const RENORMALIZE_NOTICE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub cminus: [f64; 2],
    pub cplus: [f64; 2],
    pub dminus: [f64; 2],
    pub dplus: [f64; 2],
    pub phi: f64,
}

impl Default for AtomConfig {
    fn default() -> Self {
        Self {
            cminus: [0.5554, 0.0],
            cplus: [0.3213, 0.5004],
            dminus: [-0.2053, 0.3726],
            dplus: [0.1046, 0.3819],
            phi: 1.37,
        }
    }
}

impl AtomConfig {
    pub fn norm_sqr(&self) -> f64 {
        [self.cminus, self.cplus, self.dminus, self.dplus].iter().map(|[re, im]| re * re + im * im).sum()
    }

    /// Normalized atomic state.
    pub fn state(&self) -> Result<AtomicState> {
        let c = |[re, im]: [f64; 2]| C64::new(re, im);
        AtomicState::new(c(self.cminus), c(self.cplus), c(self.dminus), c(self.dplus), self.phi).normalized()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineConfig {
    #[default]
    Exact,
    Approx,
}

impl From<EngineConfig> for Engine {
    fn from(e: EngineConfig) -> Self {
        match e {
            EngineConfig::Exact => Engine::Exact,
            EngineConfig::Approx => Engine::Approx,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl From<GridConfig> for GridSpec {
    fn from(g: GridConfig) -> Self {
        GridSpec { re_min: g.re_min, re_max: g.re_max, im_min: g.im_min, im_max: g.im_max, n_re: g.n_re, n_im: g.n_im }
    }
}

/// Sampling of the CSV datasets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Photon numbers for `approx-fidelity`.
    pub nbar_list: Vec<f64>,
    /// Points on `τ ∈ [0, 1]` for `approx-fidelity` and `overlap`.
    pub tau_steps: usize,
    pub nbar_min: f64,
    pub nbar_max: f64,
    pub nbar_steps: usize,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_points: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            nbar_list: vec![10.0, 20.0, 40.0, 80.0, 160.0],
            tau_steps: 101,
            nbar_min: 1.0,
            nbar_max: 50.0,
            nbar_steps: 491,
            tau_min: 0.4,
            tau_max: 0.6,
            tau_points: 801,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub atom: AtomConfig,
    pub nbar: f64,
    pub g: f64,
    pub cutoff: Option<usize>,
    pub tau1: f64,
    pub tau2: f64,
    pub engine: EngineConfig,
    pub free_phase: f64,
    /// `None` selects [`GridSpec::default_for`] at the configured `n̄`.
    pub grid: Option<GridConfig>,
    pub sweeps: SweepConfig,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            atom: AtomConfig::default(),
            nbar: 36.16,
            g: 1.0,
            cutoff: None,
            tau1: 0.5,
            tau2: 0.5,
            engine: EngineConfig::Exact,
            free_phase: 0.0,
            grid: None,
            sweeps: SweepConfig::default(),
            output: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.nbar.is_finite() && self.nbar > 0.0) {
            return bad(format!("nbar must be positive, got {}", self.nbar));
        }
        if !(self.g.is_finite() && self.g > 0.0) {
            return bad(format!("g must be positive, got {}", self.g));
        }
        if !(self.atom.norm_sqr().is_finite() && self.atom.norm_sqr() > 0.0) {
            return bad("atomic amplitudes must not all vanish".into());
        }
        if let Some(grid) = self.grid {
            GridSpec::from(grid).validate()?;
        }
        let s = &self.sweeps;
        if s.nbar_list.iter().any(|&n| n.is_nan() || n <= 0.0) {
            return bad("sweeps.nbar_list entries must be positive".into());
        }
        if s.tau_steps < 2 || s.nbar_steps < 2 || s.tau_points < 2 {
            return bad("sweep step counts must be at least 2".into());
        }
        if !(s.nbar_min > 0.0 && s.nbar_min < s.nbar_max) {
            return bad("need 0 < sweeps.nbar_min < sweeps.nbar_max".into());
        }
        if !(s.tau_min > 0.0 && s.tau_min < s.tau_max && s.tau_max < 1.0) {
            return bad("need 0 < sweeps.tau_min < sweeps.tau_max < 1".into());
        }
        Ok(())
    }

    /// Message to show when the atomic amplitudes needed renormalizing.
    pub fn renormalization_notice(&self) -> Option<String> {
        let n = self.atom.norm_sqr();
        ((n - 1.0).abs() > RENORMALIZE_NOTICE_TOL)
            .then(|| format!("atomic amplitudes have squared norm {n:.8}; renormalized to 1"))
    }

    pub fn atom(&self) -> Result<AtomicState> {
        self.atom.state()
    }

    /// `α = √n̄ e^{iφ}`.
    pub fn alpha(&self) -> C64 {
        C64::from_polar(self.nbar.sqrt(), self.atom.phi)
    }

    pub fn effective_cutoff(&self) -> usize {
        self.cutoff.unwrap_or_else(|| default_cutoff(self.nbar))
    }

    pub fn grid_spec(&self) -> GridSpec {
        self.grid.map(GridSpec::from).unwrap_or_else(|| GridSpec::default_for(self.nbar))
    }

    pub fn protocol(&self) -> Result<ProtocolConfig> {
        let mut p = ProtocolConfig::new(self.atom()?, self.alpha())
            .with_taus(self.tau1, self.tau2)
            .with_engine(self.engine.into())
            .with_cutoff(self.cutoff);
        p.g = self.g;
        p.free_phase = self.free_phase;
        Ok(p)
    }
}
