//! Wigner function of a single cavity mode on a rectangular phase-space grid.
//!
//! Uses the displaced-parity form
//! `W(β) = (2/π) tr[ρ D(β) P D†(β)] = (2/π) Σ_{a,b} ρ_{ab} (-1)^a ⟨b|D(2β)|a⟩`
//! with the Fock matrix elements of `D(2β)` built from normalized Laguerre
//! functions. No phase-space Fourier transform is involved, so the only
//! error source is the Fock truncation of `ρ` itself.

use std::f64::consts::FRAC_2_PI;
use std::io::Write;

use rayon::prelude::*;

use crate::dynamics::{evolve_exact, unscaled_time, ModelParams};
use crate::fock::displacement::scaled_laguerre;
use crate::fock::{coherent_state, partial_trace_field, AtomicState, DensityMatrix};
use crate::sweep::format_value;
use crate::{Error, Result, C64};

/// Largest `ρ - ρ†` entry accepted.
pub const HERMITIAN_TOL: f64 = 1e-8;
/// Largest imaginary part of `W` tolerated before it is discarded.
pub const IMAG_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl GridSpec {
    /// 201×201 points over `[-√n̄-5, √n̄+5]²`.
    pub fn default_for(nbar: f64) -> Self {
        let r = nbar.max(0.0).sqrt() + 5.0;
        Self { re_min: -r, re_max: r, im_min: -r, im_max: r, n_re: 201, n_im: 201 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.n_re >= 2
            && self.n_im >= 2
            && self.re_min < self.re_max
            && self.im_min < self.im_max
            && [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("bad phase-space grid {self:?}")))
        }
    }

    pub fn re(&self, i: usize) -> f64 {
        self.re_min + (self.re_max - self.re_min) * i as f64 / (self.n_re - 1) as f64
    }

    pub fn im(&self, j: usize) -> f64 {
        self.im_min + (self.im_max - self.im_min) * j as f64 / (self.n_im - 1) as f64
    }

    pub fn cell_area(&self) -> f64 {
        (self.re_max - self.re_min) / (self.n_re - 1) as f64 * (self.im_max - self.im_min) / (self.n_im - 1) as f64
    }
}

/// Wigner values with `values[j * n_re + i] = W(re(i) + i·im(j))`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl PhaseSpaceGrid {
    pub fn value(&self, i_re: usize, j_im: usize) -> f64 {
        self.values[j_im * self.spec.n_re + i_re]
    }

    pub fn point(&self, i_re: usize, j_im: usize) -> C64 {
        C64::new(self.spec.re(i_re), self.spec.im(j_im))
    }

    /// Riemann sum `Σ W ΔreΔim`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.cell_area()
    }

    pub fn max(&self) -> (C64, f64) {
        let (idx, &w) = self
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("grid is never empty");
        (self.point(idx % self.spec.n_re, idx / self.spec.n_re), w)
    }

    /// `π Σ W_self W_other ΔreΔim`, which approximates `tr(ρσ)`.
    pub fn trace_product(&self, other: &PhaseSpaceGrid) -> f64 {
        let dot: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        std::f64::consts::PI * dot * self.spec.cell_area()
    }

    /// Centroid of the positive part of `W` inside the disk `|β - guess| ≤ radius`
    /// together with the enclosed positive mass. `None` if the disk holds no
    /// positive values.
    pub fn lobe_center(&self, guess: C64, radius: f64) -> Option<(C64, f64)> {
        let mut mass = 0.0;
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..self.spec.n_im {
            for i in 0..self.spec.n_re {
                let p = self.point(i, j);
                let w = self.value(i, j);
                if w > 0.0 && (p - guess).norm() <= radius {
                    mass += w;
                    acc += p * w;
                }
            }
        }
        (mass > 0.0).then(|| (acc / mass, mass * self.spec.cell_area()))
    }

    /// CSV with header `re,im,w`, `im` varying slowest.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "re,im,w")?;
        for j in 0..self.spec.n_im {
            let im = format_value(self.spec.im(j));
            for i in 0..self.spec.n_re {
                writeln!(out, "{},{},{}", format_value(self.spec.re(i)), im, format_value(self.value(i, j)))?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// `ρ_{a,a+k}(-1)^a` and `ρ_{a+k,a}(-1)^a` for each diagonal offset `k`.
struct Diagonals {
    below: Vec<Vec<C64>>,
    above: Vec<Vec<C64>>,
}

impl Diagonals {
    fn new(rho: &DensityMatrix) -> Self {
        let dim = rho.dim();
        let sign = |a: usize| if a.is_multiple_of(2) { 1.0 } else { -1.0 };
        let below = (0..dim).map(|k| (0..dim - k).map(|a| rho.get(a, a + k) * sign(a)).collect()).collect();
        let above = (0..dim).map(|k| (0..dim - k).map(|a| rho.get(a + k, a) * sign(a)).collect()).collect();
        Self { below, above }
    }

    fn eval(&self, beta: C64, scratch: &mut [f64]) -> C64 {
        let gamma = beta * 2.0;
        let x = gamma.norm_sqr();
        let theta = gamma.arg();
        let dim = self.below.len();
        let mut total = C64::new(0.0, 0.0);
        for k in 0..dim {
            let f = &mut scratch[..dim - k];
            scaled_laguerre(k, x, f);
            let lower: C64 = self.below[k].iter().zip(f.iter()).map(|(r, &v)| r * v).sum();
            let phase = C64::from_polar(1.0, k as f64 * theta);
            total += lower * phase;
            if k > 0 {
                let upper: C64 = self.above[k].iter().zip(f.iter()).map(|(r, &v)| r * v).sum();
                total += upper * phase.conj();
            }
        }
        total * FRAC_2_PI
    }
}

/// Evaluates `W` at one phase-space point without input checks.
pub fn wigner_point(rho: &DensityMatrix, beta: C64) -> C64 {
    let mut scratch = vec![0.0; rho.dim()];
    Diagonals::new(rho).eval(beta, &mut scratch)
}

/// Wigner function of `rho` on the grid, evaluated in parallel over points.
pub fn wigner_grid(rho: &DensityMatrix, spec: &GridSpec) -> Result<PhaseSpaceGrid> {
    spec.validate()?;
    let residual = rho.hermitian_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NonHermitian { residual });
    }
    let trace = rho.trace();
    if (trace.re - 1.0).abs() > HERMITIAN_TOL || trace.im.abs() > HERMITIAN_TOL {
        return Err(Error::NotNormalized { norm_sqr: trace.re });
    }
    let diags = Diagonals::new(rho);
    let dim = rho.dim();
    let n_re = spec.n_re;
    let raw: Vec<C64> = (0..spec.n_re * spec.n_im)
        .into_par_iter()
        .map_init(
            || vec![0.0; dim],
            |scratch, idx| diags.eval(C64::new(spec.re(idx % n_re), spec.im(idx / n_re)), scratch),
        )
        .collect();
    let worst = raw.iter().map(|w| w.im.abs()).fold(0.0, f64::max);
    if worst > IMAG_TOL {
        return Err(Error::NonHermitian { residual: worst });
    }
    Ok(PhaseSpaceGrid { spec: *spec, values: raw.into_iter().map(|w| w.re).collect() })
}

/// Reduced cavity state after exact evolution of `atom ⊗ |alpha⟩` for scaled
/// time `tau`.
pub fn evolved_field(atom: &AtomicState, alpha: C64, tau: f64, g: f64, cutoff: usize) -> Result<DensityMatrix> {
    let field = coherent_state(alpha, cutoff)?;
    let params = ModelParams::new(g, alpha.norm_sqr(), alpha.arg())?;
    let joint = evolve_exact(atom, &field, g, unscaled_time(tau, &params))?;
    Ok(partial_trace_field(&joint))
}
