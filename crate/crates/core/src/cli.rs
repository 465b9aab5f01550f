//! Command-line front end. Every subcommand writes one CSV dataset to
//! `--out`, the config's `output`, or stdout, in that order of preference.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::approx::approximation_fidelity;
use crate::config::RunConfig;
use crate::fock::default_cutoff;
use crate::overlaps::{overlap_approx, overlap_exact, OverlapParams};
use crate::protocol::{fidelity_vs_nbar, fidelity_vs_tau, ideal_probabilities, run_protocol, BellLabel, Detection};
use crate::sweep::{format_value, linspace, SweepResult};
use crate::wigner::{evolved_field, wigner_grid};
use crate::C64;

#[derive(Debug, Parser)]
#[command(name = "tavis-bell", version, about = "Two-atom Tavis-Cummings dynamics and atomic Bell measurement")]
pub struct Cli {
    /// JSON run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print the effective configuration as JSON and exit.
    #[arg(long)]
    pub dump_config: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Destination CSV file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wigner function of the cavity after exact evolution to scaled time tau.
    Wigner {
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Fidelity of the approximate state against exact evolution over tau in [0, 1].
    ApproxFidelity {
        /// Comma-separated mean photon numbers.
        #[arg(long, value_delimiter = ',')]
        nbar_list: Option<Vec<f64>>,
        #[arg(long)]
        tau_steps: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Branch probabilities and Bell fidelities of the two-cavity protocol.
    Protocol {
        #[command(flatten)]
        output: Output,
    },
    /// Protocol fidelities and probabilities over a range of mean photon numbers.
    FidelityVsNbar {
        #[arg(long)]
        nbar_min: Option<f64>,
        #[arg(long)]
        nbar_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        /// Scaled interaction time in both cavities.
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Protocol fidelities and probabilities over a range of interaction times.
    FidelityVsTau {
        #[arg(long)]
        tau_min: Option<f64>,
        #[arg(long)]
        tau_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Exact and asymptotic coherent-branch overlaps over tau in [0, 1].
    Overlap {
        #[arg(long)]
        nbar: Option<f64>,
        /// +1 for the overlap with |alpha>, -1 for |-alpha>.
        #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
        j: i32,
        /// Branch sign selecting the co- or counter-rotating state.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        sign: i32,
        #[arg(long)]
        tau_steps: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
}

fn open_output(out: &Option<PathBuf>, config: &RunConfig) -> Result<Box<dyn Write>> {
    match out.as_ref().or(config.output.as_ref()) {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path).with_context(|| format!("invalid config {}", path.display()))?,
        None => RunConfig::default(),
    };
    if let Some(notice) = config.renormalization_notice() {
        eprintln!("note: {notice}");
    }
    Ok(config)
}

pub fn run(cli: Cli) -> Result<()> {
    let config = load_config(&cli)?;
    if cli.dump_config {
        writeln!(io::stdout().lock(), "{}", config.to_json()?)?;
        return Ok(());
    }
    let Some(command) = cli.command else {
        anyhow::bail!("no subcommand given (try --help)");
    };
    match command {
        Command::Wigner { tau, output } => {
            anyhow::ensure!(tau >= 0.0 && tau.is_finite(), "tau must be non-negative");
            let rho = evolved_field(&config.atom()?, config.alpha(), tau, config.g, config.effective_cutoff())?;
            let grid = wigner_grid(&rho, &config.grid_spec())?;
            grid.write_csv(open_output(&output.out, &config)?)?;
        }
        Command::ApproxFidelity { nbar_list, tau_steps, output } => {
            let nbars = nbar_list.unwrap_or_else(|| config.sweeps.nbar_list.clone());
            let steps = tau_steps.unwrap_or(config.sweeps.tau_steps);
            anyhow::ensure!(steps >= 2, "tau-steps must be at least 2");
            anyhow::ensure!(nbars.iter().all(|&n| n > 0.0), "nbar values must be positive");
            let atom = config.atom()?;
            let taus = linspace(0.0, 1.0, steps);
            let points: Vec<(f64, f64)> =
                nbars.iter().flat_map(|&n| taus.iter().map(move |&t| (t, n))).collect();
            let values: Vec<f64> = points
                .par_iter()
                .map(|&(tau, nbar)| {
                    let alpha = C64::from_polar(nbar.sqrt(), atom.phi);
                    approximation_fidelity(&atom, alpha, tau, default_cutoff(nbar))
                })
                .collect::<crate::Result<_>>()?;
            let mut table = SweepResult::new(["tau", "nbar", "F"]);
            for ((tau, nbar), f) in points.into_iter().zip(values) {
                table.push(vec![tau, nbar, f]);
            }
            table.write_csv(open_output(&output.out, &config)?)?;
        }
        Command::Protocol { output } => {
            let protocol = config.protocol()?;
            let result = run_protocol(&protocol)?;
            let atom = config.atom()?;
            let (ideal, ideal_fail) = ideal_probabilities(&atom, atom.phi);
            let mut out = open_output(&output.out, &config)?;
            writeln!(out, "branch,detector1,detector2,probability,ideal_probability,fidelity")?;
            let det = |d: Detection, s: &str| match d {
                Detection::Same => s.to_string(),
                Detection::Opposite => format!("-{s}"),
            };
            for (label, p_ideal) in BellLabel::ALL.into_iter().zip(ideal) {
                let o = result.outcome(label);
                let (d1, d2) = label.detections();
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    label.name(),
                    det(d1, "alpha"),
                    det(d2, "i_alpha"),
                    format_value(o.probability),
                    format_value(p_ideal),
                    format_value(o.fidelity.unwrap_or(f64::NAN)),
                )?;
            }
            writeln!(out, "fail,,,{},{},nan", format_value(result.fail().probability), format_value(ideal_fail))?;
            out.flush()?;
            let f = result.failures;
            eprintln!(
                "fail breakdown: first cavity {:.6}, second after alpha {:.6}, second after -alpha {:.6}",
                f.first_cavity, f.second_after_same, f.second_after_opposite
            );
        }
        Command::FidelityVsNbar { nbar_min, nbar_max, steps, tau, output } => {
            let s = &config.sweeps;
            let (lo, hi) = (nbar_min.unwrap_or(s.nbar_min), nbar_max.unwrap_or(s.nbar_max));
            let steps = steps.unwrap_or(s.nbar_steps);
            anyhow::ensure!(lo > 0.0 && lo < hi && steps >= 2, "need 0 < nbar-min < nbar-max and steps >= 2");
            let table = fidelity_vs_nbar(&config.atom()?, &linspace(lo, hi, steps), tau, config.g)?;
            table.write_csv(open_output(&output.out, &config)?)?;
        }
        Command::FidelityVsTau { tau_min, tau_max, steps, output } => {
            let s = &config.sweeps;
            let (lo, hi) = (tau_min.unwrap_or(s.tau_min), tau_max.unwrap_or(s.tau_max));
            let steps = steps.unwrap_or(s.tau_points);
            anyhow::ensure!(lo > 0.0 && lo < hi && hi < 1.0 && steps >= 2, "need 0 < tau-min < tau-max < 1 and steps >= 2");
            let table =
                fidelity_vs_tau(&config.atom()?, config.nbar, &linspace(lo, hi, steps), config.g, config.cutoff)?;
            table.write_csv(open_output(&output.out, &config)?)?;
        }
        Command::Overlap { nbar, j, sign, tau_steps, output } => {
            let nbar = nbar.unwrap_or(config.nbar);
            let steps = tau_steps.unwrap_or(config.sweeps.tau_steps);
            anyhow::ensure!(steps >= 2, "tau-steps must be at least 2");
            let cutoff = config.cutoff.unwrap_or_else(|| default_cutoff(nbar));
            let mut table = SweepResult::new([
                "tau", "exact_re", "exact_im", "exact_abs", "approx_re", "approx_im", "approx_abs", "approx_valid",
            ]);
            for tau in linspace(0.0, 1.0, steps) {
                let params = OverlapParams::new(nbar, tau, j, sign)?;
                let exact = overlap_exact(&params, cutoff)?;
                let approx = overlap_approx(&params);
                let v = approx.value;
                table.push(vec![
                    tau,
                    exact.re,
                    exact.im,
                    exact.norm(),
                    v.re,
                    v.im,
                    v.norm(),
                    if approx.valid { 1.0 } else { 0.0 },
                ]);
            }
            table.write_csv(open_output(&output.out, &config)?)?;
        }
    }
    Ok(())
}
