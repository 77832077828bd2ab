//! Orchestration behind the command line subcommands.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use dsmimo_core::{run_experiment, Error, ExperimentConfig, Result};
use serde::Serialize;

use crate::config::parse_config;
use crate::diag::{correlation_grid, propagation_curves, write_correlation_csv, write_propagation_csv};
use crate::output::{emit_outputs, RunMeta};
use crate::presets::{Preset, PresetPlan};

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Invocation {
    pub preset: Option<Preset>,
    pub config_file: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub drops: Option<usize>,
    pub realizations: Option<usize>,
    pub workers: Option<usize>,
    /// Raw `key=value` overrides, applied after the dedicated flags.
    pub overrides: Vec<String>,
}

impl Invocation {
    /// Dedicated flags expressed as overrides, followed by the raw overrides.
    fn all_overrides(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(s) = self.seed {
            out.push(format!("sampling.seed={s}"));
        }
        if let Some(d) = self.drops {
            out.push(format!("sampling.drops={d}"));
        }
        if let Some(r) = self.realizations {
            out.push(format!("sampling.realizations={r}"));
        }
        if let Some(w) = self.workers {
            out.push(format!("sampling.workers={w}"));
        }
        if let Some(o) = &self.out {
            let quoted = toml::Value::String(o.display().to_string()).to_string();
            out.push(format!("output_dir={quoted}"));
        }
        out.extend(self.overrides.iter().cloned());
        out
    }
}

/// Resolves the experiment configuration of an invocation: preset (or the
/// built-in defaults), then the config file, then flags and overrides.
pub fn resolve_experiment(inv: &Invocation) -> Result<ExperimentConfig> {
    let base = match inv.preset {
        None => ExperimentConfig::default(),
        Some(p) => match p.plan() {
            PresetPlan::Experiment(c) => c,
            _ => {
                return Err(Error::config(
                    "preset",
                    format!("`{p}` is a diagnostic preset; use the diag subcommand"),
                ))
            }
        },
    };
    parse_config(&base, inv.config_file.as_deref(), &inv.all_overrides())
}

/// Runs an SE experiment and writes its outputs. Returns the written files.
pub fn run_experiment_command(inv: &Invocation) -> Result<Vec<PathBuf>> {
    let config = resolve_experiment(inv)?;
    let start = Instant::now();
    log::info!(
        "running {} drops x {} realizations, {} models, {} detectors",
        config.sampling.drops,
        config.sampling.realizations,
        config.models.len(),
        config.detectors.len()
    );
    let report = run_experiment(&config)?;
    let meta = RunMeta {
        label: inv.preset.map_or("custom".to_string(), |p| p.name().to_string()),
        preset_hash: inv.preset.map(|p| p.hash()),
        overrides: inv.all_overrides(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    emit_outputs(&report, &config, &meta, &config.output_dir)
}

#[derive(Serialize)]
struct DiagManifest<'a> {
    preset: &'a str,
    preset_hash: String,
    seed: i64,
    samples: usize,
    wall_time_s: f64,
    version: &'static str,
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut w = File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))?;
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Runs a diagnostic preset (fig1, fig3, fig4, fig5). Only `seed`,
/// `realizations` (samples or pairs) and `out` apply.
pub fn run_diag_command(inv: &Invocation) -> Result<Vec<PathBuf>> {
    let preset = inv
        .preset
        .ok_or_else(|| Error::config("preset", "diag needs a preset"))?;
    if inv.config_file.is_some() || inv.drops.is_some() || inv.workers.is_some() || !inv.overrides.is_empty() {
        return Err(Error::config(
            "diag",
            "diagnostics accept only --seed, --realizations and --out",
        ));
    }
    let seed = inv.seed.unwrap_or(1);
    crate::config::check_seed(seed)?;
    let dir = inv.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let start = Instant::now();
    let stem = format!("{preset}_seed{seed}");
    let mut written = Vec::new();
    let samples = match preset.plan() {
        PresetPlan::Correlation(mut d) => {
            if let Some(n) = inv.realizations {
                d.samples = n;
            }
            let grid = correlation_grid(&d, seed)?;
            let path = dir.join(format!("{stem}_correlation.csv"));
            write_file(&path, |w| write_correlation_csv(&grid, w))?;
            written.push(path);
            d.samples
        }
        PresetPlan::Propagation(mut d) => {
            if let Some(n) = inv.realizations {
                d.pairs = n;
            }
            let curves = propagation_curves(&d, seed)?;
            let path = dir.join(format!("{stem}_propagation.csv"));
            write_file(&path, |w| write_propagation_csv(&curves, w))?;
            written.push(path);
            d.pairs
        }
        PresetPlan::Experiment(_) => {
            return Err(Error::config(
                "preset",
                format!("`{preset}` is an SE experiment; use the figure subcommand"),
            ))
        }
    };
    let manifest = DiagManifest {
        preset: preset.name(),
        preset_hash: preset.hash(),
        seed: seed as i64,
        samples,
        wall_time_s: start.elapsed().as_secs_f64(),
        version: env!("CARGO_PKG_VERSION"),
    };
    let text = toml::to_string(&manifest).map_err(|e| Error::config("manifest", e.to_string()))?;
    let path = dir.join(format!("{stem}_manifest.toml"));
    write_file(&path, |w| w.write_all(text.as_bytes()))?;
    written.push(path);
    Ok(written)
}

/// Runs any figure preset, dispatching diagnostics and SE experiments.
pub fn run_figure_preset(inv: &Invocation) -> Result<Vec<PathBuf>> {
    let preset = inv
        .preset
        .ok_or_else(|| Error::config("preset", "figure needs a preset"))?;
    match preset.plan() {
        PresetPlan::Experiment(_) => run_experiment_command(inv),
        _ => run_diag_command(inv),
    }
}

/// Process exit code for an error category: 2 configuration, 3 numerical, 4 I/O.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } => 2,
        Error::Domain(_) | Error::Numerical(_) => 3,
        Error::Io { .. } => 4,
    }
}
