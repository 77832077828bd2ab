//! CSV outputs and the TOML run manifest.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use dsmimo_core::engine::{aggregate_cdf, SeReport};
use dsmimo_core::{Error, ExperimentConfig, Result};
use serde::Serialize;
use toml::{Table, Value};

use crate::config::{check_seed, parse_config_str};

/// Provenance of a run, echoed into its manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    /// Preset name, or `custom` for a user configuration.
    pub label: String,
    pub preset_hash: Option<String>,
    /// Overrides applied on top of the preset or file, in order.
    pub overrides: Vec<String>,
    pub wall_time_s: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    run: RunSection<'a>,
    summary: Vec<SummaryRow>,
    exclusions: Vec<ExclusionRow>,
}

#[derive(Serialize)]
struct RunSection<'a> {
    label: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    preset_hash: Option<&'a str>,
    overrides: &'a [String],
    seed: i64,
    workers: usize,
    wall_time_s: f64,
    tau_p: usize,
    tau_c: usize,
    clamped_sinr_values: usize,
    cdf_pooling: &'static str,
    power_units: &'static str,
    version: &'static str,
}

#[derive(Serialize)]
struct SummaryRow {
    model: String,
    detector: String,
    mean_se_bps_hz: f64,
    likely_95_se_bps_hz: f64,
    samples: usize,
}

#[derive(Serialize)]
struct ExclusionRow {
    model: String,
    detector: String,
    cell_realizations: u64,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

/// Writes the per-user CSV, the pooled CDF CSV, one CDF CSV per model and
/// detector, and `{label}_seed{seed}_manifest.toml`. Returns the written paths.
pub fn emit_outputs(
    report: &SeReport,
    config: &ExperimentConfig,
    meta: &RunMeta,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let seed = config.sampling.seed;
    let stem = format!("{}_seed{seed}", meta.label);
    let mut written = Vec::new();

    let users = dir.join(format!("{stem}_users.csv"));
    write_with(&users, |w| report.write_user_csv(w))?;
    written.push(users);

    let cdf = dir.join(format!("{stem}_cdf.csv"));
    write_with(&cdf, |w| report.write_cdf_csv(w))?;
    written.push(cdf);

    let mut summary = Vec::new();
    for model in &report.models {
        for &detector in &report.detectors {
            let values = report.se_values(model, detector);
            let points = aggregate_cdf(&values)?;
            let path = dir.join(format!(
                "{}_{}_{}_seed{seed}_cdf.csv",
                meta.label,
                model.label(),
                detector
            ));
            write_with(&path, |w| {
                writeln!(w, "model,detector,se_bps_hz,cdf")?;
                for (v, f) in &points {
                    writeln!(w, "{},{},{},{}", model.label(), detector, v, f)?;
                }
                Ok(())
            })?;
            written.push(path);

            let s = report.summary(model, detector)?;
            summary.push(SummaryRow {
                model: model.label(),
                detector: detector.to_string(),
                mean_se_bps_hz: s.mean,
                likely_95_se_bps_hz: s.likely_95,
                samples: s.samples,
            });
        }
    }

    let manifest = Manifest {
        run: RunSection {
            label: &meta.label,
            preset_hash: meta.preset_hash.as_deref(),
            overrides: &meta.overrides,
            seed: seed as i64,
            workers: config.sampling.workers,
            wall_time_s: meta.wall_time_s,
            tau_p: report.tau_p,
            tau_c: report.tau_c,
            clamped_sinr_values: report.clamped(),
            cdf_pooling: "all (drop, cell, user) samples of a model and detector",
            power_units: "transmit power relative to the receiver noise power",
            version: env!("CARGO_PKG_VERSION"),
        },
        summary,
        exclusions: report
            .exclusions
            .iter()
            .map(|e| ExclusionRow {
                model: e.model.label(),
                detector: e.detector.to_string(),
                cell_realizations: e.cell_realizations,
            })
            .collect(),
    };
    check_seed(seed)?;
    let to_config_err = |e: toml::ser::Error| Error::config("manifest", e.to_string());
    let mut doc = Table::try_from(&manifest).map_err(to_config_err)?;
    doc.insert(
        "config".into(),
        Value::Table(Table::try_from(config).map_err(to_config_err)?),
    );
    let text = toml::to_string(&doc).map_err(to_config_err)?;
    let path = dir.join(format!("{stem}_manifest.toml"));
    write_with(&path, |w| w.write_all(text.as_bytes()))?;
    written.push(path);
    Ok(written)
}

/// Reads the configuration echoed in a manifest.
pub fn read_manifest_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut doc: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::config("manifest", e.message().to_string()))?;
    let config = doc
        .remove("config")
        .ok_or_else(|| Error::config("config", "manifest has no [config] table"))?;
    let body = toml::to_string(&config).map_err(|e| Error::config("config", e.to_string()))?;
    parse_config_str(&ExperimentConfig::default(), Some(&body), &[])
}
