//! Experiment configuration shared by the engine and the command line.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::PathBuf;

use crate::channel::{ChannelModelSpec, DoubleScatteringParams};
use crate::detection::DetectorKind;
use crate::error::{Error, Result};
use crate::geometry::{LinkGeometry, NetworkConfig};

/// Scattering parameters shared by every double scattering model in a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScatteringConfig {
    /// Scatterer spacing d_S in carrier wavelengths.
    pub scatterer_spacing: f64,
    /// BS-side angular spread θ.
    pub angular_spread_rad: f64,
    /// Converts cluster distances from kilometres to wavelengths.
    pub carrier_hz: f64,
}

impl Default for ScatteringConfig {
    fn default() -> Self {
        ScatteringConfig {
            scatterer_spacing: 10.0,
            angular_spread_rad: 2.0 * PI / 3.0,
            carrier_hz: 2e9,
        }
    }
}

/// One entry of the model sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelTemplate {
    Rayleigh,
    DoubleScattering {
        scatterers: usize,
        antenna_spacing: f64,
    },
}

impl ModelTemplate {
    /// Short identifier used in file names and CSV columns.
    pub fn label(&self) -> String {
        match self {
            ModelTemplate::Rayleigh => "rayleigh".into(),
            ModelTemplate::DoubleScattering {
                scatterers,
                antenna_spacing,
            } => format!("ds_s{scatterers}_dl{antenna_spacing}"),
        }
    }

    pub fn scatterers(&self) -> Option<usize> {
        match self {
            ModelTemplate::Rayleigh => None,
            ModelTemplate::DoubleScattering { scatterers, .. } => Some(*scatterers),
        }
    }

    pub fn antenna_spacing(&self) -> Option<f64> {
        match self {
            ModelTemplate::Rayleigh => None,
            ModelTemplate::DoubleScattering {
                antenna_spacing, ..
            } => Some(*antenna_spacing),
        }
    }

    /// Link model for a link with the given geometry.
    pub fn link_spec(&self, link: &LinkGeometry, scattering: &ScatteringConfig) -> ChannelModelSpec {
        let beta = link.beta_linear();
        match *self {
            ModelTemplate::Rayleigh => ChannelModelSpec::UncorrelatedRayleigh { beta },
            ModelTemplate::DoubleScattering {
                scatterers,
                antenna_spacing,
            } => ChannelModelSpec::DoubleScattering(DoubleScatteringParams {
                scatterers,
                antenna_spacing,
                scatterer_spacing: scattering.scatterer_spacing,
                angular_spread_rad: scattering.angular_spread_rad,
                azimuth_rad: link.azimuth_rad,
                cluster_distance_km: link.cluster_distance_km,
                carrier_hz: scattering.carrier_hz,
                beta,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PilotConfig {
    pub reuse_factor: usize,
}

impl Default for PilotConfig {
    fn default() -> Self {
        PilotConfig { reuse_factor: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingConfig {
    pub drops: usize,
    /// Small-scale fading realizations per drop.
    pub realizations: usize,
    pub seed: u64,
    pub workers: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            drops: 100,
            realizations: 1000,
            seed: 1,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub network: NetworkConfig,
    pub scattering: ScatteringConfig,
    pub models: Vec<ModelTemplate>,
    pub detectors: Vec<DetectorKind>,
    pub pilot: PilotConfig,
    pub sampling: SamplingConfig,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            network: NetworkConfig::default(),
            scattering: ScatteringConfig::default(),
            models: vec![ModelTemplate::Rayleigh],
            detectors: vec![DetectorKind::Mmse],
            pilot: PilotConfig::default(),
            sampling: SamplingConfig::default(),
            output_dir: PathBuf::from("results"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        let s = &self.scattering;
        if !(s.scatterer_spacing >= 0.0 && s.scatterer_spacing.is_finite()) {
            return Err(Error::config("scattering.scatterer_spacing", "must be nonnegative"));
        }
        if !(s.angular_spread_rad > 0.0 && s.angular_spread_rad <= 2.0 * PI) {
            return Err(Error::config("scattering.angular_spread_rad", "must lie in (0, 2π]"));
        }
        if !(s.carrier_hz > 0.0 && s.carrier_hz.is_finite()) {
            return Err(Error::config("scattering.carrier_hz", "must be positive"));
        }
        if self.models.is_empty() {
            return Err(Error::config("models", "the model sweep is empty"));
        }
        for m in &self.models {
            if let ModelTemplate::DoubleScattering {
                scatterers,
                antenna_spacing,
            } = m
            {
                if *scatterers == 0 {
                    return Err(Error::config("models.scatterers", "must be at least 1"));
                }
                if !(*antenna_spacing > 0.0 && antenna_spacing.is_finite()) {
                    return Err(Error::config("models.antenna_spacing", "must be positive"));
                }
            }
        }
        let mut labels: Vec<String> = self.models.iter().map(|m| m.label()).collect();
        labels.sort();
        labels.dedup();
        if labels.len() != self.models.len() {
            return Err(Error::config("models", "duplicate model in the sweep"));
        }
        if self.detectors.is_empty() {
            return Err(Error::config("detectors", "no detector selected"));
        }
        let mut d = self.detectors.clone();
        d.sort();
        d.dedup();
        if d.len() != self.detectors.len() {
            return Err(Error::config("detectors", "duplicate detector"));
        }
        if self.detectors.contains(&DetectorKind::Zf)
            && self.network.users_per_cell > self.network.antennas
        {
            return Err(Error::config(
                "detectors",
                "zero forcing needs at least as many antennas as users per cell",
            ));
        }
        if self.pilot.reuse_factor == 0 {
            return Err(Error::config("pilot.reuse_factor", "must be at least 1"));
        }
        if self.pilot.reuse_factor * self.network.users_per_cell > self.network.coherence_symbols {
            return Err(Error::config(
                "pilot.reuse_factor",
                format!(
                    "pilot length f·K = {} exceeds the coherence interval of {} symbols",
                    self.pilot.reuse_factor * self.network.users_per_cell,
                    self.network.coherence_symbols
                ),
            ));
        }
        if self.sampling.drops == 0 {
            return Err(Error::config("sampling.drops", "must be at least 1"));
        }
        if self.sampling.realizations == 0 {
            return Err(Error::config("sampling.realizations", "must be at least 1"));
        }
        if self.sampling.workers == 0 {
            return Err(Error::config("sampling.workers", "must be at least 1"));
        }
        Ok(())
    }
}
