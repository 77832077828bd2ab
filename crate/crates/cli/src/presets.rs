//! Frozen experiment presets for every reproduced figure, plus a CI-scale smoke preset.
//!
//! A preset's numbers never change silently: each one has a SHA-256 hash of
//! its canonical TOML form, recorded in every manifest and pinned by a test.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use dsmimo_core::geometry::LinkGeometry;
use dsmimo_core::{
    ChannelModelSpec, DetectorKind, Error, ExperimentConfig, ModelTemplate, Result, ScatteringConfig,
};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::to_toml;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Fig1,
    Fig3,
    Fig4,
    Fig5,
    Fig7,
    Fig8,
    Fig9,
    Smoke,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Fig1,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig7,
        Preset::Fig8,
        Preset::Fig9,
        Preset::Smoke,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig7 => "fig7",
            Preset::Fig8 => "fig8",
            Preset::Fig9 => "fig9",
            Preset::Smoke => "smoke",
        }
    }

    pub fn plan(&self) -> PresetPlan {
        let ds = |scatterers, antenna_spacing| ModelTemplate::DoubleScattering {
            scatterers,
            antenna_spacing,
        };
        let correlation = |model| {
            PresetPlan::Correlation(CorrelationDiag {
                model,
                antennas: 100,
                samples: 100_000,
                link: ReferenceLink::default(),
                scattering: ScatteringConfig::default(),
            })
        };
        let experiment = |models: Vec<ModelTemplate>, detectors: Vec<DetectorKind>| {
            PresetPlan::Experiment(ExperimentConfig {
                models,
                detectors,
                ..ExperimentConfig::default()
            })
        };
        match self {
            Preset::Fig1 => correlation(ModelTemplate::Rayleigh),
            Preset::Fig3 => correlation(ds(21, 0.5)),
            Preset::Fig4 => correlation(ds(81, 0.5)),
            Preset::Fig5 => PresetPlan::Propagation(PropagationDiag {
                models: vec![ModelTemplate::Rayleigh, ds(11, 0.5), ds(21, 0.5), ds(41, 0.5)],
                antennas: 100,
                pairs: 10_000,
                angle_steps: 40,
                fixed_azimuth_rad: 0.0,
                link: ReferenceLink::default(),
                scattering: ScatteringConfig::default(),
            }),
            Preset::Fig7 => experiment(
                vec![ModelTemplate::Rayleigh, ds(11, 0.5), ds(21, 0.5), ds(41, 0.5)],
                vec![DetectorKind::Mmse],
            ),
            Preset::Fig8 => experiment(
                vec![ModelTemplate::Rayleigh, ds(21, 0.1), ds(21, 0.5), ds(21, 1.0)],
                vec![DetectorKind::Mmse],
            ),
            Preset::Fig9 => experiment(vec![ds(21, 0.5)], DetectorKind::ALL.to_vec()),
            Preset::Smoke => {
                let mut c = ExperimentConfig {
                    models: vec![ModelTemplate::Rayleigh, ds(21, 0.5)],
                    detectors: DetectorKind::ALL.to_vec(),
                    ..ExperimentConfig::default()
                };
                c.network.antennas = 32;
                c.sampling.drops = 10;
                c.sampling.realizations = 200;
                PresetPlan::Experiment(c)
            }
        }
    }

    /// Hex SHA-256 of the preset's canonical TOML form.
    pub fn hash(&self) -> String {
        let text = self.plan().canonical_toml();
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
                Error::config("preset", format!("unknown preset `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

/// What a preset runs.
#[derive(Debug, Clone, PartialEq)]
pub enum PresetPlan {
    Correlation(CorrelationDiag),
    Propagation(PropagationDiag),
    Experiment(ExperimentConfig),
}

impl PresetPlan {
    fn canonical_toml(&self) -> String {
        match self {
            PresetPlan::Correlation(d) => toml::to_string(d).expect("serializable preset"),
            PresetPlan::Propagation(d) => toml::to_string(d).expect("serializable preset"),
            PresetPlan::Experiment(c) => to_toml(c).expect("serializable preset"),
        }
    }
}

/// Link geometry used by the single-link diagnostics. The large-scale
/// fading is 1 because every diagnostic is normalized by β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceLink {
    pub distance_km: f64,
    pub cluster_distance_km: f64,
}

impl Default for ReferenceLink {
    fn default() -> Self {
        ReferenceLink {
            distance_km: 0.5,
            cluster_distance_km: 0.35,
        }
    }
}

impl ReferenceLink {
    pub fn spec(&self, model: &ModelTemplate, azimuth_rad: f64, scattering: &ScatteringConfig) -> ChannelModelSpec {
        let link = LinkGeometry {
            distance_km: self.distance_km,
            azimuth_rad,
            cluster_distance_km: self.cluster_distance_km,
            shadowing_db: 0.0,
            beta_db: 0.0,
        };
        model.link_spec(&link, scattering)
    }
}

/// Normalized channel correlation `E{hhᴴ}/β` of one link, estimated by sampling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationDiag {
    pub model: ModelTemplate,
    pub antennas: usize,
    pub samples: usize,
    pub link: ReferenceLink,
    pub scattering: ScatteringConfig,
}

/// Favorable propagation statistic between a user at a fixed azimuth and a
/// second user swept over `[−π, π]` in `angle_steps` equal steps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagationDiag {
    pub models: Vec<ModelTemplate>,
    pub antennas: usize,
    pub pairs: usize,
    pub angle_steps: usize,
    pub fixed_azimuth_rad: f64,
    pub link: ReferenceLink,
    pub scattering: ScatteringConfig,
}

impl PropagationDiag {
    pub fn angles(&self) -> Vec<f64> {
        let step = 2.0 * PI / self.angle_steps as f64;
        (0..=self.angle_steps).map(|j| -PI + j as f64 * step).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!(matches!("fig2".parse::<Preset>(), Err(Error::Config { .. })));
    }

    #[test]
    fn sweep_contents() {
        let PresetPlan::Experiment(c) = Preset::Fig7.plan() else { panic!() };
        assert_eq!(c.models.len(), 4);
        assert_eq!(c.detectors, vec![DetectorKind::Mmse]);
        assert_eq!((c.sampling.drops, c.sampling.realizations), (100, 1000));

        let PresetPlan::Experiment(c) = Preset::Fig8.plan() else { panic!() };
        let spacings: Vec<_> = c.models.iter().filter_map(|m| m.antenna_spacing()).collect();
        assert_eq!(spacings, vec![0.1, 0.5, 1.0]);

        let PresetPlan::Experiment(c) = Preset::Fig9.plan() else { panic!() };
        assert_eq!(c.detectors.len(), 3);
        assert_eq!(c.models[0].scatterers(), Some(21));

        let PresetPlan::Experiment(c) = Preset::Smoke.plan() else { panic!() };
        assert_eq!((c.network.antennas, c.sampling.drops, c.sampling.realizations), (32, 10, 200));

        let PresetPlan::Correlation(d) = Preset::Fig4.plan() else { panic!() };
        assert_eq!(d.model.scatterers(), Some(81));
        assert_eq!(d.samples, 100_000);
    }

    #[test]
    fn fig5_has_41_angles() {
        let PresetPlan::Propagation(d) = Preset::Fig5.plan() else { panic!() };
        let a = d.angles();
        assert_eq!(a.len(), 41);
        assert!((a[0] + PI).abs() < 1e-12 && (a[40] - PI).abs() < 1e-12);
        assert!((a[1] - a[0] - PI / 20.0).abs() < 1e-12);
    }

    #[test]
    fn every_preset_config_is_valid() {
        for p in Preset::ALL {
            if let PresetPlan::Experiment(c) = p.plan() {
                c.validate().unwrap();
            }
        }
    }

    #[test]
    fn hashes_are_distinct_and_stable() {
        let hashes: Vec<String> = Preset::ALL.iter().map(|p| p.hash()).collect();
        for (i, h) in hashes.iter().enumerate() {
            assert_eq!(h.len(), 64);
            assert_eq!(h, &Preset::ALL[i].hash());
            assert!(!hashes[..i].contains(h));
        }
    }
}
