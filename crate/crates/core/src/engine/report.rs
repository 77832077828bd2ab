use std::io::Write;

use crate::config::ModelTemplate;
use crate::detection::DetectorKind;
use crate::error::{Error, Result};

/// SINR and SE of one user in one drop under one model and detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserRecord {
    pub drop: usize,
    pub cell: usize,
    pub user: usize,
    pub model: ModelTemplate,
    pub detector: DetectorKind,
    pub sinr: f64,
    pub se_bps_hz: f64,
    pub clamped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExclusionCount {
    pub model: ModelTemplate,
    pub detector: DetectorKind,
    pub cell_realizations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeSummary {
    pub mean: f64,
    /// 5th percentile of the SE distribution.
    pub likely_95: f64,
    pub samples: usize,
}

/// SE samples of an experiment, pooled over drops, cells and users.
#[derive(Debug, Clone, PartialEq)]
pub struct SeReport {
    pub records: Vec<UserRecord>,
    pub models: Vec<ModelTemplate>,
    pub detectors: Vec<DetectorKind>,
    pub exclusions: Vec<ExclusionCount>,
    pub tau_p: usize,
    pub tau_c: usize,
}

impl SeReport {
    pub fn se_values(&self, model: &ModelTemplate, detector: DetectorKind) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| &r.model == model && r.detector == detector)
            .map(|r| r.se_bps_hz)
            .collect()
    }

    pub fn summary(&self, model: &ModelTemplate, detector: DetectorKind) -> Result<SeSummary> {
        let v = self.se_values(model, detector);
        if v.is_empty() {
            return Err(Error::Domain(format!(
                "no samples for {} / {detector}",
                model.label()
            )));
        }
        Ok(SeSummary {
            mean: v.iter().sum::<f64>() / v.len() as f64,
            likely_95: percentile(&v, 0.05)?,
            samples: v.len(),
        })
    }

    pub fn clamped(&self) -> usize {
        self.records.iter().filter(|r| r.clamped).count()
    }

    /// Per-user CSV: `drop,cell,user,model,detector,S,d_l,sinr,se_bps_hz`.
    /// S and d_l are empty for Rayleigh fading.
    pub fn write_user_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "drop,cell,user,model,detector,S,d_l,sinr,se_bps_hz")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                r.drop,
                r.cell,
                r.user,
                r.model.label(),
                r.detector,
                r.model.scatterers().map(|s| s.to_string()).unwrap_or_default(),
                r.model.antenna_spacing().map(|d| d.to_string()).unwrap_or_default(),
                r.sinr,
                r.se_bps_hz
            )?;
        }
        Ok(())
    }

    /// CDF CSV: `model,detector,se_bps_hz,cdf`, one block per model and detector.
    pub fn write_cdf_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "model,detector,se_bps_hz,cdf")?;
        for model in &self.models {
            for &det in &self.detectors {
                let values = self.se_values(model, det);
                let Ok(cdf) = aggregate_cdf(&values) else {
                    continue;
                };
                for (v, f) in cdf {
                    writeln!(w, "{},{},{},{}", model.label(), det, v, f)?;
                }
            }
        }
        Ok(())
    }
}

/// Empirical CDF: sorted distinct values with the fraction of samples at or below each.
pub fn aggregate_cdf(values: &[f64]) -> Result<Vec<(f64, f64)>> {
    if values.is_empty() {
        return Err(Error::Domain("CDF of an empty sample".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, v) in sorted.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == *v => last.1 = frac,
            _ => out.push((*v, frac)),
        }
    }
    Ok(out)
}

/// Quantile `q` with linear interpolation between order statistics at
/// position `q·(n − 1)`.
pub fn percentile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Domain("percentile of an empty sample".into()));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Domain(format!("quantile {q} outside [0, 1]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    Ok(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}
