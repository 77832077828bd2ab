//! Single-link diagnostics: sampled correlation grids and favorable propagation curves.

use std::io::Write;

use dsmimo_core::channel::{empirical_correlation, favorable_propagation_stat, LinkChannel};
use dsmimo_core::linalg::{CMatrix, CVector};
use dsmimo_core::rng::{substream, Domain};
use dsmimo_core::{Error, Result};

use crate::presets::{CorrelationDiag, PropagationDiag};

/// Samples are folded into the running mean in batches of this size.
const BATCH: usize = 1000;

/// Sampled `E{hhᴴ}/β` of the diagnostic's reference link.
pub fn correlation_grid(diag: &CorrelationDiag, seed: u64) -> Result<CMatrix> {
    if diag.samples == 0 {
        return Err(Error::config("realizations", "correlation needs at least one sample"));
    }
    let spec = diag.link.spec(&diag.model, 0.0, &diag.scattering);
    let channel = LinkChannel::new(&spec, diag.antennas)?;
    let mut rng = substream(seed, Domain::Diagnostic, &[0]);
    let mut mean = CMatrix::zeros(diag.antennas, diag.antennas);
    let mut done = 0usize;
    let mut batch: Vec<CVector> = Vec::with_capacity(BATCH);
    while done < diag.samples {
        let n = BATCH.min(diag.samples - done);
        batch.clear();
        batch.extend((0..n).map(|_| channel.sample(&mut rng)));
        let part = empirical_correlation(&batch, spec.beta())?;
        let w = n as f64 / (done + n) as f64;
        mean.scale_mut(1.0 - w);
        mean += part.scale(w);
        done += n;
    }
    Ok(mean)
}

/// Magnitude grid with a header row and column of 1-based antenna indices.
pub fn write_correlation_csv<W: Write>(grid: &CMatrix, mut w: W) -> std::io::Result<()> {
    let m = grid.nrows();
    write!(w, "antenna")?;
    for j in 1..=m {
        write!(w, ",{j}")?;
    }
    writeln!(w)?;
    for i in 0..m {
        write!(w, "{}", i + 1)?;
        for j in 0..m {
            write!(w, ",{}", grid[(i, j)].norm())?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// A model label with its `(angle, statistic)` points.
pub type PropagationCurve = (String, Vec<(f64, f64)>);

/// One favorable propagation curve per model.
pub fn propagation_curves(diag: &PropagationDiag, seed: u64) -> Result<Vec<PropagationCurve>> {
    if diag.pairs == 0 {
        return Err(Error::config("realizations", "favorable propagation needs at least one pair"));
    }
    let angles = diag.angles();
    let mut curves = Vec::with_capacity(diag.models.len());
    for (m, model) in diag.models.iter().enumerate() {
        let fixed = diag.link.spec(model, diag.fixed_azimuth_rad, &diag.scattering);
        let mut points = Vec::with_capacity(angles.len());
        for (j, &angle) in angles.iter().enumerate() {
            let swept = diag.link.spec(model, angle, &diag.scattering);
            let mut rng = substream(seed, Domain::Diagnostic, &[1, m as u64, j as u64]);
            let stat = favorable_propagation_stat(&mut rng, &fixed, &swept, diag.antennas, diag.pairs)?;
            points.push((angle, stat));
        }
        log::info!("favorable propagation curve {} done", model.label());
        curves.push((model.label(), points));
    }
    Ok(curves)
}

/// Rows of `model,angle_rad,statistic`.
pub fn write_propagation_csv<W: Write>(curves: &[PropagationCurve], mut w: W) -> std::io::Result<()> {
    writeln!(w, "model,angle_rad,statistic")?;
    for (label, points) in curves {
        for (angle, stat) in points {
            writeln!(w, "{label},{angle},{stat}")?;
        }
    }
    Ok(())
}
