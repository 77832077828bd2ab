//! Fixtures shared by the benchmarks: a fixed four-cell network at the
//! default operating point, built without any random draws.

use std::f64::consts::PI;

use dsmimo_core::channel::{ChannelModelSpec, DoubleScatteringParams};
use dsmimo_core::engine::DropSimulation;
use dsmimo_core::estimation::build_pilot_plan;
use dsmimo_core::{Powers, Result};

pub const CELLS: usize = 4;
pub const USERS: usize = 5;

/// Double scattering link with S scatterers per side and half-wavelength spacing.
pub fn ds_link(scatterers: usize, azimuth_rad: f64, beta: f64) -> ChannelModelSpec {
    ChannelModelSpec::DoubleScattering(DoubleScatteringParams {
        scatterers,
        antenna_spacing: 0.5,
        scatterer_spacing: 10.0,
        angular_spread_rad: 2.0 * PI / 3.0,
        azimuth_rad,
        cluster_distance_km: 0.35,
        carrier_hz: 2e9,
        beta,
    })
}

/// Link model of user k in cell i seen by station l: unit gain in the own
/// cell, -20 dB across cells, azimuths spread over the sector.
pub fn network_link(scatterers: Option<usize>, i: usize, k: usize, l: usize) -> ChannelModelSpec {
    let beta = if i == l { 1.0 } else { 0.01 };
    match scatterers {
        None => ChannelModelSpec::UncorrelatedRayleigh { beta },
        Some(s) => {
            let azimuth = -PI / 3.0 + (2.0 * PI / 3.0) * (k as f64 + 0.5) / USERS as f64 + 0.1 * l as f64;
            ds_link(s, azimuth, beta)
        }
    }
}

/// One drop with `antennas` antennas, full pilot reuse and 20 dB SNR;
/// `None` gives uncorrelated Rayleigh fading.
pub fn fixture_drop(antennas: usize, scatterers: Option<usize>) -> Result<DropSimulation> {
    let plan = build_pilot_plan(CELLS, USERS, 1, 200)?;
    let powers = Powers::uniform(CELLS, USERS, 100.0);
    DropSimulation::new(antennas, plan, powers, 1.0, |i, k, l| network_link(scatterers, i, k, l))
}
