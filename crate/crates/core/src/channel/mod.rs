//! Channel models: uncorrelated Rayleigh fading and the double scattering
//! model, plus the correlation diagnostics used to characterize them.

mod correlation;
mod diagnostics;
mod sampling;

pub use correlation::{
    bs_correlation_matrix, km_to_wavelengths, scatterer_angle_spread, scatterer_angles,
    scatterer_correlation_matrix, steering_factor, CorrelationMatrix, SPEED_OF_LIGHT,
};
pub use diagnostics::{empirical_correlation, favorable_propagation_stat};
pub use sampling::{channel_second_moment, sample_channel, LinkChannel, LiteralSampler};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Geometry and scattering parameters of one double scattering link.
///
/// Spacings are in carrier wavelengths; the cluster separation is in
/// kilometres and converted to wavelengths with `carrier_hz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleScatteringParams {
    /// Scatterers on each side, S.
    pub scatterers: usize,
    /// BS antenna spacing d_l.
    pub antenna_spacing: f64,
    /// Scatterer spacing d_S.
    pub scatterer_spacing: f64,
    /// BS-side angular spread θ.
    pub angular_spread_rad: f64,
    /// Azimuth α of the link relative to the array broadside.
    pub azimuth_rad: f64,
    /// Separation r of the two scattering clusters.
    pub cluster_distance_km: f64,
    pub carrier_hz: f64,
    /// Large-scale fading β, linear power.
    pub beta: f64,
}

impl DoubleScatteringParams {
    pub fn validate(&self) -> Result<()> {
        if self.scatterers == 0 {
            return Err(Error::Domain("double scattering needs S >= 1".into()));
        }
        if !(self.antenna_spacing >= 0.0) {
            return Err(Error::Domain("antenna spacing must be nonnegative".into()));
        }
        if !(self.scatterer_spacing >= 0.0) {
            return Err(Error::Domain("scatterer spacing must be nonnegative".into()));
        }
        if !(self.angular_spread_rad > 0.0 && self.angular_spread_rad <= 2.0 * std::f64::consts::PI)
        {
            return Err(Error::Domain("angular spread must lie in (0, 2π]".into()));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::Domain("large-scale fading must be positive".into()));
        }
        if !(self.cluster_distance_km > 0.0) {
            return Err(Error::Domain("cluster distance must be positive".into()));
        }
        if !(self.carrier_hz > 0.0) {
            return Err(Error::Domain("carrier frequency must be positive".into()));
        }
        if !self.azimuth_rad.is_finite() {
            return Err(Error::Domain("azimuth must be finite".into()));
        }
        Ok(())
    }

    /// Cluster separation r in carrier wavelengths.
    pub fn cluster_distance_wavelengths(&self) -> f64 {
        km_to_wavelengths(self.cluster_distance_km, self.carrier_hz)
    }
}

/// Statistical model of one link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ChannelModelSpec {
    UncorrelatedRayleigh { beta: f64 },
    DoubleScattering(DoubleScatteringParams),
}

impl ChannelModelSpec {
    pub fn beta(&self) -> f64 {
        match self {
            ChannelModelSpec::UncorrelatedRayleigh { beta } => *beta,
            ChannelModelSpec::DoubleScattering(p) => p.beta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ChannelModelSpec::UncorrelatedRayleigh { beta } => {
                if *beta > 0.0 && beta.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Domain("large-scale fading must be positive".into()))
                }
            }
            ChannelModelSpec::DoubleScattering(p) => p.validate(),
        }
    }
}

/// One small-scale realization of every channel in the network.
///
/// For each station l the channels of all users are stored as the columns of
/// an `M × (L·K)` matrix, user k of cell i in column `i·K + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTensor {
    per_station: Vec<CMatrix>,
    cells: usize,
    users_per_cell: usize,
}

impl ChannelTensor {
    pub fn zeros(cells: usize, users_per_cell: usize, antennas: usize) -> Self {
        ChannelTensor {
            per_station: (0..cells)
                .map(|_| CMatrix::zeros(antennas, cells * users_per_cell))
                .collect(),
            cells,
            users_per_cell,
        }
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn users_per_cell(&self) -> usize {
        self.users_per_cell
    }

    pub fn antennas(&self) -> usize {
        self.per_station.first().map_or(0, |m| m.nrows())
    }

    /// Channel h from user `k` of cell `i` to station `l`.
    pub fn h(&self, i: usize, k: usize, l: usize) -> nalgebra::DVectorView<'_, num_complex::Complex64> {
        self.per_station[l].column(i * self.users_per_cell + k)
    }

    pub fn h_mut(
        &mut self,
        i: usize,
        k: usize,
        l: usize,
    ) -> nalgebra::DVectorViewMut<'_, num_complex::Complex64> {
        let col = i * self.users_per_cell + k;
        self.per_station[l].column_mut(col)
    }

    /// All channels into station `l`.
    pub fn station(&self, l: usize) -> &CMatrix {
        &self.per_station[l]
    }

    pub fn station_mut(&mut self, l: usize) -> &mut CMatrix {
        &mut self.per_station[l]
    }
}

/// Samplers for every link of a network, indexed like [`ChannelTensor`].
#[derive(Debug, Clone)]
pub struct NetworkChannels {
    links: Vec<LinkChannel>,
    cells: usize,
    users_per_cell: usize,
    antennas: usize,
}

impl NetworkChannels {
    /// `spec(i, k, l)` gives the model of the link from user k in cell i to station l.
    pub fn new(
        cells: usize,
        users_per_cell: usize,
        antennas: usize,
        spec: impl Fn(usize, usize, usize) -> ChannelModelSpec,
    ) -> Result<Self> {
        let mut links = Vec::with_capacity(cells * cells * users_per_cell);
        for l in 0..cells {
            for i in 0..cells {
                for k in 0..users_per_cell {
                    links.push(LinkChannel::new(&spec(i, k, l), antennas)?);
                }
            }
        }
        Ok(NetworkChannels {
            links,
            cells,
            users_per_cell,
            antennas,
        })
    }

    pub fn tensor(&self) -> ChannelTensor {
        ChannelTensor::zeros(self.cells, self.users_per_cell, self.antennas)
    }

    /// Overwrites `out` with a fresh realization of every link.
    pub fn sample_into<R: rand::Rng + ?Sized>(&self, rng: &mut R, out: &mut ChannelTensor) {
        let m = self.antennas;
        let per_station = self.cells * self.users_per_cell;
        for l in 0..self.cells {
            let data = out.station_mut(l).as_mut_slice();
            for (c, link) in self.links[l * per_station..(l + 1) * per_station].iter().enumerate() {
                link.sample_into(rng, &mut data[c * m..(c + 1) * m]);
            }
        }
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> ChannelTensor {
        let mut t = self.tensor();
        self.sample_into(rng, &mut t);
        t
    }
}
