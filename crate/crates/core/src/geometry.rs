//! Network layout, user drops and large-scale fading.
//!
//! Base stations sit on the corners of a square service area. Each user is
//! dropped uniformly inside its cell, where a cell is the part of the square
//! closer to its base station than to any other; with four corner stations
//! those cells are exactly the four quadrants.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

/// Attempts allowed when redrawing a user that fell too close to its station.
pub const MAX_DROP_ATTEMPTS: usize = 100_000;

/// Distance from a user to its receive-side scattering cluster, relative to the link distance.
pub const CLUSTER_DISTANCE_RATIO: f64 = 0.7;

/// Distance of the transmit-side scatterers from the user, relative to the link distance.
/// It does not enter any channel statistic.
pub const TRANSMIT_SCATTERER_RATIO: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NetworkConfig {
    /// Number of cells, L.
    pub cells: usize,
    /// Users per cell, K.
    pub users_per_cell: usize,
    /// Base-station antennas, M.
    pub antennas: usize,
    pub area_side_km: f64,
    pub min_distance_km: f64,
    pub shadowing_std_db: f64,
    pub noise_power_dbm: f64,
    /// Median SNR at the cell edge used to calibrate the uplink power.
    pub edge_snr_db: f64,
    /// Coherence interval length τ_c in symbols.
    pub coherence_symbols: usize,
    /// Recorded in outputs only.
    pub bandwidth_hz: f64,
    /// Per-station array broadside. When absent each array faces the square center.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub array_broadside_rad: Option<Vec<f64>>,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            cells: 4,
            users_per_cell: 5,
            antennas: 100,
            area_side_km: 1.0,
            min_distance_km: 0.1,
            shadowing_std_db: 7.0,
            noise_power_dbm: -96.0,
            edge_snr_db: -3.0,
            coherence_symbols: 200,
            bandwidth_hz: 20e6,
            array_broadside_rad: None,
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.cells) {
            return Err(Error::config(
                "network.cells",
                format!("corner placement supports 1 to 4 cells, got {}", self.cells),
            ));
        }
        if self.users_per_cell == 0 {
            return Err(Error::config("network.users_per_cell", "must be at least 1"));
        }
        if self.antennas == 0 {
            return Err(Error::config("network.antennas", "must be at least 1"));
        }
        if !(self.area_side_km.is_finite() && self.area_side_km > 0.0) {
            return Err(Error::config("network.area_side_km", "must be positive"));
        }
        if !(self.min_distance_km >= 0.0 && self.min_distance_km < self.area_side_km) {
            return Err(Error::config(
                "network.min_distance_km",
                "must lie in [0, area_side_km)",
            ));
        }
        if !(self.shadowing_std_db.is_finite() && self.shadowing_std_db >= 0.0) {
            return Err(Error::config("network.shadowing_std_db", "must be nonnegative"));
        }
        if !self.noise_power_dbm.is_finite() {
            return Err(Error::config("network.noise_power_dbm", "must be finite"));
        }
        if !self.edge_snr_db.is_finite() {
            return Err(Error::config("network.edge_snr_db", "must be finite"));
        }
        if self.coherence_symbols == 0 {
            return Err(Error::config("network.coherence_symbols", "must be positive"));
        }
        if let Some(b) = &self.array_broadside_rad {
            if b.len() != self.cells {
                return Err(Error::config(
                    "network.array_broadside_rad",
                    format!("expected {} entries, got {}", self.cells, b.len()),
                ));
            }
        }
        Ok(())
    }

    pub fn noise_power_w(&self) -> f64 {
        dbm_to_watts(self.noise_power_dbm)
    }

    pub fn center(&self) -> Point {
        let h = self.area_side_km / 2.0;
        Point::new(h, h)
    }

    /// Broadside direction of every station's array.
    pub fn broadsides(&self, bs_positions: &[Point]) -> Vec<f64> {
        match &self.array_broadside_rad {
            Some(b) => b.clone(),
            None => {
                let c = self.center();
                bs_positions
                    .iter()
                    .map(|p| (c.y - p.y).atan2(c.x - p.x))
                    .collect()
            }
        }
    }
}

/// Geometry of the link between one user and one base station.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    pub distance_km: f64,
    /// Direction of the user relative to the station's array broadside, in (−π, π].
    pub azimuth_rad: f64,
    pub cluster_distance_km: f64,
    pub shadowing_db: f64,
    pub beta_db: f64,
}

impl LinkGeometry {
    pub fn new(distance_km: f64, azimuth_rad: f64, shadowing_db: f64) -> Result<Self> {
        Ok(LinkGeometry {
            distance_km,
            azimuth_rad,
            cluster_distance_km: CLUSTER_DISTANCE_RATIO * distance_km,
            shadowing_db,
            beta_db: pathloss_beta_db(distance_km, shadowing_db)?,
        })
    }

    pub fn beta_linear(&self) -> f64 {
        db_to_linear(self.beta_db)
    }

    pub fn transmit_scatterer_distance_km(&self) -> f64 {
        TRANSMIT_SCATTERER_RATIO * self.distance_km
    }
}

/// One random placement of all users with the resulting link geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserDrop {
    pub bs_positions: Vec<Point>,
    /// `user_positions[i][k]` is user k of cell i.
    pub user_positions: Vec<Vec<Point>>,
    /// Flattened (cell i, user k, station l) grid; see [`UserDrop::link`].
    pub links: Vec<LinkGeometry>,
    /// Common uplink transmit power in watts.
    pub uplink_power_w: f64,
    cells: usize,
    users_per_cell: usize,
}

impl UserDrop {
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn users_per_cell(&self) -> usize {
        self.users_per_cell
    }

    /// Link from user `k` of cell `i` to station `l`.
    pub fn link(&self, i: usize, k: usize, l: usize) -> &LinkGeometry {
        &self.links[(i * self.users_per_cell + k) * self.cells + l]
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// Large-scale fading in dB for a link of `b_km` kilometres with shadowing `z_db`.
pub fn pathloss_beta_db(b_km: f64, z_db: f64) -> Result<f64> {
    if !(b_km > 0.0) {
        return Err(Error::Domain(format!(
            "path loss needs a positive distance, got {b_km} km"
        )));
    }
    Ok(-128.1 - 37.6 * b_km.log10() + z_db)
}

/// Wraps an angle into (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let w = a - two_pi * ((a - PI) / two_pi).ceil();
    if w <= -PI {
        w + two_pi
    } else {
        w
    }
}

/// Azimuth of `user` seen from a station at `bs` whose array faces `broadside_rad`.
pub fn link_azimuth(bs: Point, broadside_rad: f64, user: Point) -> Result<f64> {
    let (dx, dy) = (user.x - bs.x, user.y - bs.y);
    if dx == 0.0 && dy == 0.0 {
        return Err(Error::Domain(
            "azimuth undefined for coincident user and station".into(),
        ));
    }
    Ok(wrap_angle(dy.atan2(dx) - broadside_rad))
}

/// Corner positions for up to four stations, in the order
/// (0,0), (0,side), (side,0), (side,side).
pub fn place_base_stations(config: &NetworkConfig) -> Result<Vec<Point>> {
    let s = config.area_side_km;
    let corners = [
        Point::new(0.0, 0.0),
        Point::new(0.0, s),
        Point::new(s, 0.0),
        Point::new(s, s),
    ];
    if config.cells == 0 || config.cells > corners.len() {
        return Err(Error::config(
            "network.cells",
            format!("no placement rule for {} cells", config.cells),
        ));
    }
    Ok(corners[..config.cells].to_vec())
}

/// Distance used to define the cell edge: corner to square center.
pub fn edge_distance_km(config: &NetworkConfig) -> f64 {
    config.area_side_km / SQRT_2
}

/// Uplink power in watts giving the configured median SNR at the cell edge.
///
/// The median of log-normal shadowing is z = 0 dB, so the median edge SNR is
/// `p · β(edge, 0) / σ²`.
pub fn calibrate_uplink_power(config: &NetworkConfig) -> Result<f64> {
    let beta_edge_db = pathloss_beta_db(edge_distance_km(config), 0.0)?;
    let p_dbm = config.edge_snr_db + config.noise_power_dbm - beta_edge_db;
    Ok(dbm_to_watts(p_dbm))
}

fn serving_index(bs_positions: &[Point], p: &Point) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, bs) in bs_positions.iter().enumerate() {
        let d = bs.distance(p);
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    best
}

/// Drops `K` users per cell and fills in all link geometry.
pub fn drop_users<R: Rng + ?Sized>(
    rng: &mut R,
    config: &NetworkConfig,
    bs_positions: &[Point],
) -> Result<UserDrop> {
    config.validate()?;
    let (cells, users) = (config.cells, config.users_per_cell);
    if bs_positions.len() != cells {
        return Err(Error::config(
            "network.cells",
            format!("{} station positions for {} cells", bs_positions.len(), cells),
        ));
    }
    let side = config.area_side_km;
    let broadsides = config.broadsides(bs_positions);
    let shadowing = Normal::new(0.0, config.shadowing_std_db)
        .map_err(|e| Error::config("network.shadowing_std_db", e.to_string()))?;

    let mut user_positions = Vec::with_capacity(cells);
    for (l, bs) in bs_positions.iter().enumerate() {
        let mut cell = Vec::with_capacity(users);
        for _ in 0..users {
            let mut placed = None;
            for _ in 0..MAX_DROP_ATTEMPTS {
                let p = Point::new(rng.random::<f64>() * side, rng.random::<f64>() * side);
                if serving_index(bs_positions, &p) == l && bs.distance(&p) >= config.min_distance_km
                {
                    placed = Some(p);
                    break;
                }
            }
            let p = placed.ok_or_else(|| {
                Error::config(
                    "network.min_distance_km",
                    format!("could not place a user in cell {l} after {MAX_DROP_ATTEMPTS} attempts"),
                )
            })?;
            cell.push(p);
        }
        user_positions.push(cell);
    }

    let mut links = Vec::with_capacity(cells * users * cells);
    for cell in &user_positions {
        for user in cell {
            for (l, bs) in bs_positions.iter().enumerate() {
                let z = shadowing.sample(rng);
                let alpha = link_azimuth(*bs, broadsides[l], *user)?;
                links.push(LinkGeometry::new(bs.distance(user), alpha, z)?);
            }
        }
    }

    Ok(UserDrop {
        bs_positions: bs_positions.to_vec(),
        user_positions,
        links,
        uplink_power_w: calibrate_uplink_power(config)?,
        cells,
        users_per_cell: users,
    })
}
