use rand::Rng;
use rayon::prelude::*;

use super::accumulator::{spectral_efficiency, SinrAccumulator, UserSinr};
use super::report::{ExclusionCount, SeReport, UserRecord};
use crate::channel::{ChannelModelSpec, NetworkChannels};
use crate::config::ExperimentConfig;
use crate::detection::{detector_matrices, DetectionMatrix, DetectorKind};
use crate::error::{Error, Result};
use crate::estimation::{
    build_pilot_plan, despread_pilots, estimate_channels, FilterBank, Operator, PilotPlan,
};
use crate::geometry::{calibrate_uplink_power, drop_users, place_base_stations};
use crate::powers::Powers;
use crate::rng::{substream, Domain};

/// Everything that stays fixed over the fading realizations of one drop:
/// link samplers and the LMMSE filters built from closed-form second moments.
#[derive(Debug, Clone)]
pub struct DropSimulation {
    pub channels: NetworkChannels,
    pub filters: FilterBank,
    pub plan: PilotPlan,
    pub powers: Powers,
    pub noise_var: f64,
}

/// SINRs of one detector over one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorOutcome {
    pub kind: DetectorKind,
    pub sinr: Vec<UserSinr>,
    /// Cell-realizations dropped because the detector was singular.
    pub excluded: u64,
    pub accumulator: SinrAccumulator,
}

impl DropSimulation {
    pub fn new(
        antennas: usize,
        plan: PilotPlan,
        powers: Powers,
        noise_var: f64,
        spec: impl Fn(usize, usize, usize) -> ChannelModelSpec,
    ) -> Result<Self> {
        let cells = plan.cells();
        let users = powers.users_per_cell();
        let channels = NetworkChannels::new(cells, users, antennas, &spec)?;
        // Second moments only for links that share a pilot with the serving cell.
        let mut moments: Vec<Option<Operator>> = vec![None; cells * users * cells];
        for l in 0..cells {
            for &i in &plan.groups[l] {
                for k in 0..users {
                    moments[(i * users + k) * cells + l] =
                        Some(Operator::second_moment(&spec(i, k, l), antennas)?);
                }
            }
        }
        let filters = FilterBank::build(&plan, users, &powers, noise_var, |i, k, l| {
            moments[(i * users + k) * cells + l]
                .as_ref()
                .expect("moment of a co-pilot link")
        })?;
        Ok(DropSimulation {
            channels,
            filters,
            plan,
            powers,
            noise_var,
        })
    }

    /// Runs `realizations` coherence intervals; `rng_for(r)` supplies the
    /// random stream of interval r.
    pub fn run<R: Rng>(
        &self,
        detectors: &[DetectorKind],
        realizations: usize,
        mut rng_for: impl FnMut(usize) -> R,
    ) -> Result<Vec<DetectorOutcome>> {
        let cells = self.plan.cells();
        let users = self.powers.users_per_cell();
        let mut accs = vec![SinrAccumulator::new(cells, users); detectors.len()];
        let mut excluded = vec![0u64; detectors.len()];
        let mut tensor = self.channels.tensor();

        for r in 0..realizations {
            let mut rng = rng_for(r);
            self.channels.sample_into(&mut rng, &mut tensor);
            let pilots = despread_pilots(&mut rng, &tensor, &self.plan, &self.powers, self.noise_var);
            let estimates = estimate_channels(&self.filters, &pilots)?;

            // per_cell[l][d]
            let mut per_cell: Vec<Vec<Option<DetectionMatrix>>> = Vec::with_capacity(cells);
            for l in 0..cells {
                let results = detector_matrices(&estimates.h_hat[l], self.powers.cell(l), detectors);
                let mut row = Vec::with_capacity(detectors.len());
                for (d, res) in results.into_iter().enumerate() {
                    match res {
                        Ok(v) => row.push(Some(v)),
                        Err(Error::Numerical(msg)) => {
                            log::debug!("realization {r}, cell {l}, {}: {msg}", detectors[d]);
                            excluded[d] += 1;
                            row.push(None);
                        }
                        Err(e) => return Err(e),
                    }
                }
                per_cell.push(row);
            }
            for (d, acc) in accs.iter_mut().enumerate() {
                let v: Vec<Option<&DetectionMatrix>> =
                    per_cell.iter().map(|row| row[d].as_ref()).collect();
                acc.accumulate_realization(&tensor, &v);
            }
        }

        let mut out = Vec::with_capacity(detectors.len());
        for ((kind, acc), excluded) in detectors.iter().zip(accs).zip(excluded) {
            if excluded > 0 {
                log::warn!("{kind}: excluded {excluded} singular cell realizations");
            }
            let mut sinr = Vec::with_capacity(cells * users);
            for l in 0..cells {
                for k in 0..users {
                    sinr.push(match acc.user_sinr(l, k, &self.powers, self.noise_var) {
                        Ok(s) => s,
                        Err(Error::Domain(msg)) => {
                            log::warn!("{kind}: {msg}; reporting SINR 0");
                            UserSinr {
                                sinr: 0.0,
                                clamped: true,
                            }
                        }
                        Err(e) => return Err(e),
                    });
                }
            }
            out.push(DetectorOutcome {
                kind: *kind,
                sinr,
                excluded,
                accumulator: acc,
            });
        }
        Ok(out)
    }
}

/// Runs the full Monte-Carlo experiment: for every drop and every model in
/// the sweep, estimates the SINR of every user with every detector.
///
/// Powers are expressed relative to the noise power, so the receiver noise
/// variance is 1 and the power of every user is its transmit SNR.
pub fn run_experiment(config: &ExperimentConfig) -> Result<SeReport> {
    config.validate()?;
    let net = &config.network;
    let plan = build_pilot_plan(
        net.cells,
        net.users_per_cell,
        config.pilot.reuse_factor,
        net.coherence_symbols,
    )?;
    let bs = place_base_stations(net)?;
    let snr = calibrate_uplink_power(net)? / net.noise_power_w();
    let powers = Powers::uniform(net.cells, net.users_per_cell, snr);
    let seed = config.sampling.seed;

    let run_drop = |d: usize| -> Result<(Vec<UserRecord>, Vec<ExclusionCount>)> {
        let mut geo_rng = substream(seed, Domain::Geometry, &[d as u64]);
        let drop = drop_users(&mut geo_rng, net, &bs)?;
        let mut records = Vec::new();
        let mut exclusions = Vec::new();
        for (m, model) in config.models.iter().enumerate() {
            let sim = DropSimulation::new(net.antennas, plan.clone(), powers.clone(), 1.0, |i, k, l| {
                model.link_spec(drop.link(i, k, l), &config.scattering)
            })?;
            let outcomes = sim.run(&config.detectors, config.sampling.realizations, |r| {
                substream(seed, Domain::Fading, &[d as u64, m as u64, r as u64])
            })?;
            for o in outcomes {
                for (idx, s) in o.sinr.iter().enumerate() {
                    records.push(UserRecord {
                        drop: d,
                        cell: idx / net.users_per_cell,
                        user: idx % net.users_per_cell,
                        model: *model,
                        detector: o.kind,
                        sinr: s.sinr,
                        se_bps_hz: spectral_efficiency(s.sinr, plan.tau_p, net.coherence_symbols),
                        clamped: s.clamped,
                    });
                }
                exclusions.push(ExclusionCount {
                    model: *model,
                    detector: o.kind,
                    cell_realizations: o.excluded,
                });
            }
        }
        log::info!("drop {d} done");
        Ok((records, exclusions))
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.sampling.workers)
        .build()
        .map_err(|e| Error::config("sampling.workers", e.to_string()))?;
    // Drops are collected in index order, so the report does not depend on scheduling.
    let per_drop: Vec<_> = pool.install(|| {
        (0..config.sampling.drops)
            .into_par_iter()
            .map(run_drop)
            .collect::<Result<Vec<_>>>()
    })?;

    let mut records = Vec::new();
    let mut exclusions: Vec<ExclusionCount> = Vec::new();
    for (recs, excl) in per_drop {
        records.extend(recs);
        for e in excl {
            match exclusions
                .iter_mut()
                .find(|x| x.model == e.model && x.detector == e.detector)
            {
                Some(x) => x.cell_realizations += e.cell_realizations,
                None => exclusions.push(e),
            }
        }
    }
    Ok(SeReport {
        records,
        models: config.models.clone(),
        detectors: config.detectors.clone(),
        exclusions,
        tau_p: plan.tau_p,
        tau_c: net.coherence_symbols,
    })
}
