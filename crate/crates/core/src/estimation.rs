//! Pilot reuse, de-spreading of the received pilots and LMMSE channel
//! estimation under pilot contamination.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;

use crate::channel::{ChannelModelSpec, ChannelTensor};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, complex_normal, is_hermitian, CMatrix, CVector, PSD_TOLERANCE};
use crate::powers::Powers;

/// Pilot length, reuse factor and the co-pilot cell set of every cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotPlan {
    pub tau_p: usize,
    pub reuse_factor: usize,
    /// `groups[l]` lists the cells sharing cell l's pilots, l included.
    pub groups: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl PilotPlan {
    pub fn cells(&self) -> usize {
        self.groups.len()
    }

    /// Pilot class (0..f) of cell `l`.
    pub fn class_of(&self, l: usize) -> usize {
        self.class_of[l]
    }
}

/// Assigns cells round-robin to `f` pilot classes; `τ_p = f·K`.
pub fn build_pilot_plan(
    cells: usize,
    users_per_cell: usize,
    reuse_factor: usize,
    coherence_symbols: usize,
) -> Result<PilotPlan> {
    if reuse_factor == 0 {
        return Err(Error::config("pilot.reuse_factor", "must be at least 1"));
    }
    let tau_p = reuse_factor * users_per_cell;
    if tau_p > coherence_symbols {
        return Err(Error::config(
            "pilot.reuse_factor",
            format!(
                "pilot length f·K = {tau_p} exceeds the coherence interval of {coherence_symbols} symbols"
            ),
        ));
    }
    let class_of: Vec<usize> = (0..cells).map(|l| l % reuse_factor).collect();
    let groups = (0..cells)
        .map(|l| (0..cells).filter(|&i| class_of[i] == class_of[l]).collect())
        .collect();
    Ok(PilotPlan {
        tau_p,
        reuse_factor,
        groups,
        class_of,
    })
}

/// De-spread pilot observations: column k of `y[l]` is `y_{l,k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DespreadPilot {
    pub y: Vec<CMatrix>,
}

/// Forms `y_{l,k} = Σ_{i∈P_l} sqrt(p_{i,k})·τ_p·h_{i,k}^l + ñ_{l,k}` from
/// explicitly given noise vectors `noise[l]` (M × K, one column per pilot).
pub fn despread_with_noise(
    channels: &ChannelTensor,
    plan: &PilotPlan,
    powers: &Powers,
    noise: &[CMatrix],
) -> DespreadPilot {
    let tau = plan.tau_p as f64;
    let y = (0..channels.cells())
        .map(|l| {
            let mut y = noise[l].clone();
            for k in 0..channels.users_per_cell() {
                let mut col = y.column_mut(k);
                for &i in &plan.groups[l] {
                    col.axpy(
                        Complex64::new(powers.get(i, k).sqrt() * tau, 0.0),
                        &channels.h(i, k, l),
                        Complex64::new(1.0, 0.0),
                    );
                }
            }
            y
        })
        .collect();
    DespreadPilot { y }
}

/// De-spreads the pilots with fresh noise `ñ ~ CN(0, τ_p σ² I)`.
pub fn despread_pilots<R: Rng + ?Sized>(
    rng: &mut R,
    channels: &ChannelTensor,
    plan: &PilotPlan,
    powers: &Powers,
    noise_var: f64,
) -> DespreadPilot {
    let std = (plan.tau_p as f64 * noise_var).sqrt();
    let (m, k) = (channels.antennas(), channels.users_per_cell());
    let noise: Vec<CMatrix> = (0..channels.cells())
        .map(|_| CMatrix::from_fn(m, k, |_, _| complex_normal(rng) * std))
        .collect();
    despread_with_noise(channels, plan, powers, &noise)
}

/// Orthogonal pilot books: `Φ_i` (τ_p × K) built from the columns of the
/// τ_p-point DFT matrix, so `Φ_iᴴΦ_i = τ_p I` and cells in different
/// classes receive mutually orthogonal pilots.
pub fn pilot_matrices(plan: &PilotPlan, users_per_cell: usize) -> Vec<CMatrix> {
    let tau = plan.tau_p;
    (0..plan.cells())
        .map(|i| {
            let offset = plan.class_of(i) * users_per_cell;
            DMatrix::from_fn(tau, users_per_cell, |row, k| {
                let col = offset + k;
                Complex64::from_polar(1.0, 2.0 * PI * (row * col) as f64 / tau as f64)
            })
        })
        .collect()
}

/// Received pilot block `Y_l = Σ_i H_i^l P_i^{1/2} Φ_iᴴ + N_l` for every station.
pub fn received_pilot_signal(
    channels: &ChannelTensor,
    powers: &Powers,
    pilots: &[CMatrix],
    noise: &[CMatrix],
) -> Vec<CMatrix> {
    let k = channels.users_per_cell();
    (0..channels.cells())
        .map(|l| {
            let mut y = noise[l].clone();
            for (i, phi) in pilots.iter().enumerate() {
                let mut h = channels.station(l).columns(i * k, k).into_owned();
                for t in 0..k {
                    h.column_mut(t).scale_mut(powers.get(i, t).sqrt());
                }
                y += h * phi.adjoint();
            }
            y
        })
        .collect()
}

/// A linear operator that is either a scaled identity or a dense matrix.
///
/// Second moments, covariances and LMMSE filters under uncorrelated
/// Rayleigh fading are all scaled identities.
#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    ScaledIdentity { dim: usize, scale: f64 },
    Dense(CMatrix),
}

impl Operator {
    pub fn dim(&self) -> usize {
        match self {
            Operator::ScaledIdentity { dim, .. } => *dim,
            Operator::Dense(m) => m.nrows(),
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        match self {
            Operator::ScaledIdentity { dim, scale } => {
                CMatrix::identity(*dim, *dim) * Complex64::new(*scale, 0.0)
            }
            Operator::Dense(m) => m.clone(),
        }
    }

    pub fn apply(&self, x: &CVector) -> CVector {
        match self {
            Operator::ScaledIdentity { scale, .. } => x * Complex64::new(*scale, 0.0),
            Operator::Dense(m) => m * x,
        }
    }

    /// Closed-form second moment of a link as an operator.
    pub fn second_moment(spec: &ChannelModelSpec, antennas: usize) -> Result<Self> {
        Ok(match spec {
            ChannelModelSpec::UncorrelatedRayleigh { beta } => {
                spec.validate()?;
                Operator::ScaledIdentity {
                    dim: antennas,
                    scale: *beta,
                }
            }
            ChannelModelSpec::DoubleScattering(_) => {
                Operator::Dense(crate::channel::channel_second_moment(spec, antennas)?)
            }
        })
    }

    fn check_psd(&self) -> Result<()> {
        match self {
            Operator::ScaledIdentity { scale, .. } => {
                if *scale >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::Numerical("second moment has a negative scale".into()))
                }
            }
            Operator::Dense(m) => {
                if !is_hermitian(m, PSD_TOLERANCE) {
                    return Err(Error::Numerical("second moment is not Hermitian".into()));
                }
                // PSD up to the clamp tolerance iff A + δI admits a Cholesky factor.
                let shift = PSD_TOLERANCE * m.norm().max(f64::MIN_POSITIVE);
                let shifted = m + CMatrix::identity(m.nrows(), m.ncols()) * Complex64::new(shift, 0.0);
                cholesky(shifted)
                    .map(|_| ())
                    .map_err(|_| Error::Numerical("second moment is not positive semi-definite".into()))
            }
        }
    }
}

/// LMMSE filter `B = Cov{h,y}·Cov{y,y}^{-1}` of one user, with the covariances it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct LmmseFilter {
    pub b: Operator,
    pub cross_covariance: Operator,
    pub auto_covariance: Operator,
}

impl LmmseFilter {
    pub fn apply(&self, y: &CVector) -> CVector {
        self.b.apply(y)
    }
}

/// Builds the LMMSE filter for the user whose co-pilot links have second
/// moments `moments[j]` and powers `powers[j]`; `target` picks the user being
/// estimated among them.
pub fn lmmse_filter(
    target: usize,
    moments: &[&Operator],
    powers: &[f64],
    tau_p: usize,
    noise_var: f64,
) -> Result<LmmseFilter> {
    if moments.len() != powers.len() || target >= moments.len() {
        return Err(Error::Domain("co-pilot moments and powers do not match".into()));
    }
    let dim = moments[target].dim();
    if moments.iter().any(|m| m.dim() != dim) {
        return Err(Error::Domain("co-pilot moments have different dimensions".into()));
    }
    for m in moments {
        m.check_psd()?;
    }
    let tau = tau_p as f64;
    let cross_scale = powers[target].sqrt() * tau;

    if moments
        .iter()
        .all(|m| matches!(m, Operator::ScaledIdentity { .. }))
    {
        let scale = |m: &Operator| match m {
            Operator::ScaledIdentity { scale, .. } => *scale,
            Operator::Dense(_) => unreachable!(),
        };
        let cross = cross_scale * scale(moments[target]);
        let auto = tau * tau
            * moments
                .iter()
                .zip(powers)
                .map(|(m, p)| p * scale(m))
                .sum::<f64>()
            + tau * noise_var;
        let b = if auto > 0.0 { cross / auto } else { 0.0 };
        return Ok(LmmseFilter {
            b: Operator::ScaledIdentity { dim, scale: b },
            cross_covariance: Operator::ScaledIdentity { dim, scale: cross },
            auto_covariance: Operator::ScaledIdentity { dim, scale: auto },
        });
    }

    let cross = moments[target].to_dense() * Complex64::new(cross_scale, 0.0);
    let mut auto = CMatrix::identity(dim, dim) * Complex64::new(tau * noise_var, 0.0);
    for (m, p) in moments.iter().zip(powers) {
        match m {
            Operator::ScaledIdentity { scale, .. } => {
                for d in 0..dim {
                    auto[(d, d)] += Complex64::new(tau * tau * p * scale, 0.0);
                }
            }
            Operator::Dense(mat) => auto += mat * Complex64::new(tau * tau * p, 0.0),
        }
    }
    let b = match cholesky(auto.clone()) {
        // auto⁻¹·cross = (cross·auto⁻¹)ᴴ since both are Hermitian.
        Ok(chol) => chol.solve(&cross).adjoint(),
        // Without noise a rank-deficient moment leaves Cov{y,y} singular;
        // the pseudo-inverse gives the filter on its support.
        Err(_) if noise_var == 0.0 => &cross * pseudo_inverse_hermitian(&auto),
        Err(e) => return Err(e),
    };
    Ok(LmmseFilter {
        b: Operator::Dense(b),
        cross_covariance: Operator::Dense(cross),
        auto_covariance: Operator::Dense(auto),
    })
}

fn pseudo_inverse_hermitian(a: &CMatrix) -> CMatrix {
    let eig = nalgebra::SymmetricEigen::new(a.clone());
    let cutoff = PSD_TOLERANCE * eig.eigenvalues.amax();
    let u = &eig.eigenvectors;
    let mut scaled = u.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let inv = if lambda > cutoff { 1.0 / lambda } else { 0.0 };
        scaled.column_mut(j).scale_mut(inv);
    }
    scaled * u.adjoint()
}

/// Filters for every user of a drop, indexed by serving cell and user.
#[derive(Debug, Clone)]
pub struct FilterBank {
    filters: Vec<LmmseFilter>,
    users_per_cell: usize,
}

impl FilterBank {
    /// `moment(i, k, l)` returns the second moment of the link from user k in cell i to station l.
    pub fn build<'a>(
        plan: &PilotPlan,
        users_per_cell: usize,
        powers: &Powers,
        noise_var: f64,
        moment: impl Fn(usize, usize, usize) -> &'a Operator,
    ) -> Result<Self> {
        let mut filters = Vec::with_capacity(plan.cells() * users_per_cell);
        for l in 0..plan.cells() {
            let group = &plan.groups[l];
            let target = group
                .iter()
                .position(|&i| i == l)
                .ok_or_else(|| Error::Domain(format!("cell {l} missing from its pilot group")))?;
            for k in 0..users_per_cell {
                let moments: Vec<&Operator> = group.iter().map(|&i| moment(i, k, l)).collect();
                let p: Vec<f64> = group.iter().map(|&i| powers.get(i, k)).collect();
                filters.push(lmmse_filter(target, &moments, &p, plan.tau_p, noise_var)?);
            }
        }
        Ok(FilterBank {
            filters,
            users_per_cell,
        })
    }

    pub fn get(&self, l: usize, k: usize) -> &LmmseFilter {
        &self.filters[l * self.users_per_cell + k]
    }
}

/// Channel estimates of one realization; `h_hat[l]` is the M × K matrix of
/// cell l's estimates, user k in column k.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimateSet {
    pub h_hat: Vec<CMatrix>,
}

/// `ĥ_{l,k} = B_{l,k}·y_{l,k}` for every user.
pub fn estimate_channels(filters: &FilterBank, despread: &DespreadPilot) -> Result<ChannelEstimateSet> {
    let k_users = filters.users_per_cell;
    let mut h_hat = Vec::with_capacity(despread.y.len());
    for (l, y) in despread.y.iter().enumerate() {
        if y.ncols() != k_users {
            return Err(Error::Domain(format!(
                "de-spread block of cell {l} has {} columns, expected {k_users}",
                y.ncols()
            )));
        }
        let mut est = CMatrix::zeros(y.nrows(), k_users);
        for k in 0..k_users {
            let f = filters.get(l, k);
            if f.b.dim() != y.nrows() {
                return Err(Error::Domain(format!(
                    "filter of dimension {} applied to {} antennas",
                    f.b.dim(),
                    y.nrows()
                )));
            }
            match &f.b {
                Operator::ScaledIdentity { scale, .. } => {
                    est.column_mut(k).axpy(Complex64::new(*scale, 0.0), &y.column(k), Complex64::new(0.0, 0.0));
                }
                Operator::Dense(b) => {
                    est.column_mut(k).gemv(Complex64::new(1.0, 0.0), b, &y.column(k), Complex64::new(0.0, 0.0));
                }
            }
        }
        h_hat.push(est);
    }
    Ok(ChannelEstimateSet { h_hat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{DoubleScatteringParams, NetworkChannels};
    use crate::linalg::{complex_normal_matrix, hermitian_eigenvalues};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ds(beta: f64, alpha: f64) -> ChannelModelSpec {
        ChannelModelSpec::DoubleScattering(DoubleScatteringParams {
            scatterers: 5,
            antenna_spacing: 0.5,
            scatterer_spacing: 10.0,
            angular_spread_rad: 2.0 * PI / 3.0,
            azimuth_rad: alpha,
            cluster_distance_km: 0.3,
            carrier_hz: 2e9,
            beta,
        })
    }

    fn rayleigh(beta: f64) -> ChannelModelSpec {
        ChannelModelSpec::UncorrelatedRayleigh { beta }
    }

    #[test]
    fn pilot_plans() {
        let p = build_pilot_plan(4, 5, 1, 200).unwrap();
        assert_eq!(p.tau_p, 5);
        assert!(p.groups.iter().all(|g| g == &vec![0, 1, 2, 3]));
        let p = build_pilot_plan(4, 5, 4, 200).unwrap();
        assert_eq!(p.tau_p, 20);
        for (l, g) in p.groups.iter().enumerate() {
            assert_eq!(g, &vec![l]);
        }
        let p = build_pilot_plan(4, 5, 2, 200).unwrap();
        assert_eq!(p.tau_p, 10);
        assert_eq!(p.groups, vec![vec![0, 2], vec![1, 3], vec![0, 2], vec![1, 3]]);
        match build_pilot_plan(4, 5, 50, 200) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "pilot.reuse_factor"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(build_pilot_plan(4, 5, 0, 200).is_err());
    }

    #[test]
    fn noiseless_despreading() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let net = NetworkChannels::new(2, 2, 6, |_, _, _| rayleigh(1.0)).unwrap();
        let h = net.sample(&mut rng);
        let powers = Powers::uniform(2, 2, 3.0);

        let plan = build_pilot_plan(2, 2, 2, 200).unwrap();
        let y = despread_pilots(&mut rng, &h, &plan, &powers, 0.0);
        let expected = h.h(0, 1, 0) * Complex64::new(3f64.sqrt() * 4.0, 0.0);
        assert!((y.y[0].column(1) - expected).norm() < 1e-12);

        let plan = build_pilot_plan(2, 2, 1, 200).unwrap();
        let y = despread_pilots(&mut rng, &h, &plan, &powers, 0.0);
        let expected = (h.h(0, 1, 0) + h.h(1, 1, 0)) * Complex64::new(3f64.sqrt() * 2.0, 0.0);
        assert!((y.y[0].column(1) - expected).norm() < 1e-12);
    }

    #[test]
    fn despread_noise_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let net = NetworkChannels::new(1, 1, 8, |_, _, _| rayleigh(1.0)).unwrap();
        let h = net.sample(&mut rng);
        let plan = build_pilot_plan(1, 1, 1, 200).unwrap();
        let powers = Powers::uniform(1, 1, 0.0);
        let n = 100_000;
        let mean = (0..n)
            .map(|_| despread_pilots(&mut rng, &h, &plan, &powers, 2.5).y[0].norm_squared())
            .sum::<f64>()
            / n as f64;
        assert_close!(mean / (1.0 * 2.5 * 8.0), 1.0, 0.01);
    }

    #[test]
    fn materialized_pilots_reproduce_despreading() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (cells, users, m) = (4, 3, 5);
        for f in [1, 2, 4] {
            let plan = build_pilot_plan(cells, users, f, 200).unwrap();
            let phi = pilot_matrices(&plan, users);
            for i in 0..cells {
                for l in 0..cells {
                    let g = phi[i].adjoint() * &phi[l];
                    let expected = if plan.class_of(i) == plan.class_of(l) {
                        CMatrix::identity(users, users) * Complex64::new(plan.tau_p as f64, 0.0)
                    } else {
                        CMatrix::zeros(users, users)
                    };
                    assert!((g - expected).norm() < 1e-9);
                }
            }
            let net = NetworkChannels::new(cells, users, m, |_, _, _| rayleigh(1.0)).unwrap();
            let h = net.sample(&mut rng);
            let powers = Powers::new((0..cells * users).map(|j| 0.5 + j as f64).collect(), users).unwrap();
            let noise: Vec<CMatrix> = (0..cells)
                .map(|_| complex_normal_matrix(&mut rng, m, plan.tau_p))
                .collect();
            let y_full = received_pilot_signal(&h, &powers, &phi, &noise);
            let projected: Vec<CMatrix> = (0..cells).map(|l| &noise[l] * &phi[l]).collect();
            let direct = despread_with_noise(&h, &plan, &powers, &projected);
            for l in 0..cells {
                let via_full = &y_full[l] * &phi[l];
                assert!((via_full - &direct.y[l]).norm() <= 1e-10 * direct.y[l].norm());
            }
        }
    }

    #[test]
    fn scalar_filter_without_contamination() {
        let mom = Operator::ScaledIdentity { dim: 4, scale: 2.0 };
        let f = lmmse_filter(0, &[&mom], &[3.0], 5, 0.7).unwrap();
        let expected = 3f64.sqrt() * 2.0 / (5.0 * 3.0 * 2.0 + 0.7);
        match f.b {
            Operator::ScaledIdentity { scale, .. } => assert_close!(scale, expected, 1e-15),
            _ => panic!("expected a scalar filter"),
        }
    }

    #[test]
    fn contaminated_scalar_filter_matches_brute_force_solve() {
        // Brute force: assemble Cov{h,y} and Cov{y,y} densely and solve.
        let (b1, b2, p, tau, s2) = (1.3f64, 0.4f64, 2.0f64, 5usize, 0.9f64);
        let m = 3;
        let t = tau as f64;
        let c_hy = CMatrix::identity(m, m) * Complex64::new(p.sqrt() * t * b1, 0.0);
        let c_yy = CMatrix::identity(m, m) * Complex64::new(t * t * p * (b1 + b2) + t * s2, 0.0);
        let brute = &c_hy * c_yy.try_inverse().unwrap();

        let (r1, r2) = (
            Operator::ScaledIdentity { dim: m, scale: b1 },
            Operator::ScaledIdentity { dim: m, scale: b2 },
        );
        let scalar = lmmse_filter(0, &[&r1, &r2], &[p, p], tau, s2).unwrap();
        let (d1, d2) = (Operator::Dense(r1.to_dense()), Operator::Dense(r2.to_dense()));
        let dense = lmmse_filter(0, &[&d1, &d2], &[p, p], tau, s2).unwrap();
        let closed = p.sqrt() * b1 / (t * p * (b1 + b2) + s2);
        assert!((scalar.b.to_dense() - &brute).norm() < 1e-12);
        assert!((dense.b.to_dense() - &brute).norm() < 1e-12);
        assert_close!(brute[(0, 0)].re, closed, 1e-12);
    }

    #[test]
    fn noiseless_recovery_with_rank_deficient_moment() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let spec = ds(1e-9, 0.3);
        let moment = Operator::second_moment(&spec, 12).unwrap();
        let f = lmmse_filter(0, &[&moment], &[2.0], 5, 0.0).unwrap();
        let net = NetworkChannels::new(1, 1, 12, |_, _, _| spec).unwrap();
        for _ in 0..20 {
            let h = net.sample(&mut rng);
            let y = h.h(0, 0, 0) * Complex64::new(2f64.sqrt() * 5.0, 0.0);
            let est = f.apply(&y);
            assert!((est - h.h(0, 0, 0)).norm() <= 1e-10 * h.h(0, 0, 0).norm());
        }
    }

    #[test]
    fn auto_covariance_is_positive_definite() {
        let specs = [ds(1.0, 0.1), ds(0.3, -0.4), rayleigh(0.5)];
        let moments: Vec<_> = specs.iter().map(|s| Operator::second_moment(s, 10).unwrap()).collect();
        let refs: Vec<&Operator> = moments.iter().collect();
        let (tau, s2) = (3usize, 0.2);
        let f = lmmse_filter(0, &refs, &[1.0, 2.0, 3.0], tau, s2).unwrap();
        let auto = f.auto_covariance.to_dense();
        assert!(is_hermitian(&auto, 1e-12));
        assert!(hermitian_eigenvalues(&auto)[0] >= tau as f64 * s2 - 1e-9);
    }

    #[test]
    fn non_psd_moment_rejected() {
        let mut bad = CMatrix::identity(3, 3);
        bad[(1, 1)] = Complex64::new(-0.5, 0.0);
        let op = Operator::Dense(bad);
        assert!(matches!(
            lmmse_filter(0, &[&op], &[1.0], 1, 1.0),
            Err(Error::Numerical(_))
        ));
        let op = Operator::ScaledIdentity { dim: 3, scale: -1.0 };
        assert!(matches!(
            lmmse_filter(0, &[&op], &[1.0], 1, 1.0),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn identity_filter_passes_observation_through() {
        let plan = build_pilot_plan(1, 1, 1, 10).unwrap();
        let powers = Powers::uniform(1, 1, 1.0);
        let id = Operator::ScaledIdentity { dim: 3, scale: 1.0 };
        let mut bank = FilterBank::build(&plan, 1, &powers, 1.0, |_, _, _| &id).unwrap();
        bank.filters[0].b = Operator::Dense(CMatrix::identity(3, 3));
        let v = CMatrix::from_fn(3, 1, |r, _| Complex64::new(r as f64, -1.0));
        let est = estimate_channels(&bank, &DespreadPilot { y: vec![v.clone()] }).unwrap();
        assert_eq!(est.h_hat[0], v);
        let wrong = CMatrix::zeros(4, 1);
        assert!(matches!(
            estimate_channels(&bank, &DespreadPilot { y: vec![wrong] }),
            Err(Error::Domain(_))
        ));
    }

    struct Setup {
        net: NetworkChannels,
        plan: PilotPlan,
        powers: Powers,
        moments: Vec<Operator>,
    }

    fn two_cell_setup(reuse: usize, double_scattering: bool) -> Setup {
        let (cells, users, m) = (2, 1, 6);
        let beta = |i: usize, l: usize| if i == l { 1.0 } else { 0.4 };
        let spec = |i: usize, _k: usize, l: usize| {
            if double_scattering {
                ds(beta(i, l), 0.2 * i as f64 - 0.5 * l as f64)
            } else {
                rayleigh(beta(i, l))
            }
        };
        let net = NetworkChannels::new(cells, users, m, spec).unwrap();
        let mut moments = Vec::new();
        for i in 0..cells {
            for l in 0..cells {
                moments.push(Operator::second_moment(&spec(i, 0, l), m).unwrap());
            }
        }
        Setup {
            net,
            plan: build_pilot_plan(cells, users, reuse, 200).unwrap(),
            powers: Powers::uniform(cells, users, 1.0),
            moments,
        }
    }

    #[test]
    fn orthogonality_principle() {
        let s = two_cell_setup(1, true);
        let bank = FilterBank::build(&s.plan, 1, &s.powers, 0.5, |i, _, l| &s.moments[i * 2 + l]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = 6;
        let mut cross = CMatrix::zeros(m, m);
        let mut auto = CMatrix::zeros(m, m);
        for _ in 0..100_000 {
            let h = s.net.sample(&mut rng);
            let y = despread_pilots(&mut rng, &h, &s.plan, &s.powers, 0.5);
            let est = estimate_channels(&bank, &y).unwrap();
            let hh = est.h_hat[0].column(0).into_owned();
            let err = h.h(0, 0, 0) - &hh;
            cross.gerc(Complex64::new(1.0, 0.0), &hh, &err, Complex64::new(1.0, 0.0));
            auto.gerc(Complex64::new(1.0, 0.0), &hh, &hh, Complex64::new(1.0, 0.0));
        }
        assert!(cross.norm() / auto.norm() <= 0.03);
    }

    #[test]
    fn contamination_couples_estimates_to_other_cells() {
        let s = two_cell_setup(1, false);
        let bank = FilterBank::build(&s.plan, 1, &s.powers, 0.5, |i, _, l| &s.moments[i * 2 + l]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 100_000;
        let (mut c, mut a, mut b) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
        for _ in 0..n {
            let h = s.net.sample(&mut rng);
            let y = despread_pilots(&mut rng, &h, &s.plan, &s.powers, 0.5);
            let est = estimate_channels(&bank, &y).unwrap();
            let hh = est.h_hat[0].column(0);
            let other = h.h(1, 0, 0);
            c += hh.dotc(&other);
            a += hh.norm_squared();
            b += other.norm_squared();
        }
        let corr = c.norm() / (a * b).sqrt();
        assert!(corr > 0.2, "correlation {corr}");
    }

    #[test]
    fn mse_decreases_with_noise() {
        let mse = |noise: f64| {
            let s = two_cell_setup(2, true);
            let bank =
                FilterBank::build(&s.plan, 1, &s.powers, noise, |i, _, l| &s.moments[i * 2 + l]).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let n = 20_000;
            (0..n)
                .map(|_| {
                    let h = s.net.sample(&mut rng);
                    let y = despread_pilots(&mut rng, &h, &s.plan, &s.powers, noise);
                    let est = estimate_channels(&bank, &y).unwrap();
                    (h.h(0, 0, 0) - est.h_hat[0].column(0)).norm_squared()
                })
                .sum::<f64>()
                / n as f64
        };
        assert!(mse(0.1) < mse(1.0));
    }
}
