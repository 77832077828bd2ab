use num_complex::Complex64;
use rand::Rng;

use super::{ChannelModelSpec, LinkChannel};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

/// Sample correlation `(1/N)·Σ h hᴴ / β`.
pub fn empirical_correlation(samples: &[CVector], beta: f64) -> Result<CMatrix> {
    let first = samples
        .first()
        .ok_or_else(|| Error::Domain("empirical correlation needs at least one sample".into()))?;
    if !(beta > 0.0) {
        return Err(Error::Domain("normalization β must be positive".into()));
    }
    let m = first.len();
    let mut acc = CMatrix::zeros(m, m);
    for h in samples {
        if h.len() != m {
            return Err(Error::Domain("samples have inconsistent lengths".into()));
        }
        acc.gerc(Complex64::new(1.0, 0.0), h, h, Complex64::new(1.0, 0.0));
    }
    Ok(acc / Complex64::new(samples.len() as f64 * beta, 0.0))
}

/// Monte-Carlo estimate of `E{|h_kᴴ h_t|} / (M·sqrt(β_k β_t))` over `pairs`
/// independent channel pairs.
pub fn favorable_propagation_stat<R: Rng + ?Sized>(
    rng: &mut R,
    spec_k: &ChannelModelSpec,
    spec_t: &ChannelModelSpec,
    antennas: usize,
    pairs: usize,
) -> Result<f64> {
    if pairs == 0 {
        return Err(Error::Domain("favorable propagation needs at least one pair".into()));
    }
    let sk = LinkChannel::new(spec_k, antennas)?;
    let st = LinkChannel::new(spec_t, antennas)?;
    let mut hk = CVector::zeros(antennas);
    let mut ht = CVector::zeros(antennas);
    let mut sum = 0.0;
    for _ in 0..pairs {
        sk.sample_into(rng, hk.as_mut_slice());
        st.sample_into(rng, ht.as_mut_slice());
        sum += hk.dotc(&ht).norm();
    }
    Ok(sum / (pairs as f64 * antennas as f64 * (spec_k.beta() * spec_t.beta()).sqrt()))
}
