use num_complex::Complex64;
use rand::Rng;

use crate::channel::ChannelTensor;
use crate::linalg::{complex_normal, CVector};
use crate::powers::Powers;

/// Uplink data received at every station for one symbol period.
#[derive(Debug, Clone, PartialEq)]
pub struct UplinkReception {
    /// `y_l = Σ_{i,t} sqrt(p_{i,t}) h_{i,t}^l x_{i,t} + n_l`
    pub y: Vec<CVector>,
    pub noise: Vec<CVector>,
}

/// The four parts of `v_{l,k}ᴴ y_l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombinedTerms {
    pub desired: Complex64,
    pub intra_cell: Complex64,
    pub inter_cell: Complex64,
    pub noise: Complex64,
}

impl CombinedTerms {
    pub fn total(&self) -> Complex64 {
        self.desired + self.intra_cell + self.inter_cell + self.noise
    }
}

/// Draws the received data signal for given symbols `x_{i,t}` (cell-major).
pub fn simulate_uplink_reception<R: Rng + ?Sized>(
    rng: &mut R,
    channels: &ChannelTensor,
    powers: &Powers,
    symbols: &[Complex64],
    noise_var: f64,
) -> UplinkReception {
    let std = noise_var.sqrt();
    let users = channels.users_per_cell();
    let mut y = Vec::with_capacity(channels.cells());
    let mut noise = Vec::with_capacity(channels.cells());
    for l in 0..channels.cells() {
        let n = CVector::from_fn(channels.antennas(), |_, _| complex_normal(rng) * std);
        let mut acc = n.clone();
        for i in 0..channels.cells() {
            for t in 0..users {
                let a = symbols[i * users + t] * powers.get(i, t).sqrt();
                acc.axpy(a, &channels.h(i, t, l), Complex64::new(1.0, 0.0));
            }
        }
        y.push(acc);
        noise.push(n);
    }
    UplinkReception { y, noise }
}

/// Splits `vᴴ y_l` for user k of cell l into desired signal, intra-cell
/// interference, inter-cell interference and noise.
pub fn combine_terms(
    v: &CVector,
    l: usize,
    k: usize,
    channels: &ChannelTensor,
    powers: &Powers,
    symbols: &[Complex64],
    reception: &UplinkReception,
) -> CombinedTerms {
    let users = channels.users_per_cell();
    let zero = Complex64::new(0.0, 0.0);
    let mut terms = CombinedTerms {
        desired: zero,
        intra_cell: zero,
        inter_cell: zero,
        noise: v.dotc(&reception.noise[l]),
    };
    for i in 0..channels.cells() {
        for t in 0..users {
            let part = v.dotc(&channels.h(i, t, l)) * powers.get(i, t).sqrt() * symbols[i * users + t];
            if i == l && t == k {
                terms.desired += part;
            } else if i == l {
                terms.intra_cell += part;
            } else {
                terms.inter_cell += part;
            }
        }
    }
    terms
}
