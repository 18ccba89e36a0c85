use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::SkewSystem;
use crate::error::{Error, Result};
use crate::scalar::FloatScalar;

/// Measured constants of the regularity bounds for `H_m` and `xi_m`.
#[derive(Clone, Debug, Serialize)]
pub struct RegularityReport {
    pub q_k: u64,
    pub n_k: u64,
    pub samples: usize,
    /// `max |H_m(t*) - H_m(t)| / (q^-2 + q^2 |t - t*|)`.
    pub c_h: f64,
    /// `max |xi_m(t*) - xi_m(t)| / (q^-2 + q |t - t*|)`.
    pub c_xi: f64,
    /// `max (|Phi_m| + |xi_m|) / (1/q + q (sup|phi| + sup|eta|))`.
    pub c_growth: f64,
}

/// Samples `m` log-uniformly in `[1, n_k]`, `t` uniformly and
/// `|t - t*|` log-uniformly in `[q^-4, q^-1]`.
pub fn regularity_constants<T: FloatScalar>(
    sys: &SkewSystem<T>,
    q_k: u64,
    n_k: u64,
    m_count: usize,
    pairs_per_m: usize,
    seed: u64,
) -> Result<RegularityReport> {
    if q_k < 2 || n_k == 0 {
        return Err(Error::Range("need q_k >= 2 and n_k >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = q_k as f64;
    let sup = (sys.phi().l1_norm() + sys.eta().l1_norm()).to_f64_lossy();
    let (mut c_h, mut c_xi, mut c_growth) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..m_count {
        let m = ((n_k as f64).ln() * rng.gen::<f64>()).exp().round().clamp(1.0, n_k as f64) as u64;
        let bs = sys.birkhoff(m)?;
        for _ in 0..pairs_per_m {
            let t: f64 = rng.gen();
            let gap = q.powf(-1.0 - 3.0 * rng.gen::<f64>());
            let ts = (t + gap).fract();
            let (tt, tst) = (T::of(t), T::of(ts));
            let dh = (bs.h(tst) - bs.h(tt)).to_f64_lossy().abs();
            let dxi = (bs.xi(tst) - bs.xi(tt)).to_f64_lossy().abs();
            c_h = c_h.max(dh / (q.powi(-2) + q * q * gap));
            c_xi = c_xi.max(dxi / (q.powi(-2) + q * gap));
            let g = (bs.phi(tt).abs() + bs.xi(tt).abs()).to_f64_lossy();
            c_growth = c_growth.max(g / (1.0 / q + q * sup));
        }
    }
    Ok(RegularityReport { q_k, n_k, samples: m_count * pairs_per_m, c_h, c_xi, c_growth })
}
