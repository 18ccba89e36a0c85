use serde::Serialize;

use super::frac::dist_int;
use super::rotation::RotationNumber;
use crate::error::{Error, Result};

const MAX_RANGE: u64 = 10_000_000;

/// A quantity `y` whose multiples `||v y||` the search controls.
#[derive(Clone, Copy, Debug)]
pub enum Target {
    /// `y = q_m alpha`, evaluated exactly.
    QmAlpha,
    /// A real `y` already multiplied by `q_m`.
    Value(f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct DirichletChoice {
    pub v: u64,
    /// All squared distances are within `q_m^{-theta/3}`.
    pub satisfied: bool,
    /// Largest squared distance at `v`.
    pub worst: f64,
    pub threshold: f64,
    pub range_max: u64,
}

/// Smallest `v` in `[1, ceil(q_m^{theta/2})]` with every `||v y||^2 <= q_m^{-theta/3}`;
/// the argmin of the worst target otherwise.
pub fn dirichlet_search(rn: &RotationNumber, m: usize, targets: &[Target], theta: f64) -> Result<DirichletChoice> {
    if m > rn.depth() {
        return Err(Error::Range(format!("m = {m} beyond depth {}", rn.depth())));
    }
    let qm = rn.q_f64(m);
    let top = qm.powf(theta / 2.0);
    if !top.is_finite() || top < 1.0 {
        return Err(Error::Range(format!("q_m^(theta/2) = {top} < 1")));
    }
    let range_max = top.ceil() as u64;
    if range_max > MAX_RANGE {
        return Err(Error::Range(format!("search range {range_max} exceeds {MAX_RANGE}")));
    }
    let qm_int = rn.q(m);
    let threshold = qm.powf(-theta / 3.0);
    let mut best: Option<(u64, f64)> = None;
    for v in 1..=range_max {
        let mut worst: f64 = 0.0;
        for t in targets {
            let d = match t {
                Target::QmAlpha => {
                    let n = num_traits::ToPrimitive::to_i128(&(qm_int * v))
                        .ok_or_else(|| Error::Range("v q_m exceeds 128 bits".into()))?;
                    rn.dist_mul(n)?
                }
                Target::Value(y) => dist_int(&(v as f64 * y)),
            };
            worst = worst.max(d * d);
        }
        if worst <= threshold {
            return Ok(DirichletChoice { v, satisfied: true, worst, threshold, range_max });
        }
        if best.is_none_or(|(_, w)| worst < w) {
            best = Some((v, worst));
        }
    }
    let (v, worst) = best.expect("range is nonempty");
    Ok(DirichletChoice { v, satisfied: false, worst, threshold, range_max })
}
