use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use super::rotation::RotationNumber;
use crate::error::{Error, Result};

/// One element `q_l^{B-1}` of `Q_B`.
#[derive(Clone, Debug, Serialize)]
pub struct QbEntry {
    pub ell: usize,
    pub q: String,
    /// `q_l^{B-1}`.
    pub n: f64,
}

/// Window-relative classification of the convergent denominators.
#[derive(Clone, Debug)]
pub struct IndexSets {
    pub theta: f64,
    pub b: f64,
    /// Indices `m` with `q_m > 1` and `q_{m+1} >= q_m^{2+2 theta}`.
    pub qprime: Vec<usize>,
    /// Indices forming `Q''` within the window.
    pub qdoubleprime: Vec<usize>,
    /// No element of `Q'` appeared, so `Q'` was treated as finite.
    pub window_limited: bool,
    pub m0: usize,
    pub qb: Vec<QbEntry>,
    /// Levels `k` contributing to `M_1(B)`.
    resonant: Vec<bool>,
    qs: Vec<BigInt>,
    terminated: bool,
    rational: bool,
}

impl IndexSets {
    /// `theta = eps / 8`, `B = 2 + 16 theta`.
    pub fn from_epsilon(rn: &RotationNumber, eps: f64) -> Result<Self> {
        let theta = eps / 8.0;
        classify_index_sets(rn, theta, 2.0 + 16.0 * theta)
    }

    pub fn is_rational(&self) -> bool {
        self.rational
    }

    /// `M_1(B) = {0}` within the window.
    pub fn finite_qb(&self) -> bool {
        !self.resonant.iter().any(|&r| r)
    }

    /// Largest `|m|` the window classifies.
    pub fn window(&self) -> &BigInt {
        self.qs.last().expect("q_0 exists")
    }

    /// Membership in `M_1(B)` via the containing level `q_k <= |m| < q_{k+1}`.
    pub fn in_m1(&self, m: i64) -> Result<bool> {
        if m == 0 {
            return Ok(true);
        }
        let am = BigInt::from(m.unsigned_abs());
        let last = self.qs.len() - 1;
        if am >= self.qs[last] {
            if self.terminated {
                return Ok(false);
            }
            return Err(Error::Range(format!("|m| = {am} beyond the classified window q_{last}")));
        }
        let k = self.qs.partition_point(|q| *q <= am) - 1;
        Ok(self.resonant[k] && am.is_multiple_of(&self.qs[k]))
    }

    pub fn in_m2(&self, m: i64) -> Result<bool> {
        Ok(!self.in_m1(m)?)
    }

    /// Membership straight from the set-builder definition.
    pub fn in_m1_by_definition(&self, m: i64) -> Result<bool> {
        if m == 0 {
            return Ok(true);
        }
        let am = BigInt::from(m.unsigned_abs());
        if !self.terminated && am >= *self.window() {
            return Err(Error::Range("beyond window".into()));
        }
        for k in 0..self.qs.len().saturating_sub(1) {
            let (qk, qn) = (&self.qs[k], &self.qs[k + 1]);
            let lnq = super::rotation::big_ln(qk);
            let eligible = *qk > BigInt::from(1) && self.b * lnq < super::rotation::big_ln(qn);
            if eligible && *qk <= am && am < *qn && am.is_multiple_of(qk) {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Classifies `Q'`, `Q''`, `Q_B` and the resonant levels of `M_1(B)`.
pub fn classify_index_sets(rn: &RotationNumber, theta: f64, b: f64) -> Result<IndexSets> {
    if !(theta > 0.0 && theta < 1.0 / 12.0) {
        return Err(Error::Range(format!("theta = {theta} outside (0, 1/12)")));
    }
    if !(b > 2.0) {
        return Err(Error::Range(format!("B = {b} must exceed 2")));
    }
    let qs = rn.qs().to_vec();
    let depth = qs.len() - 1;
    let lnq: Vec<f64> = (0..=depth).map(|k| rn.ln_q(k)).collect();
    let one = BigInt::from(1);
    let mut qprime = Vec::new();
    let mut qb = Vec::new();
    let mut resonant = vec![false; depth + 1];
    for m in 0..depth {
        if qs[m] <= one {
            continue;
        }
        if lnq[m + 1] >= (2.0 + 2.0 * theta) * lnq[m] {
            qprime.push(m);
        }
        if b * lnq[m] < lnq[m + 1] {
            resonant[m] = true;
            qb.push(QbEntry { ell: m, q: qs[m].to_string(), n: ((b - 1.0) * lnq[m]).exp() });
        }
    }
    let window_limited = qprime.is_empty();
    let (m0, qdoubleprime) = if window_limited {
        let m0 = qs.iter().position(|q| *q > one).unwrap_or(depth);
        (m0, (m0..=depth).collect())
    } else {
        (qprime[0], qprime.clone())
    };
    Ok(IndexSets {
        theta,
        b,
        qprime,
        qdoubleprime,
        window_limited,
        m0,
        qb,
        resonant,
        qs,
        terminated: rn.is_terminated(),
        rational: rn.is_rational(),
    })
}
