use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{rotate, SkewSystem};
use crate::error::{Error, Result};
use crate::fourier::{cis, Compensated};
use crate::heisenberg::PhasePoint;
use crate::numtheory::MobiusTable;

const BLOCK: u64 = 1 << 14;

/// Test functions on the phase space, evaluated on canonical representatives
/// `g = (1, y, z; 1, x; 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    /// `e(m0 t + m1 x + m2 y)`.
    Character { m0: i64, m1: i64, m2: i64 },
    /// `e(m0 t + m1 x + m2 y + m z) sum_b exp(-pi (y+b)^2 - pi delta (y+b)) e(b m x)`
    /// over `b = r + k`, `|k| < sqrt(|ln eps_trunc|)`.
    Theta { m0: i64, m1: i64, m2: i64, m: i64, r: f64, delta: [f64; 2], eps_trunc: f64 },
}

impl Observable {
    pub fn constant_one() -> Self {
        Observable::Character { m0: 0, m1: 0, m2: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if let Observable::Theta { r, delta, eps_trunc, .. } = self {
            if !(0.0..1.0).contains(r) {
                return Err(Error::Precondition(format!("theta offset r = {r} must lie in [0, 1)")));
            }
            if !(*eps_trunc > 0.0 && *eps_trunc < 1.0) {
                return Err(Error::Precondition("eps_trunc must lie in (0, 1)".into()));
            }
            if !delta.iter().all(|d| d.is_finite()) {
                return Err(Error::Precondition("delta must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn id(&self) -> String {
        match self {
            Observable::Character { m0, m1, m2 } => format!("character({m0},{m1},{m2})"),
            Observable::Theta { m0, m1, m2, m, r, delta, .. } => {
                format!("theta({m0},{m1},{m2},{m};r={r};delta={}{:+}i)", delta[0], delta[1])
            }
        }
    }

    fn shifts(eps_trunc: f64) -> i64 {
        let w = eps_trunc.ln().abs().sqrt();
        (w.ceil() as i64 - 1).max(0)
    }

    pub fn eval(&self, p: &PhasePoint<f64>) -> Complex<f64> {
        let g = p.p.rep();
        match *self {
            Observable::Character { m0, m1, m2 } => {
                cis((m0 as f64 * p.t + m1 as f64 * g.x + m2 as f64 * g.y).rem_euclid(1.0))
            }
            Observable::Theta { m0, m1, m2, m, r, delta, eps_trunc } => {
                let phase = m0 as f64 * p.t + m1 as f64 * g.x + m2 as f64 * g.y + m as f64 * g.z;
                let delta = Complex::new(delta[0], delta[1]);
                let kmax = Self::shifts(eps_trunc);
                let mut acc = Compensated::default();
                for k in -kmax..=kmax {
                    let b = r + k as f64;
                    let w = g.y + b;
                    let gauss = (-(std::f64::consts::PI) * (w * w + delta * w)).exp();
                    acc.add(gauss * cis((b * m as f64 * g.x).rem_euclid(1.0)));
                }
                cis(phase.rem_euclid(1.0)) * acc.value()
            }
        }
    }

    /// An upper bound for `sup |f|`.
    pub fn sup_bound(&self) -> f64 {
        match *self {
            Observable::Character { .. } => 1.0,
            Observable::Theta { r, delta, eps_trunc, .. } => {
                let kmax = Self::shifts(eps_trunc);
                let c = delta[0];
                (-kmax..=kmax)
                    .map(|k| {
                        // exp(-pi (w^2 + c w)) on w in [r + k, r + k + 1]
                        let (lo, hi) = (r + k as f64, r + k as f64 + 1.0);
                        let w = (-c / 2.0).clamp(lo, hi);
                        (-(std::f64::consts::PI) * (w * w + c * w)).exp()
                    })
                    .sum()
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Checkpoint {
    pub n: u64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

/// Partial averages `(1/N') sum_{n <= N'} mu(n) f(S^n x0)`.
#[derive(Clone, Debug, Serialize)]
pub struct CorrelationReport {
    pub n: u64,
    pub observable: String,
    pub base: PhasePoint<f64>,
    pub checkpoints: Vec<Checkpoint>,
}

/// Streams the orbit in fixed blocks, each started from the closed-form
/// iterate and advanced one step at a time, with `t_n` recomputed from the
/// exact phase of `n alpha`. Block sums are reduced in order, so the result
/// does not depend on the thread count.
pub fn mobius_correlation(
    sys: &SkewSystem<f64>,
    obs: &Observable,
    x0: &PhasePoint<f64>,
    n_max: u64,
    checkpoints: &[u64],
    table: &MobiusTable,
) -> Result<CorrelationReport> {
    obs.validate()?;
    if n_max == 0 {
        return Err(Error::Range("N must be at least 1".into()));
    }
    if (table.limit() as u64) < n_max {
        return Err(Error::Precondition(format!("Möbius table covers {} < N = {n_max}", table.limit())));
    }
    let mut cuts: Vec<u64> = checkpoints.iter().copied().filter(|&c| c >= 1 && c <= n_max).collect();
    cuts.push(n_max);
    cuts.sort_unstable();
    cuts.dedup();
    let mut blocks = Vec::new();
    let mut start = 1;
    for &c in &cuts {
        while start <= c {
            let end = (start + BLOCK - 1).min(c);
            blocks.push((start, end));
            start = end + 1;
        }
    }
    let rn = sys.alpha();
    let sums: Vec<Complex<f64>> = blocks
        .par_iter()
        .map(|&(a, b)| -> Result<Complex<f64>> {
            let mut p = sys.iterate(x0, a)?;
            let mut acc = Compensated::default();
            for n in a..=b {
                let mu = table.get(n as usize);
                if mu != 0 {
                    acc.add(obs.eval(&p) * mu as f64);
                }
                if n < b {
                    p = sys.step(&p);
                    p.t = rotate(rn, x0.t, n as i128 + 1);
                }
            }
            Ok(acc.value())
        })
        .collect::<Result<_>>()?;
    let mut total = Compensated::default();
    let mut out = Vec::new();
    let mut ci = 0;
    for (&(_, b), s) in blocks.iter().zip(sums) {
        total.add(s);
        while ci < cuts.len() && cuts[ci] == b {
            let v = total.value() / b as f64;
            if checkpoints.contains(&b) || b == n_max {
                out.push(Checkpoint { n: b, re: v.re, im: v.im, abs: v.norm() });
            }
            ci += 1;
        }
    }
    Ok(CorrelationReport { n: n_max, observable: obs.id(), base: x0.clone(), checkpoints: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::HeisElt;
    use crate::numtheory::{mobius_sieve, AlphaSpec, RotationNumber};
    use crate::periodic::PeriodicFn;

    #[test]
    fn constant_gives_mertens() {
        let rn = RotationNumber::expand(&AlphaSpec::golden(), 30).unwrap();
        let sys = SkewSystem::new(rn, PeriodicFn::cos(1, 1.0), PeriodicFn::sin(1, 1.0), PeriodicFn::zero()).unwrap();
        let table = mobius_sieve(100_000).unwrap();
        let x0 = PhasePoint::new(0.1, HeisElt::new(0.2, 0.3, 0.4));
        let r = mobius_correlation(&sys, &Observable::constant_one(), &x0, 100_000, &[1000, 50_000], &table).unwrap();
        for c in &r.checkpoints {
            assert_eq!(c.re, table.mertens(c.n as usize) as f64 / c.n as f64);
            assert_eq!(c.im, 0.0);
        }
        assert_eq!(r.checkpoints.len(), 3);
    }

    #[test]
    fn stationary_character() {
        let rn = RotationNumber::expand(&AlphaSpec::rational(0, 1), usize::MAX).unwrap();
        let z = PeriodicFn::zero();
        let sys = SkewSystem::new(rn, z.clone(), z.clone(), z).unwrap();
        let table = mobius_sieve(5000).unwrap();
        let x0 = PhasePoint::new(0.0, HeisElt::new(0.3, 0.0, 0.0));
        let obs = Observable::Character { m0: 0, m1: 1, m2: 0 };
        let r = mobius_correlation(&sys, &obs, &x0, 5000, &[], &table).unwrap();
        let expect = obs.eval(&x0) * (table.mertens(5000) as f64 / 5000.0);
        let got = Complex::new(r.checkpoints[0].re, r.checkpoints[0].im);
        assert!((got - expect).norm() < 1e-15);
    }

    #[test]
    fn theta_bounded() {
        let obs = Observable::Theta { m0: 1, m1: 0, m2: 1, m: 2, r: 0.5, delta: [1.0, 1.0], eps_trunc: 1e-8 };
        let sup = obs.sup_bound();
        for i in 0..100 {
            let s = i as f64 / 100.0;
            let p = PhasePoint::new(s, HeisElt::new(0.7 * s, s, 0.3 - s));
            assert!(obs.eval(&p).norm() <= sup * (1.0 + 1e-12));
        }
    }
}
