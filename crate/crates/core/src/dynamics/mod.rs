//! The skew product `S(t, Gamma g) = (t + alpha, Gamma g M(t))` with
//! `M(t) = (1, phi(t), psi(t); 1, eta(t); 1)`, its closed-form iterates and
//! the conjugacy to the resonant system.

mod conjugacy;
mod expsum;
mod rational;
mod regularity;

use num_complex::Complex;

pub use conjugacy::Conjugacy;
pub use expsum::{double_sum, expsum_w0, expsum_w1, expsum_w1w2, expsum_w2};
pub use rational::{rational_birkhoff, rational_h_coeffs, RationalQuadratic};
pub use regularity::{regularity_constants, RegularityReport};

use crate::error::{Error, Result};
use crate::fourier::geom;
use crate::heisenberg::{HeisElt, PhasePoint};
use crate::numtheory::RotationNumber;
use crate::periodic::PeriodicFn;
use crate::scalar::FloatScalar;

/// `frac(t + m alpha)`.
pub fn rotate<T: FloatScalar>(rn: &RotationNumber, t: T, m: i128) -> T {
    let s = t + T::of(rn.phase(m));
    let s = s - s.floor();
    if s >= T::one() {
        T::zero()
    } else {
        s
    }
}

#[derive(Clone, Debug)]
pub struct SkewSystem<T> {
    rn: RotationNumber,
    phi: PeriodicFn<T>,
    eta: PeriodicFn<T>,
    psi: PeriodicFn<T>,
}

fn check_real<T: FloatScalar>(name: &str, f: &PeriodicFn<T>) -> Result<()> {
    let tol = T::of(1e-12) * (T::one() + f.l1_norm());
    if !f.is_real(tol) {
        return Err(Error::Precondition(format!("{name} is not real-valued")));
    }
    Ok(())
}

impl<T: FloatScalar> SkewSystem<T> {
    /// Requires real `phi`, `eta`, `psi` and zero-mean `phi`, `eta`.
    pub fn new(rn: RotationNumber, phi: PeriodicFn<T>, eta: PeriodicFn<T>, psi: PeriodicFn<T>) -> Result<Self> {
        for (name, f) in [("phi", &phi), ("eta", &eta)] {
            check_real(name, f)?;
            let tol = T::of(1e-14) * (T::one() + f.l1_norm());
            if f.mean().norm() > tol {
                return Err(Error::Precondition(format!("{name} must have zero mean")));
            }
        }
        check_real("psi", &psi)?;
        let phi = phi.map_coeffs(|m, c| if m == 0 { Complex::new(T::zero(), T::zero()) } else { c });
        let eta = eta.map_coeffs(|m, c| if m == 0 { Complex::new(T::zero(), T::zero()) } else { c });
        Ok(SkewSystem { rn, phi, eta, psi })
    }

    pub fn alpha(&self) -> &RotationNumber {
        &self.rn
    }

    pub fn phi(&self) -> &PeriodicFn<T> {
        &self.phi
    }

    pub fn eta(&self) -> &PeriodicFn<T> {
        &self.eta
    }

    pub fn psi(&self) -> &PeriodicFn<T> {
        &self.psi
    }

    /// `M(t)` as `(x, y, z) = (eta, phi, psi)`.
    pub fn matrix(&self, t: T) -> HeisElt<T> {
        HeisElt::new(self.eta.eval_re(t), self.phi.eval_re(t), self.psi.eval_re(t))
    }

    pub fn step(&self, p: &PhasePoint<T>) -> PhasePoint<T> {
        let g = p.p.rep().mul(&self.matrix(p.t));
        PhasePoint::new(rotate(&self.rn, p.t, 1), g)
    }

    /// `S^n p` from the closed-form Birkhoff sums.
    pub fn iterate(&self, p: &PhasePoint<T>, n: u64) -> Result<PhasePoint<T>> {
        Ok(self.birkhoff(n)?.apply(&self.rn, p))
    }

    /// Birkhoff sums as trigonometric polynomials in `t`.
    pub fn birkhoff(&self, n: u64) -> Result<BirkhoffSums<T>> {
        if n == 0 {
            return Err(Error::Range("n must be at least 1".into()));
        }
        let sum = |f: &PeriodicFn<T>| f.map_coeffs(|m, c| c * geom::<T>(&self.rn, m as i128, n));
        let mut sigma0 = Complex::new(T::zero(), T::zero());
        let mut cross = Vec::with_capacity(self.phi.terms().count() * self.eta.terms().count());
        for (u, a) in self.phi.terms() {
            for (v, b) in self.eta.terms() {
                let w = a * b * double_sum::<T>(u, v, n, &self.rn);
                if u + v == 0 {
                    sigma0 = sigma0 + w;
                } else {
                    cross.push((u + v, w));
                }
            }
        }
        Ok(BirkhoffSums {
            n,
            phi_n: sum(&self.phi),
            xi_n: sum(&self.eta),
            omega_n: sum(&self.psi),
            sigma_n0: sigma0,
            sigma_n: PeriodicFn::new(cross, None)?,
        })
    }
}

/// `Phi_n, xi_n, Omega_n` and `H_n = Sigma_{n,0} + Sigma_n(t)`.
#[derive(Clone, Debug)]
pub struct BirkhoffSums<T> {
    pub n: u64,
    pub phi_n: PeriodicFn<T>,
    pub xi_n: PeriodicFn<T>,
    pub omega_n: PeriodicFn<T>,
    pub sigma_n0: Complex<T>,
    pub sigma_n: PeriodicFn<T>,
}

impl<T: FloatScalar> BirkhoffSums<T> {
    pub fn phi(&self, t: T) -> T {
        self.phi_n.eval_re(t)
    }

    pub fn xi(&self, t: T) -> T {
        self.xi_n.eval_re(t)
    }

    pub fn omega(&self, t: T) -> T {
        self.omega_n.eval_re(t)
    }

    pub fn h(&self, t: T) -> T {
        (self.sigma_n0 + self.sigma_n.eval(t)).re
    }

    pub fn sigma(&self, t: T) -> T {
        self.sigma_n.eval_re(t)
    }

    pub fn psi(&self, t: T) -> T {
        self.omega(t) + self.h(t)
    }

    /// `(1, Phi_n(t), Psi_n(t); 1, xi_n(t); 1)`.
    pub fn matrix(&self, t: T) -> HeisElt<T> {
        HeisElt::new(self.xi(t), self.phi(t), self.psi(t))
    }

    /// `S^n p`.
    pub fn apply(&self, rn: &RotationNumber, p: &PhasePoint<T>) -> PhasePoint<T> {
        let g = p.p.rep().mul(&self.matrix(p.t));
        PhasePoint::new(rotate(rn, p.t, self.n as i128), g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::{dist_phase, DEFAULT_WINDOW};
    use crate::numtheory::AlphaSpec;

    fn trig_system(spec: AlphaSpec) -> SkewSystem<f64> {
        let rn = RotationNumber::expand(&spec, 30).unwrap();
        let phi = PeriodicFn::cos(1, 1.0).add(&PeriodicFn::sin(3, 0.4));
        let eta = PeriodicFn::sin(1, 1.0).add(&PeriodicFn::cos(2, -0.3));
        let psi = PeriodicFn::cos(2, 0.5).add(&PeriodicFn::constant(0.1));
        SkewSystem::new(rn, phi, eta, psi).unwrap()
    }

    #[test]
    fn step_examples() {
        let rn = RotationNumber::expand(&AlphaSpec::rational(0, 1), usize::MAX).unwrap();
        let z = PeriodicFn::zero();
        let sys = SkewSystem::new(rn, z.clone(), z.clone(), z).unwrap();
        let p = PhasePoint::new(0.3, HeisElt::new(0.2, 0.7, -0.1));
        assert_eq!(sys.step(&p), p);

        let rn = RotationNumber::expand(&AlphaSpec::rational(1, 3), usize::MAX).unwrap();
        let sys: SkewSystem<f64> = SkewSystem::new(rn, PeriodicFn::cos(1, 1.0), PeriodicFn::sin(1, 1.0), PeriodicFn::zero()).unwrap();
        let m = sys.matrix(0.0);
        assert!((m.y - 1.0).abs() < 1e-15 && m.x.abs() < 1e-15);
    }

    #[test]
    fn iterate_matches_steps() {
        let sys = trig_system(AlphaSpec::golden());
        let p0 = PhasePoint::new(0.123, HeisElt::new(0.4, 0.9, 0.3));
        let mut p = p0.clone();
        for n in 1..=100u64 {
            p = sys.step(&p);
            if n == 1 || n == 50 || n == 100 {
                let q = sys.iterate(&p0, n).unwrap();
                assert!(dist_phase(&p, &q, DEFAULT_WINDOW) < 1e-9, "n={n}");
            }
        }
    }

    #[test]
    fn h_matches_double_sum() {
        let sys = trig_system(AlphaSpec::surd(-1, 1, 2, 1));
        let a = sys.alpha().value();
        for n in [1u64, 2, 37, 120] {
            let bs = sys.birkhoff(n).unwrap();
            for t in [0.0, 0.31, 0.77] {
                let mut h = 0.0f64;
                for j in 1..n {
                    for r in 0..j {
                        h += sys.phi().eval_re(t + r as f64 * a) * sys.eta().eval_re(t + j as f64 * a);
                    }
                }
                assert!((bs.h(t) - h).abs() < 1e-9 * (1.0 + h.abs()), "n={n} t={t}");
            }
        }
        let b1 = sys.birkhoff(1).unwrap();
        assert!(b1.h(0.4).abs() < 1e-15);
    }

    #[test]
    fn rational_iterate() {
        let sys = trig_system(AlphaSpec::rational(2, 5));
        let p0 = PhasePoint::new(0.05, HeisElt::new(0.1, 0.2, 0.3));
        let mut p = p0.clone();
        for _ in 0..40 {
            p = sys.step(&p);
        }
        assert!(dist_phase(&p, &sys.iterate(&p0, 40).unwrap(), DEFAULT_WINDOW) < 1e-9);
    }

    #[test]
    fn zero_mean_enforced() {
        let rn = RotationNumber::expand(&AlphaSpec::golden(), 10).unwrap();
        let bad = PeriodicFn::constant(0.5);
        assert!(SkewSystem::new(rn, bad, PeriodicFn::zero(), PeriodicFn::zero()).is_err());
    }
}
