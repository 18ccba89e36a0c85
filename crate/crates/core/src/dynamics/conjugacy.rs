use super::{rotate, SkewSystem};
use crate::error::Result;
use crate::heisenberg::{HeisElt, PhasePoint};
use crate::numtheory::IndexSets;
use crate::periodic::{split_resonant, PeriodicFn, ResonantSplit};
use crate::scalar::FloatScalar;

/// The coboundary change of coordinates
/// `R(t, Gamma g) = (t, Gamma g (1, g_phi, g_omega; 1, g_eta; 1))` and the
/// conjugated system `T_1 = R^-1 S R` driven by `(phi+, eta+, omega+)`.
#[derive(Clone, Debug)]
pub struct Conjugacy<T> {
    pub split_phi: ResonantSplit<T>,
    pub split_eta: ResonantSplit<T>,
    /// `omega = psi + g_phi eta - phi+ (g_eta o l_alpha)`.
    pub omega: PeriodicFn<T>,
    pub split_omega: ResonantSplit<T>,
    t1: SkewSystem<T>,
}

impl<T: FloatScalar> Conjugacy<T> {
    pub fn new(sys: &SkewSystem<T>, sets: &IndexSets) -> Result<Self> {
        let rn = sys.alpha();
        let split_phi = split_resonant(sys.phi(), sets, rn)?;
        let split_eta = split_resonant(sys.eta(), sets, rn)?;
        let g_eta_shift = split_eta.cobound.shift(rn, 1);
        let omega = sys
            .psi()
            .add(&split_phi.cobound.mul(sys.eta())?)
            .sub(&split_phi.plus.mul(&g_eta_shift)?);
        let split_omega = split_resonant(&omega, sets, rn)?;
        let t1 = SkewSystem::new(
            rn.clone(),
            split_phi.plus.clone(),
            split_eta.plus.clone(),
            split_omega.plus.clone(),
        )?;
        Ok(Conjugacy { split_phi, split_eta, omega, split_omega, t1 })
    }

    /// The system `T_1`.
    pub fn t1(&self) -> &SkewSystem<T> {
        &self.t1
    }

    /// `(1, g_phi(t), g_omega(t); 1, g_eta(t); 1)`.
    pub fn r_matrix(&self, t: T) -> HeisElt<T> {
        HeisElt::new(
            self.split_eta.cobound.eval_re(t),
            self.split_phi.cobound.eval_re(t),
            self.split_omega.cobound.eval_re(t),
        )
    }

    pub fn apply_r(&self, p: &PhasePoint<T>) -> PhasePoint<T> {
        PhasePoint::new(p.t, p.p.rep().mul(&self.r_matrix(p.t)))
    }

    pub fn apply_r_inv(&self, p: &PhasePoint<T>) -> PhasePoint<T> {
        PhasePoint::new(p.t, p.p.rep().mul(&self.r_matrix(p.t).inv()))
    }

    pub fn conjugated_step_t1(&self, p: &PhasePoint<T>) -> PhasePoint<T> {
        self.t1.step(p)
    }

    pub fn iterate_t1(&self, p: &PhasePoint<T>, m: u64) -> Result<PhasePoint<T>> {
        self.t1.iterate(p, m)
    }

    /// `omega(t)` minus its defining expression evaluated pointwise.
    pub fn omega_residual(&self, sys: &SkewSystem<T>, t: T) -> T {
        let rn = sys.alpha();
        let direct = sys.psi().eval_re(t) + self.split_phi.cobound.eval_re(t) * sys.eta().eval_re(t)
            - self.split_phi.plus.eval_re(t) * self.split_eta.cobound.eval_re(rotate(rn, t, 1));
        self.omega.eval_re(t) - direct
    }

    /// In the regime `M_1(B) = {0}`, `T_1` is the rotation times the central
    /// shift by `omega^(0)`; returns that shift.
    pub fn central_shift(&self) -> Option<T> {
        let only_mean = |f: &PeriodicFn<T>| f.terms().all(|(m, _)| m == 0);
        let t1 = &self.t1;
        if t1.phi().is_zero() && t1.eta().is_zero() && only_mean(t1.psi()) {
            Some(self.omega.mean().re)
        } else {
            None
        }
    }
}
