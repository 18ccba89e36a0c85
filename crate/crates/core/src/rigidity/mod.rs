//! Rigidity integrals, the drift quantities of the diagonal sum, the decay
//! experiment and Möbius correlations.

mod correlation;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

pub use correlation::{mobius_correlation, CorrelationReport, Observable};

use crate::dynamics::{BirkhoffSums, SkewSystem};
use crate::error::{Error, Result};
use crate::fourier::{one_minus_e_alpha, Compensated};
use crate::numtheory::{dirichlet_search, dist_int, IndexSets, Target};
use crate::periodic::PeriodicFn;

pub const DEFAULT_GRID: usize = 4096;
/// Agreement required between successive doublings of a wrapped integral.
pub const WRAP_TOL: f64 = 1e-8;
const WRAP_GRID_CAP: usize = 1 << 22;

/// The integrals bounding `int d(p, S^n p)^2`.
#[derive(Clone, Debug, Serialize)]
pub struct RigidityReport {
    pub n: u64,
    /// `||n alpha||`.
    pub dist_n_alpha: f64,
    pub i_phi: f64,
    pub i_xi: f64,
    pub i_omega: f64,
    pub i_h: f64,
    pub sigma_n0: [f64; 2],
    /// `int |Sigma_n(t)|^2`.
    pub i_sigma: f64,
    /// `||n alpha||^2 + I_Phi + I_xi + I_Omega + I_H`.
    pub rhs: f64,
    pub grid: usize,
    pub wrapped_grid: usize,
    pub wrapped_converged: bool,
}

fn mean_over_grid(m: usize, f: impl Fn(f64) -> f64 + Sync) -> f64 {
    let vals: Vec<f64> = (0..m).into_par_iter().map(|i| f(i as f64 / m as f64)).collect();
    let mut acc = Compensated::<f64>::default();
    for v in vals {
        acc.add(Complex::new(v, 0.0));
    }
    acc.value().re / m as f64
}

/// Mean of `f` at the odd points of the `2m` grid.
fn mean_odd(m: usize, f: impl Fn(f64) -> f64 + Sync) -> f64 {
    mean_over_grid(m, |s| f(s + 0.5 / m as f64))
}

/// Trapezoid average of a wrapped integrand, doubling the grid until two
/// successive values agree to [`WRAP_TOL`].
fn wrapped_mean(m: usize, f: impl Fn(f64) -> f64 + Sync) -> (f64, usize, bool) {
    let mut m = m;
    let mut cur = mean_over_grid(m, &f);
    while 2 * m <= WRAP_GRID_CAP {
        let next = 0.5 * (cur + mean_odd(m, &f));
        m *= 2;
        let done = (next - cur).abs() <= WRAP_TOL;
        cur = next;
        if done {
            return (cur, m, true);
        }
    }
    (cur, m, false)
}

/// `sum |f^(m)|^2`.
pub fn parseval(f: &PeriodicFn<f64>) -> f64 {
    f.terms().map(|(_, c)| c.norm_sqr()).sum()
}

/// Evaluates the integrals at `n` on an equispaced grid of `grid_m` points.
/// Trig-polynomial integrands are exact once `grid_m` exceeds twice the
/// largest frequency; the wrapped ones are refined by doubling.
pub fn rigidity_integrals(sys: &SkewSystem<f64>, n: u64, grid_m: usize) -> Result<RigidityReport> {
    let bs = sys.birkhoff(n)?;
    integrals_of(sys, &bs, grid_m)
}

fn integrals_of(sys: &SkewSystem<f64>, bs: &BirkhoffSums<f64>, grid_m: usize) -> Result<RigidityReport> {
    let width = [&bs.phi_n, &bs.xi_n, &bs.omega_n, &bs.sigma_n].iter().map(|f| f.width()).max().unwrap_or(0);
    let needed = 2 * width as usize + 1;
    if grid_m < needed {
        return Err(Error::Grid { grid: grid_m, needed });
    }
    let i_phi = mean_over_grid(grid_m, |t| bs.phi(t).powi(2));
    let i_xi = mean_over_grid(grid_m, |t| bs.xi(t).powi(2));
    let i_sigma = mean_over_grid(grid_m, |t| bs.sigma_n.eval(t).norm_sqr());
    let (i_omega, g1, c1) = wrapped_mean(grid_m, |t| dist_int(&bs.omega(t)).powi(2));
    let (i_h, g2, c2) = wrapped_mean(grid_m, |t| dist_int(&bs.h(t)).powi(2));
    let dist_n_alpha = sys.alpha().signed_phase(bs.n as i128).abs();
    Ok(RigidityReport {
        n: bs.n,
        dist_n_alpha,
        i_phi,
        i_xi,
        i_omega,
        i_h,
        sigma_n0: [bs.sigma_n0.re, bs.sigma_n0.im],
        i_sigma,
        rhs: dist_n_alpha.powi(2) + i_phi + i_xi + i_omega + i_h,
        grid: grid_m,
        wrapped_grid: g1.max(g2),
        wrapped_converged: c1 && c2,
    })
}

fn diagonal_sum(sys: &SkewSystem<f64>, m: usize, sign: i128) -> Result<Complex<f64>> {
    let rn = sys.alpha();
    if m > rn.depth() {
        return Err(Error::Range(format!("m = {m} beyond depth {}", rn.depth())));
    }
    let qm = rn.q(m);
    let mut acc = Compensated::<f64>::default();
    for (u, a) in sys.phi().terms() {
        if u == 0 || num_bigint::BigInt::from(u.unsigned_abs()) >= *qm {
            continue;
        }
        let b = sys.eta().coeff(-u);
        if b.norm() == 0.0 {
            continue;
        }
        let d = one_minus_e_alpha::<f64>(rn, sign * u as i128);
        if d.norm() < 1e-300 {
            return Err(Error::SmallDivisor { freq: u, size: d.norm() });
        }
        acc.add(a * b / d);
    }
    Ok(acc.value())
}

/// `lambda(q_m) = sum_{0<|u|<q_m} phi^(u) eta^(-u) / (1 - e(-u alpha))`.
pub fn lambda_qm(sys: &SkewSystem<f64>, m: usize) -> Result<Complex<f64>> {
    diagonal_sum(sys, m, -1)
}

/// `sum_{0<|u|<q_m} phi^(u) eta^(-u) / (1 - e(u alpha))`, the per-step drift
/// of `Sigma_{n,0}`.
pub fn sigma_lt2(sys: &SkewSystem<f64>, m: usize) -> Result<Complex<f64>> {
    diagonal_sum(sys, m, 1)
}

/// `H_n = Sigma_{n,0} + Sigma_n(t)`.
pub fn sigma_decomposition(sys: &SkewSystem<f64>, n: u64) -> Result<(Complex<f64>, PeriodicFn<f64>)> {
    let bs = sys.birkhoff(n)?;
    Ok((bs.sigma_n0, bs.sigma_n))
}

/// One row of the decay experiment at `n = s_m q_m`.
#[derive(Clone, Debug, Serialize)]
pub struct DecayRow {
    pub m: usize,
    pub q_m: u64,
    pub v_m: u64,
    pub v_satisfied: bool,
    pub s_m: u64,
    pub n: u64,
    pub i_phi: f64,
    pub i_xi: f64,
    pub i_omega: f64,
    pub i_h: f64,
    pub rhs: f64,
    /// `r_m^{-eps/120}`.
    pub budget: f64,
    pub lambda: f64,
    /// `|Sigma_{n,0} + n Sigma^{<,2}_{q_m,0}|`.
    pub drift_residual: f64,
    /// `q_m^{-theta}`.
    pub drift_scale: f64,
    pub wrapped_converged: bool,
}

/// Runs over `Q''` in the window: picks `v_m` by the Dirichlet search on
/// `(q_m alpha, q_m psi^(0), q_m lambda(q_m))`, then evaluates the rigidity
/// integrals at `n = j v_m q_m` for `1 <= j < r_m^{theta/10}`.
pub fn decay_experiment(sys: &SkewSystem<f64>, sets: &IndexSets, grid_m: usize) -> Result<Vec<DecayRow>> {
    if sets.is_rational() {
        return Err(Error::Precondition("the decay experiment needs irrational alpha (Q'' is undefined)".into()));
    }
    let rn = sys.alpha();
    let theta = sets.theta;
    let eps = 8.0 * theta;
    let psi0 = sys.psi().mean().re;
    let mut rows = Vec::new();
    for &m in &sets.qdoubleprime {
        let Some(q_m) = rn.q_u64(m) else { continue };
        let lambda = lambda_qm(sys, m)?;
        let qf = q_m as f64;
        let targets = [Target::QmAlpha, Target::Value(qf * psi0), Target::Value(qf * lambda.re)];
        let choice = dirichlet_search(rn, m, &targets, theta)?;
        let r_m = (choice.v * q_m) as f64;
        let drift = sigma_lt2(sys, m)?;
        let mut j = 1u64;
        while (j as f64) < r_m.powf(theta / 10.0) {
            let s_m = j * choice.v;
            let n = s_m * q_m;
            let bs = sys.birkhoff(n)?;
            let rep = integrals_of(sys, &bs, grid_m)?;
            rows.push(DecayRow {
                m,
                q_m,
                v_m: choice.v,
                v_satisfied: choice.satisfied,
                s_m,
                n,
                i_phi: rep.i_phi,
                i_xi: rep.i_xi,
                i_omega: rep.i_omega,
                i_h: rep.i_h,
                rhs: rep.rhs,
                budget: r_m.powf(-eps / 120.0),
                lambda: lambda.re,
                drift_residual: (bs.sigma_n0 + drift * n as f64).norm(),
                drift_scale: qf.powf(-theta),
                wrapped_converged: rep.wrapped_converged,
            });
            j += 1;
        }
    }
    Ok(rows)
}
