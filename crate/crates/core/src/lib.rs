//! Numerical laboratory for the Heisenberg skew product
//! `S(t, Gamma g) = (t + alpha, Gamma g M(t))` on `T x Gamma\G`.

pub mod complexity;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod fourier;
pub mod heisenberg;
pub mod numtheory;
pub mod oracle;
pub mod periodic;
pub mod rigidity;
pub mod scalar;

pub use error::{Error, Result};

pub type Elt = heisenberg::HeisElt<f64>;
pub type ExactElt = heisenberg::HeisElt<num_rational::BigRational>;
pub type Point = heisenberg::PhasePoint<f64>;
pub type Periodic = periodic::PeriodicFn<f64>;
pub type System = dynamics::SkewSystem<f64>;
