//! Continuous-time iterates of one-dimensional maps.
//!
//! Given a map `f1` with a fixed point at the origin and multiplier
//! `s = f1'(0)`, Schröder's equation `s·Ψ(x) = Ψ(f1(x))` is solved in
//! truncated power series. The flow `f_t = Ψ⁻¹(sᵗ·Ψ)` then interpolates the
//! integer iterates for every real `t`, and its `t`-derivative at `t = 0`
//! gives the velocity profile `v = ln s · Ψ/Ψ'`.
//!
//! Coefficients live in one of three domains (see [`coefficients`]): exact
//! rationals, `f64`, or Laurent jets in `ε = ln s` which carry the parabolic
//! limit `s → 1`.

pub mod catalog;
pub mod coefficients;
pub mod engine;
mod error;
pub mod io;
pub mod series;

pub use coefficients::{Coeff, Domain, EpsJet, Rational};
pub use error::{Error, Result};
pub use series::TruncatedSeries;
