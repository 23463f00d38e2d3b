//! Solver and invariant-verification toolkit for coupled time-space
//! fractional reaction-diffusion systems on an interval.
//!
//! The model is a two-species system with Caputo time derivatives of order
//! `rho in (0,1]`, spectral fractional Laplacians of orders
//! `sigma_1, sigma_2 in (0,1)` under Dirichlet or Neumann conditions, and
//! reversible mass-action kinetics. The crate provides:
//!
//! - [`specfun`]: Gamma, Mittag-Leffler and Wright functions plus the
//!   mild-propagator kernel;
//! - [`operators`]: eigenbasis transforms, the spectral fractional
//!   Laplacian, fractional Sobolev seminorms, and a Riesz fractional
//!   Laplacian by fractional centered differences;
//! - [`reactions`]: mass-action rates, parameter-regime classification and
//!   the Lyapunov weight construction;
//! - [`stepper`]: an L1-IMEX scheme and a Mittag-Leffler mild-solution
//!   integrator with blow-up detection;
//! - [`verify`]: executable checks for the maximum principle, Lyapunov
//!   monotonicity, a priori sup-norm bounds, the Stroock-Varopoulos
//!   inequality, weakly singular Gronwall bounds, and the Caputo calculus
//!   identities.

pub mod operators;
pub mod reactions;
pub mod specfun;
pub mod stepper;
pub mod verify;
