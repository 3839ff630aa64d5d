//! Ground states, time-ordered propagation, and quasi-Newton control
//! optimization for a transverse-field Ising chain whose end-to-end link
//! can be driven.
//!
//! The physical setting is an open chain of N spins with X-X bonds, a
//! uniform transverse field, and one tunable coupling g(t) closing the
//! ring between the first and last site. Ramping g from 0 to 1 over a
//! process time T should carry the g = 0 ground state into the g = 1
//! ground state; the interesting regime is T far below the adiabatic
//! scale, where a bare ramp leaves the state essentially untouched and
//! only a carefully shaped pulse wins any fidelity at all.
//!
//! The crate covers that workflow end to end:
//!
//! * [`spin_model`]: dense Hamiltonians, Pauli strings, exact
//!   diagonalization, degeneracy-resolved and phase-fixed ground states.
//! * [`control`]: the ramp-plus-harmonics control family g(a, t), its
//!   closed-form antiderivative, the beta/gamma integrals, derivative
//!   constraints, and the gamma maximization that predicts the optimal
//!   second harmonic as a2 ~ 3.24 / T.
//! * [`propagation`]: midpoint piecewise-constant stepping with a
//!   phase-capped Taylor exponential, step floors, and a built-in
//!   Richardson convergence check.
//! * [`approximation`]: the sudden-regime quadratic law, the
//!   interaction-picture amplitude estimate, and the linear law
//!   R_0 - R_T = B K_gamma F2 T for the optimized chain.
//! * [`optimizer`]: BFGS over control amplitudes with cold, analytic and
//!   continuation seeding, horizon sweeps, and (a1, a2) landscape scans.
//! * [`qsl`]: the quantum-speed-limit time and the efficiency ratio
//!   T / T_QSL of an optimized evolution.
//!
//! Numerical conventions are fixed once and documented where they live:
//! basis ordering and ground-state phase in [`spin_model`], step floors in
//! [`propagation`], quadrature floors in [`control`]. All results are
//! deterministic; nothing here uses randomness or wall-clock state.
//!
//! The crate is `no_std` (with `alloc`) unless the default `std` feature
//! is enabled; the companion CLI crate carries all file and process IO.
//!
//! # Example
//!
//! ```
//! use spinstitch::spin_model::ChainConfig;
//! use spinstitch::optimizer::{optimize_infidelity, SeedStrategy};
//!
//! let chain = ChainConfig::new(6, 0.9).unwrap();
//! let result = optimize_infidelity(&chain, 0.05, SeedStrategy::Analytic).unwrap();
//! assert!(result.r_opt < result.r_linear_ramp);
//! assert!(result.constraint_ok);
//! ```

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod spin_model;
pub mod control;
pub mod propagation;
pub mod approximation;
pub mod optimizer;
pub mod qsl;

pub use error::{Error, Result};
