//! # qwot
//!
//! Quantum optimal transport on finite-dimensional systems.
//!
//! Transport between two density operators is carried by a state on `H ⊗ H*`
//! whose partial traces reproduce the two marginals — the quantum analogue of
//! a transport plan. Costs are positive operators built from a finite
//! collection of observables through spectral calculus, mimicking the
//! classical `|x − y|^p` ground cost. Minimizing the pairing of a plan with a
//! cost operator over all couplings is a small dense semidefinite program;
//! its optimal values define `p`-Wasserstein distances and divergences.
//!
//! What lives where:
//!
//! | module | contents |
//! |--------|----------|
//! | [`linalg`] | complex matrices, Jacobi eigensolver, functional calculus, tensor tools |
//! | [`quantum`] | states, observables, couplings, channels, Bloch maps, samplers |
//! | [`cost`] | cost operators and the tensor-power objective |
//! | [`solver`] | the transport SDP (ADMM with dual certificates) and a classical LP oracle |
//! | [`wasserstein`] | distances, divergences, pure-state closed forms |
//! | [`cones`] | constructive decompositions between cost-operator cones |
//! | [`scan`] | randomized triangle-inequality scans |
//! | [`io`], [`cli`] | JSON problem files, deterministic reports, CLI entry points |
//!
//! ## Quick start
//!
//! ```rust
//! use qwot::quantum::{random_state, ObservableCollection};
//! use qwot::wasserstein::{distance, SolverConfig};
//!
//! let rho = random_state(2, 2, 1).unwrap();
//! let omega = random_state(2, 2, 2).unwrap();
//! let paulis = ObservableCollection::pauli_triple();
//! let d = distance(&rho, &omega, &paulis, 2.0, &SolverConfig::default()).unwrap();
//! assert!(d > 0.0);
//! ```
//!
//! The `examples/` directory has one runnable program per capability; the
//! `qwot` binary exposes the same operations as subcommands.

pub mod cli;
pub mod cones;
pub mod cost;
pub mod error;
pub mod io;
pub mod linalg;
pub mod quantum;
pub mod scan;
pub mod solver;
pub mod wasserstein;

pub use error::{Error, Result};
