//! Noisy deterministic reasoning (NDR) machines.
//!
//! A stochastic model of a community of reasoners: a machine that keeps a
//! questions tape and a claims tape, repeatedly poses questions about formal
//! systems, answers them noisily, and commits the answers. This crate
//! simulates such machines, estimates their limiting claims and answer
//! distributions, machine-checks Bayesian results about those distributions,
//! and builds measures over the resulting "worlds".

pub mod formal_system;
pub mod ptm;
pub mod ndr_machine;
pub mod rng;
pub mod estimation;
pub mod bayes;
pub mod mmh;
