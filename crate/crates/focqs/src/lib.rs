//! Simulator-backed feedback control for quantum optimization.
//!
//! This crate builds layered control circuits for random Ising spin-glass
//! and maximum-independent-set instances, drives them with measurement
//! feedback (FALQON and the FOCQS family of retroactive-update
//! controllers), and ships the experiment harness used to compare them:
//! per-layer energy traces, approximation ratios with standard errors,
//! and cumulative-time accounting.

pub mod controllers;
pub mod dense;
pub mod error;
pub mod experiment;
pub mod pauli;
pub mod problems;
pub mod statevector;

pub use error::{Error, Result};
