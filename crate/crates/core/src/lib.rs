//! Solver core for RIS-aided multi-user mobile edge computing.
//!
//! The crate is `no_std` (it needs `alloc`) and contains everything that is
//! pure computation:
//!
//! * [`numerics`]: dense complex linear algebra (Hermitian eigensolver,
//!   generalized eigenvectors, PSD/unit-diagonal projection).
//! * [`channel`]: geometry-driven Rician channel generation.
//! * [`objective`]: SINR, offloading/local rates and the total completed
//!   task-input bits (TCTB) objective.
//! * [`bcd`]: the three-step block coordinate descent solver (DC programming
//!   for the RIS phases, generalized-eigenvector receive beamforming, DC
//!   programming for the energy split).
//! * [`baselines`]: no-RIS, zero-forcing and equal-energy comparison schemes.
//! * [`surrogate`]: from-scratch feedforward networks (dense, batch norm,
//!   ELU, dropout, Adam) and the CSI / location-only inference pipelines.
//!
//! The `std` feature only enables runtime CPU feature detection in the GEMM
//! backend; IO, CLI and file formats live in the companion `ris-mec` crate.

#![no_std]

extern crate alloc;


pub mod baselines;
pub mod bcd;
pub mod channel;
pub mod config;
mod error;
pub mod numerics;
pub mod objective;
pub mod rng;
pub mod surrogate;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub use channel::{gen_channels, ChannelSet};
pub use config::{SystemConfig, Tolerances};
pub use numerics::{ComplexMatrix, EigenPair};
pub use objective::{tctb, Solution};
