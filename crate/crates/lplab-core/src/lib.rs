#![cfg_attr(not(test), no_std)]
//! Littlewood–Paley analysis on periodic grids, the Duhamel bilinear operator of the
//! mild heat-type equation u = e^{tΔ}u₀ + B(u,u), and the fixed-point machinery built on it.

extern crate alloc;

pub mod counterexample;
pub mod cutoff;
pub mod duhamel;
pub mod error;
pub mod eta;
pub mod fft;
pub mod field;
pub mod geometry;
pub mod grid;
pub mod microlocal;
pub mod norms;
pub mod paraproduct;
pub mod product;
pub mod quad;
pub mod rng;
pub mod solver;
pub mod symbol;

pub use error::{LabError, Result};
pub use field::SpectralField;
pub use grid::Grid;
