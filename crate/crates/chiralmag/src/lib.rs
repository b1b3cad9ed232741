//! Bifurcation analysis, spectral stability and gradient-flow simulation for
//! the planar chiral-magnet Ginzburg-Landau model on periodic lattices.
//!
//! The crate is organized along the pipeline:
//!
//! - [`lattice`]: lattice shapes, dual lattices, critical wave vectors;
//! - [`field`]: collocation-grid fields, spectral transforms, the energy and
//!   the Euler-Lagrange residual;
//! - [`linear`]: bifurcation points, non-resonance checks and the explicit
//!   kernel modes of the three symmetry classes;
//! - [`branch`]: the bifurcation branch, its curvature coefficient and
//!   residual diagnostics;
//! - [`stability`]: eigenvalue scans, stability verdicts and the admissible
//!   parameter region;
//! - [`flow`]: the semi-implicit gradient-flow solver with pattern
//!   classification;
//! - [`io`]: field dumps, images, energy traces and checkpoints;
//! - [`cli`]: the command-line frontend.
//!
//! See the `examples/` directory for one runnable example per capability.

pub mod branch;
pub mod cli;
pub mod error;
pub mod field;
mod fft;
pub mod flow;
pub mod io;
pub mod lattice;
pub mod linear;
pub mod stability;

pub use error::{Error, Result};
pub use field::{ModelParams, PhysicalParams, RealField, SpectralField};
pub use lattice::{LatticeClass, LatticeSpec, LatticeTag, WaveVector};
pub use linear::{BifurcationPoint, KernelMode, RootSign, Symmetry};
