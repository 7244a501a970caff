//! Numerical laboratory for the graph-form Muskat interface equation on a
//! periodic grid: spectral operators, three equivalent right-hand sides,
//! integrating-factor time stepping, norms, and run diagnostics.

pub mod alpha;
pub mod config;
pub mod diagnostics;
pub mod error;
mod fft;
pub mod format;
pub mod grid;
pub mod init;
pub mod norms;
pub mod operators;
pub mod output;
pub mod quadrature;
pub mod rhs;
pub mod special;
pub mod stepper;

pub use error::{MuskatError, Result};
pub use grid::{sample_function, to_physical, to_spectral, Field, Grid, SpectralCoeffs};
pub use rhs::{Formulation, PhysicalParams, RhsOptions};
pub use stepper::{DtRule, SolverConfig, Trajectory};
