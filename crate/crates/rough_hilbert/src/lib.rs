//! Numerical lab for truncated discrete rough Hilbert transforms along
//! the sequence `[m^α]`, `1 < α < 2`.

pub mod algebra_am;
pub mod cli_reports;
pub mod convolution_lab;
pub mod counterexample;
pub mod error;
pub mod kernel_factory;
pub mod power_lattice;

pub use error::{LabError, Result};
