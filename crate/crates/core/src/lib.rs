#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod degeneration;
pub mod error;
pub mod exact_spectra;
pub mod inequality_audit;
pub mod quadrature;
pub mod rayleigh_certifier;
pub mod warped_dirac;

pub use error::{Error, Result};
