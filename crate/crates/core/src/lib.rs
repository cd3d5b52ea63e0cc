//! Utility distributions, subjective conditional utility, multiattribute
//! independence checks, factorization of utility tables, and utility
//! networks with exact inference.

pub mod binet;
pub mod cli;
pub mod document;
pub mod error;
pub mod exec;
pub mod factor_core;
pub mod factorize;
pub mod maut;
pub mod unet;

pub use error::{Error, Result};
pub use exec::Execution;
