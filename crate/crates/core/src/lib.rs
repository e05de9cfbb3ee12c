// `!(a < b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular;
pub mod conformance;
pub mod eigensolver_oracle;
pub mod error;
pub mod heun_family;
pub mod lightcone_model;
pub mod ode_core;

pub use error::{Error, Result};
