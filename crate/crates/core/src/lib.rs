// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charclass;
pub mod error;
pub mod exterior;
pub mod fourier;
pub mod heat;
pub mod jlo;
pub mod models;
pub mod report;

pub use error::{Error, Result};
pub use exterior::{Blade, Generators, MultiVector};
pub use models::SpectralModel;
pub use report::{CheckRecord, Table, VerificationReport};
