// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod carma;
pub mod error;
pub mod estimation;
pub mod poly;
pub mod quadrature;
pub mod simulation;
pub mod spectral_empirical;
pub mod spectral_theory;
pub mod study;
pub mod wold;

pub use carma::{CarmaModel, RootPolicy};
pub use error::{Error, Result};
