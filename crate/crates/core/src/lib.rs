//! Heteroclinic interface layer of a segregated two-component condensate.

// Negated comparisons reject NaN on purpose; index loops mirror the stencils.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod asymptotics;
pub mod continuation;
pub mod energy;
pub mod error;
pub mod export;
pub mod heteroclinic;
pub mod numerics;
pub mod parallel;
pub mod profiles;
pub mod spectrum;
pub mod sweep;

pub use error::{LabError, Result};
