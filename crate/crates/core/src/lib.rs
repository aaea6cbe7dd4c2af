//! Scale-dependent coarse geometry of finite metric spaces.
//!
//! Asymptotic notions (coarse families, slowly oscillating functions,
//! coarsely proper maps) are reported as [`profile::ScaleProfile`]s: tables
//! `t ↦ value` evaluated outside the ball `B(x₀, t)`. Constructions return
//! certificates whose inequalities are re-checked against their output.

// `!(x > 0.0)` is used on purpose so that NaN parameters are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cover;
pub mod dimension;
pub mod error;
pub mod ext;
pub mod family;
pub mod generators;
pub mod io;
pub mod maps;
pub mod metric;
pub mod pou;
pub mod profile;
pub mod refine;
pub mod subset;

pub use error::{Error, Result};
pub use family::IndexedFamily;
pub use metric::FiniteMetricSpace;
pub use profile::ScaleProfile;
pub use subset::Subset;
