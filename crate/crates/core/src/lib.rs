//! Numerical laboratory for algorithmic information on small qubit systems.
//!
//! The crate builds budgeted universal semi-density matrices from an explicit
//! prefix-free codec, evaluates entropy, randomness-deficiency, and mutual-
//! information scores against finite test families, and packages theorem-
//! level experiments whose inequality constants are explicit and measured.
//!
//! Layering, bottom up:
//!
//! - [`mat`]: dense complex matrix algebra (tensor, partial trace, block
//!   extraction, block-trace reduction, Jacobi eigensolves).
//! - [`rational`]: exact Gaussian-rational vectors and matrices.
//! - [`codec`]: canonical self-delimiting codes; code length is the
//!   description complexity that everything downstream weighs by.
//! - [`universal`]: enumeration of elementary states within a code-length
//!   budget and the universal matrix built from them; entropy scores.
//! - [`info`]: tests, test families, deficiency and mutual-information
//!   scores, and the transports that move tests between families.
//! - [`qops`]: POVMs, structured unitaries, Haar sampling, cloning pipeline.
//! - [`experiments`]: one named experiment per conservation statement,
//!   emitting machine-readable reports.

pub mod codec;
pub mod error;
pub mod experiments;
pub mod info;
pub mod mat;
pub mod qops;
pub mod rational;
pub mod universal;

pub use error::{Error, Result};
