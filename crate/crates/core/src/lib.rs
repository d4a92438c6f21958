//! Algebraic Mellin transform between differential operators on the complex
//! torus and difference operators, with truncated Koszul computations for
//! asymptotic expansions and quadrature-based numerical checks.

pub mod asymptotics;
pub mod error;
pub mod mellin;
pub mod numerics;
pub mod opparse;
pub mod ore;

pub use error::{Error, Result};
