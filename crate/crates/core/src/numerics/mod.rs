//! Quadrature-based checks on the analytic side: Haar moments on `C*`, the
//! Cauchy-kernel convolution and its expansions, ray Mellin transforms and
//! Cauchy parameter expansions.

pub mod quadrature;
pub mod expansion;
pub mod plane;
pub mod ray;
pub mod report;
