//! Non-intrusive spectral projection over RKDG solves of random 1D
//! conservation laws, with a computable a posteriori error bound whose
//! residual splits into deterministic, stochastic quadrature and stochastic
//! cut-off parts.

pub mod error;
pub mod estimator;
pub mod exec;
pub mod gpc;
pub mod mesh_dg;
pub mod models;
pub mod pipeline;
pub mod reconstruct;
pub mod rkdg;
pub mod spacetime;
