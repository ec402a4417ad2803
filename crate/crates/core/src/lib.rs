//! Path-complete Lyapunov analysis for discrete-time switched linear systems
//! `x(t+1) = A_σ(t) x(t)`.
//!
//! - [`graphs`]: labeled graphs, observer construction, path-completeness.
//! - [`linalg`]: dense matrices, quadratic forms, symmetric eigenvalues.
//! - [`sdp`]: LMI feasibility with independently verified certificates.
//! - [`lyapunov`]: PCLF search, γ bisection, min-max common Lyapunov functions.
//! - [`comparison`]: exact-rational LP certificates ordering two graphs.
//! - [`corpus`]: the example graphs and systems as files.
//! - [`cli`]: the `pclf` command-line front end.

pub mod cli;
pub mod comparison;
pub mod corpus;
pub mod error;
pub mod graphs;
pub mod linalg;
pub mod lyapunov;
pub mod parallel;
pub mod sdp;

pub use error::{Error, Result};
