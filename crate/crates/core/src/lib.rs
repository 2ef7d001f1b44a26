//! Per-mode numerics for conformally covariant boundary operators, scattering
//! on hyperbolic space, higher-order Dirichlet forms and sharp trace
//! inequalities on the ball and halfspace models.

pub mod constants;
pub mod energy;
pub mod error;
pub mod expansion;
pub mod geometry;
pub mod numerics;
pub mod sobolev;
pub mod solver;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
