//! Numerical toolkit for integro-differential operators acting on functions
//! that are doubly radial and odd with respect to the Simons cone.
//!
//! The crate is organised bottom-up:
//!
//! * [`kernels`] radial kernels, the square-root convexity test and the
//!   scalar oracles behind the kernel inequality;
//! * [`doubly_radial`] cone geometry, the reduced kernel `J`, the averaged
//!   kernel and the zero-order coefficient;
//! * [`energy`] the discrete odd energy on an `(s,t)` grid;
//! * [`operator`] the assembled odd operator and its maximum-principle checks;
//! * [`solver`] projected descent for saddle-shaped minimizers;
//! * [`experiments`] energy scaling, competitors and volume measurements.

pub mod doubly_radial;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod kernels;
pub mod operator;
pub mod quadrature;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
