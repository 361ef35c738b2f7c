//! Exact-derivative curvature analysis of analytic surface patches in the
//! three-dimensional space forms: principal curvatures from Taylor jets, the
//! Lie-invariant energy and its Euler–Lagrange residuals, Weingarten fits,
//! parallel surfaces, rotational fixtures and numerical first variations.
//!
//! The crate is `no_std` with `alloc`.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod grid;
pub mod jets;
pub mod lie_energy;
pub mod ode;
pub mod quadrature;
pub mod rotational;
pub mod spaceform;
pub mod spline;
pub mod surface;
pub mod variation;
pub mod weingarten;

pub use error::Error;
pub use grid::{Domain, Grid};
pub use jets::{Jet2, JetError, Seed};
pub use spaceform::{AmbientVector, JetVector, SpaceForm};
pub use surface::{CurvatureData, FundamentalForms, ImmersionPatch};
