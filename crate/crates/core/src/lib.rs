//! Nonlinear variational means of complex fields on circles and disks,
//! radius-sweep verdicts for the associated Cauchy–Riemann type systems,
//! and a grid solver for the mean value fixed-point equation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod contact;
pub mod density;
pub mod dpp;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod means;
pub mod pdesystem;

pub use density::{ComplexHessian, Density, ValidationReport};
pub use error::{Error, Result};
pub use fields::FieldSpec;
pub use geometry::{CircleQuadrature, ComplexField, DiskQuadrature, Jet};
