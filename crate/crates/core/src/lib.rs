//! Solvers for level-set horizontal mean curvature flow in the first Heisenberg group.
//!
//! The [`game`] backend iterates the min-max dynamic programming principle of a
//! deterministic two-player game on an axisymmetric `(r, z)` grid, and the [`pde`]
//! backend integrates a regularized form of the level-set equation with explicit
//! finite differences. [`exact`] collects the closed-form references both are
//! checked against and [`flow`] extracts and compares zero level sets.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod axisym;
pub mod cli;
pub mod error;
pub mod exact;
pub mod fdcheck;
pub mod flow;
pub mod game;
pub mod hgroup;
pub mod pde;

pub use error::{Error, Result};
