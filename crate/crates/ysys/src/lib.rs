//! Polygon realizations of the reduced sine-Gordon (RSG) and sine-Gordon (SG)
//! Y-systems.
//!
//! The crate builds the labeled triangulation attached to a continued fraction
//! `[n_F, ..., n_1]`, runs the reflection mutation schedule and checks the
//! Y-system, T-system, periodicity, cross-ratio and dilogarithm identities on
//! the resulting trajectories.

pub mod contfrac;
pub mod error;
pub mod geometry;
pub mod render;
pub mod report;
pub mod schedule;
pub mod seeds;
pub mod solutions;
pub mod tsystems;
pub mod verify;
pub mod ysystems;

pub use contfrac::{build_table, ContinuedFractionTable, InputSequence, SystemKind};
pub use error::{Error, Result};
pub use geometry::{Arc, ArcLabel, LabeledTriangulation, MIndex, Tag};
pub use report::{Check, Report};
