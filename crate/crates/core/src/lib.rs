//! Collocated finite volume schemes for the two-dimensional stationary Stokes
//! problem on structured grids.
//!
//! Velocity and pressure live at cell centres. The bare ("natural") scheme is
//! not uniformly stable for the pressure; stability is recovered either by
//! adding pressure-jump terms to the mass balance (all interior edges, or only
//! the edges inside 2×2 clusters of cells) or by restricting the pressure to
//! functions that are constant on each cluster.

pub mod assembly;
pub mod cli;
pub mod error;
pub mod fields;
pub mod grid;
pub mod io;
pub mod operators;
pub mod solver;
pub mod sparse;
pub mod verify;

pub use error::{Error, Result};
pub use fields::{ScalarField, VectorField};
pub use grid::{ClusterPartition, Grid, GridSpec};
