//! Sensor placement for linear inverse problems.
//!
//! Given an `N × K` model `Ψ` and a budget of `L` sensors, [`placement::framesense`]
//! picks `L` rows by greedily eliminating the rows that contribute most to
//! the frame potential. The crate also ships the greedy baselines it is
//! usually compared against, exhaustive oracles, the approximation-factor
//! and MSE bounds in [`bounds`], seeded matrix generators and an experiment
//! harness.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod combin;
pub mod csvio;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod matgen;
pub mod placement;

pub use error::{Error, Result};
pub use linalg::{Mse, NoiseModel, SensingMatrix};
pub use placement::{Algorithm, PlacementOptions, Selection};
