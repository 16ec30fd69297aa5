//! Dyadic Haar analysis on a finite grid of `[0, 1)`: weights, paraproducts,
//! Haar shifts, weighted resolutions of the shift, and the estimates that go
//! with them.

pub mod error;
pub mod estimates;
pub mod grid;
pub mod haar;
pub mod norm;
pub mod operators;
pub mod weights;

pub use error::{Error, Result};
pub use grid::{DyadicIndex, Grid};
pub use haar::{HaarSymbol, LeafFunction, MultiscaleAverages};
pub use operators::{DyadicOperator, SharedOperator};
pub use weights::{Weight, WeightSpec};
