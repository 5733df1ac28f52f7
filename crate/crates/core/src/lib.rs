//! Multiplier-bootstrap inference for high-dimensional exchangeable
//! arrays.
//!
//! Two engines cover the two exchangeability notions: [`separable`] for
//! multiway-clustered (separately exchangeable) arrays and [`joint`] for
//! dyadic/polyadic (jointly exchangeable) arrays. On top of them sit
//! [`density`] (dyadic kernel density estimates with uniform confidence
//! bands), [`lasso`] (l1-penalized regression with a bootstrap-calibrated
//! penalty), and [`simgen`] (the Monte Carlo coverage harness with its
//! quadrature truth oracle in [`truth`]).
//!
//! All bootstrap multipliers come from counter-based streams ([`rng`]), so
//! every engine is bit-deterministic in its seed regardless of thread
//! count.

pub mod array;
pub mod band;
pub mod density;
pub mod error;
pub mod hoeffding;
pub mod io;
pub mod joint;
pub mod lasso;
pub mod report;
pub mod rng;
pub mod separable;
pub mod silverman;
pub mod simgen;
pub mod stats;
pub mod svg;
pub mod truth;

pub use array::{DyadicArray, MultiwayArray};
pub use band::{BandResult, Mode};
pub use error::{Error, Result};
