//! Command-line front end for the accelerated, moving detector model.

pub mod check;
pub mod config;
pub mod error;
pub mod evaluate;
pub mod figure;
pub mod sweep;
