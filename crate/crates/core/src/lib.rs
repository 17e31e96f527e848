//! Parallel DEVS simulation of the MiniFab semiconductor factory, the
//! benchmark scenario suite built on it, and the analytics used to study the
//! resulting throughput time series.

pub mod analytics;
pub mod dataset;
pub mod fab;
pub mod factory;
pub mod kernel;
