//! Simulation, detection, and estimation toolkit for weighted stochastic
//! ordered graphs on the integers: heaviest-path computation, regenerative
//! structure detection, Monte Carlo estimation of the growth constant and its
//! CLT variance, sparse-limit cascade simulation, and a numerical solver for
//! the cascade heaviest-path distribution.

#![forbid(unsafe_code)]

pub mod cascade;
pub mod dist;
pub mod error;
pub mod estimators;
pub mod fixedpoint;
pub mod graph;
pub mod heaviest;
pub mod par;
pub mod regen;
pub mod stats;
pub mod stream;

pub use cascade::{CascadeTree, Ccm0Sample, RootedWgg};
pub use dist::{check_assumptions, AssumptionReport, AssumptionSet, DistributionSpec, Moments};
pub use error::{Error, Result};
pub use fixedpoint::FixedPointGrid;
pub use graph::{GenerationMode, GraphWindow};
pub use estimators::{EstimateParams, EstimateReport, Method, Target};
pub use heaviest::{PathValue, Variant};
pub use regen::{RegenerationReport, WindowParams};
pub use stream::{StreamKey, StreamRng};
