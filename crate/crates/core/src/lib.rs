//! Dense femtocell neighbor cell list simulator.
//!
//! Builds neighbor cell lists for femto-to-femto handover from RSSI,
//! serving-channel reuse and SON-exchanged FAP locations, and compares them
//! with RSSI-only lists on list size and target-miss probability.
//!
//! The geometry, topology, list and simulation code is generic over
//! [`Scalar`] (`f32` or `f64`). The aliases below fix the scalar to `f64`,
//! which is what the scenario parser and CLI use; [`single`] has the `f32`
//! counterparts.

pub mod cli;
pub mod ncl;
pub mod num;
pub mod output;
pub mod radio_env;
pub mod scenario;
pub mod sim;
pub mod topology;

pub use num::Scalar;

pub type Point = radio_env::Point2D<f64>;
pub type Wall = radio_env::WallSegment<f64>;
pub type Plan = radio_env::FloorPlan<f64>;
pub type Propagation = radio_env::PropagationParams<f64>;
pub type Fap = topology::Fap<f64>;
pub type Deployment = topology::Deployment<f64>;
pub type Thresholds = ncl::ThresholdConfig<f64>;
pub type NeighborCellList = ncl::NeighborCellList<f64>;
pub type SimConfig = sim::SimConfig<f64>;

/// Single-precision aliases.
pub mod single {
    pub type Point = crate::radio_env::Point2D<f32>;
    pub type Wall = crate::radio_env::WallSegment<f32>;
    pub type Plan = crate::radio_env::FloorPlan<f32>;
    pub type Propagation = crate::radio_env::PropagationParams<f32>;
    pub type Fap = crate::topology::Fap<f32>;
    pub type Deployment = crate::topology::Deployment<f32>;
    pub type Thresholds = crate::ncl::ThresholdConfig<f32>;
    pub type NeighborCellList = crate::ncl::NeighborCellList<f32>;
    pub type SimConfig = crate::sim::SimConfig<f32>;
}
