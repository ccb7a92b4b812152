//! Discretized sum-product and projection experiments: (δ,s)-sets, tube
//! energies and fans, white-region sum counting, and an exact lattice
//! analogue with Szemerédi–Trotter incidences.
//!
//! The continuous modules are generic over [`scalar::Real`] (`f32`, `f64`);
//! the aliases below fix `f64`. The lattice module uses exact integers.

pub mod discrete;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod planted;
pub mod projections;
pub mod scalar;
pub mod sets;
pub mod solymosi;
pub mod tubes;

pub use error::{Error, Result};
pub use geometry::Scale;

pub type Point2 = geometry::Point2<f64>;
pub type PointSet1D = sets::PointSet1D<f64>;
pub type PointSet2D = sets::PointSet2D<f64>;
pub type Direction = projections::Direction<f64>;
pub type DirectionSet = projections::DirectionSet<f64>;
pub type Tube = tubes::Tube<f64>;
pub type Fan = tubes::Fan<f64>;
pub type FanView = solymosi::FanView<f64>;
pub type WhiteRegion = solymosi::WhiteRegion<f64>;

pub type Point2F32 = geometry::Point2<f32>;
pub type PointSet1DF32 = sets::PointSet1D<f32>;
pub type PointSet2DF32 = sets::PointSet2D<f32>;
