//! Phase-space group structure, kinetic distance, cylinders and the velocity change of variables.

mod cov;
mod cylinder;
mod distance;
mod point;

pub use cov::{dgs, CovMap};
pub use cylinder::Cylinder;
pub use distance::{kdistance, knorm};
pub use point::{Point, PointRecord};
