//! Second-order invariants of surfaces in E^4, the semi-parallelity tensor
//! `R.h` by two independent routes, and classification of meridian surfaces.

pub mod classifier;
pub mod cli;
pub mod config;
pub mod curves;
pub mod error;
pub mod families;
pub mod invariants;
pub mod numkit;
pub mod report;
pub mod semiparallel;
pub mod surface;
pub mod verify;

pub use error::{GeomError, Result};
pub use numkit::{AdaptedFrame, Jet2, Mat2, TolerancePolicy, Vec3, Vec4};
