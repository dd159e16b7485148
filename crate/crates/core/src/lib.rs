//! Moment dynamics, closed-form energy curves and optimization for a driven
//! charger–battery pair of bosonic modes coupled coherently and through a
//! shared dissipative reservoir.

pub mod analysis;
pub mod closedform;
pub mod error;
pub mod export;
pub mod figures;
pub mod golden;
pub mod moments;
pub mod params;
pub mod verify;

pub use error::{Error, Result};
pub use params::{DriveParams, ModeParams, SystemConfig};
