pub mod blockade;
pub mod combinatorics;
pub mod dynamics;
pub mod errmodel;
pub mod error;
pub mod experiments;
pub mod gates;
pub mod integrator;
pub mod optimizer;
pub mod pulse;
pub mod register;

pub use error::{Error, Result};
