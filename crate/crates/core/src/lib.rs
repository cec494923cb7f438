//! Economic complexity from first principles: capability-based production
//! models, the RCA → specialisation → projection → ECI pipeline, closed-form
//! reference results, a price equilibrium, and relatedness networks.

pub mod eigen;
pub mod equilibrium;
pub mod experiments;
pub mod error;
pub mod io;
pub mod model;
pub mod network;
pub mod oracle;
pub mod pipeline;
pub mod rng;
pub mod stats;
pub mod svg;

pub use error::{Error, Result};
