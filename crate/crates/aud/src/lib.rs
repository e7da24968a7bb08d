//! Age upon Decisions (AuD) for FCFS single-server update-and-decide
//! queues: closed-form averages and miss probabilities under Poisson or
//! periodic decision epochs, plus an independent discrete-event simulator.

pub mod analytic;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod simulator;

pub use analytic::{AnalyticReport, SystemSpec};
pub use error::AudError;
pub use simulator::{SimConfig, SimEstimate};
