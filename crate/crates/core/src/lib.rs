pub mod cli;
pub mod data;
pub mod extraction;
pub mod logic;
pub mod metrics;
pub mod nn;
