//! Replay harness and baseline autobidders for budget-paced auctions.

pub mod bidders;
pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod metrics;
pub mod sim;
pub mod synth;
pub mod traffic;
pub mod tuning;

pub use error::{Error, Result};
