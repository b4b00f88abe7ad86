//! Command-line front end for the encoded gate simulations.

pub mod commands;
pub mod config;
pub mod report;
pub mod suite;
