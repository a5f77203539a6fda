//! Command-line front end and play service for the eternal coloring solver.

pub mod report;
pub mod service;
