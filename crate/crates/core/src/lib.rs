//! Exact solver for the eternal vertex coloring game and its variants.
//!
//! Each game (graph, color count, variant) is a finite two-player safety
//! game: Alice wants to keep a proper coloring forever, Bob wants to reach a
//! position where a chosen vertex cannot be recolored. [`solver::solve`]
//! explores the symmetry-reduced arena and computes Bob's attractor;
//! [`solver::chi_sweep`] turns per-`k` winners into the game chromatic
//! value.

pub mod automorphism;
pub mod certify;
pub mod dump;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod rules;
pub mod solver;
pub mod state;
pub mod sweeps;
pub mod tables;

pub use error::{Error, Result};
pub use graph::{parse_graph_spec, Graph};
pub use rules::{Game, GameState, Move, Player, TerminalStatus, VariantConfig};
pub use solver::{chi_sweep, solve, SolveReport, Solved, SolverOptions, StateStatus};
pub use state::{CanonicalizationPolicy, StateKey};
