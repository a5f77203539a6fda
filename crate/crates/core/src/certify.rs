//! Randomized playouts against the solved strategy.

use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::SeedableRng;

use crate::rules::{Player, TerminalStatus};
use crate::solver::{Solved, StateStatus};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlayoutSummary {
    pub playouts: usize,
    /// Longest game (in moves) seen.
    pub longest: usize,
}

/// Engine plays `engine`, the other side picks uniformly random legal moves.
/// Returns the number of moves played and the final status.
fn playout(solved: &Solved, engine: Player, max_moves: usize, rng: &mut StdRng) -> Result<(usize, TerminalStatus), String> {
    let game = solved.game();
    let mut s = game.initial_state();
    for played in 0..max_moves {
        let status = game.terminal_status(&s);
        if status.is_terminal() {
            return Ok((played, status));
        }
        let m = if s.mover == engine {
            solved.best_move(&s).map_err(|e| format!("engine has no move at {s}: {e}"))?
        } else {
            let moves = game.legal_moves(&s).map_err(|e| e.to_string())?;
            *moves.choose(rng).expect("nonterminal states have moves")
        };
        s = game.apply_unchecked(&s, m);
        game.check_invariants(&s)?;
    }
    Ok((max_moves, game.terminal_status(&s)))
}

/// From a safe initial state, engine-Alice against random Bob must survive
/// `rounds` full rounds in every playout.
pub fn safety_playouts(solved: &Solved, playouts: usize, rounds: usize, seed: u64) -> Result<PlayoutSummary, String> {
    if solved.initial_status() != StateStatus::AliceSafe {
        return Err("initial state is not safe for Alice".into());
    }
    let max_moves = rounds * solved.game().n();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut longest = 0;
    for i in 0..playouts {
        let (moves, status) = playout(solved, Player::Alice, max_moves, &mut rng)?;
        if status.is_bob_win() {
            return Err(format!("playout {i}: Bob won after {moves} moves"));
        }
        longest = longest.max(moves);
    }
    Ok(PlayoutSummary { playouts, longest })
}

/// From an attracted initial state of rank `r`, engine-Bob against random
/// Alice must win within `r` moves in every playout.
pub fn attack_playouts(solved: &Solved, playouts: usize, seed: u64) -> Result<PlayoutSummary, String> {
    let StateStatus::BobAttracted { rank } = solved.initial_status() else {
        return Err("initial state is safe for Alice".into());
    };
    let mut rng = StdRng::seed_from_u64(seed);
    let mut longest = 0;
    for i in 0..playouts {
        let (moves, status) = playout(solved, Player::Bob, rank as usize + 1, &mut rng)?;
        if !status.is_bob_win() || moves > rank as usize {
            return Err(format!("playout {i}: no Bob win within rank {rank} (status {status:?} after {moves} moves)"));
        }
        longest = longest.max(moves);
    }
    Ok(PlayoutSummary { playouts, longest })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph;
    use crate::rules::Game;
    use crate::solver::{solve, SolverOptions};

    #[test]
    fn certificates_on_small_paths() {
        let opts = SolverOptions::default();
        let p3 = solve(&Game::new(graph::path(3).unwrap(), 3, Default::default()).unwrap(), &opts).unwrap();
        let summary = safety_playouts(&p3, 100, 9, 7).unwrap();
        assert_eq!(summary.longest, 27);
        assert!(attack_playouts(&p3, 10, 7).is_err());
        let p4 = solve(&Game::new(graph::path(4).unwrap(), 3, Default::default()).unwrap(), &opts).unwrap();
        attack_playouts(&p4, 100, 7).unwrap();
        assert!(safety_playouts(&p4, 1, 3, 7).is_err());
    }
}
