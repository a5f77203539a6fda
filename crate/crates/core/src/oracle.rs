//! Deliberately naive reference solver for tiny instances.
//!
//! No packing, no symmetry reduction, no counters: plain states in a hash
//! map and value iteration by full rescans until nothing changes.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::rules::{Game, GameState, Player, TerminalStatus};
use crate::solver::{alice_wins, SolverOptions};

pub const ORACLE_BUDGET: usize = 10_000_000;

pub fn naive_value(game: &Game, budget: usize) -> Result<Player> {
    let mut states: Vec<GameState> = vec![game.initial_state()];
    let mut index: HashMap<GameState, usize> = HashMap::new();
    index.insert(states[0], 0);
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut status: Vec<TerminalStatus> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let s = states[i];
        let st = game.terminal_status(&s);
        let mut out = Vec::new();
        if st == TerminalStatus::Ongoing {
            for m in game.legal_moves(&s)? {
                let t = game.apply_unchecked(&s, m);
                let j = *index.entry(t).or_insert_with(|| {
                    states.push(t);
                    states.len() - 1
                });
                out.push(j);
            }
        }
        if states.len() > budget {
            return Err(Error::BudgetExceeded { budget });
        }
        succ.push(out);
        status.push(st);
        i += 1;
    }

    let mut won: Vec<bool> = status.iter().map(|st| st.is_bob_win()).collect();
    loop {
        let next: Vec<bool> = (0..states.len())
            .map(|i| {
                if won[i] || status[i] != TerminalStatus::Ongoing {
                    return won[i];
                }
                match states[i].mover {
                    Player::Bob => succ[i].iter().any(|&j| won[j]),
                    Player::Alice => succ[i].iter().all(|&j| won[j]),
                }
            })
            .collect();
        if next == won {
            break;
        }
        won = next;
    }
    Ok(if won[0] { Player::Bob } else { Player::Alice })
}

/// Whether the oracle and the main solver name the same winner.
pub fn check_agreement(game: &Game, opts: &SolverOptions) -> Result<bool> {
    let naive = naive_value(game, ORACLE_BUDGET)?;
    let (solver, _) = alice_wins(game, opts)?;
    Ok(naive == solver)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph;

    fn value(spec: &str, k: usize, variant: &str) -> Player {
        let game = Game::new(graph::parse_graph_spec(spec).unwrap(), k, variant.parse().unwrap()).unwrap();
        naive_value(&game, ORACLE_BUDGET).unwrap()
    }

    #[test]
    fn small_values() {
        assert_eq!(value("path:3", 3, "a"), Player::Alice);
        assert_eq!(value("complete:3", 3, "a"), Player::Bob);
        assert_eq!(value("complete:3", 4, "a"), Player::Alice);
        assert_eq!(value("path:3", 3, "b-prime"), Player::Bob);
        assert_eq!(value("cycle:5", 3, "strong"), Player::Alice);
        assert_eq!(value("cycle:5", 3, "a"), Player::Bob);
    }

    #[test]
    fn budget_is_enforced() {
        let game = Game::new(graph::path(4).unwrap(), 3, Default::default()).unwrap();
        assert!(matches!(naive_value(&game, 20), Err(Error::BudgetExceeded { budget: 20 })));
    }

    #[test]
    fn agrees_on_p4_variants() {
        let opts = SolverOptions::default();
        for variant in ["a", "b", "a-prime", "b-prime", "game2", "greedy", "very-greedy", "strong", "single-round:free", "ordered:r1", "ordered:1,3,0,2"] {
            for k in 2..=4 {
                let game = Game::new(graph::path(4).unwrap(), k, variant.parse().unwrap()).unwrap();
                assert!(check_agreement(&game, &opts).unwrap(), "{variant} k={k}");
            }
        }
    }
}
