//! Arena exploration and the safety-game fixpoint.
//!
//! The arena is the forward closure of the canonical initial state. Bob's
//! attractor is computed backwards with per-state successor counters: a
//! Bob-to-move state joins as soon as one successor is in, an Alice-to-move
//! state once all of them are. States never reached by this process are safe
//! for Alice forever.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{max_degree, Graph};
use crate::rules::{Game, GameState, Move, Player, TerminalStatus, VariantConfig};
use crate::state::{CanonicalizationPolicy, Canonicalizer, StateKey};

pub const DEFAULT_BUDGET: usize = 200_000_000;

const UNRANKED: u32 = u32::MAX;
const NO_MOVE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverOptions {
    pub policy: CanonicalizationPolicy,
    /// Abort exploration beyond this many states.
    pub budget: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { policy: CanonicalizationPolicy::default(), budget: DEFAULT_BUDGET }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum NodeKind {
    Open,
    BobWin,
    AliceWin,
}

#[derive(Clone, Copy, Debug)]
struct Node {
    bob_to_move: bool,
    kind: NodeKind,
}

/// The explored state graph of one game.
pub struct Arena {
    game: Game,
    canon: Canonicalizer,
    keys: Vec<StateKey>,
    index: FxHashMap<StateKey, u32>,
    nodes: Vec<Node>,
    succ_start: Vec<usize>,
    succ: Vec<u32>,
}

impl Arena {
    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn canonicalizer(&self) -> &Canonicalizer {
        &self.canon
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn transitions(&self) -> usize {
        self.succ.len()
    }

    pub fn terminal_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.kind != NodeKind::Open).count()
    }

    /// Index of the initial state (always 0).
    pub fn initial(&self) -> usize {
        0
    }

    pub fn key(&self, i: usize) -> StateKey {
        self.keys[i]
    }

    pub fn state(&self, i: usize) -> GameState {
        self.canon.layout().decode(&self.keys[i]).expect("arena keys decode")
    }

    pub fn successors(&self, i: usize) -> &[u32] {
        &self.succ[self.succ_start[i]..self.succ_start[i + 1]]
    }

    pub fn mover(&self, i: usize) -> Player {
        if self.nodes[i].bob_to_move {
            Player::Bob
        } else {
            Player::Alice
        }
    }

    pub fn is_bob_win(&self, i: usize) -> bool {
        self.nodes[i].kind == NodeKind::BobWin
    }

    pub fn is_terminal(&self, i: usize) -> bool {
        self.nodes[i].kind != NodeKind::Open
    }

    /// Arena index of the canonical form of `s`.
    pub fn lookup(&self, s: &GameState) -> Option<usize> {
        self.index.get(&self.canon.canonical_key(s)).map(|&i| i as usize)
    }
}

fn expand(game: &Game, canon: &Canonicalizer, key: &StateKey) -> (Node, Vec<StateKey>) {
    let s = canon.layout().decode(key).expect("arena keys decode");
    let bob_to_move = s.mover == Player::Bob;
    let kind = match game.terminal_status(&s) {
        TerminalStatus::Ongoing => NodeKind::Open,
        TerminalStatus::BobWins(_) => NodeKind::BobWin,
        TerminalStatus::AliceWinsRound => NodeKind::AliceWin,
    };
    let mut succs = Vec::new();
    if kind == NodeKind::Open {
        let mut moves = Vec::new();
        game.push_moves(&s, &mut moves);
        succs.extend(moves.into_iter().map(|m| canon.canonical_key(&game.apply_unchecked(&s, m))));
    }
    (Node { bob_to_move, kind }, succs)
}

/// Forward closure from the canonical initial state, level by level. Each
/// level is expanded in parallel and then numbered in a fixed order, so the
/// arena is identical for any number of worker threads.
pub fn explore(game: &Game, opts: &SolverOptions) -> Result<Arena> {
    let canon = Canonicalizer::new(game, opts.policy)?;
    let (_, init) = canon.canonical(&game.initial_state());
    let mut keys = vec![init];
    let mut index = FxHashMap::default();
    index.insert(init, 0u32);
    let mut nodes = Vec::new();
    let mut succ_start = vec![0usize];
    let mut succ = Vec::new();
    let mut level_start = 0;
    while level_start < keys.len() {
        let level_end = keys.len();
        let expanded: Vec<(Node, Vec<StateKey>)> = keys[level_start..level_end]
            .par_iter()
            .with_min_len(256)
            .map(|key| expand(game, &canon, key))
            .collect();
        for (node, succs) in expanded {
            nodes.push(node);
            for key in succs {
                let next = keys.len() as u32;
                let idx = *index.entry(key).or_insert_with(|| {
                    keys.push(key);
                    next
                });
                succ.push(idx);
            }
            succ_start.push(succ.len());
            if keys.len() > opts.budget {
                return Err(Error::BudgetExceeded { budget: opts.budget });
            }
        }
        level_start = level_end;
    }
    Ok(Arena { game: game.clone(), canon, keys, index, nodes, succ_start, succ })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum StateStatus {
    AliceSafe,
    /// Bob can force a win within `rank` more moves.
    BobAttracted { rank: u32 },
}

/// Solved arena: attractor ranks and one recommended move per state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatusTable {
    rank: Vec<u32>,
    /// Position in the state's successor list.
    best: Vec<u32>,
    iterations: u32,
}

impl StatusTable {
    pub fn status(&self, i: usize) -> StateStatus {
        match self.rank[i] {
            UNRANKED => StateStatus::AliceSafe,
            rank => StateStatus::BobAttracted { rank },
        }
    }

    pub fn is_safe(&self, i: usize) -> bool {
        self.rank[i] == UNRANKED
    }

    pub fn best_index(&self, i: usize) -> Option<usize> {
        (self.best[i] != NO_MOVE).then_some(self.best[i] as usize)
    }

    pub fn attractor_size(&self) -> usize {
        self.rank.iter().filter(|&&r| r != UNRANKED).count()
    }

    /// Number of fixpoint layers above the terminal one.
    pub fn iterations(&self) -> u32 {
        self.iterations
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub(crate) fn raw(&self) -> (&[u32], &[u32]) {
        (&self.rank, &self.best)
    }
}

/// Bob's attractor by backward propagation with successor counters.
pub fn solve_attractor(arena: &Arena) -> StatusTable {
    let n = arena.len();
    let mut pred_start = vec![0usize; n + 1];
    for &t in &arena.succ {
        pred_start[t as usize + 1] += 1;
    }
    for i in 0..n {
        pred_start[i + 1] += pred_start[i];
    }
    let mut fill = pred_start.clone();
    let mut pred = vec![0u32; arena.succ.len()];
    for s in 0..n {
        for &t in arena.successors(s) {
            pred[fill[t as usize]] = s as u32;
            fill[t as usize] += 1;
        }
    }
    drop(fill);

    let mut rank = vec![UNRANKED; n];
    let mut pending: Vec<u32> = (0..n).map(|i| arena.successors(i).len() as u32).collect();
    let mut layer: Vec<u32> = (0..n).filter(|&i| arena.is_bob_win(i)).map(|i| i as u32).collect();
    for &i in &layer {
        rank[i as usize] = 0;
    }
    let mut r = 0u32;
    while !layer.is_empty() {
        let mut next = Vec::new();
        for &t in &layer {
            for &p in &pred[pred_start[t as usize]..pred_start[t as usize + 1]] {
                let p = p as usize;
                if rank[p] != UNRANKED {
                    continue;
                }
                if arena.nodes[p].bob_to_move {
                    rank[p] = r + 1;
                    next.push(p as u32);
                } else {
                    pending[p] -= 1;
                    if pending[p] == 0 {
                        rank[p] = r + 1;
                        next.push(p as u32);
                    }
                }
            }
        }
        if !next.is_empty() {
            r += 1;
        }
        layer = next;
    }

    let best = (0..n).map(|i| choose_best(arena, &rank, i)).collect();
    StatusTable { rank, best, iterations: r }
}

fn choose_best(arena: &Arena, rank: &[u32], i: usize) -> u32 {
    if arena.is_terminal(i) {
        return NO_MOVE;
    }
    let succs = arena.successors(i);
    let bob = arena.nodes[i].bob_to_move;
    let pick = if rank[i] == UNRANKED {
        if bob {
            // keep Alice's safe options as few as possible
            let safe_options = |t: u32| arena.successors(t as usize).iter().filter(|&&u| rank[u as usize] == UNRANKED).count();
            (0..succs.len()).min_by_key(|&j| (safe_options(succs[j]), j))
        } else {
            succs.iter().position(|&t| rank[t as usize] == UNRANKED)
        }
    } else if bob {
        (0..succs.len()).min_by_key(|&j| (rank[succs[j] as usize], j))
    } else {
        (0..succs.len()).min_by_key(|&j| (std::cmp::Reverse(rank[succs[j] as usize]), j))
    };
    pick.map_or(NO_MOVE, |j| j as u32)
}

/// Recomputes every state's status and rank from its successors and counts
/// the states where the table disagrees.
pub fn verify_fixpoint(arena: &Arena, table: &StatusTable) -> usize {
    (0..arena.len())
        .into_par_iter()
        .filter(|&i| {
            let got = table.rank[i];
            let succs = arena.successors(i);
            let expected = if arena.is_bob_win(i) {
                0
            } else if arena.is_terminal(i) {
                UNRANKED
            } else if arena.nodes[i].bob_to_move {
                succs.iter().map(|&t| table.rank[t as usize]).min().map_or(UNRANKED, |m| m.saturating_add(1))
            } else if succs.iter().all(|&t| table.rank[t as usize] != UNRANKED) {
                succs.iter().map(|&t| table.rank[t as usize]).max().map_or(UNRANKED, |m| m + 1)
            } else {
                UNRANKED
            };
            let best_ok = match table.best_index(i) {
                None => arena.is_terminal(i),
                Some(j) => {
                    let t = succs[j] as usize;
                    let safe = got == UNRANKED;
                    match (safe, arena.nodes[i].bob_to_move) {
                        (true, false) => table.rank[t] == UNRANKED,
                        (false, true) => table.rank[t] != UNRANKED && table.rank[t] + 1 == got,
                        _ => true,
                    }
                }
            };
            got != expected || !best_ok
        })
        .count()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub states: usize,
    pub transitions: usize,
    pub terminals: usize,
    pub attractor: usize,
    pub iterations: u32,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// A solved game: arena plus status table.
pub struct Solved {
    pub arena: Arena,
    pub table: StatusTable,
    pub stats: SolveStats,
}

impl Solved {
    pub fn game(&self) -> &Game {
        self.arena.game()
    }

    pub fn winner(&self) -> Player {
        if self.table.is_safe(self.arena.initial()) {
            Player::Alice
        } else {
            Player::Bob
        }
    }

    pub fn initial_status(&self) -> StateStatus {
        self.table.status(self.arena.initial())
    }

    pub fn status_of(&self, s: &GameState) -> Result<StateStatus> {
        self.arena.lookup(s).map(|i| self.table.status(i)).ok_or(Error::UnknownState)
    }

    /// The recommended move at an actual (not necessarily canonical) state.
    pub fn best_move(&self, s: &GameState) -> Result<Move> {
        let game = self.arena.game();
        if game.terminal_status(s).is_terminal() {
            return Err(Error::Terminal);
        }
        let i = self.arena.lookup(s).ok_or(Error::UnknownState)?;
        let j = self.table.best_index(i).ok_or(Error::Terminal)?;
        let target = self.arena.successors(i)[j] as usize;
        let canon = self.arena.canonicalizer();
        game.legal_moves(s)?
            .into_iter()
            .find(|&m| self.arena.index.get(&canon.canonical_key(&game.apply_unchecked(s, m))) == Some(&(target as u32)))
            .ok_or(Error::UnknownState)
    }

    pub fn verify(&self) -> usize {
        verify_fixpoint(&self.arena, &self.table)
    }
}

pub fn solve(game: &Game, opts: &SolverOptions) -> Result<Solved> {
    let start = Instant::now();
    let arena = explore(game, opts)?;
    let table = solve_attractor(&arena);
    let stats = SolveStats {
        states: arena.len(),
        transitions: arena.transitions(),
        terminals: arena.terminal_count(),
        attractor: table.attractor_size(),
        iterations: table.iterations(),
        elapsed: start.elapsed(),
    };
    Ok(Solved { arena, table, stats })
}

/// Who wins `game` under optimal play.
pub fn alice_wins(game: &Game, opts: &SolverOptions) -> Result<(Player, SolveStats)> {
    let solved = solve(game, opts)?;
    Ok((solved.winner(), solved.stats))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Alice,
    Bob,
    Aborted,
}

impl From<Player> for Outcome {
    fn from(p: Player) -> Self {
        match p {
            Player::Alice => Outcome::Alice,
            Player::Bob => Outcome::Bob,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub winner: Outcome,
    pub states: usize,
    pub attractor: usize,
    pub iters: u32,
    pub ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub graph: String,
    pub variant: String,
    pub rows: Vec<SweepRow>,
    /// Smallest `k` in the sweep that Alice wins.
    pub chi: Option<usize>,
    /// Bob wins some `k` above `chi`.
    pub profile_warning: bool,
}

impl SolveReport {
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.profile_warning {
            let bad: Vec<String> = self
                .rows
                .iter()
                .filter(|r| self.chi.is_some_and(|c| r.k > c) && r.winner == Outcome::Bob)
                .map(|r| r.k.to_string())
                .collect();
            out.push(format!("non-monotone win profile: Bob wins k={} above chi", bad.join(",")));
        }
        let aborted: Vec<String> =
            self.rows.iter().filter(|r| r.winner == Outcome::Aborted).map(|r| r.k.to_string()).collect();
        if !aborted.is_empty() {
            out.push(format!("budget exceeded for k={}", aborted.join(",")));
        }
        out
    }

    pub fn any_aborted(&self) -> bool {
        self.rows.iter().any(|r| r.winner == Outcome::Aborted)
    }
}

/// Default sweep ceiling: maximum degree plus two.
pub fn default_k_max(g: &Graph) -> usize {
    max_degree(g) + 2
}

/// Solves every `k` in `k_min..=k_max` independently.
pub fn chi_sweep(g: &Graph, cfg: &VariantConfig, k_min: usize, k_max: usize, opts: &SolverOptions) -> Result<SolveReport> {
    let mut rows = Vec::new();
    for k in k_min.max(1)..=k_max {
        let game = Game::new(g.clone(), k, cfg.clone())?;
        let row = match solve(&game, opts) {
            Ok(s) => SweepRow {
                k,
                winner: s.winner().into(),
                states: s.stats.states,
                attractor: s.stats.attractor,
                iters: s.stats.iterations,
                ms: s.stats.elapsed.as_millis() as u64,
            },
            Err(Error::BudgetExceeded { .. }) => {
                SweepRow { k, winner: Outcome::Aborted, states: 0, attractor: 0, iters: 0, ms: 0 }
            }
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    Ok(report_from_rows(g.label().to_string(), cfg.to_string(), rows))
}

pub fn report_from_rows(graph: String, variant: String, rows: Vec<SweepRow>) -> SolveReport {
    let chi = rows.iter().find(|r| r.winner == Outcome::Alice).map(|r| r.k);
    let profile_warning = chi.is_some_and(|c| rows.iter().any(|r| r.k > c && r.winner == Outcome::Bob));
    SolveReport { graph, variant, rows, chi, profile_warning }
}
