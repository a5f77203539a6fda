//! Rules of the eternal vertex coloring game and its variants.
//!
//! A state records the current (partial) coloring, which vertices have
//! already been chosen in the running round, whose turn it is and, for the
//! palette-restricted variant, which colors have been introduced so far.
//! Colors are `1..=k`; `0` means uncolored.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, MAX_VERTICES};

/// Largest color count a state can carry (palette bits live in a `u64`).
pub const MAX_COLORS: usize = 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    Alice,
    Bob,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::Alice => Player::Bob,
            Player::Bob => Player::Alice,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Alice => "Alice",
            Player::Bob => "Bob",
        })
    }
}

/// Who moves first, and whether the first mover is reset every round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TurnScheme {
    /// Strict alternation, Alice opens the game.
    A,
    /// Strict alternation, Bob opens the game.
    B,
    /// Alternation restarting with Alice at every round.
    APrime,
    /// Alternation restarting with Bob at every round.
    BPrime,
}

impl TurnScheme {
    pub fn starter(self) -> Player {
        match self {
            TurnScheme::A | TurnScheme::APrime => Player::Alice,
            TurnScheme::B | TurnScheme::BPrime => Player::Bob,
        }
    }

    pub fn restarts_each_round(self) -> bool {
        matches!(self, TurnScheme::APrime | TurnScheme::BPrime)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ColorRule {
    Free,
    GreedySmallest,
    /// Only colors already introduced, unless none of them is legal.
    PaletteOnly,
}

/// Which colors count as "already used" for [`ColorRule::PaletteOnly`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PaletteMode {
    /// Every color introduced at any point of the game.
    Introduced,
    /// Colors present on the graph right now.
    Current,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexOrder {
    None,
    /// The same permutation of all vertices every round.
    Fixed(Vec<u8>),
    /// Free choice in round 1; later rounds replay the round-1 order.
    AfterRound1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Horizon {
    Eternal,
    SingleRound,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VariantConfig {
    pub scheme: TurnScheme,
    pub alice_rule: ColorRule,
    pub bob_rule: ColorRule,
    pub palette: PaletteMode,
    pub strong: bool,
    pub order: VertexOrder,
    pub horizon: Horizon,
}

impl Default for VariantConfig {
    fn default() -> Self {
        VariantConfig {
            scheme: TurnScheme::A,
            alice_rule: ColorRule::Free,
            bob_rule: ColorRule::Free,
            palette: PaletteMode::Introduced,
            strong: false,
            order: VertexOrder::None,
            horizon: Horizon::Eternal,
        }
    }
}

impl VariantConfig {
    pub fn a_game() -> Self {
        Self::default()
    }

    pub fn with_scheme(scheme: TurnScheme) -> Self {
        VariantConfig { scheme, ..Self::default() }
    }

    pub fn game2() -> Self {
        VariantConfig { bob_rule: ColorRule::PaletteOnly, ..Self::default() }
    }

    pub fn greedy() -> Self {
        VariantConfig { bob_rule: ColorRule::GreedySmallest, ..Self::default() }
    }

    pub fn very_greedy() -> Self {
        VariantConfig { alice_rule: ColorRule::GreedySmallest, bob_rule: ColorRule::GreedySmallest, ..Self::default() }
    }

    pub fn strong() -> Self {
        VariantConfig { strong: true, ..Self::default() }
    }

    pub fn single_round(self) -> Self {
        VariantConfig { horizon: Horizon::SingleRound, ..self }
    }

    pub fn rule_for(&self, player: Player) -> ColorRule {
        match player {
            Player::Alice => self.alice_rule,
            Player::Bob => self.bob_rule,
        }
    }

    /// Whether states carry the set of introduced colors.
    pub fn tracks_palette(&self) -> bool {
        self.bob_rule == ColorRule::PaletteOnly && self.palette == PaletteMode::Introduced
    }

    pub fn uses_greedy(&self) -> bool {
        self.alice_rule == ColorRule::GreedySmallest || self.bob_rule == ColorRule::GreedySmallest
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.alice_rule == ColorRule::PaletteOnly {
            return Err(Error::Variant("the palette rule applies to Bob only".into()));
        }
        match &self.order {
            VertexOrder::Fixed(perm) => {
                let mut seen = 0u64;
                for &v in perm {
                    seen |= 1 << v;
                }
                if perm.len() != g.n() || seen != (1u64 << g.n()) - 1 {
                    return Err(Error::Variant(format!("ordering {perm:?} is not a permutation of {} vertices", g.n())));
                }
            }
            VertexOrder::AfterRound1 if g.n() > 16 => {
                return Err(Error::Variant("ordered:r1 supports at most 16 vertices".into()));
            }
            _ => {}
        }
        Ok(())
    }
}

impl fmt::Display for VariantConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match (self.alice_rule, self.bob_rule) {
            (ColorRule::GreedySmallest, ColorRule::GreedySmallest) => parts.push("very-greedy".into()),
            (ColorRule::GreedySmallest, _) => parts.push("alice-greedy".into()),
            (_, ColorRule::GreedySmallest) => parts.push("greedy".into()),
            (_, ColorRule::PaletteOnly) => parts.push("game2".into()),
            _ => {}
        }
        if self.alice_rule == ColorRule::GreedySmallest && self.bob_rule == ColorRule::PaletteOnly {
            parts.push("game2".into());
        }
        if self.bob_rule == ColorRule::PaletteOnly && self.palette == PaletteMode::Current {
            parts.push("palette=current".into());
        }
        if self.strong {
            parts.push("strong".into());
        }
        match &self.order {
            VertexOrder::None => {}
            VertexOrder::Fixed(p) => {
                parts.push(format!("ordered:{}", p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")))
            }
            VertexOrder::AfterRound1 => parts.push("ordered:r1".into()),
        }
        let scheme = match self.scheme {
            TurnScheme::A => None,
            TurnScheme::B => Some("b"),
            TurnScheme::APrime => Some("a-prime"),
            TurnScheme::BPrime => Some("b-prime"),
        };
        if let Some(s) = scheme {
            parts.insert(0, s.into());
        }
        let body = if parts.is_empty() {
            if self.horizon == Horizon::SingleRound { "free".to_string() } else { "a".to_string() }
        } else {
            parts.join("+")
        };
        match self.horizon {
            Horizon::Eternal => f.write_str(&body),
            Horizon::SingleRound => write!(f, "single-round:{body}"),
        }
    }
}

impl FromStr for VariantConfig {
    type Err = Error;

    /// Accepts `a`, `b`, `a-prime`, `b-prime`, `game2`, `greedy`,
    /// `very-greedy`, `strong`, `ordered:<perm|r1>`, `palette=current` and
    /// `single-round:<variant>`, combined with `+` (e.g. `b+greedy`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("single-round:") {
            let inner: VariantConfig = rest.parse()?;
            if inner.horizon == Horizon::SingleRound {
                return Err(Error::Variant(format!("nested single-round in {s:?}")));
            }
            return Ok(inner.single_round());
        }
        if s.is_empty() {
            return Err(Error::Variant("empty variant".into()));
        }
        let mut cfg = VariantConfig::default();
        let mut scheme_set = false;
        for token in s.split('+') {
            let mut set_scheme = |scheme| {
                if scheme_set {
                    return Err(Error::Variant(format!("more than one turn scheme in {s:?}")));
                }
                scheme_set = true;
                cfg.scheme = scheme;
                Ok(())
            };
            match token {
                "a" | "free" => set_scheme(TurnScheme::A)?,
                "b" => set_scheme(TurnScheme::B)?,
                "a-prime" => set_scheme(TurnScheme::APrime)?,
                "b-prime" => set_scheme(TurnScheme::BPrime)?,
                "game2" => cfg.bob_rule = ColorRule::PaletteOnly,
                "greedy" => cfg.bob_rule = ColorRule::GreedySmallest,
                "very-greedy" => {
                    cfg.alice_rule = ColorRule::GreedySmallest;
                    cfg.bob_rule = ColorRule::GreedySmallest;
                }
                "alice-greedy" => cfg.alice_rule = ColorRule::GreedySmallest,
                "strong" => cfg.strong = true,
                "palette=current" => cfg.palette = PaletteMode::Current,
                "palette=introduced" => cfg.palette = PaletteMode::Introduced,
                "ordered:r1" => cfg.order = VertexOrder::AfterRound1,
                t if t.starts_with("ordered:") => {
                    let perm = t["ordered:".len()..]
                        .split(',')
                        .map(|x| x.trim().parse::<u8>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| Error::Variant(format!("bad vertex order in {t:?}")))?;
                    if perm.len() > MAX_VERTICES {
                        return Err(Error::Variant(format!("vertex order too long in {t:?}")));
                    }
                    cfg.order = VertexOrder::Fixed(perm);
                }
                other => return Err(Error::Variant(format!("unknown variant token {other:?}"))),
            }
        }
        Ok(cfg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub vertex: usize,
    pub color: u8,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}<-{}", self.vertex, self.color)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BobWinReason {
    /// Bob picked an available vertex that cannot be recolored.
    BobClaimsStuckVertex,
    /// Every vertex the mover may choose is stuck.
    MoverHasNoMove,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalStatus {
    Ongoing,
    BobWins(BobWinReason),
    /// Single-round horizon only: every vertex got colored.
    AliceWinsRound,
}

impl TerminalStatus {
    pub fn is_terminal(self) -> bool {
        self != TerminalStatus::Ongoing
    }

    pub fn is_bob_win(self) -> bool {
        matches!(self, TerminalStatus::BobWins(_))
    }
}

/// One arena node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GameState {
    pub k: u8,
    pub n: u8,
    pub colors: [u8; MAX_VERTICES],
    /// Vertices already chosen in the running round.
    pub moved: u32,
    pub mover: Player,
    /// Bit `c` set when color `c` was introduced; only kept when the
    /// variant tracks the palette.
    pub palette: u64,
    pub round1: bool,
    /// Round-1 choice order, four bits per slot; only for `ordered:r1`.
    pub order: u64,
}

impl GameState {
    pub fn colors(&self) -> &[u8] {
        &self.colors[..self.n as usize]
    }

    pub fn colored(&self) -> u32 {
        (0..self.n as usize).filter(|&v| self.colors[v] != 0).fold(0, |m, v| m | 1 << v)
    }

    /// Mask of colors present on the graph.
    pub fn colors_present(&self) -> u64 {
        self.colors().iter().fold(0u64, |m, &c| m | 1 << c) & !1
    }

    pub fn recorded_order(&self) -> Vec<usize> {
        let len = if self.round1 { self.moved.count_ones() as usize } else { self.n as usize };
        (0..len).map(|i| ((self.order >> (4 * i)) & 0xf) as usize).collect()
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for v in 0..self.n as usize {
            if v > 0 {
                write!(f, " ")?;
            }
            match self.colors[v] {
                0 => write!(f, "-")?,
                c => write!(f, "{c}")?,
            }
            if self.moved & (1 << v) != 0 {
                write!(f, "*")?;
            }
        }
        write!(f, "] {} to move{}", self.mover, if self.round1 { ", round 1" } else { "" })
    }
}

/// A graph, a color count and a variant: everything needed to play.
#[derive(Clone, Debug)]
pub struct Game {
    graph: Graph,
    k: usize,
    cfg: VariantConfig,
    all_colors: u64,
    fixed_order: Option<Vec<u8>>,
}

impl Game {
    pub fn new(graph: Graph, k: usize, cfg: VariantConfig) -> Result<Self> {
        if k == 0 || k > MAX_COLORS {
            return Err(Error::ColorCount(k));
        }
        cfg.validate(&graph)?;
        let fixed_order = match &cfg.order {
            VertexOrder::Fixed(p) => Some(p.clone()),
            _ => None,
        };
        let all_colors = ((1u64 << k) - 1) << 1;
        Ok(Game { graph, k, cfg, all_colors, fixed_order })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn config(&self) -> &VariantConfig {
        &self.cfg
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn initial_state(&self) -> GameState {
        GameState {
            k: self.k as u8,
            n: self.graph.n() as u8,
            colors: [0; MAX_VERTICES],
            moved: 0,
            mover: self.cfg.scheme.starter(),
            palette: 0,
            round1: true,
            order: 0,
        }
    }

    /// Vertices the mover may choose.
    #[inline]
    pub fn available_vertices(&self, s: &GameState) -> u32 {
        let slot = s.moved.count_ones();
        match (&self.fixed_order, &self.cfg.order) {
            (Some(order), _) => 1 << order[slot as usize],
            (None, VertexOrder::AfterRound1) if !s.round1 => 1 << ((s.order >> (4 * slot)) & 0xf),
            _ => self.graph.all_vertices() & !s.moved,
        }
    }

    fn ordered_now(&self, s: &GameState) -> bool {
        match self.cfg.order {
            VertexOrder::None => false,
            VertexOrder::Fixed(_) => true,
            VertexOrder::AfterRound1 => !s.round1,
        }
    }

    /// Colors proper at `v` and different from its current color.
    #[inline]
    pub fn base_colors(&self, s: &GameState, v: usize) -> u64 {
        let mut forbidden = 1u64 << s.colors[v];
        let mut nb = self.graph.neighbors(v);
        while nb != 0 {
            let u = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            forbidden |= 1 << s.colors[u];
        }
        self.all_colors & !forbidden
    }

    /// Restricts a nonempty base set by a player's color rule.
    #[inline]
    fn restrict(&self, s: &GameState, base: u64, rule: ColorRule) -> u64 {
        match rule {
            ColorRule::Free => base,
            ColorRule::GreedySmallest => base & base.wrapping_neg(),
            ColorRule::PaletteOnly => {
                let palette = match self.cfg.palette {
                    PaletteMode::Introduced => s.palette,
                    PaletteMode::Current => s.colors_present(),
                };
                match base & palette {
                    0 => base,
                    inside => inside,
                }
            }
        }
    }

    /// Legal colors for `v` under `role`'s color rule, as a bit mask over
    /// `1..=k`.
    pub fn legal_colors(&self, s: &GameState, v: usize, role: Player) -> Result<u64> {
        if v >= self.n() {
            return Err(Error::IllegalMove(format!("no vertex {v}")));
        }
        if s.moved & (1 << v) != 0 {
            return Err(Error::IllegalMove(format!("vertex {v} was already chosen this round")));
        }
        if self.available_vertices(s) & (1 << v) == 0 {
            return Err(Error::IllegalMove(format!("vertex {v} is not next in the fixed order")));
        }
        Ok(self.legal_colors_unchecked(s, v, role))
    }

    #[inline]
    pub fn legal_colors_unchecked(&self, s: &GameState, v: usize, role: Player) -> u64 {
        self.restrict(s, self.base_colors(s, v), self.cfg.rule_for(role))
    }

    /// Available vertices with no proper color other than their own.
    #[inline]
    pub fn stuck_vertices(&self, s: &GameState) -> u32 {
        let mut avail = self.available_vertices(s);
        let mut stuck = 0;
        while avail != 0 {
            let v = avail.trailing_zeros() as usize;
            avail &= avail - 1;
            if self.base_colors(s, v) == 0 {
                stuck |= 1 << v;
            }
        }
        stuck
    }

    pub fn terminal_status(&self, s: &GameState) -> TerminalStatus {
        if self.cfg.horizon == Horizon::SingleRound && !s.round1 {
            return TerminalStatus::AliceWinsRound;
        }
        let stuck = self.stuck_vertices(s);
        if stuck == 0 {
            return TerminalStatus::Ongoing;
        }
        let claim = if s.mover == Player::Bob {
            BobWinReason::BobClaimsStuckVertex
        } else {
            BobWinReason::MoverHasNoMove
        };
        if self.ordered_now(s) {
            // the only available vertex is stuck
            return TerminalStatus::BobWins(claim);
        }
        if s.mover == Player::Bob && !self.cfg.strong {
            return TerminalStatus::BobWins(BobWinReason::BobClaimsStuckVertex);
        }
        if stuck == self.available_vertices(s) {
            return TerminalStatus::BobWins(BobWinReason::MoverHasNoMove);
        }
        TerminalStatus::Ongoing
    }

    /// Legal moves of a nonterminal state, vertex ascending then color
    /// ascending.
    pub fn legal_moves(&self, s: &GameState) -> Result<Vec<Move>> {
        if self.terminal_status(s).is_terminal() {
            return Err(Error::Terminal);
        }
        let mut out = Vec::new();
        self.push_moves(s, &mut out);
        Ok(out)
    }

    /// Appends the moves of `s` without checking for terminality.
    #[inline]
    pub fn push_moves(&self, s: &GameState, out: &mut Vec<Move>) {
        let mut avail = self.available_vertices(s);
        while avail != 0 {
            let v = avail.trailing_zeros() as usize;
            avail &= avail - 1;
            let mut colors = self.legal_colors_unchecked(s, v, s.mover);
            while colors != 0 {
                let c = colors.trailing_zeros() as u8;
                colors &= colors - 1;
                out.push(Move { vertex: v, color: c });
            }
        }
    }

    pub fn apply_move(&self, s: &GameState, m: Move) -> Result<GameState> {
        if self.terminal_status(s).is_terminal() {
            return Err(Error::Terminal);
        }
        let legal = self.legal_colors(s, m.vertex, s.mover)?;
        if m.color == 0 || legal & (1u64 << m.color) == 0 {
            return Err(Error::IllegalMove(format!(
                "color {} is not legal at vertex {} (legal: {:?})",
                m.color,
                m.vertex,
                mask_to_colors(legal)
            )));
        }
        Ok(self.apply_unchecked(s, m))
    }

    #[inline]
    pub fn apply_unchecked(&self, s: &GameState, m: Move) -> GameState {
        let mut t = *s;
        t.colors[m.vertex] = m.color;
        if self.cfg.tracks_palette() {
            t.palette |= 1 << m.color;
        }
        if s.round1 && self.cfg.order == VertexOrder::AfterRound1 {
            let slot = s.moved.count_ones();
            t.order |= (m.vertex as u64) << (4 * slot);
        }
        t.moved |= 1 << m.vertex;
        let rolled = t.moved == self.graph.all_vertices();
        if rolled {
            t.moved = 0;
            t.round1 = false;
        }
        t.mover = if rolled && self.cfg.scheme.restarts_each_round() {
            self.cfg.scheme.starter()
        } else {
            s.mover.other()
        };
        t
    }

    /// Checks the structural state invariants; used by tests and the play
    /// service.
    pub fn check_invariants(&self, s: &GameState) -> std::result::Result<(), String> {
        let g = &self.graph;
        for (u, v) in g.edges() {
            if s.colors[u] != 0 && s.colors[u] == s.colors[v] {
                return Err(format!("edge {u}-{v} has both ends colored {}", s.colors[u]));
            }
        }
        if s.colors().iter().any(|&c| c as usize > self.k) {
            return Err("color outside 1..=k".into());
        }
        if s.moved == g.all_vertices() {
            return Err("moved set is the whole vertex set".into());
        }
        if s.round1 && s.colored() != s.moved {
            return Err("in round 1 the colored vertices must be exactly the moved ones".into());
        }
        if !s.round1 && s.colored() != g.all_vertices() {
            return Err("after round 1 every vertex must be colored".into());
        }
        if self.cfg.tracks_palette() && s.palette & s.colors_present() != s.colors_present() {
            return Err("palette misses a color on the graph".into());
        }
        Ok(())
    }
}

pub fn mask_to_colors(mask: u64) -> Vec<u8> {
    (1..64).filter(|&c| mask & (1u64 << c) != 0).map(|c| c as u8).collect()
}

pub fn mask_to_vertices(mask: u32) -> Vec<usize> {
    (0..32).filter(|&v| mask & (1u32 << v) != 0).collect()
}
