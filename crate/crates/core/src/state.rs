//! Packed state keys and canonical representatives.
//!
//! A key packs, from the low bits up: one color field per vertex, the moved
//! set, the mover bit, the round-1 bit and, when tracked, the palette. The
//! recorded round-1 order of `ordered:r1` lives in the fourth word.
//!
//! Canonicalization works in two layers. Vertices that are twins (same
//! neighborhood apart from each other) can be permuted freely, and colors
//! can be renamed freely unless a greedy rule makes their numeric order
//! matter. Both symmetries are quotiented at once by sorting colors by a
//! per-color profile (how many moved and unmoved vertices of each twin
//! class carry it) and then sorting every twin class. Remaining declared
//! automorphisms are handled by minimizing the key over the group they
//! generate.

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Perm};
use crate::rules::{ColorRule, Game, GameState, PaletteMode, Player, VariantConfig, VertexOrder};

/// Total width of the core key fields.
pub const KEY_BITS: usize = 192;

/// Largest group that is enumerated element by element.
pub const GROUP_ENUMERATION_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateKey(pub [u64; 4]);

/// Field widths for one game.
#[derive(Clone, Debug)]
pub struct KeyLayout {
    n: usize,
    k: usize,
    color_bits: usize,
    palette: bool,
    order: bool,
    tail: usize,
}

impl KeyLayout {
    pub fn new(game: &Game) -> Result<Self> {
        let n = game.n();
        let k = game.k();
        let color_bits = (usize::BITS - k.leading_zeros()) as usize;
        let palette = game.config().tracks_palette();
        let tail = n * color_bits + n + 2 + if palette { k } else { 0 };
        if tail > KEY_BITS {
            return Err(Error::KeyTooWide { bits: tail });
        }
        Ok(KeyLayout { n, k, color_bits, palette, order: game.config().order == VertexOrder::AfterRound1, tail })
    }

    /// Bits used by the core fields.
    pub fn width(&self) -> usize {
        self.tail
    }

    pub fn encode(&self, s: &GameState) -> StateKey {
        let mut w = BitWriter::default();
        for &c in s.colors() {
            w.put(c as u64, self.color_bits);
        }
        w.put(s.moved as u64, self.n);
        w.put((s.mover == Player::Bob) as u64, 1);
        w.put(s.round1 as u64, 1);
        if self.palette {
            w.put(s.palette >> 1, self.k);
        }
        let mut key = StateKey(w.words);
        if self.order {
            key.0[3] = s.order;
        }
        key
    }

    pub fn decode(&self, key: &StateKey) -> Result<GameState> {
        let mut r = BitReader { words: &key.0, pos: 0 };
        let mut colors = [0u8; crate::graph::MAX_VERTICES];
        for c in colors.iter_mut().take(self.n) {
            let v = r.take(self.color_bits);
            if v as usize > self.k {
                return Err(Error::MalformedKey(format!("color {v} exceeds k={}", self.k)));
            }
            *c = v as u8;
        }
        let moved = r.take(self.n) as u32;
        let mover = if r.take(1) == 1 { Player::Bob } else { Player::Alice };
        let round1 = r.take(1) == 1;
        let palette = if self.palette { r.take(self.k) << 1 } else { 0 };
        let rest_zero = (r.pos..KEY_BITS).step_by(64).all(|p| {
            let width = (KEY_BITS - p).min(64);
            r.peek(p, width) == 0
        });
        if !rest_zero || (!self.order && key.0[3] != 0) {
            return Err(Error::MalformedKey("unused bits are set".into()));
        }
        let all = if self.n == 32 { u32::MAX } else { (1u32 << self.n) - 1 };
        if moved == all {
            return Err(Error::MalformedKey("moved set covers every vertex".into()));
        }
        let s = GameState {
            k: self.k as u8,
            n: self.n as u8,
            colors,
            moved,
            mover,
            palette,
            round1,
            order: if self.order { key.0[3] } else { 0 },
        };
        let colored = s.colored();
        if (round1 && colored != moved) || (!round1 && colored != all) {
            return Err(Error::MalformedKey("colored set inconsistent with round".into()));
        }
        Ok(s)
    }
}

#[derive(Default)]
struct BitWriter {
    words: [u64; 4],
    pos: usize,
}

impl BitWriter {
    #[inline]
    fn put(&mut self, value: u64, width: usize) {
        if width == 0 {
            return;
        }
        let word = self.pos / 64;
        let off = self.pos % 64;
        self.words[word] |= value << off;
        if off + width > 64 {
            self.words[word + 1] |= value >> (64 - off);
        }
        self.pos += width;
    }
}

struct BitReader<'a> {
    words: &'a [u64; 4],
    pos: usize,
}

impl BitReader<'_> {
    fn peek(&self, pos: usize, width: usize) -> u64 {
        if width == 0 {
            return 0;
        }
        let word = pos / 64;
        let off = pos % 64;
        let mut v = self.words[word] >> off;
        if off + width > 64 {
            v |= self.words[word + 1] << (64 - off);
        }
        if width < 64 {
            v &= (1u64 << width) - 1;
        }
        v
    }

    fn take(&mut self, width: usize) -> u64 {
        let v = self.peek(self.pos, width);
        self.pos += width;
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanonicalizationPolicy {
    pub color_relabel: bool,
    pub orbit_reduce: bool,
}

impl Default for CanonicalizationPolicy {
    fn default() -> Self {
        CanonicalizationPolicy { color_relabel: true, orbit_reduce: true }
    }
}

impl CanonicalizationPolicy {
    pub const NONE: Self = CanonicalizationPolicy { color_relabel: false, orbit_reduce: false };

    /// Drops the reductions a variant does not admit: color renaming under
    /// greedy rules or a current-colors palette, vertex symmetry under a
    /// vertex ordering.
    pub fn effective(self, cfg: &VariantConfig) -> Self {
        let greedy = cfg.uses_greedy();
        let current_palette = cfg.bob_rule == ColorRule::PaletteOnly && cfg.palette == PaletteMode::Current;
        CanonicalizationPolicy {
            color_relabel: self.color_relabel && !greedy && !current_palette,
            orbit_reduce: self.orbit_reduce && cfg.order == VertexOrder::None,
        }
    }
}

#[derive(Clone, Debug)]
enum GroupAction {
    Trivial,
    /// Every non-identity element of the residual group.
    Enumerated(Vec<Perm>),
    /// Group too large: descend greedily along generators.
    HillDescent(Vec<Perm>),
}

/// Maps states to canonical representatives for one game and policy.
#[derive(Clone, Debug)]
pub struct Canonicalizer {
    policy: CanonicalizationPolicy,
    layout: KeyLayout,
    n: usize,
    k: usize,
    /// Twin classes with at least two vertices (only when orbit reduction is on).
    twin_classes: Vec<Vec<u8>>,
    /// Profile slot of each vertex.
    slot_of: Vec<u8>,
    slots: usize,
    group: GroupAction,
}

impl Canonicalizer {
    pub fn new(game: &Game, policy: CanonicalizationPolicy) -> Result<Self> {
        let policy = policy.effective(game.config());
        let layout = KeyLayout::new(game)?;
        let g = game.graph();
        let n = g.n();
        let use_symmetry = policy.orbit_reduce && g.symmetry().is_some();
        let classes: Vec<Vec<usize>> =
            if use_symmetry { g.twin_classes() } else { (0..n).map(|v| vec![v]).collect() };
        let mut slot_of = vec![0u8; n];
        for (i, class) in classes.iter().enumerate() {
            for &v in class {
                slot_of[v] = i as u8;
            }
        }
        let twin_classes = classes
            .iter()
            .filter(|c| c.len() > 1)
            .map(|c| c.iter().map(|&v| v as u8).collect())
            .collect();
        let group = if use_symmetry { residual_group(g, &slot_of) } else { GroupAction::Trivial };
        Ok(Canonicalizer { policy, layout, n, k: game.k(), twin_classes, slot_of, slots: classes.len(), group })
    }

    pub fn policy(&self) -> CanonicalizationPolicy {
        self.policy
    }

    pub fn layout(&self) -> &KeyLayout {
        &self.layout
    }

    /// Size of the residual group that is searched explicitly (1 when
    /// trivial, 0 when hill descent is used).
    pub fn residual_group_size(&self) -> usize {
        match &self.group {
            GroupAction::Trivial => 1,
            GroupAction::Enumerated(e) => e.len() + 1,
            GroupAction::HillDescent(_) => 0,
        }
    }

    pub fn canonicalize(&self, s: &GameState) -> GameState {
        self.canonical(s).0
    }

    pub fn canonical_key(&self, s: &GameState) -> StateKey {
        self.canonical(s).1
    }

    pub fn canonical(&self, s: &GameState) -> (GameState, StateKey) {
        let base = self.quotient(s);
        let base_key = self.layout.encode(&base);
        match &self.group {
            GroupAction::Trivial => (base, base_key),
            GroupAction::Enumerated(elements) => {
                let mut best = (base, base_key);
                for p in elements {
                    let cand = self.quotient(&permute(s, p));
                    let key = self.layout.encode(&cand);
                    if key < best.1 {
                        best = (cand, key);
                    }
                }
                best
            }
            GroupAction::HillDescent(gens) => {
                let mut best = (base, base_key);
                loop {
                    let mut improved = false;
                    for p in gens {
                        let cand = self.quotient(&permute(&best.0, p));
                        let key = self.layout.encode(&cand);
                        if key < best.1 {
                            best = (cand, key);
                            improved = true;
                        }
                    }
                    if !improved {
                        return best;
                    }
                }
            }
        }
    }

    /// Canonical form under color renaming and twin permutations.
    fn quotient(&self, s: &GameState) -> GameState {
        let mut t = *s;
        if self.policy.color_relabel {
            self.relabel_colors(&mut t);
        }
        for class in &self.twin_classes {
            let mut items: [(u8, bool); crate::graph::MAX_VERTICES] = [(0, false); crate::graph::MAX_VERTICES];
            for (i, &v) in class.iter().enumerate() {
                items[i] = (t.colors[v as usize], t.moved & (1 << v) != 0);
            }
            let items = &mut items[..class.len()];
            items.sort_unstable();
            for (&v, &(c, m)) in class.iter().zip(items.iter()) {
                t.colors[v as usize] = c;
                if m {
                    t.moved |= 1 << v;
                } else {
                    t.moved &= !(1 << v);
                }
            }
        }
        t
    }

    fn relabel_colors(&self, t: &mut GameState) {
        let k = self.k;
        let width = self.slots + 1;
        // profile[c * width + slot]: (unmoved count << 8) | moved count
        let mut profile = vec![0u16; (k + 1) * width];
        for v in 0..self.n {
            let c = t.colors[v] as usize;
            if c == 0 {
                continue;
            }
            let cell = &mut profile[c * width + self.slot_of[v] as usize];
            if t.moved & (1 << v) != 0 {
                *cell += 1;
            } else {
                *cell += 1 << 8;
            }
        }
        for c in 1..=k {
            profile[c * width + self.slots] = ((t.palette >> c) & 1) as u16;
        }
        let mut order: Vec<usize> = (1..=k).collect();
        order.sort_by(|&a, &b| profile[b * width..(b + 1) * width].cmp(&profile[a * width..(a + 1) * width]));
        let mut relabel = [0u8; 64];
        for (rank, &c) in order.iter().enumerate() {
            relabel[c] = rank as u8 + 1;
        }
        for v in 0..self.n {
            t.colors[v] = relabel[t.colors[v] as usize];
        }
        if t.palette != 0 {
            let mut p = 0u64;
            for c in 1..=k {
                if t.palette & (1 << c) != 0 {
                    p |= 1 << relabel[c];
                }
            }
            t.palette = p;
        }
    }
}

/// Applies a vertex permutation to a state.
pub fn permute(s: &GameState, p: &[u8]) -> GameState {
    let mut t = *s;
    t.moved = 0;
    for v in 0..s.n as usize {
        let img = p[v] as usize;
        t.colors[img] = s.colors[v];
        if s.moved & (1 << v) != 0 {
            t.moved |= 1 << img;
        }
    }
    t
}

fn compose(a: &[u8], b: &[u8]) -> Perm {
    // apply b, then a
    b.iter().map(|&x| a[x as usize]).collect()
}

/// Declared generators that move some vertex out of its twin class, and the
/// group they generate (or the generators alone when it is too large).
fn residual_group(g: &Graph, slot_of: &[u8]) -> GroupAction {
    let Some(sym) = g.symmetry() else {
        return GroupAction::Trivial;
    };
    let gens: Vec<Perm> = sym
        .generators
        .iter()
        .filter(|p| p.iter().enumerate().any(|(v, &img)| slot_of[v] != slot_of[img as usize]))
        .cloned()
        .collect();
    if gens.is_empty() {
        return GroupAction::Trivial;
    }
    let identity: Perm = (0..g.n() as u8).collect();
    let mut seen: FxHashSet<Perm> = FxHashSet::default();
    seen.insert(identity.clone());
    let mut queue = vec![identity.clone()];
    let mut elements = Vec::new();
    while let Some(x) = queue.pop() {
        for gen in &gens {
            let y = compose(gen, &x);
            if seen.insert(y.clone()) {
                if seen.len() > GROUP_ENUMERATION_CAP {
                    return GroupAction::HillDescent(gens);
                }
                elements.push(y.clone());
                queue.push(y);
            }
        }
    }
    elements.sort();
    GroupAction::Enumerated(elements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph;
    use crate::rules::Move;

    fn game(spec: &str, k: usize, variant: &str) -> Game {
        Game::new(graph::parse_graph_spec(spec).unwrap(), k, variant.parse().unwrap()).unwrap()
    }

    fn state(game: &Game, colors: &[u8], moved: u32, mover: Player) -> GameState {
        let mut s = game.initial_state();
        s.colors[..colors.len()].copy_from_slice(colors);
        s.moved = moved;
        s.mover = mover;
        s.round1 = colors.contains(&0);
        s
    }

    #[test]
    fn roundtrip_and_uncolored_digits() {
        let p3 = game("path:3", 3, "a");
        let layout = KeyLayout::new(&p3).unwrap();
        let s = state(&p3, &[2, 1, 2], 0b010, Player::Bob);
        assert_eq!(layout.decode(&layout.encode(&s)).unwrap(), s);
        let init = p3.initial_state();
        let key = layout.encode(&init);
        assert_eq!(key.0[0] & 0b11_1111, 0, "uncolored vertices are zero digits");
        assert_eq!(layout.decode(&key).unwrap(), init);
    }

    #[test]
    fn decode_rejects_garbage() {
        let p3 = game("path:3", 3, "a");
        let layout = KeyLayout::new(&p3).unwrap();
        assert!(layout.decode(&StateKey([u64::MAX, 0, 0, 0])).is_err());
        assert!(layout.decode(&StateKey([0, 0, 0, 1])).is_err());
        // color 3 at vertex 0 while round 1 says nothing moved
        assert!(layout.decode(&StateKey([0b11 | (1 << 9), 0, 0, 0])).is_err());
    }

    #[test]
    fn key_width_limit() {
        let big = Game::new(graph::complete(32).unwrap(), 33, VariantConfig::default()).unwrap();
        assert!(matches!(KeyLayout::new(&big), Err(Error::KeyTooWide { .. })));
    }

    #[test]
    fn color_relabel_first_seen() {
        let p3 = game("path:3", 3, "a");
        let only_colors = Canonicalizer::new(&p3, CanonicalizationPolicy { color_relabel: true, orbit_reduce: false }).unwrap();
        let s = state(&p3, &[2, 1, 2], 0, Player::Alice);
        assert_eq!(only_colors.canonicalize(&s).colors(), &[1, 2, 1]);
        let full = Canonicalizer::new(&p3, CanonicalizationPolicy::default()).unwrap();
        assert_eq!(full.canonicalize(&s).colors(), &[1, 2, 1]);
    }

    #[test]
    fn greedy_disables_color_relabel() {
        let g = game("path:3", 3, "greedy");
        let c = Canonicalizer::new(&g, CanonicalizationPolicy::default()).unwrap();
        assert!(!c.policy().color_relabel);
        assert_eq!(c.canonicalize(&state(&g, &[2, 1, 2], 0, Player::Alice)).colors(), &[2, 1, 2]);
        let ordered = game("path:3", 3, "ordered:r1");
        assert!(!Canonicalizer::new(&ordered, CanonicalizationPolicy::default()).unwrap().policy().orbit_reduce);
    }

    #[test]
    fn swapping_equal_leaves_gives_same_key() {
        let star = game("star:4", 4, "a");
        let c = Canonicalizer::new(&star, CanonicalizationPolicy::default()).unwrap();
        let a = state(&star, &[1, 3, 3, 2, 2], 0b00110, Player::Alice);
        let b = state(&star, &[1, 3, 2, 3, 2], 0b01010, Player::Alice);
        assert_eq!(c.canonical_key(&a), c.canonical_key(&b));
        let different = state(&star, &[1, 3, 3, 2, 2], 0b01100, Player::Alice);
        assert_ne!(c.canonical_key(&a), c.canonical_key(&different));
    }

    #[test]
    fn residual_groups() {
        let c6 = game("cycle:6", 3, "a");
        assert_eq!(Canonicalizer::new(&c6, CanonicalizationPolicy::default()).unwrap().residual_group_size(), 12);
        let k44 = game("biclique:4,4", 4, "a");
        assert_eq!(Canonicalizer::new(&k44, CanonicalizationPolicy::default()).unwrap().residual_group_size(), 2);
        let star = game("star:7", 6, "a");
        assert_eq!(Canonicalizer::new(&star, CanonicalizationPolicy::default()).unwrap().residual_group_size(), 1);
    }

    #[test]
    fn palette_is_relabeled_with_colors() {
        let g = game("path:3", 4, "game2");
        let c = Canonicalizer::new(&g, CanonicalizationPolicy::default()).unwrap();
        let mut s = state(&g, &[0, 3, 0], 0b010, Player::Bob);
        s.palette = (1 << 3) | (1 << 4);
        let t = c.canonicalize(&s);
        assert_eq!(t.colors(), &[0, 1, 0]);
        assert_eq!(t.palette, (1 << 1) | (1 << 2));
    }

    #[test]
    fn play_equivalence_of_canonical_forms() {
        // canonical successor sets agree for a state and its canonical form
        let g = game("cycle:5", 3, "a");
        let c = Canonicalizer::new(&g, CanonicalizationPolicy::default()).unwrap();
        let mut s = g.initial_state();
        for m in [Move { vertex: 3, color: 2 }, Move { vertex: 0, color: 3 }, Move { vertex: 1, color: 1 }] {
            s = g.apply_move(&s, m).unwrap();
        }
        let succ = |x: &GameState| {
            let mut keys: Vec<StateKey> =
                g.legal_moves(x).unwrap().into_iter().map(|m| c.canonical_key(&g.apply_unchecked(x, m))).collect();
            keys.sort();
            keys.dedup();
            keys
        };
        assert_eq!(succ(&s), succ(&c.canonicalize(&s)));
    }
}
