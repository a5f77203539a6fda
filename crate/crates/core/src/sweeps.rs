//! Exhaustive sweeps over small connected graphs.
//!
//! These only ever report what they find: a relation holding on every graph
//! up to some size is "no counterexample found", not a proof.

use std::collections::HashMap;

use serde::Serialize;

use crate::automorphism::canonical_code;
use crate::error::{Error, Result};
use crate::graph::{self, enumerate_connected_graphs, max_degree, Graph};
use crate::rules::{Game, Player, VariantConfig};
use crate::solver::{alice_wins, SolverOptions};

/// A game value found by sweeping `k` upwards from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "k")]
pub enum ChiValue {
    Value(usize),
    /// Bob wins every `k` up to the sweep ceiling.
    AboveRange(usize),
    /// The state budget ran out at this `k`.
    Aborted(usize),
}

impl ChiValue {
    pub fn value(self) -> Option<usize> {
        match self {
            ChiValue::Value(k) => Some(k),
            _ => None,
        }
    }
}

impl std::fmt::Display for ChiValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChiValue::Value(k) => write!(f, "{k}"),
            ChiValue::AboveRange(k) => write!(f, ">{k}"),
            ChiValue::Aborted(k) => write!(f, "aborted at k={k}"),
        }
    }
}

/// Smallest `k <= k_max` that Alice wins.
pub fn min_winning_k(g: &Graph, cfg: &VariantConfig, k_max: usize, opts: &SolverOptions) -> Result<ChiValue> {
    for k in 1..=k_max {
        let game = Game::new(g.clone(), k, cfg.clone())?;
        match alice_wins(&game, opts) {
            Ok((Player::Alice, _)) => return Ok(ChiValue::Value(k)),
            Ok((Player::Bob, _)) => {}
            Err(Error::BudgetExceeded { .. }) => return Ok(ChiValue::Aborted(k)),
            Err(e) => return Err(e),
        }
    }
    Ok(ChiValue::AboveRange(k_max))
}

/// Values are cached per (graph label, variant).
pub struct ValueCache<'a> {
    opts: &'a SolverOptions,
    values: HashMap<(String, String), ChiValue>,
}

impl<'a> ValueCache<'a> {
    pub fn new(opts: &'a SolverOptions) -> Self {
        ValueCache { opts, values: HashMap::new() }
    }

    pub fn get(&mut self, g: &Graph, cfg: &VariantConfig) -> Result<ChiValue> {
        let key = (g.label().to_string(), cfg.to_string());
        if let Some(&v) = self.values.get(&key) {
            return Ok(v);
        }
        let v = min_winning_k(g, cfg, max_degree(g) + 2, self.opts)?;
        self.values.insert(key, v);
        Ok(v)
    }
}

pub fn connected_graphs_up_to(max_n: usize) -> Result<Vec<Graph>> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        out.extend(enumerate_connected_graphs(n)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct LowValueReport {
    pub max_n: usize,
    pub checked: usize,
    /// Graphs Alice wins with at most three colors.
    pub low: Vec<String>,
    /// Low graphs other than K1, K2 and P3.
    pub unexpected: Vec<String>,
    pub aborted: Vec<String>,
}

impl LowValueReport {
    pub fn pass(&self) -> bool {
        self.unexpected.is_empty() && self.aborted.is_empty() && self.low.len() == 3.min(self.max_n)
    }
}

/// Which connected graphs on at most `max_n` vertices have A-game value at
/// most 3. Only K1, K2 and P3 are expected.
pub fn low_value_sweep(max_n: usize, opts: &SolverOptions) -> Result<LowValueReport> {
    let expected: Vec<(usize, u64)> = [graph::complete(1)?, graph::complete(2)?, graph::path(3)?]
        .iter()
        .map(|g| (g.n(), canonical_code(g.n(), g.adjacency())))
        .collect();
    let cfg = VariantConfig::a_game();
    let mut report = LowValueReport { max_n, checked: 0, low: vec![], unexpected: vec![], aborted: vec![] };
    for g in connected_graphs_up_to(max_n)? {
        report.checked += 1;
        match min_winning_k(&g, &cfg, 3, opts)? {
            ChiValue::Value(_) => {
                report.low.push(g.label().to_string());
                if !expected.contains(&(g.n(), canonical_code(g.n(), g.adjacency()))) {
                    report.unexpected.push(g.label().to_string());
                }
            }
            ChiValue::AboveRange(_) => {}
            ChiValue::Aborted(_) => report.aborted.push(g.label().to_string()),
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Less,
    LessEq,
    Equal,
}

impl Relation {
    /// `None` when either side is unresolved.
    fn holds(self, left: ChiValue, right: ChiValue) -> Option<bool> {
        let (l, r) = match (left, right) {
            (ChiValue::Value(l), ChiValue::Value(r)) => (l, r),
            // Above the ceiling on one side only still decides < and <=.
            (ChiValue::Value(_), ChiValue::AboveRange(_)) => return Some(self != Relation::Equal),
            (ChiValue::AboveRange(_), ChiValue::Value(_)) => return Some(false),
            _ => return None,
        };
        Some(match self {
            Relation::Less => l < r,
            Relation::LessEq => l <= r,
            Relation::Equal => l == r,
        })
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Less => "<",
            Relation::LessEq => "<=",
            Relation::Equal => "=",
        }
    }
}

/// A relation between two game values, checked graph by graph.
#[derive(Clone, Debug, Serialize)]
pub struct PairCheck {
    pub name: &'static str,
    pub left: String,
    pub right: String,
    pub relation: Relation,
}

impl PairCheck {
    pub fn new(name: &'static str, left: &str, relation: Relation, right: &str) -> Self {
        PairCheck { name, left: left.into(), right: right.into(), relation }
    }

    pub fn statement(&self) -> String {
        format!("value[{}] {} value[{}]", self.left, self.relation.symbol(), self.right)
    }
}

/// The open relations between variants, in sweep order.
pub fn conjectures() -> Vec<PairCheck> {
    vec![
        PairCheck::new("one-round-below-eternal", "single-round:free", Relation::Less, "a"),
        PairCheck::new("very-greedy-gap", "single-round:very-greedy", Relation::Less, "very-greedy"),
        PairCheck::new("greedy-gap", "single-round:greedy", Relation::Less, "greedy"),
        PairCheck::new("palette-gap", "single-round:game2", Relation::Less, "game2"),
        PairCheck::new("very-greedy-vs-palette", "very-greedy", Relation::LessEq, "game2"),
        PairCheck::new("greedy-vs-very-greedy", "greedy", Relation::Equal, "very-greedy"),
    ]
}

/// Relations that hold for every graph by definition.
pub fn inequalities() -> Vec<PairCheck> {
    vec![
        PairCheck::new("one-round-at-most-eternal", "single-round:free", Relation::LessEq, "a"),
        PairCheck::new("greedy-at-most-very-greedy", "greedy", Relation::LessEq, "very-greedy"),
        PairCheck::new("greedy-at-most-palette", "greedy", Relation::LessEq, "game2"),
        PairCheck::new("palette-at-most-free", "game2", Relation::LessEq, "a"),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub graph: String,
    pub left: ChiValue,
    pub right: ChiValue,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub name: &'static str,
    pub statement: String,
    pub checked: usize,
    pub violations: Vec<Violation>,
    /// Graphs where a side aborted or both ran past the ceiling.
    pub unresolved: Vec<String>,
}

impl PairReport {
    pub fn summary(&self, max_n: usize) -> String {
        if self.violations.is_empty() {
            format!("{}: {}: no counterexample found up to n={max_n} ({} graphs, {} unresolved)", self.name, self.statement, self.checked, self.unresolved.len())
        } else {
            format!("{}: {}: {} counterexample(s) up to n={max_n}", self.name, self.statement, self.violations.len())
        }
    }
}

pub fn check_pair(check: &PairCheck, graphs: &[Graph], cache: &mut ValueCache) -> Result<PairReport> {
    let left: VariantConfig = check.left.parse()?;
    let right: VariantConfig = check.right.parse()?;
    let mut report =
        PairReport { name: check.name, statement: check.statement(), checked: 0, violations: vec![], unresolved: vec![] };
    for g in graphs {
        let (l, r) = (cache.get(g, &left)?, cache.get(g, &right)?);
        report.checked += 1;
        match check.relation.holds(l, r) {
            Some(true) => {}
            Some(false) => report.violations.push(Violation { graph: g.label().to_string(), left: l, right: r }),
            None => report.unresolved.push(g.label().to_string()),
        }
    }
    Ok(report)
}

/// Graphs whose A-game value exceeds max degree plus two.
pub fn degree_bound_violations(graphs: &[Graph], cache: &mut ValueCache) -> Result<Vec<String>> {
    let cfg = VariantConfig::a_game();
    let mut out = Vec::new();
    for g in graphs {
        if cache.get(g, &cfg)?.value().is_none() {
            out.push(g.label().to_string());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct HereditaryPair {
    pub n: usize,
    pub star: ChiValue,
    pub biclique: ChiValue,
    /// The star, an induced subgraph, needs more colors than the biclique.
    pub witness: bool,
}

/// Compares K_{1,n} with K_{n,n} for `n` in `2..=max_n`.
pub fn hereditary_pairs(max_n: usize, cache: &mut ValueCache) -> Result<Vec<HereditaryPair>> {
    let cfg = VariantConfig::a_game();
    let mut out = Vec::new();
    for n in 2..=max_n {
        let star = cache.get(&graph::star(n)?, &cfg)?;
        let biclique = cache.get(&graph::biclique(n, n)?, &cfg)?;
        let witness = match (star, biclique) {
            (ChiValue::Value(s), ChiValue::Value(b)) => s > b,
            (ChiValue::AboveRange(_), ChiValue::Value(_)) => true,
            _ => false,
        };
        out.push(HereditaryPair { n, star, biclique, witness });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_values_up_to_four() {
        let r = low_value_sweep(4, &SolverOptions::default()).unwrap();
        assert_eq!(r.checked, 1 + 1 + 2 + 6);
        assert_eq!(r.low.len(), 3);
        assert!(r.pass(), "{r:?}");
    }

    #[test]
    fn relation_semantics() {
        use ChiValue::*;
        assert_eq!(Relation::Less.holds(Value(2), Value(3)), Some(true));
        assert_eq!(Relation::Less.holds(Value(3), Value(3)), Some(false));
        assert_eq!(Relation::LessEq.holds(Value(3), AboveRange(5)), Some(true));
        assert_eq!(Relation::Equal.holds(Value(3), AboveRange(5)), Some(false));
        assert_eq!(Relation::Less.holds(Aborted(2), Value(3)), None);
    }

    #[test]
    fn small_conjecture_sweep() {
        let opts = SolverOptions::default();
        let mut cache = ValueCache::new(&opts);
        let graphs = connected_graphs_up_to(4).unwrap();
        for check in conjectures().iter().take(1).chain(inequalities().iter()) {
            let r = check_pair(check, &graphs, &mut cache).unwrap();
            assert!(r.violations.is_empty(), "{}", r.summary(4));
        }
        assert!(degree_bound_violations(&graphs, &mut cache).unwrap().is_empty());
    }

    #[test]
    fn star_inside_biclique() {
        let opts = SolverOptions::default();
        let mut cache = ValueCache::new(&opts);
        let pairs = hereditary_pairs(6, &mut cache).unwrap();
        assert_eq!(pairs.len(), 5);
        assert!(pairs.last().unwrap().witness);
    }
}
