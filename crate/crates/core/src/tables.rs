//! Built-in table of expected game values.
//!
//! Each entry is a graph, a variant, what its value should be and a short
//! source note. Running the suite solves every entry and compares.

use std::collections::HashSet;
use std::time::Instant;

use serde::Serialize;

use crate::automorphism::canonical_code;
use crate::error::Result;
use crate::graph::{self, parse_graph_spec, Graph};
use crate::rules::{Player, VariantConfig};
use crate::solver::{chi_sweep, default_k_max, Outcome, SolveReport, SolverOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expectation {
    Chi { value: usize },
    ChiAtLeast { value: usize },
    ChiAtMost { value: usize },
    /// Winner of the single game with `k` colors.
    Winner { k: usize, winner: Player },
    /// Computed and reported, nothing asserted.
    Report,
}

impl std::fmt::Display for Expectation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expectation::Chi { value } => write!(f, "chi = {value}"),
            Expectation::ChiAtLeast { value } => write!(f, "chi >= {value}"),
            Expectation::ChiAtMost { value } => write!(f, "chi <= {value}"),
            Expectation::Winner { k, winner } => write!(f, "k={k}: {winner} wins"),
            Expectation::Report => write!(f, "(report only)"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TableEntry {
    pub graph: Graph,
    pub variant: VariantConfig,
    pub expect: Expectation,
    pub anchor: String,
    /// Allowed a long time budget; left out of the fast suite.
    pub slow: bool,
}

impl TableEntry {
    pub fn id(&self) -> String {
        match self.expect {
            Expectation::Winner { k, .. } => format!("{}/{}@k={k}", self.variant, self.graph.label()),
            _ => format!("{}/{}", self.variant, self.graph.label()),
        }
    }

    /// The color counts this entry solves.
    pub fn k_range(&self) -> (usize, usize) {
        let top = default_k_max(&self.graph);
        match self.expect {
            Expectation::Chi { value } => (1, top.max(value)),
            Expectation::ChiAtLeast { value } => (1, top.max(value)),
            Expectation::ChiAtMost { value } => (1, value),
            Expectation::Winner { k, .. } => (k, k),
            Expectation::Report => (1, top),
        }
    }

    pub fn check(&self, report: &SolveReport) -> bool {
        if report.any_aborted() {
            return false;
        }
        match self.expect {
            Expectation::Chi { value } => report.chi == Some(value),
            Expectation::ChiAtLeast { value } => report.chi.is_none_or(|c| c >= value),
            Expectation::ChiAtMost { value } => report.chi.is_some_and(|c| c <= value),
            Expectation::Winner { k, winner } => {
                report.rows.iter().any(|r| r.k == k && r.winner == Outcome::from(winner))
            }
            Expectation::Report => true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Paper,
    PaperFast,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "paper" => Ok(Suite::Paper),
            "paper-fast" => Ok(Suite::PaperFast),
            _ => Err(format!("unknown suite {s:?} (expected paper or paper-fast)")),
        }
    }
}

use Expectation::*;

const ALICE: Player = Player::Alice;
const BOB: Player = Player::Bob;

/// (graph spec, variant, expectation, note, slow)
const FIXED_ROWS: &[(&str, &str, Expectation, &str, bool)] = &[
    ("complete:1", "a", Chi { value: 2 }, "a lone vertex must change color every round", false),
    ("complete:2", "a", Chi { value: 3 }, "an edge needs one spare color", false),
    ("path:3", "a", Chi { value: 3 }, "the three-vertex path survives with three colors", false),
    ("path:4", "a", Chi { value: 4 }, "paths on at least four vertices need four colors", false),
    ("path:5", "a", Chi { value: 4 }, "paths on at least four vertices need four colors", false),
    ("path:6", "a", Chi { value: 4 }, "paths on at least four vertices need four colors", false),
    ("path:7", "a", Chi { value: 4 }, "paths on at least four vertices need four colors", false),
    ("cycle:3", "a", Chi { value: 4 }, "cycles reach max degree plus two", false),
    ("cycle:4", "a", Chi { value: 4 }, "cycles reach max degree plus two", false),
    ("cycle:5", "a", Chi { value: 4 }, "cycles reach max degree plus two", false),
    ("cycle:6", "a", Chi { value: 4 }, "cycles reach max degree plus two", false),
    ("cycle:7", "a", Chi { value: 4 }, "cycles reach max degree plus two", false),
    ("complete:3", "a", Chi { value: 4 }, "complete graphs need n+1", false),
    ("complete:4", "a", Chi { value: 5 }, "complete graphs need n+1", false),
    ("complete:5", "a", Chi { value: 6 }, "complete graphs need n+1", false),
    ("complete-minus-edge:3", "a", Chi { value: 4 }, "complete graphs minus an edge need n+1", false),
    ("complete-minus-edge:4", "a", Chi { value: 5 }, "complete graphs minus an edge need n+1", false),
    ("complete-minus-edge:5", "a", Chi { value: 6 }, "complete graphs minus an edge need n+1", false),
    ("star:3", "a", Chi { value: 4 }, "odd stars need ceil(n/2)+2", false),
    ("star:5", "a", Chi { value: 5 }, "odd stars need ceil(n/2)+2", false),
    ("star:7", "a", Chi { value: 6 }, "odd stars need ceil(n/2)+2", true),
    ("star:4", "a", Chi { value: 5 }, "even stars need n/2+3", false),
    ("star:6", "a", Chi { value: 6 }, "even stars need n/2+3", true),
    ("biclique:2,2", "a", Chi { value: 4 }, "the four-cycle as a biclique", false),
    ("biclique:2,3", "a", Chi { value: 4 }, "K2,3 needs four colors", false),
    ("biclique:3,3", "a", Chi { value: 4 }, "K3,3 needs four colors", false),
    ("biclique:4,4", "a", Chi { value: 4 }, "K4,4 needs four colors", true),
    ("biclique:2,4", "a", ChiAtLeast { value: 5 }, "K2,n needs at least n/2+3 for even n", false),
    ("biclique:2,5", "a", ChiAtLeast { value: 5 }, "K2,n lower bound for odd n", false),
    ("path:3", "b", Winner { k: 3, winner: BOB }, "Bob moving first breaks three colors on P3", false),
    ("path:3", "b-prime", Winner { k: 3, winner: BOB }, "Bob opening every round breaks three colors on P3", false),
    ("path:3", "b-prime", Chi { value: 4 }, "Bob opening every round forces a fourth color on P3", false),
    ("star:3", "game2", Chi { value: 3 }, "palette-restricted Bob on odd stars", false),
    ("star:4", "game2", Chi { value: 4 }, "palette-restricted Bob on even stars: n/2+2", false),
    ("star:5", "game2", Chi { value: 3 }, "palette-restricted Bob on odd stars", false),
    ("star:6", "game2", Chi { value: 5 }, "palette-restricted Bob on even stars: n/2+2", false),
    ("path:4", "game2", Chi { value: 4 }, "palette-restricted eternal value of P4 is twice the one-round value", false),
    ("path:4", "single-round:game2", Chi { value: 2 }, "one-round palette game on P4", false),
    ("star:3", "greedy", Chi { value: 3 }, "greedy Bob on odd stars", false),
    ("star:5", "greedy", Chi { value: 3 }, "greedy Bob on odd stars", false),
    ("star:4", "greedy", Chi { value: 4 }, "greedy Bob on even stars", false),
    ("star:6", "greedy", Chi { value: 4 }, "greedy Bob on even stars", false),
    ("star:3", "very-greedy", Chi { value: 3 }, "both greedy on odd stars", false),
    ("star:5", "very-greedy", Chi { value: 3 }, "both greedy on odd stars", false),
    ("star:4", "very-greedy", Chi { value: 4 }, "both greedy on even stars", false),
    ("star:6", "very-greedy", Chi { value: 4 }, "both greedy on even stars", false),
    ("star:2", "single-round:free", Chi { value: 2 }, "one-round game on stars needs two colors", false),
    ("star:3", "single-round:free", Chi { value: 2 }, "one-round game on stars needs two colors", false),
    ("star:4", "single-round:free", Chi { value: 2 }, "one-round game on stars needs two colors", false),
    ("star:5", "single-round:free", Chi { value: 2 }, "one-round game on stars needs two colors", false),
    ("star:6", "single-round:free", Chi { value: 2 }, "one-round game on stars needs two colors", false),
    ("cycle:5", "strong", Winner { k: 3, winner: ALICE }, "strong rule lets three colors last on C5", false),
    ("cycle:5", "a", Winner { k: 3, winner: BOB }, "standard rule: three colors fail on C5", false),
    ("grid:2,3", "a", Report, "small grid, value reported only", false),
];

fn fixed_entries() -> Vec<TableEntry> {
    FIXED_ROWS
        .iter()
        .map(|&(spec, variant, expect, anchor, slow)| TableEntry {
            graph: parse_graph_spec(spec).expect("built-in graph spec"),
            variant: variant.parse().expect("built-in variant"),
            expect,
            anchor: anchor.to_string(),
            slow,
        })
        .collect()
}

/// Trees on at most `max_n` vertices, one per isomorphism class.
pub fn trees(max_n: usize) -> Result<Vec<Graph>> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        out.extend(graph::enumerate_connected_graphs(n)?.into_iter().filter(|g| g.edge_count() + 1 == g.n()));
    }
    Ok(out)
}

/// Caterpillars on at most `max_n` vertices, one per isomorphism class.
/// Spines run between leaf-carrying end vertices, so every caterpillar
/// shows up with its longest path as spine.
pub fn caterpillars(max_n: usize) -> Result<Vec<Graph>> {
    fn extend(spine: &mut Vec<usize>, budget: usize, out: &mut Vec<Vec<usize>>) {
        out.push(spine.clone());
        if budget == 0 {
            return;
        }
        for l in 0..budget {
            spine.push(l);
            extend(spine, budget - l - 1, out);
            spine.pop();
        }
    }
    let mut shapes = Vec::new();
    for first in 0..max_n {
        extend(&mut vec![first], max_n - first - 1, &mut shapes);
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for leaves in shapes {
        let g = graph::caterpillar(&leaves)?;
        if seen.insert((g.n(), canonical_code(g.n(), g.adjacency()))) {
            out.push(g);
        }
    }
    out.sort_by_key(|g| (g.n(), g.label().to_string()));
    Ok(out)
}

/// Every entry of the built-in suite.
pub fn paper_table() -> Result<Vec<TableEntry>> {
    let mut entries = fixed_entries();
    for tree in trees(7)? {
        for variant in ["single-round:game2", "single-round:very-greedy"] {
            entries.push(TableEntry {
                graph: tree.clone(),
                variant: variant.parse()?,
                expect: ChiAtMost { value: 3 },
                anchor: "one-round palette and very greedy games on trees need at most three colors".into(),
                slow: false,
            });
        }
    }
    for cat in caterpillars(8)? {
        entries.push(TableEntry {
            graph: cat,
            variant: VariantConfig::very_greedy(),
            expect: ChiAtMost { value: 6 },
            anchor: "very greedy game on caterpillars needs at most six colors".into(),
            slow: false,
        });
    }
    Ok(entries)
}

pub fn suite_entries(suite: Suite) -> Result<Vec<TableEntry>> {
    let all = paper_table()?;
    Ok(match suite {
        Suite::Paper => all,
        Suite::PaperFast => all.into_iter().filter(|e| !e.slow).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub id: String,
    pub graph: String,
    pub variant: String,
    pub expected: String,
    pub anchor: String,
    pub chi: Option<usize>,
    /// One letter per solved `k` from `k_min`: A, B, or ? when aborted.
    pub profile: String,
    pub k_min: usize,
    pub states: usize,
    pub pass: bool,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub ms: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TablesReport {
    pub rows: Vec<TableRow>,
    pub passed: usize,
    pub failed: usize,
}

impl TablesReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &TableRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

pub fn run_entry(entry: &TableEntry, opts: &SolverOptions) -> Result<(TableRow, SolveReport)> {
    let start = Instant::now();
    let (lo, hi) = entry.k_range();
    let report = chi_sweep(&entry.graph, &entry.variant, lo, hi, opts)?;
    let profile = report
        .rows
        .iter()
        .map(|r| match r.winner {
            Outcome::Alice => 'A',
            Outcome::Bob => 'B',
            Outcome::Aborted => '?',
        })
        .collect();
    let row = TableRow {
        id: entry.id(),
        graph: entry.graph.label().to_string(),
        variant: entry.variant.to_string(),
        expected: entry.expect.to_string(),
        anchor: entry.anchor.clone(),
        chi: report.chi,
        profile,
        k_min: lo,
        states: report.rows.iter().map(|r| r.states).sum(),
        pass: entry.check(&report),
        warnings: report.warnings(),
        ms: start.elapsed().as_millis() as u64,
    };
    Ok((row, report))
}

pub fn run_suite(entries: &[TableEntry], opts: &SolverOptions, mut progress: impl FnMut(&TableRow)) -> Result<TablesReport> {
    let mut rows = Vec::with_capacity(entries.len());
    for entry in entries {
        let (row, _) = run_entry(entry, opts)?;
        progress(&row);
        rows.push(row);
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    let failed = rows.len() - passed;
    Ok(TablesReport { rows, passed, failed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_counts() {
        assert_eq!(trees(7).unwrap().len(), 1 + 1 + 1 + 2 + 3 + 6 + 11);
        // Caterpillars on n vertices: 1,1,1,2,3,6,10,18 for n = 1..=8.
        let cats = caterpillars(8).unwrap();
        let per_n: Vec<usize> = (1..=8).map(|n| cats.iter().filter(|g| g.n() == n).count()).collect();
        assert_eq!(per_n, vec![1, 1, 1, 2, 3, 6, 10, 20]);
    }

    #[test]
    fn table_parses_and_ids_are_unique() {
        let entries = paper_table().unwrap();
        let ids: HashSet<String> = entries.iter().map(|e| e.id()).collect();
        assert_eq!(ids.len(), entries.len());
        assert!(suite_entries(Suite::PaperFast).unwrap().len() < entries.len());
    }

    #[test]
    fn entry_checks() {
        let opts = SolverOptions::default();
        let e = &fixed_entries()[3];
        assert_eq!(e.graph.label(), "path:4");
        let (row, _) = run_entry(e, &opts).unwrap();
        assert!(row.pass);
        assert_eq!(row.profile, "BBBA");
        assert_eq!(row.chi, Some(4));
    }
}
