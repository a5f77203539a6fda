//! Text and JSON rendering of command results. Every JSON document carries
//! `"schema": 1`.

use std::fmt::Write;

use ecs_core::solver::{Outcome, SolveReport, Solved};
use ecs_core::sweeps::{HereditaryPair, LowValueReport, PairReport};
use ecs_core::tables::TablesReport;
use serde_json::{json, Value};

pub const SCHEMA: u32 = 1;

pub fn chi_json(r: &SolveReport) -> Value {
    json!({
        "schema": SCHEMA,
        "graph": r.graph,
        "variant": r.variant,
        "rows": r.rows,
        "chi": r.chi,
        "warnings": r.warnings(),
    })
}

fn outcome(o: Outcome) -> &'static str {
    match o {
        Outcome::Alice => "Alice",
        Outcome::Bob => "Bob",
        Outcome::Aborted => "aborted",
    }
}

pub fn chi_text(r: &SolveReport) -> String {
    let mut out = format!("graph {}  variant {}\n", r.graph, r.variant);
    let _ = writeln!(out, "{:>3}  {:<8} {:>12} {:>12} {:>6} {:>9}", "k", "winner", "states", "attractor", "iters", "ms");
    for row in &r.rows {
        let _ = writeln!(
            out,
            "{:>3}  {:<8} {:>12} {:>12} {:>6} {:>9}",
            row.k,
            outcome(row.winner),
            row.states,
            row.attractor,
            row.iters,
            row.ms
        );
    }
    match r.chi {
        Some(c) => {
            let _ = writeln!(out, "chi={c}");
        }
        None => out.push_str("chi: none in range\n"),
    }
    for w in r.warnings() {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

pub fn solve_json(s: &Solved, violations: usize) -> Value {
    let game = s.game();
    json!({
        "schema": SCHEMA,
        "graph": game.graph().label(),
        "variant": game.config().to_string(),
        "k": game.k(),
        "winner": s.winner(),
        "initial": s.initial_status(),
        "states": s.stats.states,
        "transitions": s.stats.transitions,
        "terminals": s.stats.terminals,
        "attractor": s.stats.attractor,
        "iters": s.stats.iterations,
        "ms": s.stats.elapsed.as_millis() as u64,
        "violations": violations,
    })
}

pub fn solve_text(s: &Solved, violations: usize) -> String {
    let game = s.game();
    let initial = match s.initial_status() {
        ecs_core::StateStatus::AliceSafe => "Alice safe".to_string(),
        ecs_core::StateStatus::BobAttracted { rank } => format!("Bob wins within {rank} moves"),
    };
    format!(
        "graph {}  variant {}  k={}\nwinner {}  ({initial})\nstates {}  transitions {}  terminals {}  attractor {}  iters {}  {} ms\nfixpoint violations {violations}\n",
        game.graph().label(),
        game.config(),
        game.k(),
        s.winner(),
        s.stats.states,
        s.stats.transitions,
        s.stats.terminals,
        s.stats.attractor,
        s.stats.iterations,
        s.stats.elapsed.as_millis(),
    )
}

pub fn tables_json(suite: &str, r: &TablesReport) -> Value {
    json!({
        "schema": SCHEMA,
        "suite": suite,
        "rows": r.rows,
        "passed": r.passed,
        "failed": r.failed,
    })
}

pub fn tables_text(r: &TablesReport) -> String {
    let mut out = String::new();
    let width = r.rows.iter().map(|row| row.id.len()).max().unwrap_or(0);
    for row in &r.rows {
        let computed = row.chi.map_or("none".to_string(), |c| c.to_string());
        let _ = writeln!(
            out,
            "{}  {:<width$}  expected {:<14} computed chi {:<5} profile {:<9} {:>7} ms",
            if row.pass { "ok  " } else { "FAIL" },
            row.id,
            row.expected,
            computed,
            row.profile,
            row.ms,
        );
    }
    if r.failed > 0 {
        out.push_str("\nmismatches:\n");
        for row in r.mismatches() {
            let _ = writeln!(
                out,
                "- {}\n+ {}: chi={} (profile {} from k={}){}",
                row.id,
                row.expected,
                row.chi.map_or("none".to_string(), |c| c.to_string()),
                row.profile,
                row.k_min,
                if row.warnings.is_empty() { String::new() } else { format!("; {}", row.warnings.join("; ")) },
            );
        }
    }
    let _ = writeln!(out, "{} passed, {} failed", r.passed, r.failed);
    out
}

pub struct ConjectureResults {
    pub max_n: usize,
    pub low_values: Option<LowValueReport>,
    pub pairs: Vec<PairReport>,
    pub hereditary: Option<Vec<HereditaryPair>>,
}

pub fn conjectures_json(r: &ConjectureResults) -> Value {
    json!({
        "schema": SCHEMA,
        "max_n": r.max_n,
        "low_values": r.low_values,
        "pairs": r.pairs,
        "hereditary": r.hereditary,
    })
}

pub fn conjectures_text(r: &ConjectureResults) -> String {
    let mut out = String::new();
    if let Some(low) = &r.low_values {
        let _ = writeln!(
            out,
            "low-values: connected graphs with value <= 3 up to n={}: {} of {} ({})",
            low.max_n,
            low.low.len(),
            low.checked,
            low.low.join(", ")
        );
        if low.unexpected.is_empty() {
            out.push_str("low-values: no graphs beyond K1, K2, P3\n");
        } else {
            let _ = writeln!(out, "low-values: unexpected: {}", low.unexpected.join(", "));
        }
        if !low.aborted.is_empty() {
            let _ = writeln!(out, "low-values: aborted: {}", low.aborted.join(", "));
        }
    }
    for p in &r.pairs {
        let _ = writeln!(out, "{}", p.summary(r.max_n));
        for v in &p.violations {
            let _ = writeln!(out, "  {}: {} vs {}", v.graph, v.left, v.right);
        }
        if !p.unresolved.is_empty() {
            let _ = writeln!(out, "  unresolved: {}", p.unresolved.join(", "));
        }
    }
    if let Some(pairs) = &r.hereditary {
        for h in pairs {
            let _ = writeln!(
                out,
                "hereditary: K1,{n} value {} inside K{n},{n} value {}{}",
                h.star,
                h.biclique,
                if h.witness { "  <- subgraph needs more colors" } else { "" },
                n = h.n
            );
        }
    }
    out
}
