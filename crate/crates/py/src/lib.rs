//! Python bindings: graphs, games, solving and chi sweeps.

use ecs_core::graph::{self as core_graph};
use ecs_core::rules::{mask_to_colors, mask_to_vertices};
use ecs_core::solver::{chi_sweep, default_k_max, Outcome};
use ecs_core::{oracle, CanonicalizationPolicy, Error, GameState, Move, Player, SolverOptions, StateStatus, TerminalStatus};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(ecs, BudgetExceeded, PyException);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::BudgetExceeded { .. } => BudgetExceeded::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn player_name(p: Player) -> &'static str {
    match p {
        Player::Alice => "Alice",
        Player::Bob => "Bob",
    }
}

fn options(budget: Option<usize>, orbit: bool, color_canon: bool) -> SolverOptions {
    SolverOptions {
        policy: CanonicalizationPolicy { color_relabel: color_canon, orbit_reduce: orbit },
        budget: budget.unwrap_or(ecs_core::solver::DEFAULT_BUDGET),
    }
}

#[pyclass(frozen)]
struct Graph(ecs_core::Graph);

#[pymethods]
impl Graph {
    /// Parses a spec such as `path:4`, `star:5` or `file:edges.txt`.
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        ecs_core::parse_graph_spec(spec).map(Graph).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn label(&self) -> &str {
        self.0.label()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges()
    }

    fn max_degree(&self) -> usize {
        core_graph::max_degree(&self.0)
    }

    fn chromatic_number(&self) -> usize {
        core_graph::chromatic_number(&self.0)
    }

    fn coloring_number(&self) -> usize {
        core_graph::coloring_number(&self.0)
    }

    fn orbits(&self) -> Vec<Vec<usize>> {
        core_graph::vertex_orbits(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("Graph({:?})", self.0.label())
    }
}

/// A position; immutable from Python.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct State(GameState);

#[pymethods]
impl State {
    #[getter]
    fn colors(&self) -> Vec<u32> {
        self.0.colors().iter().map(|&c| c as u32).collect()
    }

    #[getter]
    fn moved(&self) -> Vec<usize> {
        mask_to_vertices(self.0.moved)
    }

    #[getter]
    fn mover(&self) -> &'static str {
        player_name(self.0.mover)
    }

    #[getter]
    fn round1(&self) -> bool {
        self.0.round1
    }

    fn __repr__(&self) -> String {
        format!("State({})", self.0)
    }

    fn __eq__(&self, other: &State) -> bool {
        self.0 == other.0
    }
}

#[pyclass(frozen)]
struct Game(ecs_core::Game);

#[pymethods]
impl Game {
    #[new]
    #[pyo3(signature = (graph, k, variant = "a"))]
    fn new(graph: &Graph, k: usize, variant: &str) -> PyResult<Self> {
        let cfg = variant.parse().map_err(to_py)?;
        ecs_core::Game::new(graph.0.clone(), k, cfg).map(Game).map_err(to_py)
    }

    #[getter]
    fn variant(&self) -> String {
        self.0.config().to_string()
    }

    fn initial_state(&self) -> State {
        State(self.0.initial_state())
    }

    /// Legal `(vertex, color)` pairs; empty at terminal states.
    fn legal_moves(&self, s: &State) -> Vec<(usize, u8)> {
        self.0.legal_moves(&s.0).unwrap_or_default().into_iter().map(|m| (m.vertex, m.color)).collect()
    }

    fn legal_colors(&self, s: &State, vertex: usize) -> PyResult<Vec<u32>> {
        let mask = self.0.legal_colors(&s.0, vertex, s.0.mover).map_err(to_py)?;
        Ok(mask_to_colors(mask).into_iter().map(u32::from).collect())
    }

    fn play(&self, s: &State, vertex: usize, color: u8) -> PyResult<State> {
        self.0.apply_move(&s.0, Move { vertex, color }).map(State).map_err(to_py)
    }

    /// `"ongoing"`, `"bob_wins"` or `"alice_wins_round"`.
    fn status(&self, s: &State) -> &'static str {
        match self.0.terminal_status(&s.0) {
            TerminalStatus::Ongoing => "ongoing",
            TerminalStatus::BobWins(_) => "bob_wins",
            TerminalStatus::AliceWinsRound => "alice_wins_round",
        }
    }

    fn stuck_vertices(&self, s: &State) -> Vec<usize> {
        mask_to_vertices(self.0.stuck_vertices(&s.0))
    }

    /// Solves the game; the result answers queries about any reachable state.
    #[pyo3(signature = (budget = None, orbit = true, color_canon = true))]
    fn solve(&self, py: Python<'_>, budget: Option<usize>, orbit: bool, color_canon: bool) -> PyResult<Solution> {
        let opts = options(budget, orbit, color_canon);
        let game = self.0.clone();
        py.detach(move || ecs_core::solve(&game, &opts)).map(Solution).map_err(to_py)
    }

    /// Winner by the unreduced reference solver.
    #[pyo3(signature = (budget = oracle::ORACLE_BUDGET))]
    fn oracle_winner(&self, py: Python<'_>, budget: usize) -> PyResult<&'static str> {
        let game = self.0.clone();
        py.detach(move || oracle::naive_value(&game, budget)).map(player_name).map_err(to_py)
    }
}

#[pyclass(frozen)]
struct Solution(ecs_core::Solved);

#[pymethods]
impl Solution {
    #[getter]
    fn winner(&self) -> &'static str {
        player_name(self.0.winner())
    }

    #[getter]
    fn states(&self) -> usize {
        self.0.stats.states
    }

    #[getter]
    fn attractor(&self) -> usize {
        self.0.stats.attractor
    }

    /// `("alice_safe", None)` or `("bob_attracted", rank)`.
    fn status(&self, s: &State) -> PyResult<(&'static str, Option<u32>)> {
        Ok(match self.0.status_of(&s.0).map_err(to_py)? {
            StateStatus::AliceSafe => ("alice_safe", None),
            StateStatus::BobAttracted { rank } => ("bob_attracted", Some(rank)),
        })
    }

    fn best_move(&self, s: &State) -> PyResult<(usize, u8)> {
        self.0.best_move(&s.0).map(|m| (m.vertex, m.color)).map_err(to_py)
    }

    /// Number of states whose status disagrees with their successors.
    fn verify(&self) -> usize {
        self.0.verify()
    }
}

/// Sweeps `k` and returns a dict with `chi`, `rows` and `warnings`.
#[pyfunction]
#[pyo3(signature = (graph, variant = "a", k_min = 1, k_max = None, budget = None, orbit = true, color_canon = true))]
#[allow(clippy::too_many_arguments)]
fn chi<'py>(
    py: Python<'py>,
    graph: &Graph,
    variant: &str,
    k_min: usize,
    k_max: Option<usize>,
    budget: Option<usize>,
    orbit: bool,
    color_canon: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = variant.parse().map_err(to_py)?;
    let g = graph.0.clone();
    let k_max = k_max.unwrap_or_else(|| default_k_max(&g));
    let opts = options(budget, orbit, color_canon);
    let report = py.detach(move || chi_sweep(&g, &cfg, k_min, k_max, &opts)).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("graph", &report.graph)?;
    out.set_item("variant", &report.variant)?;
    out.set_item("chi", report.chi)?;
    out.set_item("warnings", report.warnings())?;
    let rows = report
        .rows
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("k", r.k)?;
            d.set_item(
                "winner",
                match r.winner {
                    Outcome::Alice => "Alice",
                    Outcome::Bob => "Bob",
                    Outcome::Aborted => "aborted",
                },
            )?;
            d.set_item("states", r.states)?;
            d.set_item("attractor", r.attractor)?;
            d.set_item("iters", r.iters)?;
            d.set_item("ms", r.ms)?;
            Ok(d)
        })
        .collect::<PyResult<Vec<_>>>()?;
    out.set_item("rows", rows)?;
    Ok(out)
}

/// One representative per isomorphism class of connected graphs on `n`
/// vertices (`1 <= n <= 7`).
#[pyfunction]
fn connected_graphs(n: usize) -> PyResult<Vec<Graph>> {
    core_graph::enumerate_connected_graphs(n).map(|gs| gs.into_iter().map(Graph).collect()).map_err(to_py)
}

#[pymodule]
fn ecs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_class::<Game>()?;
    m.add_class::<State>()?;
    m.add_class::<Solution>()?;
    m.add_function(wrap_pyfunction!(chi, m)?)?;
    m.add_function(wrap_pyfunction!(connected_graphs, m)?)?;
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    Ok(())
}
