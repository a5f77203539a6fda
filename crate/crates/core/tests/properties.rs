use ecs_core::graph::{self, attach_searched_symmetry, chromatic_number, coloring_number, max_degree, Graph};
use ecs_core::state::{Canonicalizer, KeyLayout};
use ecs_core::{CanonicalizationPolicy, Game, GameState, VariantConfig};
use proptest::prelude::*;

const VARIANTS: &[&str] = &[
    "a",
    "b",
    "a-prime",
    "b-prime",
    "game2",
    "game2+palette=current",
    "greedy",
    "very-greedy",
    "strong",
    "single-round:free",
    "ordered:r1",
];

/// A random connected graph: a random spanning tree plus random extra edges.
fn connected_graph() -> impl Strategy<Value = Graph> {
    (2usize..=6).prop_flat_map(|n| {
        let parents = (1..n).map(|i| 0..i).collect::<Vec<_>>();
        (Just(n), parents, proptest::collection::vec(any::<bool>(), n * (n - 1) / 2))
    })
    .prop_map(|(n, parents, extra)| {
        let mut edges: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
        let mut bit = 0;
        for u in 0..n {
            for v in u + 1..n {
                if extra[bit] && !edges.contains(&(u, v)) {
                    edges.push((u, v));
                }
                bit += 1;
            }
        }
        attach_searched_symmetry(Graph::from_edges(n, &edges, graph::edges_label(n, &edges)).unwrap())
    })
}

fn instance() -> impl Strategy<Value = (Game, Vec<usize>)> {
    (connected_graph(), 1usize..=4, 0..VARIANTS.len(), proptest::collection::vec(any::<usize>(), 0..40)).prop_map(
        |(g, k, v, picks)| {
            let cfg: VariantConfig = VARIANTS[v].parse().unwrap();
            (Game::new(g, k, cfg).unwrap(), picks)
        },
    )
}

/// Plays the picked moves until the game ends; returns every visited state.
fn play(game: &Game, picks: &[usize]) -> Vec<GameState> {
    let mut s = game.initial_state();
    let mut seen = vec![s];
    for &p in picks {
        let Ok(moves) = game.legal_moves(&s) else { break };
        s = game.apply_move(&s, moves[p % moves.len()]).unwrap();
        seen.push(s);
    }
    seen
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn play_keeps_invariants((game, picks) in instance()) {
        let states = play(&game, &picks);
        for w in states.windows(2) {
            game.check_invariants(&w[1]).map_err(TestCaseError::fail)?;
            if game.config().tracks_palette() {
                prop_assert_eq!(w[0].palette & w[1].palette, w[0].palette, "palette shrank");
            }
            let rolled = w[1].moved == 0;
            prop_assert!(rolled || w[1].moved.count_ones() == w[0].moved.count_ones() + 1);
            if !rolled || !game.config().scheme.restarts_each_round() {
                prop_assert_eq!(w[1].mover, w[0].mover.other());
            } else {
                prop_assert_eq!(w[1].mover, game.config().scheme.starter());
            }
        }
    }

    #[test]
    fn keys_round_trip_and_canonical_form_is_stable((game, picks) in instance()) {
        let layout = KeyLayout::new(&game).unwrap();
        let canon = Canonicalizer::new(&game, CanonicalizationPolicy::default()).unwrap();
        for s in play(&game, &picks) {
            prop_assert_eq!(layout.decode(&layout.encode(&s)).unwrap(), s);
            let c = canon.canonicalize(&s);
            prop_assert_eq!(canon.canonicalize(&c), c);
            game.check_invariants(&c).map_err(TestCaseError::fail)?;
            prop_assert_eq!(game.terminal_status(&c).is_terminal(), game.terminal_status(&s).is_terminal());
            let moves = |x: &GameState| game.legal_moves(x).map(|m| m.len()).unwrap_or(0);
            prop_assert_eq!(moves(&c), moves(&s));
        }
    }

    #[test]
    fn greedy_moves_are_free_moves(g in connected_graph(), k in 1usize..=4, picks in proptest::collection::vec(any::<usize>(), 0..30)) {
        let free = Game::new(g.clone(), k, VariantConfig::a_game()).unwrap();
        let greedy = Game::new(g, k, VariantConfig::very_greedy()).unwrap();
        for s in play(&greedy, &picks) {
            if let Ok(moves) = greedy.legal_moves(&s) {
                let all = free.legal_moves(&s).unwrap();
                prop_assert!(moves.iter().all(|m| all.contains(m)));
                let vertices = |ms: &[ecs_core::Move]| ms.iter().map(|m| m.vertex).collect::<std::collections::BTreeSet<_>>();
                prop_assert_eq!(vertices(&moves), vertices(&all));
            }
        }
    }

    #[test]
    fn coloring_invariants_are_ordered(g in connected_graph()) {
        let chi = chromatic_number(&g);
        let col = coloring_number(&g);
        prop_assert!(chi <= col && col <= max_degree(&g) + 1, "chi {} col {}", chi, col);
    }
}
