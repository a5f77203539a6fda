"""Smoke test for the `ecs` extension module.

Build and run:

    cd crates/py && maturin develop --release && cd ../.. && python python/smoke_test.py
"""

import ecs


def main():
    p3 = ecs.Graph("path:3")
    assert (p3.n, p3.label, p3.edges()) == (3, "path:3", [(0, 1), (1, 2)])
    assert p3.max_degree() == 2 and p3.chromatic_number() == 2

    assert ecs.chi(ecs.Graph("path:4"))["chi"] == 4
    assert ecs.chi(ecs.Graph("star:5"), "very-greedy")["chi"] == 3
    report = ecs.chi(ecs.Graph("complete:2"))
    assert [r["winner"] for r in report["rows"]] == ["Bob", "Bob", "Alice"]

    game = ecs.Game(p3, 3, "a")
    solution = game.solve()
    assert solution.winner == "Alice" == game.oracle_winner()
    assert solution.verify() == 0

    # engine Alice against a fixed Bob for three rounds
    s = game.initial_state()
    for _ in range(9):
        assert game.status(s) == "ongoing"
        if s.mover == "Alice":
            v, c = solution.best_move(s)
        else:
            v, c = game.legal_moves(s)[-1]
        s = game.play(s, v, c)
        assert solution.status(s)[0] == "alice_safe"

    lost = ecs.Game(ecs.Graph("path:4"), 3).solve()
    status, rank = lost.status(ecs.Game(ecs.Graph("path:4"), 3).initial_state())
    assert status == "bob_attracted" and rank > 0

    s = game.initial_state()
    s = game.play(s, 1, 1)
    try:
        game.play(s, 0, 1)
    except ValueError:
        pass
    else:
        raise AssertionError("neighbor color accepted")
    assert game.legal_colors(s, 0) == [2, 3]

    try:
        ecs.Game(ecs.Graph("grid:2,3"), 4).solve(budget=10)
    except ecs.BudgetExceeded:
        pass
    else:
        raise AssertionError("budget not enforced")

    assert len(ecs.connected_graphs(4)) == 6
    print("python smoke test ok")


if __name__ == "__main__":
    main()
