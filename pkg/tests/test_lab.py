import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smspace import lab
from smspace import smachine as sm
from smspace import tm
from smspace.words import modified_length


def a_of(P):
    return P.alphabet.id("a")


def test_apply_move_examples(gz):
    rs = gz.relator_set()
    a = a_of(gz)
    W = ((a, -a),)
    assert lab.apply_move(rs, W, lab.Move("cancel", 0, 0)) == ((),)
    assert lab.apply_move(rs, W, lab.Move("split", 0, 1)) == ((a,), (-a,))
    assert lab.apply_move(rs, W, lab.Move("shift", 0, 1)) == ((-a, a),)
    assert lab.apply_move(rs, ((),), lab.Move("drop", 0)) == ()
    with pytest.raises(lab.InvalidMove):
        lab.apply_move(rs, W, lab.Move("drop", 0))
    with pytest.raises(lab.InvalidMove):
        lab.apply_move(rs, W, lab.Move("insert_relator", 0, 0, (a,)))
    with pytest.raises(lab.InvalidMove):
        lab.apply_move(rs, W, lab.Move("cancel", 0, 1))
    with pytest.raises(lab.InvalidMove):
        lab.Move.from_json({"op": "teleport"}, gz.alphabet)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_every_move_has_an_inverse(gz, seed):
    from acceptance_runs import random_move, random_tuple
    rng = random.Random(seed)
    rels = sorted(gz.relator_set())
    W = random_tuple(rng, gz, rels)
    m = random_move(rng, gz, W, rels)
    W2 = lab.apply_move(gz.relator_set(), W, m)
    assert lab.apply_move(gz.relator_set(), W2, lab.inverse_move(W, m)) == W


def test_moves_enumeration(gz):
    a = a_of(gz)
    w = (a, a, -a)
    out = list(lab.moves(gz, (w,), 3))
    splits = [m for m, _ in out if m.op == "split"]
    assert len(splits) == len(w) + 1
    assert {m.op for m, _ in out} >= {"split", "shift", "cancel", "insert_empty"}
    # the cap leaves no room for insertions
    assert not any(m.op.startswith("insert_") and m.op != "insert_empty" for m, _ in out)
    for m, W2 in out:
        assert lab.apply_move(gz.relator_set(), (w,), m) == W2
    with pytest.raises(ValueError):
        list(lab.moves(gz, (w,), 2))


def test_one_shot_searches(gz):
    a = a_of(gz)
    for w in ((a, -a), gz.hub, gz.relators[0].word):
        r = lab.space_search(gz, w, len(w) + 2)
        assert r.proven and r.space == len(w)
        v = lab.verify(gz, r.witness)
        assert v.ok and v.space == len(w)


def test_search_needs_a_bigger_cap(gz):
    a = a_of(gz)
    # a single generator is never trivial, and a.a^-1 needs room for its own length
    assert lab.space_search(gz, (a,), 3, budget=5000).status in ("unreachable", "exhausted")
    assert lab.space_search(gz, (a, -a), 1).status == "unreachable"
    r = lab.space_search(gz, (), 1)
    assert r.proven and r.space == 0
    with pytest.raises(ValueError):
        lab.space_search(gz, (a,), 0)


def test_modified_metric(gz):
    r = lab.space_search(gz, gz.hub, 20, metric="modified")
    assert r.proven and r.space == modified_length(gz.hub, gz.alphabet, gz.delta)
    with pytest.raises(ValueError):
        lab.space_search(gz, gz.hub, 20, metric="modified", delta=1)


def test_verify_reports_the_failing_step(gz):
    r = lab.space_search(gz, gz.hub, 10)
    D = r.witness
    assert lab.verify(gz, D).ok
    bad = lab.Derivation(D.start, list(D.moves))
    bad.moves.insert(0, lab.Move("cancel", 0, 0))
    v = lab.verify(gz, bad)
    assert not v.ok and v.failed_at == 0
    short = lab.Derivation(D.start, D.moves[:-1])
    v = lab.verify(gz, short)
    assert not v.ok and v.failed_at == len(short.moves)


def test_derivation_json(gz):
    D = lab.space_search(gz, gz.hub, 10).witness
    back = lab.Derivation.from_json(D.to_json(gz), gz)
    assert back == D and D.to_json(gz)["space"] == len(gz.hub)


def test_witness_for_empty_input(g4, sl4):
    W = sl4.input_word(())
    r = sm.s_space_search(sl4, W, 4)
    C = sm.run(sl4, W, r.history)
    D = lab.witness_derivation(g4, C)
    v = lab.verify(g4, D)
    assert v.ok and v.space == 56
    assert D.start == (W.word(),)
    with pytest.raises(ValueError):
        lab.witness_derivation(g4, sm.SComputation(W, (), (W,)))


@pytest.mark.parametrize("n", range(5))
def test_savitch_matches_bfs(toy, n):
    u = (toy.alphabet.id("a"),) * n
    b = tm.tm_space_bfs(toy, tm.input_config(toy, u), n + 1).space
    assert lab.savitch_space(toy, u, n + 1) == b


def test_config_universe_is_bounded(toy):
    U = lab.config_universe(toy, 2)
    assert all(tm.tape_count(w) <= 2 for w in U)
    # five states times the six ways to place at most two letters around the head
    assert len(U) == len(set(U)) == 30


def test_preceq_fit():
    ns = range(1, 65)
    assert lab.preceq_fit({n: n for n in ns}, {n: n for n in ns}, 8) == 1
    assert lab.preceq_fit({n: n * n for n in ns}, {n: n for n in ns}, 8) is None
    # the same comparison against the total function g(n) = n
    assert lab.preceq_fit({n: n * n for n in ns}, lambda n: n, 8) == 8
    assert lab.preceq_fit({n: n * n for n in ns}, lambda n: n, 7) is None


@given(st.dictionaries(st.integers(1, 30), st.integers(0, 100), min_size=1))
def test_fit_is_reflexive_for_callables(f):
    assert lab.preceq_fit(f, lambda n: f.get(n, 10**9), 3) == 1


def test_space_function_table(gz):
    a = a_of(gz)
    rows = lab.space_function(gz, 2, 4, [(a, -a), (-a, a)])
    assert rows == [(2, 2, 4, "proven")]
    text = lab.table_csv(rows)
    assert text.splitlines()[0] == "n,space,cap,status"
    assert lab.read_table_csv(text) == {2: 2}
    assert len(lab.enumerate_words(gz, 2)) == 132 + 132 * 131
