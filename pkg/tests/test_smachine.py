import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smspace import smachine as sm
from smspace import tm
from smspace.words import is_positive, mirror


def zword(Z, state, left=(), right=()):
    al = Z.alphabet
    return sm.AdmissibleWord((al.id("L"), al.id(state), al.id("R")),
                             (al.word(left), al.word(right)))


def test_z_rule_examples(zmachine):
    Z = zmachine
    assert sm.s_apply(Z, zword(Z, "p1"), Z.rule["r13"]) == zword(Z, "p3")
    assert sm.s_apply(Z, zword(Z, "p1", ["a.1"]), Z.rule["r1(a)"]) == zword(Z, "p1", [], ["a.2"])
    with pytest.raises(sm.DomainViolation) as e:
        sm.s_apply(Z, zword(Z, "p1", ["a"]), Z.rule["r13"])
    assert e.value.sector == 0


def test_z_counts(zmachine):
    Z = zmachine
    Z.validate()
    assert len(Z.positive) == 6
    assert len(Z.rules) == 12
    assert [b for b in Z.blocks] == [(Z.alphabet.id("L"),),
                                     tuple(Z.alphabet.id(p) for p in ("p1", "p2", "p3")),
                                     (Z.alphabet.id("R"),)]


def test_z_short_runs(zmachine):
    Z = zmachine
    a = Z.alphabet.id("a")
    assert sm.canonical_z_run(Z, ()).history == ("r13",)
    C = sm.canonical_z_run(Z, (a,))
    assert C.history == ("r12(a)", "r21", "r1(a)", "r13", "r3(a)")
    assert len({w.tape_length() for w in C.words}) == 1
    h = sm.shortest_history(Z, Z.input_word((a,)), sm.z_accept_word(Z, (a,)), 1)
    assert len(h) == 5
    with pytest.raises(tm.MachineError):
        sm.canonical_z_run(Z, (-a,))


@pytest.mark.parametrize("n", range(7))
def test_canonical_run_is_exponential(zmachine, n):
    Z = zmachine
    u = (Z.alphabet.id("a"),) * n
    C = sm.canonical_z_run(Z, u)
    assert len(C) >= 2 ** n
    assert C.words[-1] == sm.z_accept_word(Z, u)
    assert sm.run(Z, C.start, C.history).words == C.words


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_apply_then_inverse(zmachine, seed):
    Z = zmachine
    rng = random.Random(seed)
    W = Z.input_word((Z.alphabet.id("a"),) * rng.randrange(4))
    C = sm.random_computation(Z, W, 25, 4, rng)
    for x, name, y in zip(C.words, C.history, C.words[1:]):
        assert sm.s_apply(Z, y, Z.rule[name].inverse()) == x
        # admissible shape is kept: reduced sectors, one state per block
        assert all(s in b for s, b in zip(y.states, Z.blocks))
        assert all(all(w[i] != -w[i + 1] for i in range(len(w) - 1)) for w in y.sectors)


def test_s_from_tm_interpretation(pipeline):
    S = pipeline["S"]
    S.validate()
    norm = pipeline["norm"]
    c = next(c for c in norm.commands if c.letters == 1 and c.sign > 0 and c.parts[0].lhs.left)
    r = S.rule[c.name]
    assert r.parts[1].lhs.left == c.parts[0].lhs.left
    with pytest.raises(tm.MachineError):
        sm.s_from_tm(pipeline["M2"])


def test_s_from_tm_replays_tm_runs(pipeline):
    norm, S = pipeline["norm"], pipeline["S"]
    from smspace.cli import tm_to_admissible
    rng = random.Random(11)
    for _ in range(200):
        u = (norm.alphabet.id("a"),) * rng.randrange(5)
        w = tm.input_config(norm, u)
        W = S.input_word(u)
        for _ in range(15):
            opts = list(tm.successors(norm, w))
            if not opts:
                break
            c, w = opts[rng.randrange(len(opts))]
            W = sm.s_apply(S, W, S.rule[c.name])
            assert W == tm_to_admissible(S, w)


def test_compose_shape(pipeline):
    MZ = pipeline["MZ"]
    MZ.validate()
    assert MZ.N == 11 and len(MZ.rules) == 1322 and len(MZ.alphabet) == 431
    al = MZ.alphabet
    # start word k1 u p1 k2 p2 k3 ...: p letters sit between the old state letters
    assert [al.name(q) for q in MZ.start[1::2]] == [f"p{i}" for i in range(1, 6)]
    # the start rule reads every p_i and hands over to the first Z phase
    start = next(r for r in MZ.positive if r.lhs_states == MZ.start)
    assert start.name.endswith("~")
    assert [al.name(p.lhs.state) for p in start.parts[1::2]] == [f"p{i}" for i in range(1, 6)]
    assert all(al.name(p.rhs.state).endswith(",1+]") for p in start.parts[1::2])


@pytest.mark.parametrize("n", range(4))
def test_compose_language(pipeline, n):
    MZ, S = pipeline["MZ"], pipeline["S"]
    u = MZ.input_by_name(["a"] * n)
    r = sm.s_space_search(MZ, MZ.input_word(u), n + 1)
    assert r.accepted == (n % 2 == 0)
    assert r.accepted == sm.s_space_search(S, S.input_word(u), n + 1).accepted


@pytest.mark.parametrize("n", (0, 2, 4))
def test_projection_of_accepting_run(pipeline, n):
    MZ, S = pipeline["MZ"], pipeline["S"]
    u = MZ.input_by_name(["a"] * n)
    r = sm.s_space_search(MZ, MZ.input_word(u), n + 1)
    C = sm.run(MZ, MZ.input_word(u), r.history)
    P = sm.project_history(MZ, C)
    proj = sm.run(S, P.start, P.history)
    assert proj.words == P.words
    assert P.words[0] == S.input_word(u) and P.words[-1] == S.accept_word()
    assert P.space == C.space
    # interior projected words are positive
    assert len(P) >= 2
    for W in P.words[1:-1]:
        assert all(is_positive(s) for s in W.sectors)


def test_projection_without_basic_rules(pipeline):
    MZ = pipeline["MZ"]
    W = MZ.input_word(())
    C = sm.SComputation(W, (), (W,))
    P = sm.project_history(MZ, C)
    assert len(P) == 0 and P.words == (sm.strip_word(MZ, W),)


def test_multiply_shape(zmachine, zl2):
    SL = zl2
    SL.validate()
    assert SL.N == (zmachine.N + 1) * 2 == len(SL.accept_word().word())
    with pytest.raises(tm.MachineError):
        sm.multiply(zmachine, 3)


def test_multiply_mirror_copy(zl2):
    SL = zl2
    m1, m2 = SL.aux["maps"]
    to2 = {m1[x]: m2[x] for x in m1 if m1[x]}
    rng = random.Random(3)
    for _ in range(50):
        u = SL.input_by_name(["a"] * rng.randrange(4))
        C = sm.random_computation(SL, SL.input_word(u), 30, 8, rng)
        for W in C.words:
            s = W.sectors
            # sectors: k1|L, L|P, P|R, R|k2, k2|R, R|P, P|L
            assert s[6] == mirror(tuple(to2[x] if x > 0 else -to2[-x] for x in s[1]))
            assert s[5] == mirror(tuple(to2[x] if x > 0 else -to2[-x] for x in s[2]))


def test_sigma_has_copies_of_u():
    from smspace.words import Alphabet, Symbol
    A = Alphabet([Symbol("a", "a"), Symbol("b", "a")])
    S4 = sm.multiply(sm.build_adding(A), 4)
    u = S4.input_by_name(["a", "b"])
    W = S4.input_word(u)
    al = S4.alphabet
    spelled = [al.spell(s) for s in W.sectors if s]
    assert spelled == [["a", "b"], ["b@2", "a@2"], ["a@3", "b@3"], ["b@4", "a@4"]]


def test_hat_variant(pipeline, sl4):
    H = sm.hat_variant(pipeline["MZ"], 4)
    H.validate()
    u = H.input_by_name(["a", "a"])
    W, Wh = sl4.input_word(sl4.input_by_name(["a", "a"])), H.input_word(u)
    assert Wh.tape_length() == W.tape_length() - 2
    # copy 1 of the hat machine has no tape letters at all
    first = range(0, pipeline["MZ"].N)
    assert all(not H.sectors[j] for j in first)
    assert all(not p.lhs.left and not p.lhs.right for r in H.rules for p in r.parts[:pipeline["MZ"].N])


@pytest.mark.parametrize("n", range(4))
def test_hat_language(pipeline, n):
    MZ = pipeline["MZ"]
    H = sm.hat_variant(MZ, 2)
    r = sm.s_space_search(H, H.input_word(H.input_by_name(["a"] * n)), 2 * (n + 1))
    assert r.accepted == (n % 2 == 0)


def test_json_roundtrip(zl2, pipeline):
    for S in (zl2, pipeline["S"]):
        doc = sm.smachine_to_json(S)
        back = sm.smachine_from_json(json.loads(sm.dumps(doc)))
        assert sm.smachine_to_json(back) == doc
        W = S.input_word(S.input_by_name(["a"]))
        assert sm.word_from_json(back, sm.word_to_json(S, W)) == W
