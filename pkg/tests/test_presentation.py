import json

import pytest

from smspace import presentation as pres
from smspace import smachine as sm
from smspace.tm import MachineError
from smspace.words import canonical_rotation, cyclic_reduce


def test_counts_match_formula(g4, sl4):
    c = g4.counts()
    assert c == {"theta-q": 31728, "theta-a": 13608, "hub": 1}
    assert len(g4.relators) == pres.expected_relator_count(sl4) == 45337
    assert g4.N == 48 and g4.delta < pres.Fraction(1, 3 * 48)


def test_relators_are_canonical(gz):
    for r in gz.relators:
        assert r.word == canonical_rotation(cyclic_reduce(r.word))
        assert r.cls in pres.CLASSES


def test_theta_q_shape(gz, zl2):
    # U theta_{i+1} V^-1 theta_i^-1 for one part of one rule
    r = zl2.positive[0]
    p = r.parts[1]
    U = p.lhs.left + (p.lhs.state,) + p.lhs.right
    V = p.rhs.left + (p.rhs.state,) + p.rhs.right
    t1, t2 = gz.theta(r.name, 2), gz.theta(r.name, 3)
    w = pres.theta_q_relator(U, V, t1, t2)
    assert canonical_rotation(cyclic_reduce(w)) in {x.word for x in gz.relators}
    # theta indices wrap around modulo N
    assert gz.theta(r.name, gz.N + 1) == gz.theta(r.name, 1)


def test_theta_a_commutators(gz, zl2):
    al = gz.alphabet
    words = {r.word for r in gz.relators if r.cls == "theta-a"}
    r = zl2.rule["r13"]
    # r13 locks the L|p sector of copy 1 but lets copy-1 letters of Y2 through
    a2 = al.id("a.2")
    t = gz.theta("r13", 3 + 1)
    assert canonical_rotation((t, a2, -t, -a2)) in words
    a = al.id("a")
    assert canonical_rotation((gz.theta("r13", 3), a, -gz.theta("r13", 3), -a)) not in words
    assert r.locked(1)


def test_hub_is_accept_word(gz, zl2):
    assert gz.hub == canonical_rotation(pres.hub_word(zl2))
    assert len(gz.hub) == gz.N


def test_relator_set_has_inverses(gz):
    rs = gz.relator_set()
    assert all(tuple(-x for x in reversed(w)) in rs for w in rs)


def test_compile_needs_multiplied_machine(zmachine):
    with pytest.raises(MachineError):
        pres.compile(zmachine)


def test_json_roundtrip(gz):
    doc = pres.presentation_to_json(gz)
    back = pres.presentation_from_json(json.loads(pres.dumps(gz)))
    assert back.relators == gz.relators
    assert pres.presentation_to_json(back) == doc
    doc["relators"][0]["class"] = "other"
    with pytest.raises(ValueError):
        pres.presentation_from_json(doc)


def test_embedding_shares_only_the_expected_letters(zmachine):
    SL, H = sm.multiply(zmachine, 2), sm.hat_variant(zmachine, 2)
    shared = pres.shared_generators(SL, H)
    al = SL.alphabet
    kinds = {al.symbol(al.id(n)).kind for n in shared}
    assert kinds <= {"k", "q", "a"}
    states = {n for n in shared if al.kind(al.id(n)) == "q"}
    assert states == {al.name(q) for q in set(SL.start) | set(SL.accept) if al.kind(q) == "q"}
    assert {n for n in shared if al.kind(al.id(n)) == "k"} == {"#k1", "#k2"}
    letters = {n for n in shared if al.kind(al.id(n)) == "a"}
    assert letters == {"a@2"}
    P = pres.compile_embedding(SL, H)
    thetas = [s.name for s in P.alphabet if s.kind == "theta"]
    assert len(thetas) == len(set(thetas)) == 2 * len(SL.positive) * SL.N
    assert len(P.relators) == (pres.expected_relator_count(SL) + pres.expected_relator_count(H) - 1)
