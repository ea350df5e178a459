import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smspace import tm


def a_word(M, n):
    return (M.alphabet.id("a"),) * n


def test_toy_raw_runs_by_hand():
    M = tm.toy_raw()
    w = tm.input_config(M, a_word(M, 2))
    w = tm.tm_apply(M, w, M.command["erase1"])
    w = tm.tm_apply(M, w, M.command["erase2"])
    w = tm.tm_apply(M, w, M.command["done"])
    assert w == tm.accept_config(M)


def test_not_applicable_names_the_tape():
    M = tm.toy_raw()
    w = tm.input_config(M, ())
    with pytest.raises(tm.NotApplicable) as e:
        tm.tm_apply(M, w, M.command["erase1"])
    assert e.value.tape == 0
    # "done" needs an empty tape
    with pytest.raises(tm.NotApplicable):
        tm.tm_apply(M, tm.input_config(M, a_word(M, 1)), M.command["done"])


def test_input_outside_alphabet():
    M = tm.toy_raw()
    with pytest.raises(tm.MachineError):
        tm.input_config(M, (M.alphabet.id("q0"),))


def test_toy_machine_is_s10_and_valid(toy):
    assert tm.check_s10(tm.toy_raw()) != []
    assert tm.check_s10(toy) == []
    toy.validate()


@pytest.mark.parametrize("n", range(7))
def test_toy_language_and_space(toy, n):
    r = tm.tm_space_bfs(toy, tm.input_config(toy, a_word(toy, n)), n + 1)
    if n % 2:
        assert not r.accepted
    else:
        assert r.space == n
        states = tm.replay(toy, tm.input_config(toy, a_word(toy, n)), r.history)
        assert states[-1] == tm.accept_config(toy)


def test_space_cap_is_respected(toy):
    r = tm.tm_space_bfs(toy, tm.input_config(toy, a_word(toy, 4)), 3)
    assert not r.accepted


def test_pad_shape(pipeline):
    M1, M2 = pipeline["M1"], pipeline["M2"]
    M2.validate()
    assert M2.tapes == M1.tapes + 1
    assert tm.check_s10(M2) != []   # theta* and theta12 both leave the start vector
    assert M2.pad.stage1 == M2.start
    w = tm.input_config(M2, a_word(M2, 3))
    assert tm.u_of(M2, w) == a_word(M2, 3)


def test_pad_keeps_space_constant(pipeline):
    # along an accepting run of the padded machine |w|_a never drops below the start
    M2 = pipeline["M2"]
    w0 = tm.input_config(M2, a_word(M2, 2))
    r = tm.tm_space_bfs(M2, w0, 6)
    configs = tm.replay(M2, w0, r.history)
    stage2 = [w for w in configs if tm.config_states(w)[-1] == M2.pad.stage2[-1]]
    assert stage2 and len({tm.tape_count(w) for w in stage2}) == 1


def test_u_of_rejects_later_stages(pipeline):
    M2 = pipeline["M2"]
    with pytest.raises(tm.MachineError):
        tm.u_of(M2, tm.accept_config(M2))
    with pytest.raises(tm.MachineError):
        tm.u_of(pipeline["M1"], tm.input_config(pipeline["M1"], ()))


def test_pad_needs_s10():
    with pytest.raises(tm.MachineError):
        tm.pad_machine(tm.toy_raw())


def test_symmetrize(pipeline):
    M2, sym = pipeline["M2"], pipeline["sym"]
    assert not M2.symmetric and sym.symmetric
    assert len(sym.commands) == 2 * len(M2.commands)
    assert tm.symmetrize(sym).commands == sym.commands
    c = sym.commands[0]
    assert c.inverse().inverse() == c


def test_split_touches_one_letter(pipeline):
    split = pipeline["split"]
    split.validate()
    assert split.symmetric
    assert all(c.letters <= 1 for c in split.commands)


def test_normalize_after_split(pipeline):
    norm = pipeline["norm"]
    norm.validate()
    assert norm.symmetric and tm.check_s10(norm) == []


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 5), st.integers(0, 40), st.randoms(use_true_random=False))
def test_inverse_command_undoes(n, steps, rnd):
    sym = tm.symmetrize(tm.pad_machine(tm.toy_machine()))
    w = tm.input_config(sym, a_word(sym, n))
    for _ in range(steps):
        opts = list(tm.successors(sym, w))
        if not opts:
            break
        c, w2 = rnd.choice(opts)
        assert tm.tm_apply(sym, w2, c.inverse()) == w
        w = w2


def test_json_roundtrip(pipeline):
    for key in ("M1", "M2", "norm"):
        M = pipeline[key]
        doc = tm.machine_to_json(M)
        back = tm.machine_from_json(json.loads(json.dumps(doc)))
        assert tm.machine_to_json(back) == doc
        assert tm.dumps_machine(back) == tm.dumps_machine(M)


def test_json_rejects_bad_fragments(toy):
    doc = tm.machine_to_json(toy)
    doc["commands"][0]["parts"][0]["lhs"] = ["a"]
    with pytest.raises(tm.MachineError):
        tm.machine_from_json(doc)
    doc = tm.machine_to_json(toy)
    doc["tape_alphabets"][0].append("alpha")
    with pytest.raises(tm.MachineError):
        tm.machine_from_json(doc)
