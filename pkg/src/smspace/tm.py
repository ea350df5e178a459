"""Multi-tape Turing machines and the surgeries applied to them.

A configuration is a tuple with one ``(u, q, v)`` triple per tape: ``u`` is
the positive word left of the head, ``q`` the head state, ``v`` the word to
the right.  The separators alpha_i / omega_i are implicit; a command part
may anchor itself to them.
"""

from __future__ import annotations

import heapq
import itertools
import json
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Sequence

from .words import Alphabet, Symbol, Word

ALPHA = "alpha"
OMEGA = "omega"


class MachineError(ValueError):
    """A machine violates a structural precondition."""


class NotApplicable(Exception):
    def __init__(self, command, tape):
        super().__init__(f"command {command!r} not applicable on tape {tape + 1}")
        self.command = command
        self.tape = tape


@dataclass(frozen=True)
class Fragment:
    left: Word
    state: int
    right: Word

    @property
    def letters(self) -> int:
        return len(self.left) + len(self.right)


@dataclass(frozen=True)
class Part:
    """One tape's component ``lhs -> rhs`` of a command."""

    lhs: Fragment
    rhs: Fragment
    alpha: bool = False
    omega: bool = False

    def inverse(self) -> "Part":
        return Part(self.rhs, self.lhs, self.alpha, self.omega)

    @property
    def letters(self) -> int:
        return self.lhs.letters + self.rhs.letters

    @property
    def delta(self) -> int:
        return self.rhs.letters - self.lhs.letters


def state_part(q: int, q2: int | None = None, alpha=False, omega=False) -> Part:
    return Part(Fragment((), q, ()), Fragment((), q if q2 is None else q2, ()),
                alpha, omega)


@dataclass(frozen=True)
class TMCommand:
    name: str
    parts: tuple
    sign: int = 1

    def inverse(self) -> "TMCommand":
        name = self.name[:-3] if self.name.endswith("^-1") else self.name + "^-1"
        return TMCommand(name, tuple(p.inverse() for p in self.parts), -self.sign)

    @property
    def lhs_states(self) -> tuple:
        return tuple(p.lhs.state for p in self.parts)

    @property
    def rhs_states(self) -> tuple:
        return tuple(p.rhs.state for p in self.parts)

    @property
    def letters(self) -> int:
        return sum(p.letters for p in self.parts)

    @property
    def delta(self) -> int:
        return sum(p.delta for p in self.parts)


@dataclass(frozen=True)
class PadInfo:
    star: int
    stage1: tuple
    stage2: tuple


@dataclass(frozen=True)
class TMachine:
    alphabet: Alphabet
    input: tuple
    tape_alphabets: tuple
    state_blocks: tuple
    commands: tuple
    start: tuple
    accept: tuple
    pad: PadInfo | None = field(default=None, compare=False)

    @property
    def tapes(self) -> int:
        return len(self.tape_alphabets)

    @cached_property
    def by_states(self) -> dict:
        index: dict = {}
        for c in self.commands:
            index.setdefault(c.lhs_states, []).append(c)
        return index

    @cached_property
    def command(self) -> dict:
        return {c.name: c for c in self.commands}

    @property
    def symmetric(self) -> bool:
        contents = {c.parts for c in self.commands}
        return all(tuple(p.inverse() for p in c.parts) in contents
                   for c in self.commands)

    @property
    def positive(self) -> list:
        return [c for c in self.commands if c.sign > 0]

    def word(self, names: Iterable[str]) -> Word:
        return self.alphabet.word(names)

    def spell(self, w) -> str:
        return "".join(self.alphabet.name(x) for x in w)

    def validate(self) -> None:
        k = self.tapes
        if not (len(self.state_blocks) == len(self.start) == len(self.accept) == k):
            raise MachineError("tape count mismatch between blocks and vectors")
        seen: set = set()
        for block in list(self.tape_alphabets) + list(self.state_blocks):
            if seen & set(block):
                raise MachineError("partition blocks are not disjoint")
            seen |= set(block)
        if not set(self.input) <= set(self.tape_alphabets[0]):
            raise MachineError("input alphabet is not contained in Y_1")
        for j in range(k):
            if self.start[j] not in self.state_blocks[j]:
                raise MachineError(f"start state not in Q_{j + 1}")
            if self.accept[j] not in self.state_blocks[j]:
                raise MachineError(f"accept state not in Q_{j + 1}")
        names = set()
        for c in self.commands:
            if c.name in names:
                raise MachineError(f"duplicate command name {c.name!r}")
            names.add(c.name)
            if len(c.parts) != k:
                raise MachineError(f"command {c.name!r} has {len(c.parts)} parts")
            for j, p in enumerate(c.parts):
                ys = set(self.tape_alphabets[j])
                for fr in (p.lhs, p.rhs):
                    if fr.state not in self.state_blocks[j]:
                        raise MachineError(f"{c.name!r}: state outside Q_{j + 1}")
                    if not set(fr.left + fr.right) <= ys:
                        raise MachineError(f"{c.name!r}: letter outside Y_{j + 1}")
                if (p.alpha or p.omega) and p.letters:
                    raise MachineError(f"{c.name!r}: anchored part moves letters on tape {j + 1}")


Config = tuple  # tuple[(u, q, v), ...]


def config_states(w: Config) -> tuple:
    return tuple(t[1] for t in w)


def tape_count(w: Config) -> int:
    """|w|_a: number of tape squares."""
    return sum(len(u) + len(v) for u, _, v in w)


def accept_config(M: TMachine) -> Config:
    return tuple(((), q, ()) for q in M.accept)


def input_config(M: TMachine, u: Sequence[int]) -> Config:
    u = tuple(u)
    if not set(u) <= set(M.input):
        raise MachineError("input word uses letters outside X")
    tapes = [((), q, ()) for q in M.start]
    tapes[0] = (u, M.start[0], ())
    return tuple(tapes)


def _apply(w: Config, c: TMCommand) -> Config | None:
    out = []
    for j, (p, (u, q, v)) in enumerate(zip(c.parts, w)):
        lhs, rhs = p.lhs, p.rhs
        if q != lhs.state:
            return None
        nl, nr = len(lhs.left), len(lhs.right)
        if nl and u[len(u) - nl:] != lhs.left or len(u) < nl:
            return None
        if nr and v[:nr] != lhs.right or len(v) < nr:
            return None
        if p.alpha and len(u) != nl or p.omega and len(v) != nr:
            return None
        out.append((u[:len(u) - nl] + rhs.left, rhs.state, rhs.right + v[nr:]))
    return tuple(out)


def tm_apply(M: TMachine, w: Config, c: TMCommand) -> Config:
    if len(w) != M.tapes:
        raise MachineError("malformed configuration")
    out = _apply(w, c)
    if out is None:
        for j, (p, (u, q, v)) in enumerate(zip(c.parts, w)):
            if _apply(((u, q, v),), TMCommand(c.name, (p,))) is None:
                raise NotApplicable(c.name, j)
        raise NotApplicable(c.name, 0)
    return out


def successors(M: TMachine, w: Config):
    for c in M.by_states.get(config_states(w), ()):
        out = _apply(w, c)
        if out is not None:
            yield c, out


@dataclass
class SearchResult:
    """Outcome of a cap-relative minimal-space search.

    ``space`` is None when no accepting computation exists inside the caps;
    ``exhausted`` tells whether the exploration budget ran out first.
    """

    space: int | None
    history: tuple | None = None
    exhausted: bool = False
    explored: int = 0

    @property
    def accepted(self) -> bool:
        return self.space is not None


def bottleneck_search(start, goal, neighbours, cost, space_cap, budget) -> SearchResult:
    """Least achievable max-cost over paths from ``start`` to ``goal``.

    ``neighbours(x)`` yields ``(label, y)``.  Nodes with cost above
    ``space_cap`` are never entered.  The returned minimum does not depend
    on exploration order.
    """
    c0 = cost(start)
    if c0 > space_cap:
        return SearchResult(None)
    best = {start: c0}
    parent = {start: None}
    tie = itertools.count()
    heap = [(c0, next(tie), start)]
    explored = 0
    while heap:
        b, _, x = heapq.heappop(heap)
        if b > best[x]:
            continue
        if x == goal:
            hist = []
            while parent[x] is not None:
                label, x = parent[x]
                hist.append(label)
            return SearchResult(b, tuple(reversed(hist)), False, explored)
        explored += 1
        if explored > budget:
            return SearchResult(None, None, True, explored)
        for label, y in neighbours(x):
            cy = cost(y)
            if cy > space_cap:
                continue
            nb = max(b, cy)
            if nb < best.get(y, space_cap + 1):
                best[y] = nb
                parent[y] = (label, x)
                heapq.heappush(heap, (nb, next(tie), y))
    return SearchResult(None, None, False, explored)


def tm_space_bfs(M: TMachine, w: Config, space_cap: int, time_cap: int = 10**6) -> SearchResult:
    """Minimal space of an accepting computation from ``w`` within the caps.

    ``time_cap`` bounds the number of expanded configurations.
    """
    if space_cap < 0 or time_cap <= 0:
        raise ValueError("caps must be positive")
    return bottleneck_search(
        w, accept_config(M),
        lambda x: ((c.name, y) for c, y in successors(M, x)),
        tape_count, space_cap, time_cap)


def replay(M: TMachine, w: Config, history: Iterable[str]) -> list:
    out = [w]
    for name in history:
        out.append(tm_apply(M, out[-1], M.command[name]))
    return out


# -- machine surgery -------------------------------------------------------

def _fresh(alphabet: Alphabet, taken: set, base: str) -> str:
    name = base
    n = 1
    while name in alphabet or name in taken:
        n += 1
        name = f"{base}{n}"
    taken.add(name)
    return name


class _Builder:
    """Accumulates new symbols on top of an existing machine alphabet."""

    def __init__(self, alphabet: Alphabet):
        self.alphabet = alphabet
        self.new = []
        self.taken: set = set()

    def add(self, base, kind, block) -> str:
        name = _fresh(self.alphabet, self.taken, base)
        self.new.append(Symbol(name, kind, block))
        return name

    def finish(self) -> Alphabet:
        self.alphabet = self.alphabet.extend(self.new)
        self.new = []
        return self.alphabet


def _with_states(M: TMachine, extra_blocks: Sequence[Sequence[int]]) -> tuple:
    return tuple(tuple(b) + tuple(x for x in e if x not in b)
                 for b, e in zip(M.state_blocks, extra_blocks))


def check_s10(M: TMachine) -> list:
    """Return a list of violated s10 requirements (empty when satisfied)."""
    problems = []
    pos = M.positive
    enter = [c for c in pos if c.lhs_states == M.start]
    if len(enter) != 1:
        problems.append(f"{len(enter)} positive commands leave the start vector")
    acc = [c for c in pos if c.rhs_states == M.accept]
    if len(acc) != 1:
        problems.append(f"{len(acc)} positive commands enter the accept vector")
    elif not all(p.alpha and p.omega for p in acc[0].parts):
        problems.append("accepting command does not check that tapes are empty")
    start_letters, accept_letters = set(M.start), set(M.accept)
    for c in pos:
        if c not in enter and start_letters & (set(c.lhs_states) | set(c.rhs_states)):
            problems.append(f"start state used by {c.name!r}")
        if c not in acc and accept_letters & (set(c.lhs_states) | set(c.rhs_states)):
            problems.append(f"accept state used by {c.name!r}")
    return problems


def normalize_s10(M: TMachine) -> TMachine:
    """Add fresh start/accept vectors with one entering and one accepting command."""
    sym = M.symmetric
    b = _Builder(M.alphabet)
    new_start = [b.add(M.alphabet.name(q) + "^in", "q", f"Q{j + 1}") for j, q in enumerate(M.start)]
    new_acc = [b.add(M.alphabet.name(q) + "^ac", "q", f"Q{j + 1}") for j, q in enumerate(M.accept)]
    al = b.finish()
    s1 = tuple(al.id(n) for n in new_start)
    s0 = tuple(al.id(n) for n in new_acc)
    names = {c.name for c in M.commands}
    enter = TMCommand(_fresh(al, names, "enter"),
                      tuple(state_part(a, b_) for a, b_ in zip(s1, M.start)))
    acc = TMCommand(_fresh(al, names, "accept"),
                    tuple(state_part(a, b_, True, True) for a, b_ in zip(M.accept, s0)))
    cmds = list(M.commands) + [enter, acc]
    if sym:
        cmds += [enter.inverse(), acc.inverse()]
    return replace(M, alphabet=al, commands=tuple(cmds), start=s1, accept=s0,
                   state_blocks=_with_states(M, [(a, c) for a, c in zip(s1, s0)]))


def pad_machine(M1: TMachine) -> TMachine:
    """Three-stage machine with an extra tape that keeps space constant."""
    problems = check_s10(M1)
    if problems:
        raise MachineError("pad_machine needs an s10 machine: " + "; ".join(problems))
    k = M1.tapes
    al0 = M1.alphabet
    b = _Builder(al0)
    star_name = b.add("*", "a", f"Y{k + 1}")
    z = [b.add(f"z{i}", "q", f"Q{k + 1}") for i in (1, 2, 3)]
    stage2 = {}
    for j, block in enumerate(M1.state_blocks):
        for q in block:
            stage2[q] = b.add(al0.name(q) + "~2", "q", f"Q{j + 1}")
    e = [b.add(al0.name(q) + "~3", "q", f"Q{j + 1}") for j, q in enumerate(M1.accept)]
    al = b.finish()
    star = al.id(star_name)
    z1, z2, z3 = (al.id(n) for n in z)
    s2 = {q: al.id(n) for q, n in stage2.items()}
    e = [al.id(n) for n in e]

    def two(fr: Fragment) -> Fragment:
        return Fragment(fr.left, s2[fr.state], fr.right)

    names = {c.name for c in M1.commands}
    cmds = [
        TMCommand(_fresh(al, names, "theta*"),
                  tuple(state_part(q) for q in M1.start)
                  + (Part(Fragment((), z1, ()), Fragment((star,), z1, ())),)),
        TMCommand(_fresh(al, names, "theta12"),
                  tuple(state_part(q, s2[q]) for q in M1.start) + (state_part(z1, z2),)),
    ]
    for c in M1.commands:
        d = c.delta
        if d > 0:
            extra = Part(Fragment((star,) * d, z2, ()), Fragment((), z2, ()))
        else:
            extra = Part(Fragment((), z2, ()), Fragment((star,) * -d, z2, ()))
        parts = tuple(Part(two(p.lhs), two(p.rhs), p.alpha, p.omega) for p in c.parts)
        cmds.append(TMCommand(c.name, parts + (extra,), c.sign))
    cmds.append(TMCommand(_fresh(al, names, "theta23"),
                          tuple(state_part(s2[q], ej, True, True) for q, ej in zip(M1.accept, e))
                          + (state_part(z2, z3),)))
    cmds.append(TMCommand(_fresh(al, names, "erase*"),
                          tuple(state_part(ej) for ej in e)
                          + (Part(Fragment((star,), z3, ()), Fragment((), z3, ())),)))
    blocks = tuple(tuple(block) + tuple(s2[q] for q in block) + (e[j],)
                   for j, block in enumerate(M1.state_blocks)) + ((z1, z2, z3),)
    stage1 = tuple(M1.start) + (z1,)
    after12 = tuple(s2[q] for q in M1.start) + (z2,)
    return TMachine(al, M1.input, tuple(M1.tape_alphabets) + ((star,),), blocks,
                    tuple(cmds), stage1, tuple(e) + (z3,),
                    PadInfo(star, stage1, after12))


def u_of(M2: TMachine, w: Config) -> Word:
    """Input word on the first tape of a stage-1 (or just-connected) configuration."""
    if M2.pad is None:
        raise MachineError("u_of needs a padded machine")
    states = config_states(w)
    if states not in (M2.pad.stage1, M2.pad.stage2):
        raise MachineError("configuration is neither in stage 1 nor right after theta12")
    u, _, v = w[0]
    if v or any(t[0] or t[2] for t in w[1:-1]):
        raise MachineError("first k tapes do not hold an input configuration")
    return u


def symmetrize(M: TMachine) -> TMachine:
    contents = {c.parts for c in M.commands}
    cmds = list(M.commands)
    for c in M.commands:
        inv = c.inverse()
        if inv.parts not in contents:
            cmds.append(inv)
            contents.add(inv.parts)
    return replace(M, commands=tuple(cmds))


def _split_ops(c: TMCommand) -> list:
    ops = []
    for j, p in enumerate(c.parts):
        ops += [("dl", j, x) for x in reversed(p.lhs.left)]
        ops += [("dr", j, x) for x in p.lhs.right]
    for j, p in enumerate(c.parts):
        ops += [("il", j, x) for x in p.rhs.left]
        ops += [("ir", j, x) for x in reversed(p.rhs.right)]
    return ops


def split_single_letter(M: TMachine) -> TMachine:
    """Replace multi-letter commands by chains touching one letter each."""
    sym = M.symmetric
    todo = [c for c in M.commands if c.sign > 0] if sym else list(M.commands)
    b = _Builder(M.alphabet)
    plans = []
    for c in todo:
        ops = _split_ops(c)
        if len(ops) <= 1:
            plans.append((c, None, None))
            continue
        mids = [[b.add(f"{c.name}.{t}/{j + 1}", "q", f"Q{j + 1}") for j in range(M.tapes)]
                for t in range(1, len(ops))]
        plans.append((c, ops, mids))
    al = b.finish()
    names = {c.name for c in M.commands}
    extra_states = [[] for _ in range(M.tapes)]
    cmds = []
    for c, ops, mids in plans:
        if ops is None:
            cmds.append(c)
            continue
        vectors = [c.lhs_states] + [tuple(al.id(n) for n in m) for m in mids] + [c.rhs_states]
        for m in mids:
            for j, n in enumerate(m):
                extra_states[j].append(al.id(n))
        for t, (kind, jt, x) in enumerate(ops):
            parts = []
            for j, p in enumerate(c.parts):
                q, q2 = vectors[t][j], vectors[t + 1][j]
                lhs, rhs = Fragment((), q, ()), Fragment((), q2, ())
                if j == jt:
                    if kind == "dl":
                        lhs = Fragment((x,), q, ())
                    elif kind == "dr":
                        lhs = Fragment((), q, (x,))
                    elif kind == "il":
                        rhs = Fragment((x,), q2, ())
                    else:
                        rhs = Fragment((), q2, (x,))
                parts.append(Part(lhs, rhs, p.alpha, p.omega))
            cmds.append(TMCommand(_fresh(al, names, f"{c.name}.{t + 1}"), tuple(parts), c.sign))
    if sym:
        cmds += [x.inverse() for x in cmds]
    return replace(M, alphabet=al, commands=tuple(cmds),
                   state_blocks=_with_states(M, extra_states))


# -- toy machine ------------------------------------------------------------

def toy_raw() -> TMachine:
    """One-tape DTM accepting a^(2m): erase two letters per cycle."""
    al = Alphabet([Symbol("a", "a", "Y1"), Symbol("q0", "q", "Q1"),
                   Symbol("q1", "q", "Q1"), Symbol("f", "q", "Q1")])
    a, q0, q1, f = (al.id(n) for n in ("a", "q0", "q1", "f"))
    cmds = (
        TMCommand("erase1", (Part(Fragment((a,), q0, ()), Fragment((), q1, ())),)),
        TMCommand("erase2", (Part(Fragment((a,), q1, ()), Fragment((), q0, ())),)),
        TMCommand("done", (state_part(q0, f, True, True),)),
    )
    return TMachine(al, (a,), ((a,),), ((q0, q1, f),), cmds, (q0,), (f,))


def toy_machine() -> TMachine:
    return normalize_s10(toy_raw())


# -- serialization ----------------------------------------------------------

def _frag_tokens(al: Alphabet, fr: Fragment, alpha: bool, omega: bool) -> list:
    toks = [ALPHA] if alpha else []
    toks += [al.name(x) for x in fr.left] + [al.name(fr.state)] + [al.name(x) for x in fr.right]
    return toks + ([OMEGA] if omega else [])


def machine_to_json(M: TMachine) -> dict:
    al = M.alphabet
    names = lambda xs: [al.name(x) for x in xs]  # noqa: E731
    return {
        "tapes": M.tapes,
        "input": names(M.input),
        "tape_alphabets": [names(y) for y in M.tape_alphabets],
        "state_blocks": [names(q) for q in M.state_blocks],
        "commands": [{"name": c.name, "sign": c.sign,
                      "parts": [{"lhs": _frag_tokens(al, p.lhs, p.alpha, p.omega),
                                 "rhs": _frag_tokens(al, p.rhs, p.alpha, p.omega)}
                                for p in c.parts]}
                     for c in M.commands],
        "start": names(M.start),
        "accept": names(M.accept),
    }


def _parse_frag(al: Alphabet, toks: list, states: set, where: str):
    toks = list(toks)
    alpha = bool(toks) and toks[0] == ALPHA
    omega = bool(toks) and toks[-1] == OMEGA
    toks = toks[int(alpha):len(toks) - int(omega)]
    ids = [al.id(t) for t in toks]
    pos = [i for i, x in enumerate(ids) if x in states]
    if len(pos) != 1:
        raise MachineError(f"{where}: expected exactly one state of this tape")
    i = pos[0]
    return Fragment(tuple(ids[:i]), ids[i], tuple(ids[i + 1:])), alpha, omega


def machine_from_json(doc: dict) -> TMachine:
    k = doc["tapes"]
    syms = []
    for j, ys in enumerate(doc["tape_alphabets"]):
        syms += [Symbol(y, "a", f"Y{j + 1}") for y in ys]
    for j, qs in enumerate(doc["state_blocks"]):
        syms += [Symbol(q, "q", f"Q{j + 1}") for q in qs]
    if ALPHA in {s.name for s in syms} or OMEGA in {s.name for s in syms}:
        raise MachineError("'alpha' and 'omega' are reserved names")
    al = Alphabet(syms)
    if len(al) != len(syms):
        raise MachineError("a symbol occurs in two blocks")
    blocks = tuple(tuple(al.id(q) for q in qs) for qs in doc["state_blocks"])
    cmds = []
    for c in doc["commands"]:
        parts = []
        if len(c["parts"]) != k:
            raise MachineError(f"command {c['name']!r} must have {k} parts")
        for j, p in enumerate(c["parts"]):
            where = f"{c['name']} tape {j + 1}"
            lhs, a1, o1 = _parse_frag(al, p["lhs"], set(blocks[j]), where)
            rhs, a2, o2 = _parse_frag(al, p["rhs"], set(blocks[j]), where)
            if (a1, o1) != (a2, o2):
                raise MachineError(f"{where}: anchors differ between sides")
            parts.append(Part(lhs, rhs, a1, o1))
        cmds.append(TMCommand(c["name"], tuple(parts), c.get("sign", 1)))
    M = TMachine(al, tuple(al.id(x) for x in doc["input"]),
                 tuple(tuple(al.id(y) for y in ys) for ys in doc["tape_alphabets"]),
                 blocks, tuple(cmds),
                 tuple(al.id(x) for x in doc["start"]),
                 tuple(al.id(x) for x in doc["accept"]))
    M.validate()
    return M


def dumps_machine(M: TMachine) -> str:
    return json.dumps(machine_to_json(M), indent=1, sort_keys=True)
