"""Derivations on tuples of words and the space they use.

A tuple of words is rewritten to the empty tuple by elementary moves:
free-pair and relator insertion/removal, cyclic shifts, splitting a word
in two and dropping an empty word.  ``merge`` and ``insert_empty`` are the
inverses of the last two and are only used to close the calculus under
inversion.
"""

from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from . import tm as tmod
from .presentation import GroupPresentation
from .smachine import AdmissibleWord, SComputation, SMachine
from .words import (Word, canonical_rotation, cyclic_shift, invert,
                    modified_length)

OPS = ("cancel", "insert_pair", "remove_relator", "insert_relator", "shift",
       "split", "merge", "drop", "insert_empty")


class InvalidMove(ValueError):
    pass


@dataclass(frozen=True)
class Move:
    op: str
    word: int = 0
    pos: int = 0
    data: Word = ()

    def to_json(self, alphabet) -> dict:
        d = {"op": self.op, "word": self.word, "pos": self.pos}
        if self.data:
            d["data"] = alphabet.spell(self.data)
        return d

    @classmethod
    def from_json(cls, d, alphabet) -> "Move":
        if d["op"] not in OPS:
            raise InvalidMove(f"unknown move {d['op']!r}")
        return cls(d["op"], d.get("word", 0), d.get("pos", 0), alphabet.word(d.get("data", [])))


def norm(W: Sequence[Word]) -> int:
    return sum(len(w) for w in W)


def _metric(P: GroupPresentation | None, metric: str, delta=None):
    if metric == "comb":
        return norm
    if metric != "modified":
        raise ValueError(f"unknown metric {metric!r}")
    d = Fraction(delta) if delta is not None else P.delta
    if d >= Fraction(1, 3 * P.N):
        raise ValueError("delta must be below 1/(3N)")
    al = P.alphabet
    return lambda W: sum((modified_length(w, al, d) for w in W), Fraction(0))


def apply_move(relators: frozenset, W: tuple, m: Move) -> tuple:
    """Apply one literal move; raise InvalidMove when it is not legal."""
    W = tuple(W)
    i = m.word
    if m.op == "insert_empty":
        if not 0 <= i <= len(W):
            raise InvalidMove("index out of range")
        return W[:i] + ((),) + W[i:]
    if not 0 <= i < len(W):
        raise InvalidMove("word index out of range")
    w = W[i]
    p = m.pos
    if m.op == "drop":
        if w:
            raise InvalidMove("can only drop an empty word")
        return W[:i] + W[i + 1:]
    if m.op == "merge":
        if i + 1 >= len(W):
            raise InvalidMove("nothing to merge with")
        return W[:i] + (w + W[i + 1],) + W[i + 2:]
    if m.op == "shift":
        if not w:
            raise InvalidMove("cannot shift an empty word")
        return W[:i] + (cyclic_shift(w, p),) + W[i + 1:]
    if not 0 <= p <= len(w):
        raise InvalidMove("position out of range")
    if m.op == "split":
        return W[:i] + (w[:p], w[p:]) + W[i + 1:]
    if m.op == "cancel":
        if p + 1 >= len(w) or w[p] != -w[p + 1]:
            raise InvalidMove("no cancelling pair at this position")
        nw = w[:p] + w[p + 2:]
    elif m.op == "insert_pair":
        if len(m.data) != 1 or not m.data[0]:
            raise InvalidMove("insert_pair takes exactly one letter")
        x = m.data[0]
        nw = w[:p] + (x, -x) + w[p:]
    elif m.op == "remove_relator":
        r = tuple(m.data)
        if r not in relators or w[p:p + len(r)] != r:
            raise InvalidMove("relator not present here")
        nw = w[:p] + w[p + len(r):]
    elif m.op == "insert_relator":
        r = tuple(m.data)
        if r not in relators:
            raise InvalidMove("not a relator")
        nw = w[:p] + r + w[p:]
    else:
        raise InvalidMove(f"unknown move {m.op!r}")
    return W[:i] + (nw,) + W[i + 1:]


def inverse_move(W: tuple, m: Move) -> Move:
    """The move undoing ``m`` on ``W``."""
    i, p = m.word, m.pos
    if m.op == "cancel":
        return Move("insert_pair", i, p, (W[i][p],))
    if m.op == "insert_pair":
        return Move("cancel", i, p)
    if m.op == "remove_relator":
        return Move("insert_relator", i, p, m.data)
    if m.op == "insert_relator":
        return Move("remove_relator", i, p, m.data)
    if m.op == "shift":
        n = len(W[i])
        return Move("shift", i, (n - p % n) % n)
    if m.op == "split":
        return Move("merge", i)
    if m.op == "merge":
        return Move("split", i, len(W[i]))
    if m.op == "drop":
        return Move("insert_empty", i)
    if m.op == "insert_empty":
        return Move("drop", i)
    raise InvalidMove(m.op)


def moves(P: GroupPresentation, W: tuple, s_cap: int, relators=None):
    """All literal one-move successors of ``W`` with norm at most ``s_cap``.

    Yields ``(move, new_tuple)``; shifts by 0 are skipped.
    """
    rels = P.relator_set() if relators is None else relators
    ordered = sorted(rels)
    letters = _letters(len(P.alphabet))
    W = tuple(W)
    n0 = norm(W)
    if n0 > s_cap:
        raise ValueError("tuple is already above the cap")
    for i in range(len(W) + 1):
        m = Move("insert_empty", i)
        yield m, apply_move(rels, W, m)
    for i, w in enumerate(W):
        n = len(w)
        if not w:
            m = Move("drop", i)
            yield m, apply_move(rels, W, m)
        if i + 1 < len(W):
            m = Move("merge", i)
            yield m, apply_move(rels, W, m)
        for k in range(1, n):
            m = Move("shift", i, k)
            yield m, apply_move(rels, W, m)
        for p in range(n + 1):
            m = Move("split", i, p)
            yield m, apply_move(rels, W, m)
        for p in range(n - 1):
            if w[p] == -w[p + 1]:
                m = Move("cancel", i, p)
                yield m, apply_move(rels, W, m)
        for r in ordered:
            for p in range(n - len(r) + 1):
                if w[p:p + len(r)] == r:
                    m = Move("remove_relator", i, p, r)
                    yield m, apply_move(rels, W, m)
        if n0 + 2 <= s_cap:
            for p in range(n + 1):
                for x in letters:
                    m = Move("insert_pair", i, p, (x,))
                    yield m, apply_move(rels, W, m)
        for r in ordered:
            if n0 + len(r) <= s_cap:
                for p in range(n + 1):
                    m = Move("insert_relator", i, p, r)
                    yield m, apply_move(rels, W, m)


@dataclass
class Derivation:
    start: tuple
    moves: list = field(default_factory=list)

    def replay(self, P: GroupPresentation, relators=None):
        rels = P.relator_set() if relators is None else relators
        W = tuple(self.start)
        yield W
        for m in self.moves:
            W = apply_move(rels, W, m)
            yield W

    def space(self, P, metric="comb", delta=None, relators=None):
        f = _metric(P, metric, delta)
        return max(f(W) for W in self.replay(P, relators))

    def to_json(self, P: GroupPresentation, space=None) -> dict:
        al = P.alphabet
        return {"start": [al.spell(w) for w in self.start],
                "moves": [m.to_json(al) for m in self.moves],
                "space": space if space is not None else self.space(P)}

    @classmethod
    def from_json(cls, doc, P: GroupPresentation) -> "Derivation":
        al = P.alphabet
        return cls(tuple(al.word(w) for w in doc["start"]),
                   [Move.from_json(m, al) for m in doc["moves"]])


@dataclass
class VerifyResult:
    ok: bool
    space: int | None = None
    failed_at: int | None = None
    message: str = ""


def verify(P: GroupPresentation, D: Derivation, relators=None) -> VerifyResult:
    """Replay ``D``; it must end in the empty tuple."""
    rels = P.relator_set() if relators is None else relators
    W = tuple(D.start)
    best = norm(W)
    for t, m in enumerate(D.moves):
        try:
            W = apply_move(rels, W, m)
        except InvalidMove as e:
            return VerifyResult(False, None, t, str(e))
        best = max(best, norm(W))
    if W != ():
        return VerifyResult(False, None, len(D.moves), "derivation does not end in the empty tuple")
    return VerifyResult(True, best)


# -- exhaustive space search ----------------------------------------------

@dataclass
class SpaceResult:
    word: Word
    cap: int
    status: str  # "proven", "unreachable" or "exhausted"
    space: int | None = None
    witness: Derivation | None = None
    explored: int = 0

    @property
    def proven(self) -> bool:
        return self.status == "proven"


def _canon_state(words) -> tuple:
    return tuple(sorted(canonical_rotation(w) for w in words if w))


@lru_cache(maxsize=8)
def _letters(n: int) -> tuple:
    return tuple(x for g in range(1, n + 1) for x in (g, -g))


_INDEX: dict = {}


def _relator_index(rels: frozenset) -> "_Relators":
    # keyed by identity: comparing large equal sets on every call is slow
    hit = _INDEX.get(id(rels))
    if hit is not None and hit[0] is rels:
        return hit[1]
    if len(_INDEX) >= 4:
        _INDEX.pop(next(iter(_INDEX)))
    idx = _Relators(rels)
    _INDEX[id(rels)] = (rels, idx)
    return idx


class _Relators:
    def __init__(self, rels):
        self.all = rels
        self.by_first: dict = {}
        for r in sorted(rels):
            self.by_first.setdefault(r[0], []).append(r)
        self.by_len = sorted(rels, key=lambda r: (len(r), r))


def _cyclic_successors(state, s, rel: _Relators, letters, f):
    """Successors of a canonical state within norm ``s``.

    Yields ``(new_state, (idx, k, op, param))``; moves that shrink come first.
    """
    n0 = norm(state)
    for idx, c in enumerate(state):
        # a component that is a whole relator goes first
        for k in range(len(c)):
            w = c[k:] + c[:k]
            if w in rel.all:
                yield state[:idx] + state[idx + 1:], (idx, k, "remove_relator", w)
                break
    done = set()
    for idx, c in enumerate(state):
        if c in done:
            continue
        done.add(c)
        rest = state[:idx] + state[idx + 1:]
        n = len(c)
        rots = []
        seen = set()
        for k in range(n):
            w = c[k:] + c[:k]
            if w not in seen:
                seen.add(w)
                rots.append((k, w))
        for k, w in rots:
            if n >= 2 and w[0] == -w[1]:
                yield _canon_state(rest + (w[2:],)), (idx, k, "cancel", ())
            for r in rel.by_first.get(w[0], ()):
                if len(r) <= n and w[:len(r)] == r:
                    yield _canon_state(rest + (w[len(r):],)), (idx, k, "remove_relator", r)
        for k, w in rots:
            for p in range(1, n):
                yield _canon_state(rest + (w[:p], w[p:])), (idx, k, "split", p)
        if f is None and n0 + 2 > s:
            continue
        for k, w in rots:
            for x in letters:
                new = rest + ((x, -x) + w,)
                if f is None or f(new) <= s:
                    yield _canon_state(new), (idx, k, "insert_pair", (x,))
            for r in rel.by_len:
                if f is None and n0 + len(r) > s:
                    break
                new = rest + (r + w,)
                if f is None or f(new) <= s:
                    yield _canon_state(new), (idx, k, "insert_relator", r)


def _rebuild(start_word, path, relset) -> Derivation:
    """Turn a list of canonical search steps into literal moves."""
    T = [tuple(start_word)] if start_word else []
    D = Derivation(tuple(T), [])
    if not start_word:
        return Derivation(((),), [Move("drop", 0)])
    for parent, (idx, k, op, param) in path:
        c = parent[idx]
        j = next(j for j, w in enumerate(T) if canonical_rotation(w) == c)
        target = c[k:] + c[:k]
        n = len(c)
        sh = next(t for t in range(n) if cyclic_shift(T[j], t) == target)
        if sh:
            D.moves.append(Move("shift", j, sh))
        if op == "split":
            D.moves.append(Move("split", j, param))
        elif op == "cancel":
            D.moves.append(Move("cancel", j, 0))
        else:
            D.moves.append(Move(op, j, 0, param))
        T = list(apply_move(relset, tuple(T) if not sh else
                            apply_move(relset, tuple(T), Move("shift", j, sh)), D.moves[-1]))
        while () in T:
            e = T.index(())
            D.moves.append(Move("drop", e))
            del T[e]
    return D


def space_search(P: GroupPresentation, w: Sequence[int], s_cap: int, budget: int = 10**6,
                 metric: str = "comb", delta=None, relators=None) -> SpaceResult:
    """Least space of a derivation from ``(w)`` to the empty tuple, up to ``s_cap``.

    The combinatorial metric deepens the bound one step at a time; within a
    bound all tuples are explored breadth first, identified up to cyclic
    shifts and reordering.  ``budget`` limits the total number of stored
    tuples.  The modified metric explores once with the bound ``s_cap``,
    ordering states by the largest norm on their path.
    """
    if s_cap <= 0 or budget <= 0:
        raise ValueError("caps must be positive")
    w = tuple(w)
    relset = P.relator_set() if relators is None else relators
    rel = _relator_index(relset)
    letters = _letters(len(P.alphabet))
    start = _canon_state((w,))
    f = None if metric == "comb" else _metric(P, metric, delta)
    init = norm(start) if f is None else f(start)
    if init > s_cap:
        return SpaceResult(w, s_cap, "unreachable")
    if start == ():
        return SpaceResult(w, s_cap, "proven", 0, _rebuild(w, [], relset))
    explored = 0
    if f is not None:
        return _bottleneck_space(w, start, s_cap, budget, rel, letters, f, relset)
    for s in range(init, s_cap + 1):
        parent = {start: None}
        frontier = deque([start])
        explored += 1
        found = None
        while frontier and found is None:
            x = frontier.popleft()
            for y, step in _cyclic_successors(x, s, rel, letters, None):
                if y in parent:
                    continue
                parent[y] = (x, step)
                explored += 1
                if y == ():
                    found = y
                    break
                if explored >= budget:
                    return SpaceResult(w, s_cap, "exhausted", None, None, explored)
                frontier.append(y)
        if found is not None:
            path = []
            y = found
            while parent[y] is not None:
                x, step = parent[y]
                path.append((x, step))
                y = x
            return SpaceResult(w, s_cap, "proven", s, _rebuild(w, path[::-1], relset), explored)
    return SpaceResult(w, s_cap, "unreachable", None, None, explored)


def _bottleneck_space(w, start, s_cap, budget, rel, letters, f, relset):
    import heapq
    import itertools
    best = {start: f(start)}
    parent = {start: None}
    tie = itertools.count()
    heap = [(best[start], next(tie), start)]
    while heap:
        b, _, x = heapq.heappop(heap)
        if b > best[x]:
            continue
        if x == ():
            path = []
            y = x
            while parent[y] is not None:
                px, step = parent[y]
                path.append((px, step))
                y = px
            return SpaceResult(w, s_cap, "proven", b, _rebuild(w, path[::-1], relset), len(best))
        for y, step in _cyclic_successors(x, s_cap, rel, letters, f):
            nb = max(b, f(y))
            if nb < best.get(y, s_cap + 1):
                if y not in best and len(best) >= budget:
                    return SpaceResult(w, s_cap, "exhausted", None, None, len(best))
                best[y] = nb
                parent[y] = (x, step)
                heapq.heappush(heap, (nb, next(tie), y))
    return SpaceResult(w, s_cap, "unreachable", None, None, len(best))


# -- witness derivations from accepting computations ----------------------

class _Tape:
    """A single-word derivation under construction."""

    def __init__(self, w, relset):
        self.w = tuple(w)
        self.rels = relset
        self.moves = []

    def do(self, m: Move):
        self.w = apply_move(self.rels, (self.w,), m)[0]
        self.moves.append(m)

    def insert_pair(self, p, x):
        self.do(Move("insert_pair", 0, p, (x,)))

    def cancel(self, p):
        self.do(Move("cancel", 0, p))

    def shift(self, k):
        if k % max(len(self.w), 1):
            self.do(Move("shift", 0, k % len(self.w)))

    def insert_free(self, p, u):
        """Insert u u^-1 at p."""
        for t, x in enumerate(u):
            self.insert_pair(p + t, x)

    def insert_free_inv(self, p, u):
        """Insert u^-1 u at p."""
        for t, x in enumerate(reversed(u)):
            self.insert_pair(p + t, -x)

    def reduce(self):
        i = 0
        while i + 1 < len(self.w):
            if self.w[i] == -self.w[i + 1]:
                self.cancel(i)
                i = max(i - 1, 0)
            else:
                i += 1

    def replace(self, p, X, Y, r):
        """Rewrite the subword X at p into Y using the relator r (or r^-1)."""
        X, Y = tuple(X), tuple(Y)
        if self.w[p:p + len(X)] != X:
            raise InvalidMove("replace: subword not found")
        Z = Y + invert(X)
        m = len(Z)
        best = None
        for rho in (r, invert(r)):
            if len(rho) != m:
                continue
            for o in range(m):
                if Z[o:] + Z[:o] == rho:
                    cost = m if o >= len(Y) else m + 2 * o
                    if best is None or cost < best[0]:
                        best = (cost, rho, o)
        if best is None:
            raise InvalidMove("replace: relator does not relate the two words")
        _, rho, o = best
        if o >= len(Y):
            x1 = len(X) - (o - len(Y))  # X = X1 X2,  rho = X1^-1 Y X2^-1
            x2 = len(X) - x1
            self.do(Move("insert_relator", 0, p + x1, rho))
            for _ in range(x1):
                self.cancel(p + x1 - 1)
                x1 -= 1
            base = p + len(Y)
            for t in range(x2):
                self.cancel(base + x2 - 1 - t)
        else:
            y1 = Y[:o]  # Y = Y1 Y2,  rho = Y2 X^-1 Y1
            self.insert_free(p, y1)
            self.do(Move("insert_relator", 0, p + o, rho))
            q = p + len(Y) + len(X)
            for t in range(o):
                self.cancel(q + o - 1 - t)
            q = p + len(Y)
            for t in range(len(X)):
                self.cancel(q + len(X) - 1 - t)
        if self.w[p:p + len(Y)] != Y:
            raise AssertionError("replace produced the wrong word")


def _theta_letters(P: GroupPresentation, SL: SMachine, rule, positive_of) -> tuple:
    """Signed theta_1..theta_N of a rule; a negative rule uses inverse letters."""
    if rule.sign > 0:
        name, sg = rule.name, 1
    else:
        name, sg = positive_of[rule.parts].name, -1
    return tuple(sg * P.theta(name, i) for i in range(1, SL.N + 1))


def step_witness(P: GroupPresentation, SL: SMachine, W: AdmissibleWord, rule, tape: _Tape,
                 positive_of) -> None:
    """Expand one application of ``rule`` to ``W`` (held literally on ``tape``)
    into moves ending at the next admissible word.

    The word is conjugated by theta_1 and the theta-letter is walked from
    right to left: each U_i theta_{i+1} becomes theta_i V_i by a (theta,q)
    relator and each sector letter is passed by a commutator.
    """
    from .presentation import _canon, theta_q_relator
    if tape.w != W.word():
        raise AssertionError("tape out of sync")
    N = SL.N
    t = _theta_letters(P, SL, rule, positive_of)
    parts = rule.parts
    lenU = [len(p.lhs.left) + 1 + len(p.lhs.right) for p in parts]
    lenM = []
    # sector j becomes R_j (R_j^-1 s_j L_{j+1}^-1) L_{j+1}, exposing every U_i
    p = 1
    for j in range(N - 1):
        R, Ln = parts[j].lhs.right, parts[j + 1].lhs.left
        ns = len(W.sectors[j])
        tape.insert_free(p, R)
        tape.insert_free_inv(p + 2 * len(R) + ns, Ln)
        lenM.append(len(R) + ns + len(Ln))
        p += 2 * len(R) + ns + 2 * len(Ln) + 1
    n = len(tape.w)
    tape.insert_pair(n, t[0])
    tape.shift(n + 1)  # t1^-1 W t1
    starts = []
    p = 1
    for b in range(N):
        starts.append(p)
        p += lenU[b] + (lenM[b] if b < N - 1 else 0)
    for b in range(N - 1, -1, -1):
        part = parts[b]
        U = part.lhs.left + (part.lhs.state,) + part.lhs.right
        V = part.rhs.left + (part.rhs.state,) + part.rhs.right
        nxt = t[(b + 1) % N]
        if rule.sign > 0:
            r = _canon(theta_q_relator(U, V, t[b], nxt))
        else:
            r = _canon(theta_q_relator(V, U, -t[b], -nxt))
        tape.replace(starts[b], U + (nxt,), (t[b],) + V, r)
        if b > 0:
            g = abs(t[b])
            end = starts[b]  # t_b now sits here, right after M_{b-1}
            for q in range(end - 1, end - 1 - lenM[b - 1], -1):
                a = tape.w[q]
                tape.replace(q, (a, t[b]), (t[b], a), _canon((g, abs(a), -g, -abs(a))))
    tape.cancel(0)
    tape.reduce()


def witness_derivation(P: GroupPresentation, C: SComputation, SL: SMachine | None = None) -> Derivation:
    """Literal derivation of ``(Sigma(u, L))`` to the empty tuple from an
    accepting computation of the multiplied machine."""
    SL = SL or P.machines[0]
    if C.words[-1] != SL.accept_word():
        raise ValueError("computation does not end at the accept word")
    relset = P.relator_set()
    positive_of = {r.inverse().parts: r for r in SL.positive}
    tape = _Tape(C.words[0].word(), relset)
    for W, name, W2 in zip(C.words, C.history, C.words[1:]):
        step_witness(P, SL, W, SL.rule[name], tape, positive_of)
        if tape.w != W2.word():
            raise AssertionError(f"step {name!r} did not reach the next word")
    hub = P.hub
    k = next(k for k in range(len(tape.w)) if cyclic_shift(tape.w, k) == hub)
    tape.shift(k)
    tape.do(Move("remove_relator", 0, 0, hub))
    D = Derivation((C.words[0].word(),), tape.moves + [Move("drop", 0)])
    return D


# -- Savitch-style reach recursion ----------------------------------------

def config_universe(M: tmod.TMachine, f_cap: int) -> list:
    """All configurations with at most ``f_cap`` tape letters, restricted to
    state vectors that occur in M."""
    vectors = {tuple(M.start), tuple(M.accept)}
    for c in M.commands:
        vectors.add(c.lhs_states)
        vectors.add(c.rhs_states)

    def words(alpha, n):
        out = [()]
        layer = [()]
        for _ in range(n):
            layer = [w + (x,) for w in layer for x in alpha]
            out += layer
        return out

    per_tape = []
    for ys in M.tape_alphabets:
        ws = words(sorted(ys), f_cap)
        per_tape.append([(u, v) for u in ws for v in ws if len(u) + len(v) <= f_cap])
    out = []

    def rec(j, acc, used):
        if j == M.tapes:
            for vec in sorted(vectors):
                out.append(tuple((u, q, v) for (u, v), q in zip(acc, vec)))
            return
        for u, v in per_tape[j]:
            if used + len(u) + len(v) <= f_cap:
                rec(j + 1, acc + [(u, v)], used + len(u) + len(v))

    rec(0, [], 0)
    return out


def savitch_space(M: tmod.TMachine, u: Sequence[int], f_cap: int):
    """space_M(u) via the halving reach recursion; None if no accepting
    computation stays within ``f_cap`` tape letters."""
    U = config_universe(M, f_cap)
    size = len(U)
    c = 1
    while 2 ** (c * max(f_cap, 1)) < size:
        c += 1
    k0 = 2 ** (c * max(f_cap, 1))
    index = {w: i for i, w in enumerate(U)}
    cost = [tmod.tape_count(w) for w in U]
    step = [set() for _ in U]
    for i, w in enumerate(U):
        for _, y in tmod.successors(M, w):
            j = index.get(y)
            if j is not None:
                step[i].add(j)

    @lru_cache(maxsize=None)
    def reach(i, j, k):
        if i == j:
            return cost[i]
        if k == 1:
            return max(cost[i], cost[j]) if j in step[i] else None
        h = (k + 1) // 2
        best = None
        for m in range(size):
            a = reach(i, m, h)
            if a is None or best is not None and a >= best:
                continue
            b = reach(m, j, h)
            if b is None:
                continue
            v = max(a, b)
            if best is None or v < best:
                best = v
        return best

    w0 = tmod.input_config(M, u)
    acc = tmod.accept_config(M)
    if w0 not in index or acc not in index:
        return None
    return reach(index[w0], index[acc], k0)


# -- fitting and tables ----------------------------------------------------

def preceq_fit(f_table: Mapping[int, int], g, c_max: int):
    """Least c <= c_max with f(n) <= c g(cn) + cn on every tabulated n.

    ``g`` is a callable or a table; a tabulated g gives no evidence outside
    its keys, so a c that needs g(cn) beyond the table is rejected.
    """
    if callable(g):
        def gv(n):
            return g(n)
    else:
        def gv(n):
            return g.get(n)
    for c in range(1, c_max + 1):
        ok = True
        for n, fn in sorted(f_table.items()):
            v = gv(c * n)
            if v is None or fn > c * v + c * n:
                ok = False
                break
        if ok:
            return c
    return None


def enumerate_words(P: GroupPresentation, n_max: int) -> list:
    """All freely reduced words of length 1..n_max, in shortlex order."""
    letters = sorted(x for g in range(1, len(P.alphabet) + 1) for x in (g, -g))
    out = []
    layer = [()]
    for _ in range(n_max):
        layer = [w + (x,) for w in layer for x in letters if not w or w[-1] != -x]
        out += layer
    return out


def space_function(P: GroupPresentation, n_max: int, s_cap: int, words: Iterable[Sequence[int]],
                   budget: int = 10**5, metric="comb", delta=None, search=None) -> list:
    """Cap-relative lower bounds for the space function.

    Returns rows ``(n, space, cap, status)``: ``space`` is the largest proven
    space over source words of length <= n; status is ``proven`` when every
    such word was settled and ``partial`` otherwise.
    """
    per_len: dict = {}
    relset = P.relator_set()
    for w in words:
        w = tuple(w)
        if len(w) > n_max:
            continue
        res = (search or space_search)(P, w, s_cap, budget, metric, delta, relset)
        best, settled = per_len.get(len(w), (None, True))
        if res.proven:
            best = res.space if best is None else max(best, res.space)
        else:
            settled = False
        per_len[len(w)] = (best, settled)
    proven_lens = [n for n, (b, _) in per_len.items() if b is not None]
    if not proven_lens:
        return []
    rows = []
    best, settled = None, True
    for n in range(0, n_max + 1):
        if n in per_len:
            b, s = per_len[n]
            if b is not None:
                best = b if best is None else max(best, b)
            settled = settled and s
        if n >= min(proven_lens):
            rows.append((n, best, s_cap, "proven" if settled else "partial"))
    return rows


def table_csv(rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["n", "space", "cap", "status"])
    for n, s, cap, st in rows:
        wr.writerow([n, "" if s is None else s, cap, st])
    return buf.getvalue()


def read_table_csv(text: str) -> dict:
    rd = csv.DictReader(io.StringIO(text))
    return {int(r["n"]): int(r["space"]) for r in rd if r["space"] not in ("", None)}
