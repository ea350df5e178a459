"""S-machines: admissible words, rule application, and the constructions
S(M), Z(A), M∘Z, S(L) and its hat variant.

An admissible word is ``q_1 u_1 q_2 ... u_{N-1} q_N``; it is stored as a
pair (states, sectors).  A rule has one part ``L q R -> L' q' R'`` per
state block and one domain per sector; an empty domain is a locked sector.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from . import tm as tmod
from .tm import Fragment, MachineError, SearchResult, bottleneck_search
from .words import Alphabet, Symbol, Word, free_reduce, invert, mirror, project


class DomainViolation(Exception):
    def __init__(self, rule, sector):
        super().__init__(f"rule {rule!r}: sector {sector + 1} leaves the rule's domain")
        self.rule = rule
        self.sector = sector


class AdmissibleWord(NamedTuple):
    states: tuple
    sectors: tuple

    def word(self) -> Word:
        out = [self.states[0]]
        for s, q in zip(self.sectors, self.states[1:]):
            out.extend(s)
            out.append(q)
        return tuple(out)

    def tape_length(self) -> int:
        return sum(len(s) for s in self.sectors)

    def comb_length(self) -> int:
        return len(self.states) + self.tape_length()


@dataclass(frozen=True)
class SPart:
    lhs: Fragment
    rhs: Fragment

    def inverse(self):
        return SPart(self.rhs, self.lhs)


def spart(q, q2=None, left=(), right=()) -> SPart:
    """Part ``q -> left q2 right``."""
    return SPart(Fragment((), q, ()), Fragment(tuple(left), q if q2 is None else q2, tuple(right)))


@dataclass(frozen=True)
class SRule:
    name: str
    parts: tuple
    domains: tuple  # frozenset of symbol ids per sector
    sign: int = 1

    def inverse(self) -> "SRule":
        name = self.name[:-3] if self.name.endswith("^-1") else self.name + "^-1"
        return SRule(name, tuple(p.inverse() for p in self.parts), self.domains, -self.sign)

    @property
    def lhs_states(self):
        return tuple(p.lhs.state for p in self.parts)

    @property
    def rhs_states(self):
        return tuple(p.rhs.state for p in self.parts)

    def locked(self, sector: int) -> bool:
        return not self.domains[sector]


@dataclass(frozen=True)
class SMachine:
    alphabet: Alphabet
    blocks: tuple
    sectors: tuple
    rules: tuple
    start: tuple
    accept: tuple
    input: tuple = ()
    input_slots: tuple = ()  # (sector, ((x, image), ...), mirrored)
    meta: dict = field(default_factory=dict, compare=False)
    aux: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def N(self) -> int:
        return len(self.blocks)

    @cached_property
    def by_states(self) -> dict:
        index: dict = {}
        for r in self.rules:
            index.setdefault(r.lhs_states, []).append(r)
        return index

    @cached_property
    def rule(self) -> dict:
        return {r.name: r for r in self.rules}

    @property
    def positive(self) -> list:
        return [r for r in self.rules if r.sign > 0]

    def word(self, names) -> Word:
        return self.alphabet.word(names)

    def input_word(self, u: Sequence[int]) -> AdmissibleWord:
        u = tuple(u)
        if not set(u) <= set(self.input):
            raise MachineError("input word uses letters outside X")
        sectors = [()] * (self.N - 1)
        for sector, mapping, mirrored in self.input_slots:
            m = dict(mapping)
            w = tuple(m[x] for x in u)
            sectors[sector] = mirror(w) if mirrored else w
        return AdmissibleWord(tuple(self.start), tuple(sectors))

    def input_by_name(self, tokens) -> Word:
        """Input word from base letter names; copy suffixes may be omitted."""
        names = {}
        for x in self.input:
            n = self.alphabet.name(x)
            names[n] = x
            names.setdefault(n.split("@")[0], x)
        try:
            return tuple(names[t] for t in tokens)
        except KeyError as e:
            raise MachineError(f"{e.args[0]!r} is not an input letter") from None

    def accept_word(self) -> AdmissibleWord:
        return AdmissibleWord(tuple(self.accept), ((),) * (self.N - 1))

    def show(self, W: AdmissibleWord) -> str:
        return " ".join(self.alphabet.spell(W.word()))

    def validate(self) -> None:
        n = self.N
        if len(self.sectors) != n - 1 or len(self.start) != n or len(self.accept) != n:
            raise MachineError("block/sector count mismatch")
        names = set()
        for r in self.rules:
            if r.name in names:
                raise MachineError(f"duplicate rule name {r.name!r}")
            names.add(r.name)
            if len(r.parts) != n or len(r.domains) != n - 1:
                raise MachineError(f"rule {r.name!r} has the wrong arity")
            for i, p in enumerate(r.parts):
                for fr in (p.lhs, p.rhs):
                    if fr.state not in self.blocks[i]:
                        raise MachineError(f"{r.name!r}: state outside block {i + 1}")
                    if i == 0 and fr.left or i == n - 1 and fr.right:
                        raise MachineError(f"{r.name!r}: letters outside the outer blocks")
                    if i > 0 and not {abs(x) for x in fr.left} <= r.domains[i - 1]:
                        raise MachineError(f"{r.name!r}: left letters of block {i + 1} outside domain")
                    if i < n - 1 and not {abs(x) for x in fr.right} <= r.domains[i]:
                        raise MachineError(f"{r.name!r}: right letters of block {i + 1} outside domain")
            for j, d in enumerate(r.domains):
                if not d <= set(self.sectors[j]):
                    raise MachineError(f"{r.name!r}: domain of sector {j + 1} exceeds Y_{j + 1}")
        by_sign = {1: set(), -1: set()}
        for r in self.rules:
            by_sign.setdefault(r.sign, set()).add(r.parts)
        for r in self.rules:
            inv = r.inverse().parts
            if inv not in by_sign.get(-r.sign, ()) and inv != r.parts:
                raise MachineError(f"rule {r.name!r} has no inverse")


def _apply(W: AdmissibleWord, r: SRule, check=True):
    parts = r.parts
    if check:
        for i, p in enumerate(parts):
            if W.states[i] != p.lhs.state:
                raise MachineError(f"rule {r.name!r}: state mismatch at block {i + 1}")
        for j, s in enumerate(W.sectors):
            dom = r.domains[j]
            for x in s:
                if abs(x) not in dom:
                    raise DomainViolation(r.name, j)
    out = []
    for j, s in enumerate(W.sectors):
        a, b = parts[j], parts[j + 1]
        w = a.rhs.right + invert(a.lhs.right) + s + invert(b.lhs.left) + b.rhs.left
        out.append(free_reduce(w))
    return AdmissibleWord(r.rhs_states, tuple(out))


def s_apply(S: SMachine, W: AdmissibleWord, r: SRule) -> AdmissibleWord:
    return _apply(W, r)


def applicable(W: AdmissibleWord, r: SRule) -> bool:
    if W.states != r.lhs_states:
        return False
    return all(abs(x) in d for s, d in zip(W.sectors, r.domains) for x in s)


def successors(S: SMachine, W: AdmissibleWord):
    for r in S.by_states.get(W.states, ()):
        if applicable(W, r):
            yield r, _apply(W, r, check=False)


@dataclass
class SComputation:
    start: AdmissibleWord
    history: tuple
    words: tuple = ()

    @property
    def space(self) -> int:
        return max(w.tape_length() for w in self.words)

    def __len__(self):
        return len(self.history)


def run(S: SMachine, W: AdmissibleWord, history: Iterable[str]) -> SComputation:
    words = [W]
    hist = tuple(history)
    for name in hist:
        words.append(s_apply(S, words[-1], S.rule[name]))
    return SComputation(W, hist, tuple(words))


def is_reduced_history(h: Sequence[str], S: SMachine) -> bool:
    return all(S.rule[a].inverse().parts != S.rule[b].parts for a, b in zip(h, h[1:]))


def s_space_search(S: SMachine, W: AdmissibleWord, space_cap: int, time_cap: int = 10**6,
                   target: AdmissibleWord | None = None) -> SearchResult:
    """Minimal space of a computation from ``W`` to ``target`` (the accept word)."""
    if space_cap < 0 or time_cap <= 0:
        raise ValueError("caps must be positive")
    goal = S.accept_word() if target is None else target
    return bottleneck_search(W, goal, lambda x: ((r.name, y) for r, y in successors(S, x)),
                             AdmissibleWord.tape_length, space_cap, time_cap)


def shortest_history(S: SMachine, W: AdmissibleWord, target: AdmissibleWord,
                     space_cap: int, budget: int = 10**6):
    """Breadth-first shortest history from ``W`` to ``target``; None if none within caps."""
    if W == target:
        return ()
    parent = {W: None}
    frontier = [W]
    while frontier:
        nxt = []
        for x in frontier:
            for r, y in successors(S, x):
                if y in parent or y.tape_length() > space_cap:
                    continue
                parent[y] = (r.name, x)
                if y == target:
                    hist = []
                    while parent[y] is not None:
                        name, y = parent[y]
                        hist.append(name)
                    return tuple(reversed(hist))
                nxt.append(y)
        if len(parent) > budget:
            return None
        frontier = nxt
    return None


def _symmetric(rules: list) -> tuple:
    return tuple(rules) + tuple(r.inverse() for r in rules)


def _dom(ids) -> frozenset:
    return frozenset(ids)


# -- S(M) --------------------------------------------------------------------

def s_from_tm(M: tmod.TMachine) -> SMachine:
    """Read each TM command as an S-rule over blocks alpha_j, Q_j, omega_j."""
    if not M.symmetric:
        raise MachineError("s_from_tm needs a symmetric machine")
    if any(c.letters > 1 for c in M.commands):
        raise MachineError("s_from_tm needs single-letter commands")
    k = M.tapes
    al = M.alphabet.extend(
        [Symbol(f"alpha{j + 1}", "q", f"A{j + 1}") for j in range(k)]
        + [Symbol(f"omega{j + 1}", "q", f"O{j + 1}") for j in range(k)])
    alpha = [al.id(f"alpha{j + 1}") for j in range(k)]
    omega = [al.id(f"omega{j + 1}") for j in range(k)]
    blocks, sectors = [], []
    for j in range(k):
        blocks += [(alpha[j],), tuple(M.state_blocks[j]), (omega[j],)]
        sectors += [tuple(M.tape_alphabets[j]), tuple(M.tape_alphabets[j])]
        if j < k - 1:
            sectors.append(())
    rules = []
    for c in M.commands:
        parts, doms = [], []
        for j, p in enumerate(c.parts):
            y = _dom(M.tape_alphabets[j])
            parts += [spart(alpha[j]), SPart(p.lhs, p.rhs), spart(omega[j])]
            doms += [frozenset() if p.alpha else y, frozenset() if p.omega else y]
            if j < k - 1:
                doms.append(frozenset())
        rules.append(SRule(c.name, tuple(parts), tuple(doms), c.sign))
    start, accept = [], []
    for j in range(k):
        start += [alpha[j], M.start[j], omega[j]]
        accept += [alpha[j], M.accept[j], omega[j]]
    return SMachine(al, tuple(blocks), tuple(sectors), tuple(rules), tuple(start),
                    tuple(accept), tuple(M.input),
                    ((0, tuple((x, x) for x in M.input), False),),
                    {"kind": "S(M)", "tapes": k})


# -- Z(A) --------------------------------------------------------------------

def _z_rules(A, c1, c2, L, p, R):
    """Positive rules of the adding machine as (name, (L-part, p-part, R-part), domains).

    ``c1``/``c2`` map letters of A to their two copies, ``p`` is (p1, p2, p3).
    """
    p1, p2, p3 = p
    y1 = _dom(list(A) + [c1[a] for a in A])
    y2 = _dom(c2[a] for a in A)
    yA = _dom(A)
    idle_l, idle_r = spart(L), spart(R)
    out = []
    for a in A:
        out.append((f"r1({a})", (idle_l, spart(p1, p1, (-c1[a],), (c2[a],)), idle_r), (y1, y2), a))
        out.append((f"r12({a})", (idle_l, spart(p1, p2, (-a, c1[a])), idle_r), (y1, y2), a))
        out.append((f"r2({a})", (idle_l, spart(p2, p2, (a,), (-c2[a],)), idle_r), (y1, y2), a))
        out.append((f"r3({a})", (idle_l, spart(p3, p3, (a,), (-c2[a],)), idle_r), (yA, y2), a))
    out.append(("r21", (idle_l, spart(p2, p1), idle_r), (y1, frozenset()), None))
    out.append(("r13", (idle_l, spart(p1, p3), idle_r), (frozenset(), y2), None))
    return out


def build_adding(A: Alphabet) -> SMachine:
    """The adding machine Z(A) with blocks {L}, {p1,p2,p3}, {R}."""
    if len(A) == 0:
        raise MachineError("Z(A) needs a nonempty alphabet")
    if any(s.kind != "a" for s in A):
        raise MachineError("Z(A) takes tape letters only")
    syms = [Symbol(s.name, "a", "Y1") for s in A]
    syms += [Symbol(f"{s.name}.1", "a", "Y1") for s in A]
    syms += [Symbol(f"{s.name}.2", "a", "Y2") for s in A]
    syms += [Symbol("L", "q", "L"), Symbol("p1", "q", "P"), Symbol("p2", "q", "P"),
             Symbol("p3", "q", "P"), Symbol("R", "q", "R")]
    al = Alphabet(syms)
    ids = [al.id(s.name) for s in A]
    c1 = {a: al.id(al.name(a) + ".1") for a in ids}
    c2 = {a: al.id(al.name(a) + ".2") for a in ids}
    L, p1, p2, p3, R = (al.id(n) for n in ("L", "p1", "p2", "p3", "R"))
    rules = []
    for name, parts, doms, a in _z_rules(ids, c1, c2, L, (p1, p2, p3), R):
        if a is not None:
            name = name.replace(f"({a})", f"({al.name(a)})")
        rules.append(SRule(name, parts, doms))
    base = {x: x for x in ids}
    base.update({c1[a]: a for a in ids})
    base.update({c2[a]: a for a in ids})
    return SMachine(al, ((L,), (p1, p2, p3), (R,)),
                    (tuple(ids) + tuple(c1.values()), tuple(c2.values())),
                    _symmetric(rules), (L, p1, R), (L, p3, R), tuple(ids),
                    ((0, tuple((x, x) for x in ids), False),),
                    {"kind": "Z"}, {"c1": c1, "c2": c2, "base": base})


def z_accept_word(Z: SMachine, u: Sequence[int]) -> AdmissibleWord:
    return AdmissibleWord(Z.accept, (tuple(u), ()))


def canonical_z_run(Z: SMachine, u: Sequence[int]) -> SComputation:
    """The counter run from L u p1 R to L u p3 R."""
    u = tuple(u)
    if any(x <= 0 or x not in Z.input for x in u):
        raise MachineError("canonical run needs a positive word over A")
    c1, base = Z.aux["c1"], Z.aux["base"]
    name = Z.alphabet.name
    p1, p2, p3 = Z.blocks[1]
    W = Z.input_word(u)
    words, hist = [W], []

    def step(rn):
        nonlocal W
        W = _apply(W, Z.rule[rn])
        words.append(W)
        hist.append(rn)

    while True:
        left, right = W.sectors
        q = W.states[1]
        if q == p1:
            if not left:
                step("r13")
            elif left[-1] in c1.values():
                step(f"r1({name(base[left[-1]])})")
            else:
                step(f"r12({name(left[-1])})")
        elif q == p2:
            if right:
                step(f"r2({name(base[right[0]])})")
            else:
                step("r21")
        else:
            if not right:
                break
            step(f"r3({name(base[right[0]])})")
    return SComputation(words[0], tuple(hist), tuple(words))


# -- M∘Z ---------------------------------------------------------------------

def compose(M: tmod.TMachine) -> SMachine:
    """Insert a p-letter between consecutive state letters of S(M) and guard
    every basic rule with adding-machine runs on each sector."""
    if not M.symmetric:
        raise MachineError("compose needs a symmetric machine")
    problems = tmod.check_s10(M)
    if problems:
        raise MachineError("compose needs an s10 machine: " + "; ".join(problems))
    if any(c.letters > 1 for c in M.commands):
        raise MachineError("compose needs single-letter commands")
    S = s_from_tm(M)
    return _compose_s(S, M)


def _compose_s(S: SMachine, M=None) -> SMachine:
    al0 = S.alphabet
    l = S.N - 1
    pos = S.positive
    start_rule = [r for r in pos if r.lhs_states == S.start]
    accept_rule = [r for r in pos if r.rhs_states == S.accept]
    if len(start_rule) != 1 or len(accept_rule) != 1:
        raise MachineError("need exactly one start and one accept rule")
    start_rule, accept_rule = start_rule[0], accept_rule[0]
    syms = list(al0.symbols)
    for i in range(l):
        for y in S.sectors[i]:
            syms.append(Symbol(f"{al0.name(y)}.{i + 1}.1", "a", f"Y{2 * i + 1}"))
            syms.append(Symbol(f"{al0.name(y)}.{i + 1}.2", "a", f"Y{2 * i + 2}"))
        syms.append(Symbol(f"p{i + 1}", "q", f"P{i + 1}"))
        for r in pos:
            for j in (1, 2, 3):
                for sg in "-+":
                    syms.append(Symbol(f"p{i + 1}[{r.name},{j}{sg}]", "q", f"P{i + 1}"))
    al = Alphabet(syms)
    c1 = [{y: al.id(f"{al0.name(y)}.{i + 1}.1") for y in S.sectors[i]} for i in range(l)]
    c2 = [{y: al.id(f"{al0.name(y)}.{i + 1}.2") for y in S.sectors[i]} for i in range(l)]
    pid = [al.id(f"p{i + 1}") for i in range(l)]

    def pst(i, r, j, sg):
        return al.id(f"p{i + 1}[{r.name},{j}{sg}]")

    blocks, sectors = [], []
    for i in range(l + 1):
        blocks.append(tuple(S.blocks[i]))
        if i < l:
            blocks.append(tuple([pid[i]] + [pst(i, r, j, sg) for r in pos for j in (1, 2, 3) for sg in "-+"]))
            sectors.append(tuple(S.sectors[i]) + tuple(c1[i].values()))
            sectors.append(tuple(c2[i].values()))
    E = frozenset()

    def assemble(kparts, pparts, doms):
        parts = []
        for i in range(l):
            parts += [kparts[i], pparts[i]]
        parts.append(kparts[l])
        return tuple(parts), tuple(doms)

    rules = []
    basic = {}
    for r in pos:
        is_start, is_acc = r is start_rule, r is accept_rule
        # basic rule: K-blocks carry the right-hand letters of theta, P-blocks the left ones
        kparts = [SPart(Fragment((), p.lhs.state, p.lhs.right), Fragment((), p.rhs.state, p.rhs.right))
                  for p in r.parts]
        pparts, doms = [], []
        for i in range(l):
            nxt = r.parts[i + 1]
            a = pid[i] if is_start else pst(i, r, 3, "-")
            b = pid[i] if is_acc else pst(i, r, 1, "+")
            pparts.append(SPart(Fragment(nxt.lhs.left, a, ()), Fragment(nxt.rhs.left, b, ())))
            doms += [r.domains[i], E]
        name = f"{r.name}~"
        rules.append(SRule(name, *assemble(kparts, pparts, doms)))
        basic[name] = r.name
        phases = []
        if not is_start:
            phases.append(("-", r.lhs_states))
        if not is_acc:
            phases.append(("+", r.rhs_states))
        for sg, kst in phases:
            for i in range(l):
                ys = list(S.sectors[i])
                zr = _z_rules(ys, c1[i], c2[i], kst[i], tuple(pst(i, r, j, sg) for j in (1, 2, 3)), kst[i + 1])
                for zname, (zl, zp, zr_), zdoms, a in zr:
                    if a is not None:
                        zname = zname.replace(f"({a})", f"({al.name(a)})")
                    kp = [spart(q) for q in kst]
                    kp[i], kp[i + 1] = zl, zr_
                    pp, dd = [], []
                    for s in range(l):
                        if s < i:
                            pp.append(spart(pst(s, r, 3, sg)))
                            dd += [_dom(S.sectors[s]), E]
                        elif s > i:
                            pp.append(spart(pst(s, r, 1, sg)))
                            dd += [_dom(S.sectors[s]), E]
                        else:
                            pp.append(zp)
                            dd += list(zdoms)
                    rules.append(SRule(f"Z{i + 1}({r.name},{sg}):{zname}", *assemble(kp, pp, dd)))
            kp = [spart(q) for q in kst]
            if sg == "-":
                pp = [spart(pid[s], pst(s, r, 1, "-")) for s in range(l)]
            else:
                pp = [spart(pst(s, r, 3, "+"), pid[s]) for s in range(l)]
            dd = []
            for s in range(l):
                dd += [_dom(S.sectors[s]), E]
            rules.append(SRule(f"zeta({r.name},{sg})", *assemble(kp, pp, dd)))

    def interleave(vec):
        out = []
        for i in range(l):
            out += [vec[i], pid[i]]
        return tuple(out + [vec[l]])

    strip = {x: x for x in range(1, len(al0) + 1)}
    for i in range(l):
        strip.update({v: k for k, v in c1[i].items()})
        strip.update({v: k for k, v in c2[i].items()})
    for b in blocks[1::2]:
        strip.update({x: None for x in b})
    slots = tuple((2 * sec, mp, mi) for sec, mp, mi in S.input_slots)
    return SMachine(al, tuple(blocks), tuple(sectors), _symmetric(rules),
                    interleave(S.start), interleave(S.accept), S.input, slots,
                    {"kind": "MZ"}, {"base": S, "basic": basic, "strip": strip, "tm": M})


def strip_word(MZ: SMachine, W: AdmissibleWord) -> AdmissibleWord:
    """Delete p-letters and map copies back to base letters."""
    strip = MZ.aux["strip"]
    states = tuple(q for q in W.states if strip[q] is not None)
    secs = tuple(free_reduce(project(W.sectors[2 * i] + W.sectors[2 * i + 1], strip))
                 for i in range(len(W.sectors) // 2))
    return AdmissibleWord(states, secs)


def project_history(MZ: SMachine, C: SComputation) -> SComputation:
    """Keep only the basic rules and strip the p-letters."""
    basic = MZ.aux["basic"]
    words, hist = [], []
    for t, name in enumerate(C.history):
        base = name[:-3] if name.endswith("^-1") else name
        if base in basic:
            if not words:
                words.append(strip_word(MZ, C.words[t]))
            hist.append(basic[base] if base == name else MZ.aux["base"].rule[basic[base]].inverse().name)
            words.append(strip_word(MZ, C.words[t + 1]))
    if not words:
        words = [strip_word(MZ, C.words[0])]
    return SComputation(words[0], tuple(hist), tuple(words))


# -- S(L) and the hat variant -------------------------------------------------

def _copy_layout(S: SMachine, L: int):
    """Block order and sector map of S(L): a list per copy of base block indices."""
    B = S.N
    order = []
    for c in range(1, L + 1):
        order.append(list(range(B)) if c % 2 else list(range(B - 1, -1, -1)))
    return order


def multiply(S: SMachine, L: int, _hat=False) -> SMachine:
    """L/2 copies and L/2 mirror copies of ``S`` separated by k-letters."""
    if L < 2 or L % 2:
        raise MachineError("L must be even and at least 2")
    B = S.N
    al0 = S.alphabet
    hat_keep = set(S.start) | set(S.accept) | set(S.input)

    def cname(x, c):
        n = al0.name(x)
        if _hat and x not in hat_keep:
            n += "^"
        return n if c == 1 else f"{n}@{c}"

    syms = []
    maps = []
    for c in range(1, L + 1):
        syms.append(Symbol(f"#k{c}", "k", f"k{c}"))
        m = {}
        for x in range(1, len(al0) + 1):
            s = al0.symbol(x)
            if _hat and c == 1 and s.kind == "a":
                m[x] = None
                continue
            syms.append(Symbol(cname(x, c), s.kind, f"{s.block}@{c}"))
        maps.append(m)
    al = Alphabet(syms)
    for c, m in enumerate(maps, start=1):
        for x in range(1, len(al0) + 1):
            if x not in m:
                m[x] = al.id(cname(x, c))
    order = _copy_layout(S, L)
    blocks, sectors = [], []
    # sector positions per copy: base sector j (between base blocks j, j+1)
    sector_pos = []
    E = frozenset()
    for c in range(L):
        m = maps[c]
        blocks.append((al.id(f"#k{c + 1}"),))
        sectors.append(())
        pos = {}
        for t, b in enumerate(order[c]):
            blocks.append(tuple(m[q] for q in S.blocks[b]))
            if t < B - 1:
                j = b if c % 2 == 0 else b - 1
                pos[j] = len(sectors)
                sectors.append(tuple(m[y] for y in S.sectors[j] if m[y]))
        sector_pos.append(pos)
        if c < L - 1:
            sectors.append(())
    rules = []
    for r in S.rules:
        parts, doms = [], [E] * len(sectors)
        for c in range(L):
            m = maps[c]
            mp = lambda w: tuple(project(w, m))  # noqa: E731
            parts.append(spart(al.id(f"#k{c + 1}")))
            for b in order[c]:
                p = r.parts[b]
                if c % 2 == 0:
                    lhs = Fragment(mp(p.lhs.left), m[p.lhs.state], mp(p.lhs.right))
                    rhs = Fragment(mp(p.rhs.left), m[p.rhs.state], mp(p.rhs.right))
                else:
                    lhs = Fragment(mirror(mp(p.lhs.right)), m[p.lhs.state], mirror(mp(p.lhs.left)))
                    rhs = Fragment(mirror(mp(p.rhs.right)), m[p.rhs.state], mirror(mp(p.rhs.left)))
                parts.append(SPart(lhs, rhs))
            for j, sp in sector_pos[c].items():
                doms[sp] = frozenset(m[y] for y in r.domains[j] if m[y])
        name = r.name + "^" if _hat else r.name
        rules.append(SRule(name, tuple(parts), tuple(doms), r.sign))

    def vec(states):
        out = []
        for c in range(L):
            out.append(al.id(f"#k{c + 1}"))
            out += [maps[c][states[b]] for b in order[c]]
        return tuple(out)

    first = 1 if _hat else 0
    inp = tuple(maps[first][x] for x in S.input)
    slots = []
    for c in range(first, L):
        for sec, mapping, _ in S.input_slots:
            img = tuple((maps[first][x], maps[c][y]) for x, y in mapping)
            slots.append((sector_pos[c][sec], img, c % 2 == 1))
    K = B
    return SMachine(al, tuple(blocks), tuple(sectors), tuple(rules), vec(S.start),
                    vec(S.accept), inp, tuple(slots),
                    {"kind": "S(L)^" if _hat else "S(L)", "L": L, "K": K, "N": (K + 1) * L},
                    {"base": S, "maps": maps})


def hat_variant(S: SMachine, L: int) -> SMachine:
    """S^(L): fresh letters except start/accept states, separators and input,
    and no tape letters in the first copy."""
    return multiply(S, L, _hat=True)


# -- serialization ------------------------------------------------------------

def _ftoks(al, fr: Fragment):
    return al.spell(fr.left) + [al.name(fr.state)] + al.spell(fr.right)


def smachine_to_json(S: SMachine) -> dict:
    al = S.alphabet
    names = lambda xs: [al.name(x) for x in xs]  # noqa: E731
    return {
        "alphabet": al.to_json(),
        "state_blocks": [names(b) for b in S.blocks],
        "tape_alphabets": [names(y) for y in S.sectors],
        "input": names(S.input),
        "input_slots": [{"sector": s, "map": [[al.name(x), al.name(y)] for x, y in m], "mirrored": mi}
                        for s, m, mi in S.input_slots],
        "rules": [{"name": r.name, "sign": r.sign,
                   "parts": [{"lhs": _ftoks(al, p.lhs), "rhs": _ftoks(al, p.rhs)} for p in r.parts],
                   "domains": [sorted(names(d)) for d in r.domains],
                   "locked": [not d for d in r.domains]}
                  for r in S.rules],
        "start": names(S.start),
        "accept": names(S.accept),
        "meta": {k: v for k, v in S.meta.items() if isinstance(v, (int, str))},
    }


def _pfrag(al, toks, block, where):
    ids = al.word(toks)
    pos = [i for i, x in enumerate(ids) if x in block]
    if len(pos) != 1:
        raise MachineError(f"{where}: expected exactly one state letter")
    i = pos[0]
    return Fragment(ids[:i], ids[i], ids[i + 1:])


def smachine_from_json(doc: dict) -> SMachine:
    al = Alphabet.from_json(doc["alphabet"])
    ids = lambda xs: tuple(al.id(x) for x in xs)  # noqa: E731
    blocks = tuple(ids(b) for b in doc["state_blocks"])
    rules = []
    for r in doc["rules"]:
        parts = tuple(SPart(_pfrag(al, p["lhs"], set(blocks[i]), r["name"]),
                            _pfrag(al, p["rhs"], set(blocks[i]), r["name"]))
                      for i, p in enumerate(r["parts"]))
        rules.append(SRule(r["name"], parts, tuple(frozenset(ids(d)) for d in r["domains"]),
                           r.get("sign", 1)))
    slots = tuple((s["sector"], tuple((al.id(x), al.id(y)) for x, y in s["map"]), s["mirrored"])
                  for s in doc.get("input_slots", []))
    S = SMachine(al, blocks, tuple(ids(y) for y in doc["tape_alphabets"]), tuple(rules),
                 ids(doc["start"]), ids(doc["accept"]), ids(doc.get("input", [])), slots,
                 dict(doc.get("meta", {})))
    S.validate()
    return S


def word_to_json(S: SMachine, W: AdmissibleWord) -> list:
    return S.alphabet.spell(W.word())


def word_from_json(S: SMachine, toks) -> AdmissibleWord:
    w = S.alphabet.word(toks)
    states, sectors, cur = [], [], []
    i = 0
    for x in w:
        if i < S.N and x in S.blocks[i]:
            if states:
                sectors.append(free_reduce(cur))
            states.append(x)
            cur = []
            i += 1
        else:
            cur.append(x)
    if len(states) != S.N or cur:
        raise MachineError("not an admissible word")
    return AdmissibleWord(tuple(states), tuple(sectors))


def computation_to_json(S: SMachine, C: SComputation) -> dict:
    return {"start": word_to_json(S, C.start), "history": list(C.history), "space": C.space}


def dumps(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True)


def random_computation(S: SMachine, W: AdmissibleWord, steps: int, space_cap: int,
                       rng: random.Random, reduced=True) -> SComputation:
    """Random walk avoiding immediate backtracking and words above the cap."""
    words, hist = [W], []
    for _ in range(steps):
        opts = [(r, y) for r, y in successors(S, words[-1]) if y.tape_length() <= space_cap]
        if reduced and hist:
            back = S.rule[hist[-1]].inverse().parts
            opts = [(r, y) for r, y in opts if r.parts != back]
        if not opts:
            break
        r, y = opts[rng.randrange(len(opts))]
        hist.append(r.name)
        words.append(y)
    return SComputation(W, tuple(hist), tuple(words))
