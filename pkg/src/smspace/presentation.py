"""Finite presentations compiled from multiplied S-machines."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Sequence

from .smachine import SMachine
from .tm import MachineError
from .words import (Alphabet, Symbol, Word, canonical_rotation, cyclic_reduce,
                    default_delta, invert)

CLASSES = ("theta-q", "theta-a", "hub")


@dataclass(frozen=True)
class Relator:
    cls: str
    word: Word


@dataclass(frozen=True)
class GroupPresentation:
    alphabet: Alphabet
    relators: tuple
    meta: dict = field(default_factory=dict, compare=False)
    machines: tuple = field(default=(), compare=False, repr=False)

    @property
    def N(self) -> int:
        return self.meta["N"]

    @property
    def delta(self) -> Fraction:
        return Fraction(self.meta.get("delta", default_delta(self.N)))

    @property
    def hub(self) -> Word:
        return next(r.word for r in self.relators if r.cls == "hub")

    @cached_property
    def _relator_set(self) -> frozenset:
        out = set()
        for r in self.relators:
            out.add(r.word)
            out.add(invert(r.word))
        return frozenset(out)

    def relator_set(self) -> frozenset:
        """Every word insertable by a relator move: each relator and its inverse."""
        return self._relator_set

    def theta(self, rule_name: str, i: int) -> int:
        """Generator id of theta_i (1-based, indices taken mod N)."""
        i = (i - 1) % self.N + 1
        return self.alphabet.id(f"{rule_name}#{i}")

    def counts(self) -> dict:
        out = {c: 0 for c in CLASSES}
        for r in self.relators:
            out[r.cls] += 1
        return out


def _canon(w) -> Word:
    return canonical_rotation(cyclic_reduce(w))


def theta_q_relator(U: Word, V: Word, t_i: int, t_next: int) -> Word:
    """U_i theta_{i+1} V_i^-1 theta_i^-1."""
    return tuple(U) + (t_next,) + invert(V) + (-t_i,)


def _rule_relators(SL: SMachine, r, theta_ids) -> list:
    N = SL.N
    out = []
    for i, p in enumerate(r.parts):
        U = p.lhs.left + (p.lhs.state,) + p.lhs.right
        V = p.rhs.left + (p.rhs.state,) + p.rhs.right
        out.append(Relator("theta-q", _canon(theta_q_relator(U, V, theta_ids[i], theta_ids[(i + 1) % N]))))
    for j, dom in enumerate(r.domains):
        t = theta_ids[j + 1]
        for a in sorted(dom):
            out.append(Relator("theta-a", _canon((t, a, -t, -a))))
    return out


def _theta_symbols(SL: SMachine) -> list:
    return [Symbol(f"{r.name}#{i}", "theta", f"T{i}")
            for r in SL.positive for i in range(1, SL.N + 1)]


def _relators(SL, al) -> list:
    rels = []
    for r in SL.positive:
        ids = [al.id(f"{r.name}#{i}") for i in range(1, SL.N + 1)]
        rels += _rule_relators(SL, r, ids)
    return rels


def _check_multiplied(SL: SMachine):
    if "L" not in SL.meta or "K" not in SL.meta:
        raise MachineError("compile needs a multiplied machine (use multiply first)")


def compile(SL: SMachine, delta=None) -> GroupPresentation:  # noqa: A001
    """(theta,q)-, (theta,a)- and hub relators of G(S, L)."""
    _check_multiplied(SL)
    al = SL.alphabet.extend(_theta_symbols(SL))
    rels = _relators(SL, al)
    rels.append(Relator("hub", _canon(SL.accept_word().word())))
    meta = {"N": SL.N, "L": SL.meta["L"], "K": SL.meta["K"],
            "delta": str(Fraction(delta) if delta is not None else default_delta(SL.N))}
    return GroupPresentation(al, tuple(rels), meta, (SL,))


def compile_embedding(SL: SMachine, SLhat: SMachine, delta=None) -> GroupPresentation:
    """Relators of both G(S, L) and its hat copy plus the shared hub."""
    _check_multiplied(SL)
    _check_multiplied(SLhat)
    if SL.N != SLhat.N:
        raise MachineError("machines have different numbers of state letters")
    al = SL.alphabet.extend(_theta_symbols(SL)).extend(SLhat.alphabet.symbols).extend(_theta_symbols(SLhat))
    rels = _relators(SL, al) + _relators(SLhat, al)
    rels.append(Relator("hub", _canon(SL.accept_word().word())))
    meta = {"N": SL.N, "L": SL.meta["L"], "K": SL.meta["K"],
            "delta": str(Fraction(delta) if delta is not None else default_delta(SL.N))}
    return GroupPresentation(al, tuple(rels), meta, (SL, SLhat))


def shared_generators(SL: SMachine, SLhat: SMachine) -> set:
    return {s.name for s in SL.alphabet} & {s.name for s in SLhat.alphabet}


def sigma_word(SL: SMachine, u: Sequence[int]) -> Word:
    """Sigma(u, L): the input admissible word as a plain group word."""
    return SL.input_word(u).word()


def hub_word(SL: SMachine) -> Word:
    return SL.accept_word().word()


def expected_relator_count(SL: SMachine) -> int:
    return sum(SL.N + sum(len(d) for d in r.domains) for r in SL.positive) + 1


def presentation_to_json(P: GroupPresentation) -> dict:
    al = P.alphabet
    return {
        "generators": [{"name": s.name, "kind": s.kind, "sector": s.block} for s in al],
        "relators": [{"class": r.cls, "word": al.spell(r.word)} for r in P.relators],
        "meta": {k: P.meta[k] for k in ("N", "L", "K", "delta") if k in P.meta},
    }


def presentation_from_json(doc: dict) -> GroupPresentation:
    al = Alphabet(Symbol(g["name"], g["kind"], g.get("sector", "")) for g in doc["generators"])
    rels = []
    for r in doc["relators"]:
        if r["class"] not in CLASSES:
            raise ValueError(f"unknown relator class {r['class']!r}")
        rels.append(Relator(r["class"], al.word(r["word"])))
    return GroupPresentation(al, tuple(rels), dict(doc["meta"]))


def dumps(P: GroupPresentation) -> str:
    return json.dumps(presentation_to_json(P), indent=1, sort_keys=True)
