"""Alphabets, signed letters and group words.

A word is a plain tuple of non-zero ints: ``+i`` is the i-th symbol of an
:class:`Alphabet` and ``-i`` its inverse.  Words are immutable, so they can
be shared freely between search frontiers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Word = tuple  # tuple[int, ...]

KINDS = ("q", "a", "theta", "k")
STATE_KINDS = frozenset({"q", "k"})


class AlphabetError(ValueError):
    pass


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: str
    block: str = ""


class Alphabet:
    """An interned, immutable registry of named symbols.

    Every symbol carries a kind (``q`` state, ``a`` tape, ``theta`` command,
    ``k`` separator) and the name of the partition block it lives in.
    """

    __slots__ = ("symbols", "_index")

    def __init__(self, symbols: Iterable[Symbol] = ()):
        syms = []
        index = {}
        for s in symbols:
            if s.kind not in KINDS:
                raise AlphabetError(f"unknown kind {s.kind!r} for {s.name!r}")
            if not s.name or s.name.startswith("-"):
                raise AlphabetError(f"bad symbol name {s.name!r}")
            if s.name in index:
                old = syms[index[s.name] - 1]
                if old != s:
                    raise AlphabetError(f"symbol {s.name!r} redeclared as {s}")
                continue
            syms.append(s)
            index[s.name] = len(syms)
        self.symbols = tuple(syms)
        self._index = index

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, name):
        return name in self._index

    def __iter__(self):
        return iter(self.symbols)

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return f"Alphabet({len(self)} symbols)"

    def extend(self, symbols: Iterable[Symbol]) -> "Alphabet":
        """Return a larger alphabet; ids of existing symbols are kept."""
        return Alphabet(list(self.symbols) + list(symbols))

    def id(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise AlphabetError(f"unknown symbol {name!r}") from None

    def symbol(self, letter: int) -> Symbol:
        return self.symbols[abs(letter) - 1]

    def name(self, letter: int) -> str:
        return self.symbols[abs(letter) - 1].name

    def kind(self, letter: int) -> str:
        return self.symbols[abs(letter) - 1].kind

    def ids_of_kind(self, *kinds: str) -> list[int]:
        return [i + 1 for i, s in enumerate(self.symbols) if s.kind in kinds]

    def letter(self, token: str) -> int:
        if token.startswith("-"):
            return -self.id(token[1:])
        return self.id(token)

    def word(self, tokens: Iterable[str]) -> Word:
        """Parse ``["a", "-b"]`` into a word."""
        return tuple(self.letter(t) for t in tokens)

    def spell(self, w: Sequence[int]) -> list[str]:
        return [self.name(x) if x > 0 else "-" + self.name(x) for x in w]

    def to_json(self) -> dict:
        return {"symbols": [{"name": s.name, "kind": s.kind, "block": s.block}
                            for s in self.symbols]}

    @classmethod
    def from_json(cls, doc: Mapping) -> "Alphabet":
        return cls(Symbol(d["name"], d["kind"], d.get("block", ""))
                   for d in doc["symbols"])

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def invert(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def concat(*ws: Sequence[int]) -> Word:
    out = []
    for w in ws:
        out.extend(w)
    return tuple(out)


def free_reduce(w: Sequence[int]) -> Word:
    stack = []
    for x in w:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def is_reduced(w: Sequence[int]) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def is_cyclically_reduced(w: Sequence[int]) -> bool:
    return is_reduced(w) and (len(w) < 2 or w[0] != -w[-1])


def cyclic_reduce(w: Sequence[int]) -> Word:
    w = free_reduce(w)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return tuple(w[i:j + 1])


def is_positive(w: Sequence[int]) -> bool:
    return all(x > 0 for x in w)


def cyclic_shift(w: Sequence[int], k: int) -> Word:
    """Rotate ``w`` left by ``k`` positions."""
    if not w:
        return ()
    k %= len(w)
    return tuple(w[k:]) + tuple(w[:k])


def canonical_rotation(w: Sequence[int]) -> Word:
    """Lexicographically least rotation (by letter code)."""
    w = tuple(w)
    if len(w) < 2:
        return w
    return min(w[k:] + w[:k] for k in range(len(w)))


def mirror(w: Sequence[int]) -> Word:
    """Reverse the letter order, keeping every letter (not its inverse)."""
    return tuple(reversed(w))


def project(w: Sequence[int], mapping: Mapping[int, int | None]) -> Word:
    """Map every symbol through ``mapping`` (symbol id -> id or None).

    Signs are preserved and symbols mapped to ``None`` are dropped.  The
    result is not reduced.
    """
    out = []
    for x in w:
        try:
            image = mapping[abs(x)]
        except KeyError:
            raise KeyError(f"projection undefined on symbol {abs(x)}") from None
        if image:
            out.append(image if x > 0 else -image)
    return tuple(out)


def comb_length(w: Sequence[int]) -> int:
    return len(w)


def tape_length(w: Sequence[int], alphabet: Alphabet) -> int:
    """Number of a-letters."""
    return sum(1 for x in w if alphabet.kind(x) == "a")


def modified_length(w: Sequence[int], alphabet: Alphabet, delta) -> Fraction:
    """Length with q-letters weighing 1 and surplus a-letters weighing delta.

    ``w`` is cut at its q-letters; a q-free block with s theta-letters and
    t a-letters has length ``s + delta * max(0, t - s)``.
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    total = Fraction(0)
    s = t = 0
    for x in w:
        kind = alphabet.kind(x)
        if kind in STATE_KINDS:
            total += s + delta * max(0, t - s) + 1
            s = t = 0
        elif kind == "theta":
            s += 1
        else:
            t += 1
    return total + s + delta * max(0, t - s)


def default_delta(n_state_letters: int) -> Fraction:
    """The largest ``1/m`` strictly below ``1/(3N)``."""
    return Fraction(1, 3 * n_state_letters + 1)


def tuple_norm(words: Iterable[Sequence[int]]) -> int:
    return sum(len(w) for w in words)
