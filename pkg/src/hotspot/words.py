"""Words over the positive integers and the cylinder sets they name.

A cylinder ``[w]`` is the set of digit sequences starting with ``w``; it is
identified with its word, so the functions here take and return :class:`Word`
values.  Any two cylinders are nested or disjoint, which is what makes covers
and complements finitely manageable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

EMPTY_SYMBOL = "ε"


class Word(tuple):
    """Immutable finite sequence of digits ``>= 1``.  The empty word is X."""

    __slots__ = ()

    def __new__(cls, digits: Iterable[int] = ()):
        digits = tuple(digits)
        for d in digits:
            if isinstance(d, bool) or int(d) != d:
                raise ValueError(f"digit {d!r} is not an integer")
            if d < 1:
                raise ValueError(f"digit {d} is not positive")
        return super().__new__(cls, (int(d) for d in digits))

    def __repr__(self) -> str:
        return f"Word({format_word(self)})"

    def __str__(self) -> str:
        return format_word(self)

    def __add__(self, other):
        return Word(tuple(self) + tuple(other))

    def __getitem__(self, key):
        out = super().__getitem__(key)
        return Word(out) if isinstance(key, slice) else out

    def extend(self, digit: int) -> "Word":
        return Word(tuple(self) + (digit,))

    def is_prefix_of(self, other: Sequence[int]) -> bool:
        return len(self) <= len(other) and tuple(other[: len(self)]) == tuple(self)


def parse_word(text: str) -> Word:
    """Parse ``"3,4"`` (or ``"ε"`` / ``""`` for the empty word)."""
    text = text.strip()
    if text in ("", EMPTY_SYMBOL):
        return Word()
    try:
        digits = [int(part) for part in text.split(",")]
    except ValueError as exc:
        raise ValueError(f"malformed word {text!r}") from exc
    return Word(digits)


def format_word(word: Sequence[int]) -> str:
    return ",".join(str(d) for d in word) if len(word) else EMPTY_SYMBOL


class Relation(enum.Enum):
    EQUAL = "equal"
    A_CONTAINS_B = "a_contains_b"
    B_CONTAINS_A = "b_contains_a"
    DISJOINT = "disjoint"


def relate(a: Word, b: Word) -> Relation:
    """Set relation between the cylinders ``[a]`` and ``[b]``.

    A shorter word names a larger set, so ``[a]`` contains ``[b]`` exactly when
    ``a`` is a proper prefix of ``b``.
    """
    if tuple(a) == tuple(b):
        return Relation.EQUAL
    if Word.is_prefix_of(a, b):
        return Relation.A_CONTAINS_B
    if Word.is_prefix_of(b, a):
        return Relation.B_CONTAINS_A
    return Relation.DISJOINT


@dataclass(frozen=True)
class CylinderUnion:
    """A finite union of cylinders in canonical antichain form.

    Members are pairwise disjoint and sorted lexicographically; build instances
    with :func:`canonicalize` rather than by hand.
    """

    members: tuple[Word, ...] = ()

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, word) -> bool:
        return Word(word) in self.members

    def covers_point(self, prefix: Sequence[int]) -> bool:
        """True if a point whose first digits are ``prefix`` lies in the union.

        ``prefix`` must be at least as long as the deepest member.
        """
        return any(Word.is_prefix_of(m, prefix) for m in self.members)

    def max_depth(self) -> int:
        return max((len(m) for m in self.members), default=0)

    def to_strings(self) -> list[str]:
        return [format_word(m) for m in self.members]


def canonicalize(cylinders: Iterable[Sequence[int]]) -> CylinderUnion:
    """Drop every cylinder contained in another and sort what is left."""
    words = sorted({Word(c) for c in cylinders})
    kept: list[Word] = []
    # in lexicographic order an ancestor sorts immediately before its subtree
    for w in words:
        if kept and kept[-1].is_prefix_of(w):
            continue
        kept.append(w)
    return CylinderUnion(tuple(kept))


def complement_decomposition(word: Word, digit_cutoff: int) -> tuple[CylinderUnion, bool]:
    """Cylinders of the standard disjoint decomposition of ``X \\ [word]``.

    The full decomposition is ``[w_1..w_j, b]`` for every ``j < len(word)`` and
    every digit ``b != w_{j+1}``; it is countably infinite, so only members
    whose digits are all ``<= digit_cutoff`` are returned.  The flag reports
    whether anything was left out.
    """
    if digit_cutoff < 1:
        raise ValueError("digit_cutoff must be >= 1")
    word = Word(word)
    members = []
    for j in range(len(word)):
        if any(d > digit_cutoff for d in word[:j]):
            continue
        for b in range(1, digit_cutoff + 1):
            if b != word[j]:
                members.append(word[:j].extend(b))
    return canonicalize(members), len(word) > 0


def member_at(stream, word: Word, i: int) -> bool:
    """Decide ``T^i x in [word]`` from the digits ``x_{i+1} .. x_{i+len(word)}``.

    Raises :class:`hotspot.streams.EndOfStream` when a finite stream runs out
    before the window is complete.
    """
    if i < 0:
        raise ValueError("i must be >= 0")
    if not word:
        return True
    window = stream.block(i + 1, len(word), strict=True)
    return tuple(int(d) for d in window) == tuple(word)
