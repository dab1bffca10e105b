"""Word algebra for closed orientable surface groups.

Letters are nonzero integers.  Generator ``a_i`` is ``2*i - 1`` and ``b_i`` is
``2*i``; a negative integer is the inverse letter.  A word is a plain tuple of
letters.  The surface group of genus g is

    < a_1, b_1, ..., a_g, b_g | [a_1, b_1] ... [a_g, b_g] >

with ``[x, y] = x y x^-1 y^-1`` and ``x^y = y x y^-1``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

GroupWord = tuple  # tuple[int, ...]


def gen_a(i: int) -> int:
    return 2 * i - 1


def gen_b(i: int) -> int:
    return 2 * i


def letter(kind: str, index: int, sign: int = 1) -> int:
    """Build a letter from its kind ('a' or 'b'), handle index and sign."""
    if kind not in ("a", "b"):
        raise ValueError(f"unknown generator kind {kind!r}")
    if index < 1:
        raise ValueError("generator index must be >= 1")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    base = gen_a(index) if kind == "a" else gen_b(index)
    return sign * base


def letter_parts(x: int) -> tuple[str, int, int]:
    """Inverse of :func:`letter`: (kind, index, sign)."""
    k = abs(x)
    return ("a" if k % 2 else "b", (k + 1) // 2, 1 if x > 0 else -1)


def letter_key(x: int) -> int:
    # a1 < a1^-1 < b1 < b1^-1 < a2 < ...
    return 2 * (abs(x) - 1) + (x < 0)


def inverse(w: Sequence[int]) -> GroupWord:
    return tuple(-x for x in reversed(w))


def free_reduce(w: Iterable[int]) -> GroupWord:
    out: list[int] = []
    for x in w:
        if x == 0:
            raise ValueError("0 is not a letter")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def multiply(*words: Sequence[int]) -> GroupWord:
    return free_reduce(x for w in words for x in w)


def power(w: Sequence[int], k: int) -> GroupWord:
    if k < 0:
        return power(inverse(w), -k)
    return free_reduce(tuple(w) * k)


def commutator(x: Sequence[int], y: Sequence[int]) -> GroupWord:
    """[x, y] = x y x^-1 y^-1, freely reduced."""
    return multiply(x, y, inverse(x), inverse(y))


def conjugate(x: Sequence[int], y: Sequence[int]) -> GroupWord:
    """x^y = y x y^-1, freely reduced."""
    return multiply(y, x, inverse(y))


def cyclic_reduce(w: Sequence[int]) -> GroupWord:
    w = free_reduce(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j]


def homology_class(w: Iterable[int], genus: int) -> tuple[int, ...]:
    """Exponent-sum vector in the basis (a_1, b_1, ..., a_g, b_g)."""
    v = [0] * (2 * genus)
    for x in w:
        k = abs(x)
        if k > 2 * genus:
            raise ValueError(f"letter {x} outside genus {genus}")
        v[k - 1] += 1 if x > 0 else -1
    return tuple(v)


def _least_rotation(w: GroupWord) -> GroupWord:
    keys = [letter_key(x) for x in w]
    n = len(keys)
    best = min(range(n), key=lambda i: keys[i:] + keys[:i])
    return w[best:] + w[:best]


@dataclass(frozen=True, order=True)
class CyclicWord:
    """Conjugacy class representative: least rotation of a cyclically reduced word.

    The empty tuple is the trivial class.
    """

    sort_key: tuple
    letters: GroupWord

    @classmethod
    def from_letters(cls, letters: GroupWord) -> "CyclicWord":
        return cls(tuple(letter_key(x) for x in letters), letters)

    @property
    def is_trivial(self) -> bool:
        return not self.letters

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return format_word(self.letters)

    def inverse(self) -> "CyclicWord":
        return cyclic_canonical(inverse(self.letters))


TRIVIAL_CLASS = CyclicWord((), ())


def cyclic_canonical(w: Sequence[int]) -> CyclicWord:
    c = cyclic_reduce(w)
    if not c:
        return TRIVIAL_CLASS
    return CyclicWord.from_letters(_least_rotation(c))


@dataclass(frozen=True)
class SurfacePresentation:
    genus: int

    def __post_init__(self):
        if self.genus < 1:
            raise ValueError("genus must be >= 1")

    @cached_property
    def relator(self) -> GroupWord:
        r: list[int] = []
        for i in range(1, self.genus + 1):
            r.extend(commutator((gen_a(i),), (gen_b(i),)))
        return tuple(r)

    @property
    def generators(self) -> list[int]:
        return list(range(1, 2 * self.genus + 1))

    @cached_property
    def _dehn_table(self) -> dict[GroupWord, GroupWord]:
        # subword u of a rotation r = u v of R^{+-1} with len(u) > len(r)/2 -> v^-1
        table: dict[GroupWord, GroupWord] = {}
        n = len(self.relator)
        for base in (self.relator, inverse(self.relator)):
            for s in range(n):
                rot = base[s:] + base[:s]
                for k in range(n // 2 + 1, n + 1):
                    table[rot[:k]] = inverse(rot[k:])
        return table

    @cached_property
    def _relator_classes(self) -> tuple[CyclicWord, CyclicWord]:
        return cyclic_canonical(self.relator), cyclic_canonical(inverse(self.relator))


def dehn_reduce(w: Sequence[int], pres: SurfacePresentation) -> GroupWord:
    """Dehn's algorithm: replace more-than-half relator pieces until none remain.

    For genus >= 2 the result is empty exactly when w is trivial in the
    surface group.  Exactly-half pieces are left alone.
    """
    table = pres._dehn_table
    n = len(pres.relator)
    half = n // 2
    w = free_reduce(w)
    changed = True
    while changed:
        changed = False
        L = len(w)
        for i in range(L - half):
            for k in range(min(n, L - i), half, -1):
                rep = table.get(w[i:i + k])
                if rep is not None:
                    w = free_reduce(w[:i] + rep + w[i + k:])
                    changed = True
                    break
            if changed:
                break
    return w


def cyclic_dehn_reduce(w: Sequence[int], pres: SurfacePresentation) -> GroupWord:
    """Shorten a conjugacy class representative using Dehn moves across the seam."""
    w = cyclic_reduce(dehn_reduce(w, pres))
    while True:
        h = len(w) // 2
        rotated = cyclic_reduce(dehn_reduce(w[h:] + w[:h], pres))
        if len(rotated) >= len(w):
            return w
        w = rotated


def is_trivial(w: Sequence[int], pres: SurfacePresentation) -> bool:
    return not dehn_reduce(w, pres)


def is_relator_conjugate(w: Sequence[int], pres: SurfacePresentation) -> int:
    """+1 / -1 if w is a free-group conjugate of R / R^-1, else 0."""
    c = cyclic_reduce(w)
    if len(c) != len(pres.relator):
        return 0
    plus, minus = pres._relator_classes
    cw = cyclic_canonical(c)
    if cw == plus:
        return 1
    if cw == minus:
        return -1
    return 0


# text syntax: "a1 b2^-1 A1"; capital letter = inverse; "1" is the empty word

_TOKEN = re.compile(r"^([aAbB])(\d+)(?:\^(-?\d+))?$")


def parse_word(text: str, genus: int | None = None) -> GroupWord:
    letters: list[int] = []
    for tok in text.replace("*", " ").split():
        if tok in ("1", "e"):
            continue
        m = _TOKEN.match(tok)
        if not m:
            raise ValueError(f"cannot parse token {tok!r}")
        kind, idx, exp = m.group(1), int(m.group(2)), m.group(3)
        if genus is not None and not 1 <= idx <= genus:
            raise ValueError(f"generator {tok!r} outside genus {genus}")
        x = letter(kind.lower(), idx, -1 if kind.isupper() else 1)
        e = int(exp) if exp is not None else 1
        if e < 0:
            x, e = -x, -e
        letters.extend([x] * e)
    return tuple(letters)


def format_letter(x: int) -> str:
    kind, idx, sign = letter_parts(x)
    return f"{kind if sign > 0 else kind.upper()}{idx}"


def format_word(w: Sequence[int]) -> str:
    if not w:
        return "1"
    return " ".join(format_letter(x) for x in w)
