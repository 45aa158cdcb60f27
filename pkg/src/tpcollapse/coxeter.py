"""
Finite crystallographic Coxeter groups acting on the root lattice.

Group elements are integer matrices in the basis of simple roots, built from
the reflections s_i(alpha_j) = alpha_j - a(i, j) alpha_i.  Equality is matrix
equality, so two words name the same element iff their products agree.

>>> sys = build_system("A2")
>>> evaluate_word(sys, (1, 2, 1))[1]
True
>>> evaluate_word(sys, (1, 1))[0].length
0
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .posets import GradedPoset

__all__ = [
    "CoxeterError", "CoxeterSystem", "GroupElement", "Word",
    "build_system", "parse_word", "read_coxeter_file", "evaluate_word",
    "is_reduced", "prefix_reflections", "bruhat_leq", "bruhat_interval",
    "reduced_word", "all_reduced_words", "lower_interval", "longest_element",
]

Word = tuple[int, ...]
Matrix = tuple[tuple[int, ...], ...]

# a(i,j) * a(j,i) for each supported bond
_BOND_PRODUCT = {2: 0, 3: 1, 4: 2, 6: 3}


class CoxeterError(ValueError):
    """Invalid Coxeter data, words or element combinations."""


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    cols = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def _identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class CoxeterSystem:
    """Rank, Coxeter matrix m(i,j) and Cartan integers a(i,j); 0-based storage."""
    name: str
    coxeter_matrix: Matrix
    cartan: Matrix

    @property
    def rank(self) -> int:
        return len(self.cartan)

    def m(self, i: int, j: int) -> int:
        """Bond order for 1-based generator indices."""
        return self.coxeter_matrix[i - 1][j - 1]

    @cached_property
    def generators(self) -> tuple[Matrix, ...]:
        n = self.rank
        gens = []
        for i in range(n):
            rows = [list(r) for r in _identity(n)]
            # column j of s_i is e_j - a(i,j) e_i
            for j in range(n):
                rows[i][j] -= self.cartan[i][j]
            gens.append(tuple(tuple(r) for r in rows))
        return tuple(gens)

    @cached_property
    def positive_roots(self) -> frozenset[tuple[int, ...]]:
        n = self.rank
        simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        roots = set(simple)
        frontier = list(simple)
        while frontier:
            nxt = []
            for root in frontier:
                for g in self.generators:
                    image = tuple(sum(g[r][c] * root[c] for c in range(n)) for r in range(n))
                    if image not in roots and all(x >= 0 for x in image):
                        roots.add(image)
                        nxt.append(image)
                    if len(roots) > 10_000:
                        raise CoxeterError("infinite Coxeter group unsupported")
            frontier = nxt
        return frozenset(roots)

    @cached_property
    def identity(self) -> GroupElement:
        return GroupElement(_identity(self.rank), 0, self)

    def element(self, matrix: Matrix) -> GroupElement:
        n = self.rank
        length = 0
        for root in self.positive_roots:
            image = [sum(matrix[r][c] * root[c] for c in range(n)) for r in range(n)]
            if any(x < 0 for x in image):
                length += 1
        return GroupElement(matrix, length, self)

    def generator(self, i: int) -> GroupElement:
        self.check_letter(i)
        return GroupElement(self.generators[i - 1], 1, self)

    def check_letter(self, i: int) -> None:
        if not isinstance(i, (int, np.integer)) or not 1 <= i <= self.rank:
            raise CoxeterError(f"letter {i!r} out of range 1..{self.rank}")

    def check_word(self, word: Iterable[int]) -> Word:
        word = tuple(int(i) for i in word)
        for i in word:
            self.check_letter(i)
        return word

    def commute(self, i: int, j: int) -> bool:
        return self.m(i, j) == 2

    def __repr__(self) -> str:
        return f"CoxeterSystem({self.name!r})"


@dataclass(frozen=True)
class GroupElement:
    """An element of W as its root-lattice matrix, with cached Coxeter length."""
    matrix: Matrix
    length: int = field(compare=False)
    system: CoxeterSystem = field(compare=False, repr=False)

    def __mul__(self, other: GroupElement) -> GroupElement:
        if self.system != other.system:
            raise CoxeterError("elements from different Coxeter systems")
        return self.system.element(_matmul(self.matrix, other.matrix))

    def times_generator(self, i: int) -> GroupElement:
        """Right multiplication by s_i, using the descent test for the length."""
        up = not self.has_right_descent(i)
        matrix = _matmul(self.matrix, self.system.generators[i - 1])
        return GroupElement(matrix, self.length + (1 if up else -1), self.system)

    def has_right_descent(self, i: int) -> bool:
        """True iff l(w s_i) < l(w), i.e. w sends alpha_i to a negative root."""
        col = [row[i - 1] for row in self.matrix]
        return any(x < 0 for x in col)

    def inverse(self) -> GroupElement:
        w = self.system.identity
        for i in reversed(reduced_word(self)):
            w = w.times_generator(i)
        return w

    @property
    def is_identity(self) -> bool:
        return self.length == 0

    def word(self) -> Word:
        return reduced_word(self)


# --- construction -----------------------------------------------------------

def _named_cartan(kind: str, n: int) -> list[list[int]]:
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def bond(i, j, aij=-1, aji=-1):
        a[i][j], a[j][i] = aij, aji

    ranks = {"A": 1, "B": 2, "C": 2, "D": 4}
    if kind in ranks:
        if n < ranks[kind]:
            raise CoxeterError(f"type {kind} needs rank >= {ranks[kind]}")
        for i in range(n - 1):
            bond(i, i + 1)
        if kind == "B":
            bond(n - 2, n - 1, -2, -1)
        elif kind == "C":
            bond(n - 2, n - 1, -1, -2)
        elif kind == "D":
            a[n - 2][n - 1] = a[n - 1][n - 2] = 0
            bond(n - 3, n - 1)
    elif kind == "E":
        if n not in (6, 7, 8):
            raise CoxeterError("type E needs rank 6, 7 or 8")
        # Bourbaki numbering: 1-3-4-5-6(-7-8), 2 attached to 4
        for i, j in [(0, 2), (2, 3), (3, 4), (1, 3)] + [(k, k + 1) for k in range(4, n - 1)]:
            bond(i, j)
    elif kind == "F":
        if n != 4:
            raise CoxeterError("type F needs rank 4")
        bond(0, 1)
        bond(1, 2, -2, -1)
        bond(2, 3)
    elif kind == "G":
        if n != 2:
            raise CoxeterError("type G needs rank 2")
        bond(0, 1, -1, -3)
    else:
        raise CoxeterError(f"unknown Cartan type {kind!r}")
    return a


def _coxeter_from_cartan(a: Sequence[Sequence[int]]) -> Matrix:
    inverse = {v: k for k, v in _BOND_PRODUCT.items()}
    n = len(a)
    return tuple(
        tuple(1 if i == j else inverse[a[i][j] * a[j][i]] for j in range(n))
        for i in range(n)
    )


def _validate_coxeter_matrix(m: Sequence[Sequence[int]]) -> None:
    n = len(m)
    if n == 0 or any(len(row) != n for row in m):
        raise CoxeterError("Coxeter matrix must be square and nonempty")
    for i in range(n):
        if m[i][i] != 1:
            raise CoxeterError("Coxeter matrix needs m(i,i) = 1")
        for j in range(n):
            if m[i][j] != m[j][i]:
                raise CoxeterError("Coxeter matrix must be symmetric")
            if i != j and m[i][j] not in _BOND_PRODUCT:
                raise CoxeterError(
                    f"m({i + 1},{j + 1}) = {m[i][j]}: non-crystallographic unsupported")
    gram = np.array([[-math.cos(math.pi / m[i][j]) for j in range(n)] for i in range(n)])
    if np.linalg.eigvalsh(gram).min() <= 1e-9:
        raise CoxeterError("infinite Coxeter group unsupported")


def _cartan_from_coxeter(m: Sequence[Sequence[int]]) -> Matrix:
    # finite crystallographic diagrams are forests, so any orientation of the
    # long bonds is realizable
    n = len(m)
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        p = _BOND_PRODUCT[m[i][j]]
        if p:
            a[i][j], a[j][i] = -1, -p
    return tuple(tuple(r) for r in a)


def build_system(kind: str | Sequence[Sequence[int]]) -> CoxeterSystem:
    """Build a system from a name such as ``"A3"``/``"G2"`` or from a Coxeter matrix."""
    if isinstance(kind, str):
        match = re.fullmatch(r"\s*([A-Ga-g])\s*(\d+)\s*", kind)
        if not match:
            raise CoxeterError(f"cannot parse Cartan type {kind!r}")
        kind, n = match.group(1).upper(), int(match.group(2))
        if n < 1:
            raise CoxeterError("rank must be positive")
        cartan = tuple(tuple(r) for r in _named_cartan(kind, n))
        return CoxeterSystem(f"{kind}{n}", _coxeter_from_cartan(cartan), cartan)
    m = [list(map(int, row)) for row in kind]
    _validate_coxeter_matrix(m)
    return CoxeterSystem("custom", tuple(tuple(r) for r in m), _cartan_from_coxeter(m))


def read_coxeter_file(path: str | Path) -> CoxeterSystem:
    """Read ``n`` on the first line followed by ``n`` rows of m(i,j)."""
    tokens = Path(path).read_text().split()
    try:
        values = [int(t) for t in tokens]
    except ValueError as exc:
        raise CoxeterError(f"malformed Coxeter matrix file: {exc}") from None
    if not values:
        raise CoxeterError("empty Coxeter matrix file")
    n = values[0]
    if n < 1 or len(values) != 1 + n * n:
        raise CoxeterError(f"expected {n} rows of {n} integers")
    rows = [values[1 + k * n: 1 + (k + 1) * n] for k in range(n)]
    return build_system(rows)


def parse_word(text: str) -> Word:
    """Parse comma-separated 1-based generator indices; the empty string is e."""
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise CoxeterError(f"malformed word {text!r}") from None


# --- words ------------------------------------------------------------------

def evaluate_word(sys: CoxeterSystem, word: Sequence[int]) -> tuple[GroupElement, bool]:
    """Product s_{i_1}...s_{i_d} and whether the word is reduced.

    Reducedness is read off by root tracking: the word is reduced iff no
    prefix sends the next simple root to a negative root.
    """
    word = sys.check_word(word)
    w = sys.identity
    reduced = True
    for i in word:
        if w.has_right_descent(i):
            reduced = False
        w = w.times_generator(i)
    return w, reduced


def is_reduced(sys: CoxeterSystem, word: Sequence[int]) -> bool:
    return evaluate_word(sys, word)[1]


def reduced_word(w: GroupElement) -> Word:
    """Canonical reduced word: repeatedly strip the smallest right descent."""
    letters = []
    while w.length:
        i = next(k for k in range(1, w.system.rank + 1) if w.has_right_descent(k))
        letters.append(i)
        w = w.times_generator(i)
    return tuple(reversed(letters))


def all_reduced_words(w: GroupElement) -> list[Word]:
    """Every reduced word of ``w``, sorted."""
    if w.length == 0:
        return [()]
    out = []
    for i in range(1, w.system.rank + 1):
        if w.has_right_descent(i):
            out.extend(prefix + (i,) for prefix in all_reduced_words(w.times_generator(i)))
    return sorted(out)


def prefix_reflections(sys: CoxeterSystem, word: Sequence[int]) -> list[GroupElement]:
    """Reflections R(x_{i_j}) = s_{i_1}..s_{i_{j-1}} s_{i_j} s_{i_{j-1}}..s_{i_1}.

    When a letter is absorbed (the Demazure product does not grow), the
    reflection of the latest j' < j with s_{i_j'}..s_{i_{j-1}} = s_{i_j'+1}..s_{i_j}
    is reused.  Other degenerate cases raise.
    """
    word = sys.check_word(word)
    out: list[GroupElement] = []
    prefix = sys.identity
    demazure = sys.identity
    for j, i in enumerate(word):
        if demazure.has_right_descent(i):
            for jp in range(j - 1, -1, -1):
                left, _ = evaluate_word(sys, word[jp:j])
                right, _ = evaluate_word(sys, word[jp + 1:j + 1])
                if left == right:
                    out.append(out[jp])
                    break
            else:
                raise CoxeterError(f"no reflection defined for position {j + 1}")
        else:
            demazure = demazure.times_generator(i)
            out.append(prefix.times_generator(i) * prefix.inverse())
        prefix = prefix.times_generator(i)
    return out


# --- Bruhat order -------------------------------------------------------------

def _same_system(u: GroupElement, w: GroupElement) -> None:
    if u.system != w.system:
        raise CoxeterError("elements from different Coxeter systems")


def bruhat_leq(u: GroupElement, w: GroupElement, *, word: Sequence[int] | None = None,
               exhaustive: bool = False) -> bool:
    """Bruhat comparison via the subword property.

    Scans a fixed reduced word of ``w`` right to left, replacing u by
    min(u, u s) at each letter; u <= w iff this ends at the identity.
    ``exhaustive=True`` instead searches all subwords (slow, for tests).
    """
    _same_system(u, w)
    if u.length > w.length:
        return False
    word = reduced_word(w) if word is None else tuple(word)
    if exhaustive:
        return any(
            evaluate_word(u.system, [word[p] for p in positions])[0] == u
            for positions in itertools.combinations(range(len(word)), u.length)
        )
    cur = u
    for i in reversed(word):
        if cur.has_right_descent(i):
            cur = cur.times_generator(i)
    return cur.is_identity


def longest_element(sys: CoxeterSystem) -> GroupElement:
    w = sys.identity
    while (i := next((i for i in range(1, sys.rank + 1) if not w.has_right_descent(i)), None)):
        w = w.times_generator(i)
    return w


def lower_interval(w: GroupElement) -> list[GroupElement]:
    """All z <= w: products over subwords of a reduced word."""
    seen = {w.system.identity}
    for i in reduced_word(w):
        seen |= {z.times_generator(i) for z in seen}
    return sorted(seen, key=lambda z: (z.length, reduced_word(z)))


def bruhat_interval(u: GroupElement, w: GroupElement) -> GradedPoset:
    """The closed interval [u, w] ranked by l(z) - l(u)."""
    _same_system(u, w)
    if not bruhat_leq(u, w):
        raise CoxeterError("bruhat_interval needs u <= w")
    elems = [z for z in lower_interval(w) if bruhat_leq(u, z)]
    covers = [
        (a, b)
        for a, za in enumerate(elems)
        for b, zb in enumerate(elems)
        if zb.length == za.length + 1 and bruhat_leq(za, zb)
    ]
    labels = ["".join(f"s{i}" for i in reduced_word(z)) or "e" for z in elems]
    return GradedPoset(
        labels=labels,
        rank=[z.length - u.length for z in elems],
        covers=covers,
        payload=elems,
    )
