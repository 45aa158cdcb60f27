"""
Exact rational matrices for type A: elementary unipotent factors, the
parameter change behind the rank-3 braid relation, total nonnegativity and
Bruhat cell membership.  Everything uses ``fractions.Fraction``; there is no
floating point anywhere in this module.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .coxeter import CoxeterError, CoxeterSystem, GroupElement, build_system
from .hecke import Face, _alternating

__all__ = [
    "RationalMatrix", "ParamPoint", "chevalley_x", "lusztig_eval", "braid3_transform",
    "is_tnn", "cell_of", "FiberReport", "verify_fibers", "GRID", "grid_points",
]

Number = int | Fraction
GRID = (Fraction(1), Fraction(1, 2), Fraction(2), Fraction(1, 3), Fraction(3))


@dataclass(frozen=True)
class RationalMatrix:
    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(Fraction(x) for x in r) for r in self.rows)
        if any(len(r) != len(rows) for r in rows):
            raise ValueError("matrix must be square")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def identity(cls, n: int) -> RationalMatrix:
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        return self.rows[ij[0]][ij[1]]

    def __matmul__(self, other: RationalMatrix) -> RationalMatrix:
        cols = list(zip(*other.rows))
        return RationalMatrix(tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols)
                                    for r in self.rows))

    def minor(self, rows: Sequence[int], cols: Sequence[int]) -> Fraction:
        return _det([[self.rows[i][j] for j in cols] for i in rows])

    def rank(self, rows: Sequence[int], cols: Sequence[int]) -> int:
        return _rank([[self.rows[i][j] for j in cols] for i in rows])

    def is_upper_unitriangular(self) -> bool:
        return all(self.rows[i][j] == (1 if i == j else 0)
                   for i in range(self.n) for j in range(i + 1))

    def __str__(self) -> str:
        cells = [[str(x) for x in r] for r in self.rows]
        width = max((len(c) for r in cells for c in r), default=1)
        return "\n".join("[" + " ".join(c.rjust(width) for c in r) + "]" for r in cells)


def _eliminate(a: list[list[Fraction]]) -> tuple[int, Fraction]:
    """Row-reduce in place; returns (rank, determinant of the leading square)."""
    a = [row[:] for row in a]
    rank, det = 0, Fraction(1)
    ncols = len(a[0]) if a else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(a)) if a[r][col] != 0), None)
        if pivot is None:
            det = Fraction(0)
            continue
        if pivot != rank:
            a[rank], a[pivot] = a[pivot], a[rank]
            det = -det
        det *= a[rank][col]
        for r in range(rank + 1, len(a)):
            f = a[r][col] / a[rank][col]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank, det


def _det(a: list[list[Fraction]]) -> Fraction:
    return _eliminate(a)[1] if a else Fraction(1)


def _rank(a: list[list[Fraction]]) -> int:
    return _eliminate(a)[0] if a and a[0] else 0


@dataclass(frozen=True)
class ParamPoint:
    values: tuple[Fraction, ...]

    def __post_init__(self):
        values = tuple(Fraction(v) for v in self.values)
        if any(v < 0 for v in values):
            raise ValueError("parameters must be nonnegative")
        object.__setattr__(self, "values", values)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k + 1 for k, v in enumerate(self.values) if v)

    def normalized(self) -> ParamPoint:
        total = sum(self.values)
        if total == 0:
            raise ValueError("cannot normalize the zero point")
        return ParamPoint(tuple(v / total for v in self.values))


def chevalley_x(n: int, i: int, t: Number) -> RationalMatrix:
    """I_n + t E_{i,i+1}, with 1-based i."""
    if not 1 <= i <= n - 1:
        raise ValueError(f"index {i} outside 1..{n - 1}")
    rows = [[Fraction(int(a == b)) for b in range(n)] for a in range(n)]
    rows[i - 1][i] = Fraction(t)
    return RationalMatrix(tuple(map(tuple, rows)))


def lusztig_eval(word: Sequence[int], params: ParamPoint | Sequence[Number], n: int) -> RationalMatrix:
    values = params.values if isinstance(params, ParamPoint) else tuple(map(Fraction, params))
    if len(values) != len(word):
        raise ValueError(f"{len(word)} letters but {len(values)} parameters")
    for i in word:
        if not 1 <= i <= n - 1:
            raise ValueError(f"index {i} outside 1..{n - 1}")
    rows = [[Fraction(int(a == b)) for b in range(n)] for a in range(n)]
    for i, t in zip(word, values):
        # right multiplication by x_i(t) adds t * column i to column i+1
        if t:
            for row in rows[:i]:
                row[i] += t * row[i - 1]
    return RationalMatrix(tuple(map(tuple, rows)))


def braid3_transform(t1: Number, t2: Number, t3: Number) -> tuple[Fraction, Fraction, Fraction]:
    """Parameters with x_i(t1)x_j(t2)x_i(t3) = x_j(t1')x_i(t2')x_j(t3') for |i-j| = 1."""
    t1, t2, t3 = Fraction(t1), Fraction(t2), Fraction(t3)
    s = t1 + t3
    if s == 0:
        raise ZeroDivisionError("braid relation needs t1 + t3 != 0")
    return t2 * t3 / s, s, t1 * t2 / s


def is_tnn(m: RationalMatrix) -> bool:
    """All minors nonnegative.  Enumerates every minor, so keep n small (<= 6)."""
    idx = range(m.n)
    for k in range(1, m.n + 1):
        for rows in itertools.combinations(idx, k):
            for cols in itertools.combinations(idx, k):
                if m.minor(rows, cols) < 0:
                    return False
    return True


def type_a(n: int) -> CoxeterSystem:
    return build_system(f"A{n - 1}")


def cell_of(m: RationalMatrix, sys: CoxeterSystem | None = None) -> GroupElement:
    """The permutation u with m in B-.u.B- for upper unitriangular m.

    Both-sided lower triangular multiplication preserves r(i, j), the rank of
    rows 1..i and columns j..n; the permutation matrix is read off from
    second differences of that table.
    """
    if not m.is_upper_unitriangular():
        raise ValueError("cell_of needs an upper unitriangular matrix")
    n = m.n
    sys = type_a(n) if sys is None else sys
    if sys.rank != n - 1:
        raise CoxeterError(f"{sys.name} does not match {n}x{n} matrices")

    def r(i: int, j: int) -> int:
        if i == 0 or j == n + 1:
            return 0
        return m.rank(range(i), range(j - 1, n))

    table = {(i, j): r(i, j) for i in range(n + 1) for j in range(1, n + 2)}
    sigma = [0] * (n + 1)  # sigma[column] = row of its 1
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if table[i, j] - table[i - 1, j] - table[i, j + 1] + table[i - 1, j + 1] == 1:
                sigma[j] = i
    perm = sigma[1:]

    word = []
    while True:
        k = next((k for k in range(n - 1) if perm[k] > perm[k + 1]), None)
        if k is None:
            break
        perm[k], perm[k + 1] = perm[k + 1], perm[k]
        word.append(k + 1)
    w = sys.identity
    for i in reversed(word):
        w = w.times_generator(i)
    return w


# --- fiber verification -------------------------------------------------------------

def grid_points(size: int, cap: int | None, seed: str) -> list[tuple[Fraction, ...]]:
    """Points of GRID^size, all of them when ``cap`` is None or large enough."""
    total = len(GRID) ** size
    if cap is None or cap >= total:
        picks = range(total)
    else:
        picks = sorted(random.Random(seed).sample(range(total), cap))
    out = []
    for code in picks:
        digits = []
        for _ in range(size):
            code, d = divmod(code, len(GRID))
            digits.append(GRID[d])
        out.append(tuple(digits))
    return out


@dataclass
class FiberReport:
    pairs_checked: int = 0
    points_checked: int = 0
    interior_checked: int = 0
    faces_checked: int = 0
    mismatches: list[str] = field(default_factory=list)
    per_step: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "pairs_checked": self.pairs_checked,
            "points_checked": self.points_checked,
            "interior_checked": self.interior_checked,
            "faces_checked": self.faces_checked,
            "mismatches": self.mismatches,
            "steps": self.per_step,
        }


def _run_script(slots: list[list], moves, reverse: bool = False) -> None:
    """Apply (or undo) script moves to [letter, value] slots in place."""
    for move in (reversed(moves) if reverse else moves):
        lo = move.start
        want = move.after if reverse else move.before
        if tuple(s[0] for s in slots[lo:lo + move.size]) != want:
            raise AssertionError("script does not apply")
        if move.kind == "commute":
            slots[lo], slots[lo + 1] = slots[lo + 1], slots[lo]
        elif move.kind == "braid":
            if move.size != 3:
                raise NotImplementedError("only rank-3 braid parameters are implemented")
            a, b = want[0], want[1]
            values = braid3_transform(*(s[1] for s in slots[lo:lo + 3]))
            slots[lo:lo + 3] = [[x, v] for x, v in zip(_alternating(b, a, 3), values)]
        else:
            raise AssertionError(f"unexpected move {move.kind}")


def _transport(face: Face, moves, pair, values: dict[int, Fraction], split) -> dict[int, Fraction]:
    """Run the script on the segment, rebalance the stutter with ``split``, run it back."""
    l, r = pair
    seg = [p for p in face.support if l <= p < r]
    slots = [[face.base[p - 1], values[p]] for p in seg]
    _run_script(slots, moves)
    last, mass = slots[-1][1], values[r]
    slots[-1][1], new_r = split(last + mass)
    _run_script(slots, moves, reverse=True)
    out = dict(values)
    out.update({p: s[1] for p, s in zip(seg, slots)})
    out[r] = new_r
    return out


def verify_fibers(trace, cap: int | None = 25, word: Sequence[int] | None = None,
                  cell_cap: int | None = 3) -> FiberReport:
    """Check identified faces have equal images under Lusztig's map, and that
    positive points of each face land in the cell of its Demazure product."""
    sys = trace.system
    base = trace.base
    if word is not None and tuple(word) != base:
        raise ValueError("trace was computed for a different word")
    n = sys.rank + 1
    if sys.cartan != type_a(n).cartan:
        raise CoxeterError("fiber checks are implemented for type A only")
    if trace.mode != "full":
        raise ValueError("fiber checks need a full-mode trace")
    report = FiberReport()
    d = len(base)

    def image(values: dict[int, Fraction]) -> RationalMatrix:
        return lusztig_eval(base, [values.get(p, Fraction(0)) for p in range(1, d + 1)], n)

    for step in trace.steps:
        F, (l, r) = step.face, step.deletion_pair
        moves = step.script.moves
        bad_before = len(report.mismatches)
        tag = f"step {step.index} {F.placeholder()}"

        for sigma, partner in step.identified_pairs:
            report.pairs_checked += 1
            for pt in grid_points(len(sigma.support), cap, f"{base}:{sigma.support}"):
                values = {p: Fraction(0) for p in F.support} | dict(zip(sigma.support, pt))
                try:
                    moved = _transport(F, moves, (l, r), values, lambda tot: (tot, Fraction(0)))
                except (ZeroDivisionError, AssertionError) as exc:
                    report.mismatches.append(f"{tag}: {sigma} -> {partner}: {exc}")
                    continue
                report.points_checked += 1
                got = tuple(p for p in F.support if moved[p])
                if got != partner.support:
                    report.mismatches.append(f"{tag}: {sigma} landed on {got}, expected {partner}")
                elif image(values) != image(moved):
                    report.mismatches.append(f"{tag}: {sigma} -> {partner} at {pt}: images differ")

        # points of the collapsed face slide along level curves of the stutter
        for pt in grid_points(len(F.support), cap, f"{base}:{F.support}:interior"):
            values = dict(zip(F.support, pt))
            split = lambda tot: (tot / 3, 2 * tot / 3)  # noqa: E731
            try:
                moved = _transport(F, moves, (l, r), values, split)
            except (ZeroDivisionError, AssertionError) as exc:
                report.mismatches.append(f"{tag}: interior point {pt}: {exc}")
                continue
            report.interior_checked += 1
            if image(values) != image(moved):
                report.mismatches.append(f"{tag}: interior point {pt}: images differ")

        report.per_step.append({"step": step.index, "face": list(F.support),
                                "ok": len(report.mismatches) == bad_before})

    for annotated in trace.faces:
        face = annotated.face
        for pt in grid_points(len(face.support), cell_cap, f"{base}:{face.support}:cell"):
            report.faces_checked += 1
            m = image(dict(zip(face.support, pt)))
            got = cell_of(m, sys)
            if got != annotated.element:
                report.mismatches.append(f"face {face}: matrix lies in the cell of "
                                         f"{got.word()}, Demazure product is {annotated.element.word()}")
    return report
