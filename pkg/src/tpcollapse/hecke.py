"""
0-Hecke word calculus: Demazure products, omittable and deletion pairs, and
the minimal number of long braid moves needed to realize a deletion pair as
a stutter.

Expressions are subwords of a fixed base word, so positions always refer to
the base word (1-based), never to slots of the subword.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .coxeter import CoxeterError, CoxeterSystem, GroupElement, Word

__all__ = [
    "XExpression", "Face", "Move", "MoveScript", "demazure", "demazure_word",
    "omittable_pairs", "deletion_pairs", "min_long_braids", "braid_script",
    "single_moves", "is_reduced_expression",
]


@dataclass(frozen=True, order=True)
class XExpression:
    """The subexpression of ``base`` at the (1-based) positions in ``support``."""
    base: Word
    support: tuple[int, ...]

    def __post_init__(self):
        support = tuple(sorted(set(self.support)))
        object.__setattr__(self, "base", tuple(self.base))
        object.__setattr__(self, "support", support)
        if support and not (1 <= support[0] and support[-1] <= len(self.base)):
            raise CoxeterError(f"support {support} outside 1..{len(self.base)}")

    @classmethod
    def full(cls, base: Sequence[int]) -> XExpression:
        return cls(tuple(base), tuple(range(1, len(base) + 1)))

    @property
    def letters(self) -> Word:
        return tuple(self.base[p - 1] for p in self.support)

    @property
    def dim(self) -> int:
        return len(self.support) - 1

    def with_support(self, support: Iterable[int]) -> XExpression:
        return XExpression(self.base, tuple(support))

    def segment(self, lo: int, hi: int) -> XExpression:
        """Restriction to base positions lo..hi inclusive."""
        return self.with_support(p for p in self.support if lo <= p <= hi)

    def without(self, *positions: int) -> XExpression:
        return self.with_support(p for p in self.support if p not in positions)

    def placeholder(self) -> str:
        """Full-length notation with 1 at omitted positions, e.g. ``x1.1.x1``."""
        chosen = set(self.support)
        return ".".join(f"x{i}" if p in chosen else "1" for p, i in enumerate(self.base, 1))

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.support)) + "}"


Face = XExpression


def demazure_word(sys: CoxeterSystem, letters: Iterable[int]) -> GroupElement:
    """Demazure product: multiply by s_i when the length rises, absorb otherwise."""
    w = sys.identity
    for i in letters:
        if not w.has_right_descent(i):
            w = w.times_generator(i)
    return w


def demazure(sys: CoxeterSystem, e: XExpression) -> GroupElement:
    """The element w(x_{i_j1}...x_{i_jk}) reached by any braid/modified-nil reduction."""
    return demazure_word(sys, sys.check_word(e.letters))


def is_reduced_expression(sys: CoxeterSystem, e: XExpression) -> bool:
    return demazure(sys, e).length == len(e.support)


# --- moves ------------------------------------------------------------------

@dataclass(frozen=True)
class Move:
    """One rewriting step on slots ``start..start+size-1`` of an expression (0-based)."""
    kind: str  # "commute", "braid" or "nil"
    start: int
    before: Word
    after: Word

    @property
    def size(self) -> int:
        return len(self.before)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "start": self.start,
                "before": list(self.before), "after": list(self.after)}


def _alternating(a: int, b: int, m: int) -> Word:
    return tuple(a if k % 2 == 0 else b for k in range(m))


def single_moves(sys: CoxeterSystem, letters: Sequence[int], *,
                 nil: bool = False) -> Iterator[Move]:
    """Every commutation, long braid and (optionally) modified nil-move applicable."""
    letters = tuple(letters)
    for p in range(len(letters) - 1):
        a, b = letters[p], letters[p + 1]
        if a == b:
            if nil:
                yield Move("nil", p, (a, a), (a,))
            continue
        m = sys.m(a, b)
        if m == 2:
            yield Move("commute", p, (a, b), (b, a))
        elif p + m <= len(letters) and letters[p:p + m] == _alternating(a, b, m):
            yield Move("braid", p, _alternating(a, b, m), _alternating(b, a, m))


def apply_move(letters: Sequence[int], move: Move) -> Word:
    letters = tuple(letters)
    assert letters[move.start:move.start + move.size] == move.before
    return letters[:move.start] + move.after + letters[move.start + move.size:]


# --- omittable and deletion pairs ---------------------------------------------

@lru_cache(maxsize=None)
def _adjacent_equal_slots(sys: CoxeterSystem, letters: Word) -> frozenset[tuple[int, int]]:
    # states are arrangements of slot ids reachable by commutation moves
    start = tuple(range(len(letters)))
    seen = {start}
    queue = deque([start])
    found = set()
    while queue:
        order = queue.popleft()
        for k in range(len(order) - 1):
            a, b = order[k], order[k + 1]
            if letters[a] == letters[b]:
                found.add((min(a, b), max(a, b)))
            elif sys.m(letters[a], letters[b]) == 2:
                nxt = order[:k] + (b, a) + order[k + 2:]
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return frozenset(found)


def omittable_pairs(sys: CoxeterSystem, e: XExpression) -> list[tuple[int, int]]:
    """Pairs (l, r) of equal letters that commutation moves can make adjacent."""
    letters = sys.check_word(e.letters)
    slots = _adjacent_equal_slots(sys, letters)
    return sorted((e.support[a], e.support[b]) for a, b in slots)


def deletion_pairs(sys: CoxeterSystem, e: XExpression) -> list[tuple[int, int]]:
    """Pairs (r, s): x_r..x_s not reduced but both one-sided deletions reduced."""
    out = []
    for k, r in enumerate(e.support):
        for s in e.support[k + 1:]:
            seg = e.segment(r, s)
            if is_reduced_expression(sys, seg):
                continue
            if (is_reduced_expression(sys, seg.without(r))
                    and is_reduced_expression(sys, seg.without(s))):
                out.append((r, s))
    return out


# --- long braid counts ----------------------------------------------------------

@dataclass(frozen=True)
class MoveScript:
    """Moves on the segment x_r..x_{s-1} ending in a letter that stutters with x_s.

    ``braid_inputs`` holds every base position whose letter feeds some long
    braid; a subexpression admits the script iff it keeps all of them.
    ``carrier_ok`` records that the letter descended from x_r only ever sits
    at the far end of a long braid and finishes next to x_s.
    """
    pair: tuple[int, int]
    segment: tuple[int, ...]
    moves: tuple[Move, ...]
    long_braids: int
    braid_inputs: frozenset[int]
    carrier_ok: bool

    def as_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "segment": list(self.segment),
            "long_braids": self.long_braids,
            "braid_inputs": sorted(self.braid_inputs),
            "carrier_ok": self.carrier_ok,
            "moves": [m.as_dict() for m in self.moves],
        }


def _search(sys: CoxeterSystem, letters: Word, target: int, track_carrier: bool):
    """Uniform-cost search; cost counts long braids, ties broken on move encodings."""
    n = len(letters)
    start_carrier = 0 if track_carrier else None
    heap = [(0, (), letters, start_carrier)]
    done = set()
    while heap:
        cost, path, state, carrier = heapq.heappop(heap)
        key = (state, carrier)
        if key in done:
            continue
        done.add(key)
        if state and state[-1] == target and (not track_carrier or carrier == n - 1):
            return cost, path
        for move in single_moves(sys, state):
            lo, hi = move.start, move.start + move.size - 1
            new_carrier = carrier
            if carrier is not None and lo <= carrier <= hi:
                if move.kind == "commute":
                    new_carrier = lo + hi - carrier
                elif carrier == lo:
                    new_carrier = hi
                else:
                    # the tracked letter may not sit at the near end or inside a braid
                    continue
            step = 1 if move.kind == "braid" else 0
            nxt = apply_move(state, move)
            if (nxt, new_carrier) not in done:
                heapq.heappush(heap, (cost + step, path + ((move.start, move.kind, move.before),),
                                      nxt, new_carrier))
    return None


def _segment_for(sys: CoxeterSystem, e: XExpression, pair: tuple[int, int]) -> tuple[int, ...]:
    r, s = pair
    if tuple(pair) not in deletion_pairs(sys, e.segment(r, s)) or r not in e.support \
            or s not in e.support:
        raise CoxeterError(f"{pair} is not a deletion pair of {e.placeholder()}")
    return tuple(p for p in e.support if r <= p < s)


def min_long_braids(sys: CoxeterSystem, e: XExpression, pair: tuple[int, int]) -> int:
    """c(pair; e): fewest long braid moves on x_r..x_{s-1} giving a stutter with x_s."""
    positions = _segment_for(sys, e, pair)
    letters = tuple(e.base[p - 1] for p in positions)
    found = _search(sys, letters, e.base[pair[1] - 1], track_carrier=False)
    if found is None:
        raise CoxeterError(f"no stutter reachable for {pair}")
    return found[0]


def braid_script(sys: CoxeterSystem, e: XExpression, pair: tuple[int, int]) -> MoveScript:
    """A deterministic script realizing ``pair`` with the fewest long braids.

    Prefers scripts that carry x_r to the end of the segment through far-end
    braid positions; falls back to the unconstrained optimum (flagged via
    ``carrier_ok=False``) when none of minimal cost exists.
    """
    positions = _segment_for(sys, e, pair)
    letters = tuple(e.base[p - 1] for p in positions)
    target = e.base[pair[1] - 1]
    best = _search(sys, letters, target, track_carrier=False)
    if best is None:
        raise CoxeterError(f"no stutter reachable for {pair}")
    tracked = _search(sys, letters, target, track_carrier=True)
    carrier_ok = tracked is not None and tracked[0] == best[0]
    cost, path = tracked if carrier_ok else best

    origins = [frozenset([p]) for p in positions]
    state = letters
    moves = []
    inputs: set[int] = set()
    for start, kind, before in path:
        size = len(before)
        after = (before[1], before[0]) if kind == "commute" else _alternating(before[1], before[0], size)
        move = Move(kind, start, before, after)
        chunk = origins[start:start + size]
        if kind == "commute":
            origins[start:start + size] = chunk[::-1]
        else:
            merged = frozenset().union(*chunk)
            inputs |= merged
            origins[start:start + size] = [merged] * size
        state = apply_move(state, move)
        moves.append(move)
    return MoveScript(tuple(pair), positions, tuple(moves), cost, frozenset(inputs), carrier_ok)
