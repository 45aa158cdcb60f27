"""
Prioritized face collapses on the simplex of subwords of a word.

Every nonempty set S of positions is a face R_S.  Non-reduced faces are
collapsed one at a time, earliest first under the key

    (right end r of the pair, r - l, long braids needed, -dim F)

with the lexicographically smallest support breaking remaining ties.  A step
records only the combinatorial shadow of the collapse: the pair, the braid
script, which boundary faces are swept along, and which faces get identified.
A boundary face sigma with t_l = 0 is identified with sigma - {r} + {l} iff
sigma + {l} keeps every letter that feeds a long braid of the script.

``mode="commutation"`` uses omittable pairs and no braids, which gives the
coarser relation generated by commutation and slide moves only.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from scipy.cluster.hierarchy import DisjointSet

from .coxeter import (CoxeterSystem, GroupElement, Word, bruhat_leq,
                      lower_interval, reduced_word)
from .hecke import (Face, MoveScript, braid_script, deletion_pairs, demazure,
                    min_long_braids, omittable_pairs)
from .posets import GradedPoset

__all__ = [
    "MODES", "AnnotatedFace", "CollapseKey", "CollapseStep", "CollapseTrace",
    "ConditionReport", "enumerate_faces", "collapse_key", "run_collapse",
    "verify_conditions", "quotient_poset", "compare_with_bruhat",
]

MODES = ("full", "commutation")


@dataclass(frozen=True)
class AnnotatedFace:
    face: Face
    element: GroupElement
    reduced: bool


def _mask(support: Iterable[int]) -> int:
    m = 0
    for p in support:
        m |= 1 << (p - 1)
    return m


def _support(mask: int) -> tuple[int, ...]:
    return tuple(k + 1 for k in range(mask.bit_length()) if mask >> k & 1)


def enumerate_faces(sys: CoxeterSystem, word: Sequence[int]) -> list[AnnotatedFace]:
    """All 2^d - 1 nonempty faces, by dimension then support."""
    word = sys.check_word(word)
    out = []
    for size in range(1, len(word) + 1):
        for support in itertools.combinations(range(1, len(word) + 1), size):
            face = Face(word, support)
            w = demazure(sys, face)
            out.append(AnnotatedFace(face, w, w.length == size))
    return out


@dataclass(frozen=True)
class CollapseKey:
    right: int
    span: int
    long_braids: int
    dim: int

    @property
    def pair(self) -> tuple[int, int]:
        return self.right - self.span, self.right

    @property
    def order(self) -> tuple[int, int, int, int]:
        return self.right, self.span, self.long_braids, -self.dim

    def as_list(self) -> list[int]:
        return [self.right, self.span, self.long_braids, self.dim]


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def collapse_key(sys: CoxeterSystem, word: Sequence[int], face: Face,
                 mode: str = "full") -> CollapseKey | None:
    """Best collapsing key of a face, or None when the face is never collapsed."""
    _check_mode(mode)
    face = Face(tuple(word), face.support)
    if mode == "full":
        pairs = deletion_pairs(sys, face)
    else:
        pairs = omittable_pairs(sys, face)
    if not pairs:
        return None
    l, r = min(pairs, key=lambda p: (p[1], p[1] - p[0]))
    braids = min_long_braids(sys, face, (l, r)) if mode == "full" else 0
    return CollapseKey(r, r - l, braids, face.dim)


@dataclass
class CollapseStep:
    index: int
    face: Face
    key: CollapseKey
    script: MoveScript | None
    identified_pairs: list[tuple[Face, Face]]
    also_collapsed: list[Face]
    # swept faces whose own best (r, r-l, c) differs from this step's
    off_schedule: list[Face] = field(default_factory=list)

    @property
    def deletion_pair(self) -> tuple[int, int]:
        return self.key.pair

    @property
    def long_braid_count(self) -> int:
        return self.key.long_braids

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "face": list(self.face.support),
            "x": self.face.placeholder(),
            "pair": list(self.deletion_pair),
            "key": self.key.as_list(),
            "script": None if self.script is None else self.script.as_dict(),
            "identified_pairs": [[list(a.support), list(b.support)] for a, b in self.identified_pairs],
            "also_collapsed": [list(f.support) for f in self.also_collapsed],
            "off_schedule": [list(f.support) for f in self.off_schedule],
        }


@dataclass
class CollapseTrace:
    system: CoxeterSystem
    base: Word
    mode: str
    faces: list[AnnotatedFace]
    steps: list[CollapseStep]
    classes: list[list[Face]]
    collapsed: set[tuple[int, ...]]

    @cached_property
    def class_of(self) -> dict[tuple[int, ...], int]:
        return {f.support: k for k, members in enumerate(self.classes) for f in members}

    @cached_property
    def element_of(self) -> dict[tuple[int, ...], GroupElement]:
        return {a.face.support: a.element for a in self.faces}

    @property
    def survivors(self) -> list[int]:
        """Indices of classes with no collapsed member."""
        return [k for k, members in enumerate(self.classes)
                if not any(f.support in self.collapsed for f in members)]

    @property
    def survivor_map(self) -> dict[int, GroupElement]:
        return {k: self.element_of[self.classes[k][0].support] for k in self.survivors}

    @property
    def top(self) -> GroupElement:
        return demazure(self.system, Face.full(self.base))

    def same_class(self, a: Sequence[int], b: Sequence[int]) -> bool:
        return self.class_of[tuple(a)] == self.class_of[tuple(b)]

    def as_dict(self) -> dict:
        survivors = set(self.survivors)
        return {
            "system": self.system.name,
            "coxeter_matrix": [list(r) for r in self.system.coxeter_matrix],
            "word": list(self.base),
            "mode": self.mode,
            "faces": len(self.faces),
            "steps": [s.as_dict() for s in self.steps],
            "classes": [
                {
                    "members": [list(f.support) for f in members],
                    "surviving": k in survivors,
                    "element": list(reduced_word(self.element_of[members[0].support])),
                }
                for k, members in enumerate(self.classes)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=1, sort_keys=True) + "\n"


def _subfaces(support: tuple[int, ...]) -> Iterable[tuple[int, ...]]:
    for size in range(1, len(support) + 1):
        yield from itertools.combinations(support, size)


def run_collapse(sys: CoxeterSystem, word: Sequence[int], mode: str = "full") -> CollapseTrace:
    """Collapse faces in priority order and record every step."""
    _check_mode(mode)
    word = sys.check_word(word)
    faces = enumerate_faces(sys, word)
    keys = {a.face.support: collapse_key(sys, word, a.face, mode) for a in faces}
    queue = sorted((k.order, a.face.support) for a in faces
                   if (k := keys[a.face.support]) is not None)

    ds = DisjointSet(a.face.support for a in faces)
    collapsed: set[tuple[int, ...]] = set()

    def class_collapsed(support):
        return any(m in collapsed for m in ds.subset(support))

    steps: list[CollapseStep] = []
    for _, support in queue:
        if class_collapsed(support):
            continue
        face = Face(word, support)
        key = keys[support]
        l, r = key.pair
        script = braid_script(sys, face, (l, r)) if mode == "full" else None
        needed = {l} | (set(script.braid_inputs) if script else set())

        identified, swept, off = [], [], []
        for sub in _subfaces(support):
            chosen = set(sub)
            if r in chosen and l not in chosen and needed <= chosen | {l}:
                partner = tuple(sorted(chosen - {r} | {l}))
                identified.append((Face(word, sub), Face(word, partner)))
            elif sub != support and {l, r} <= chosen and needed <= chosen:
                swept.append(Face(word, sub))
                own = keys[sub]
                if own is None or own.order[:3] != key.order[:3]:
                    off.append(Face(word, sub))

        assert support not in collapsed
        collapsed.add(support)
        collapsed.update(f.support for f in swept)
        for a, b in identified:
            ds.merge(a.support, b.support)
        steps.append(CollapseStep(len(steps) + 1, face, key, script, identified, swept, off))

    if mode == "full":
        leftover = [a.face for a in faces if not a.reduced and not class_collapsed(a.face.support)]
        assert not leftover, f"uncollapsed non-reduced faces: {leftover}"

    classes = sorted(
        (sorted((Face(word, s) for s in group), key=lambda f: (len(f.support), f.support))
         for group in ds.subsets()),
        key=lambda members: (len(members[0].support), members[0].support),
    )
    return CollapseTrace(sys, word, mode, faces, steps, classes, collapsed)


# --- replay and condition checks ---------------------------------------------------

@dataclass
class ConditionReport:
    lub: list[str] = field(default_factory=list)
    distinct_endpoints: list[str] = field(default_factory=list)
    equidimensional: list[str] = field(default_factory=list)

    @property
    def lub_ok(self) -> bool:
        return not self.lub

    @property
    def distinct_endpoints_ok(self) -> bool:
        return not self.distinct_endpoints

    @property
    def equidimensional_ok(self) -> bool:
        return not self.equidimensional

    @property
    def ok(self) -> bool:
        return self.lub_ok and self.distinct_endpoints_ok and self.equidimensional_ok

    def as_dict(self) -> dict:
        return {
            "lub_ok": self.lub_ok, "lub_counterexamples": self.lub,
            "distinct_endpoints_ok": self.distinct_endpoints_ok,
            "distinct_endpoints_counterexamples": self.distinct_endpoints,
            "equidimensional_ok": self.equidimensional_ok,
            "equidimensional_counterexamples": self.equidimensional,
        }


class _Complex:
    """Faces of the simplex modulo identifications made so far, with collapse marks."""

    def __init__(self, d: int):
        self.masks = list(range(1, 1 << d))
        self.ds = DisjointSet(self.masks)
        self.collapsed: set[int] = set()

    def root(self, mask: int) -> int:
        return self.ds[mask]

    def is_collapsed(self, mask: int) -> bool:
        return any(m in self.collapsed for m in self.ds.subset(mask))

    def order(self) -> dict[int, int]:
        """For each class root, a bitset over roots of the classes above it."""
        roots = sorted({self.root(m) for m in self.masks})
        pos = {r: k for k, r in enumerate(roots)}
        above: dict[int, set[int]] = {r: set() for r in roots}
        for b in self.masks:
            rb = self.root(b)
            sub = (b - 1) & b
            while sub:
                ra = self.root(sub)
                if ra != rb:
                    above[ra].add(rb)
                sub = (sub - 1) & b
        size = {r: bin(r).count("1") for r in roots}
        up: dict[int, int] = {}
        for r in sorted(roots, key=lambda r: -size[r]):
            bits = 1 << pos[r]
            for q in above[r]:
                bits |= up[q]
            up[r] = bits
        self._pos = pos
        self._roots = roots
        return up

    def leq(self, up, a_root: int, b_root: int) -> bool:
        return bool(up[a_root] >> self._pos[b_root] & 1)


def verify_conditions(trace: CollapseTrace) -> ConditionReport:
    """Replay a trace and check the least-upper-bound, distinct-endpoint and
    equal-dimension conditions at every step."""
    report = ConditionReport()
    cx = _Complex(len(trace.base))
    for step in trace.steps:
        F = _mask(step.face.support)
        l, r = step.deletion_pair
        g1, g2 = F & ~_mask([l]), F & ~_mask([r])
        tag = f"step {step.index} {step.face.placeholder()} pair {step.deletion_pair}"

        if cx.root(g1) == cx.root(g2):
            report.distinct_endpoints.append(f"{tag}: endpoint faces {_support(g1)} and "
                                             f"{_support(g2)} already identified")
        for g in (g1, g2):
            if cx.is_collapsed(g):
                report.equidimensional.append(f"{tag}: endpoint face {_support(g)} already collapsed")

        pairs = [(cx.root(_mask(a.support)), cx.root(_mask(b.support)))
                 for a, b in step.identified_pairs]
        up = cx.order()
        surviving = [q for q in cx._roots if not cx.is_collapsed(q)]

        # apply the step, then test the least upper bounds found before it
        cx.collapsed.add(F)
        cx.collapsed.update(_mask(f.support) for f in step.also_collapsed)
        for a, b in step.identified_pairs:
            cx.ds.merge(_mask(a.support), _mask(b.support))

        for ra, rb in sorted(set(pairs)):
            if ra == rb or ra not in surviving or rb not in surviving:
                continue
            bounds = [c for c in surviving if cx.leq(up, ra, c) and cx.leq(up, rb, c)]
            minimal = [c for c in bounds
                       if not any(o != c and cx.leq(up, o, c) for o in bounds)]
            for c in minimal:
                if not cx.is_collapsed(c):
                    report.lub.append(f"{tag}: least upper bound {_support(c)} of "
                                      f"{_support(ra)} and {_support(rb)} survives")
    return report


# --- quotient ----------------------------------------------------------------------

def quotient_poset(trace: CollapseTrace) -> GradedPoset:
    """Closure poset of the quotient: surviving classes plus a bottom element."""
    if trace.mode != "full":
        raise ValueError("quotient_poset needs a full-mode trace")
    cx = _Complex(len(trace.base))
    for members in trace.classes:
        first = _mask(members[0].support)
        for f in members[1:]:
            cx.ds.merge(first, _mask(f.support))
    up = cx.order()
    survivors = trace.survivors
    roots = [cx.root(_mask(trace.classes[k][0].support)) for k in survivors]
    elements = [trace.system.identity] + [trace.survivor_map[k] for k in survivors]
    labels = ["e"] + ["".join(f"s{i}" for i in reduced_word(w)) for w in elements[1:]]
    rank = [0] + [len(trace.classes[k][0].support) for k in survivors]

    def less(a, b):
        if a == b:
            return False
        if a == 0:
            return True
        return b != 0 and cx.leq(up, roots[a - 1], roots[b - 1])

    poset = GradedPoset.from_order(labels, rank, less, payload=elements)
    poset.classes = [None] + [trace.classes[k] for k in survivors]
    return poset


def compare_with_bruhat(trace: CollapseTrace, poset: GradedPoset | None = None) -> list[str]:
    """Differences between the quotient poset and [e, w] under the survivor map."""
    poset = quotient_poset(trace) if poset is None else poset
    elements = poset.payload
    problems = []
    target = lower_interval(trace.top)
    if len(set(elements)) != len(elements):
        problems.append("two surviving classes map to the same element")
    if set(elements) != set(target):
        problems.append(f"{len(set(elements))} classes vs {len(target)} elements of [e, w]")
    for i in poset.elements:
        if poset.rank[i] != elements[i].length:
            problems.append(f"{poset.labels[i]}: rank {poset.rank[i]} != length {elements[i].length}")
    for a in poset.elements:
        for b in poset.elements:
            if poset.leq(a, b) != bruhat_leq(elements[a], elements[b]):
                problems.append(f"order differs at ({poset.labels[a]}, {poset.labels[b]})")
    return problems
