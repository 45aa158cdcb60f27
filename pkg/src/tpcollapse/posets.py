"""
Finite graded posets and the combinatorial checks on closure posets.

A poset is stored by its cover relations; the order is reachability along
covers.  The checks here are the combinatorial part of the regularity
criterion for finite CW complexes: thinness, the Eulerian property and
connectivity of open intervals of rank gap above two.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Sequence

import networkx as nx

__all__ = [
    "GradedPoset", "IntervalReport", "mobius", "check_cw_conditions",
    "export_dot", "boolean_algebra", "closure_poset", "all_passed",
]


@dataclass
class GradedPoset:
    """Elements are ids ``0..N-1``; ``labels[i]`` names element i."""
    labels: list[str]
    rank: list[int]
    covers: list[tuple[int, int]]
    payload: list[Any] | None = field(default=None, repr=False)

    def __post_init__(self):
        self.covers = sorted(set(self.covers))
        if len(self.rank) != len(self.labels):
            raise ValueError("rank and labels must have equal length")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def elements(self) -> range:
        return range(len(self.labels))

    @cached_property
    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.elements)
        g.add_edges_from(self.covers)
        if not nx.is_directed_acyclic_graph(g):
            raise ValueError("cover relation has a cycle")
        return g

    @cached_property
    def _up(self) -> list[int]:
        # bitset of elements >= i
        up = [1 << i for i in self.elements]
        for i in reversed(list(nx.topological_sort(self.graph))):
            for j in self.graph.successors(i):
                up[i] |= up[j]
        return up

    def leq(self, a: int, b: int) -> bool:
        return bool(self._up[a] >> b & 1)

    def interval(self, a: int, b: int) -> list[int]:
        """Closed interval [a, b] as sorted ids."""
        return [z for z in self.elements if self.leq(a, z) and self.leq(z, b)]

    def comparable_pairs(self) -> Iterable[tuple[int, int]]:
        for a in self.elements:
            for b in self.elements:
                if self.leq(a, b):
                    yield a, b

    def index(self, label: str) -> int:
        return self.labels.index(label)

    @classmethod
    def from_order(cls, labels: Sequence[str], rank: Sequence[int], less,
                   payload=None) -> GradedPoset:
        """Build from a strict order predicate by transitive reduction."""
        g = nx.DiGraph()
        n = len(labels)
        g.add_nodes_from(range(n))
        g.add_edges_from((a, b) for a in range(n) for b in range(n) if a != b and less(a, b))
        reduced = nx.transitive_reduction(g)
        return cls(list(labels), list(rank), list(reduced.edges()), payload)


@dataclass
class IntervalReport:
    """Outcome of one property over all intervals; passes iff no counterexamples."""
    name: str
    counterexamples: list[tuple[str, str, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def as_dict(self) -> dict:
        return {
            "property": self.name,
            "pass": self.passed,
            "counterexamples": [list(c) for c in self.counterexamples],
        }


def all_passed(reports: Iterable[IntervalReport]) -> bool:
    return all(r.passed for r in reports)


def mobius(p: GradedPoset, u: int, v: int, _cache: dict | None = None) -> int:
    """Moebius function by the recursion mu(u,v) = -sum_{u<=z<v} mu(u,z)."""
    if not p.leq(u, v):
        raise ValueError(f"{p.labels[u]} and {p.labels[v]} are not comparable")
    return _mobius_from(p, u)[v]


def _mobius_from(p: GradedPoset, u: int) -> dict[int, int]:
    above = sorted((z for z in p.elements if p.leq(u, z)), key=lambda z: p.rank[z])
    mu: dict[int, int] = {}
    for v in above:
        mu[v] = 1 if v == u else -sum(mu[z] for z in mu if z != v and p.leq(z, v))
    return mu


def check_cw_conditions(p: GradedPoset) -> list[IntervalReport]:
    """Graded, thin, Eulerian and connected-open-interval reports."""
    graded = IntervalReport("graded")
    thin = IntervalReport("thin")
    eulerian = IntervalReport("eulerian")
    connected = IntervalReport("connected")
    lab = p.labels

    for a, b in p.covers:
        if p.rank[b] != p.rank[a] + 1:
            graded.counterexamples.append(
                (lab[a], lab[b], f"cover jumps rank {p.rank[a]} -> {p.rank[b]}"))

    for u in p.elements:
        mu = _mobius_from(p, u)
        for v, value in mu.items():
            gap = p.rank[v] - p.rank[u]
            expected = (-1) ** gap
            if value != expected:
                eulerian.counterexamples.append((lab[u], lab[v], f"mu={value}, expected {expected}"))
            if gap == 2:
                size = len(p.interval(u, v))
                if size != 4:
                    thin.counterexamples.append((lab[u], lab[v], f"{size} elements"))
            elif gap > 2:
                inner = [z for z in p.interval(u, v) if z not in (u, v)]
                parts = nx.number_connected_components(
                    p.graph.subgraph(inner).to_undirected()) if inner else 0
                if parts != 1:
                    connected.counterexamples.append((lab[u], lab[v], f"{parts} components"))
    return [graded, thin, eulerian, connected]


def export_dot(p: GradedPoset, labels: Sequence[str] | None = None, name: str = "hasse") -> str:
    """Hasse diagram as a DOT digraph, one rank per layer, nodes in id order."""
    labels = p.labels if labels is None else labels
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for r in sorted(set(p.rank)):
        ids = " ".join(f"n{i};" for i in p.elements if p.rank[i] == r)
        lines.append(f"  {{ rank=same; {ids} }}")
    for i in p.elements:
        text = str(labels[i]).replace('"', r'\"')
        lines.append(f'  n{i} [label="{text}"];')
    for a, b in p.covers:
        lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def closure_poset(cells: dict[str, Iterable[str]], dims: dict[str, int]) -> GradedPoset:
    """Closure poset from boundary incidences, with a bottom element adjoined.

    ``cells`` maps each cell to the cells in its boundary of one lower
    dimension; 0-cells get the adjoined bottom as their only face.
    """
    names = ["0^"] + sorted(cells, key=lambda c: (dims[c], c))
    idx = {c: k for k, c in enumerate(names)}
    covers = []
    for c, faces in cells.items():
        faces = list(faces)
        if dims[c] == 0:
            covers.append((0, idx[c]))
        covers.extend((idx[f], idx[c]) for f in faces)
    rank = [0] + [dims[c] + 1 for c in names[1:]]
    return GradedPoset(names, rank, covers)


def boolean_algebra(n: int) -> GradedPoset:
    """Subsets of {1..n} under inclusion: the face poset of a simplex plus bottom."""
    subsets = sorted(range(1 << n), key=lambda m: (bin(m).count("1"), m))
    labels = ["{" + ",".join(str(k + 1) for k in range(n) if m >> k & 1) + "}" for m in subsets]
    idx = {m: k for k, m in enumerate(subsets)}
    covers = [(idx[m], idx[m | 1 << k]) for m in subsets for k in range(n) if not m >> k & 1]
    return GradedPoset(labels, [bin(m).count("1") for m in subsets], covers)
