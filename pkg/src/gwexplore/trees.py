"""Continuous-time binary forests with absolute birth/death times,
the population-count process, and serialization."""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from gwexplore.errors import ValidationError

__all__ = [
    "TreeNode",
    "Forest",
    "PopulationTrajectory",
    "build_forest",
    "alive_count",
    "trajectory",
    "extinction_time",
    "total_individuals",
    "write_forest",
    "read_forest",
]


@dataclass(frozen=True)
class TreeNode:
    """One individual: born at birth_time, dead at death_time; a death at
    the forest ceiling marks a killed individual.  children are ids in
    birth order."""

    id: int
    parent: int | None
    birth_time: float
    death_time: float
    children: tuple = field(default=())


class Forest:
    """Binary forest: nodes indexed by dense ids, roots born at time 0."""

    __slots__ = ("nodes", "roots", "ceiling_a", "_births", "_deaths")

    def __init__(self, nodes, roots, ceiling_a=math.inf):
        nodes = list(nodes)
        roots = list(roots)
        if not roots:
            raise ValidationError("forest needs at least one root")
        if not ceiling_a > 0:
            raise ValidationError("ceiling_a must be positive")
        byid = {}
        for i, node in enumerate(nodes):
            if node.id != i:
                raise ValidationError("node ids must be dense and ordered")
            byid[node.id] = node
        root_set = set(roots)
        for node in nodes:
            if not node.death_time > node.birth_time:
                raise ValidationError(
                    "node %d dies before it is born" % node.id)
            if not (math.isfinite(node.birth_time)
                    and math.isfinite(node.death_time)):
                raise ValidationError("node times must be finite")
            if node.death_time > ceiling_a:
                raise ValidationError(
                    "node %d outlives the ceiling" % node.id)
            if node.id in root_set:
                if node.parent is not None or node.birth_time != 0.0:
                    raise ValidationError(
                        "roots must be parentless and born at time 0")
            else:
                if node.parent is None or node.parent not in byid:
                    raise ValidationError(
                        "node %d has no valid parent" % node.id)
                par = byid[node.parent]
                if not (par.birth_time < node.birth_time < par.death_time):
                    raise ValidationError(
                        "node %d is born outside its parent's lifetime"
                        % node.id)
            births = [byid[c].birth_time for c in node.children]
            if any(byid[c].parent != node.id for c in node.children):
                raise ValidationError(
                    "children of node %d disagree with parent pointers"
                    % node.id)
            if any(b2 <= b1 for b1, b2 in zip(births, births[1:])):
                raise ValidationError(
                    "children of node %d must have distinct, increasing "
                    "birth times" % node.id)
        n_children = sum(len(n.children) for n in nodes)
        if n_children != len(nodes) - len(roots):
            raise ValidationError("children lists do not cover the forest")
        self.nodes = tuple(nodes)
        self.roots = tuple(roots)
        self.ceiling_a = float(ceiling_a)
        self._births = None
        self._deaths = None

    @property
    def m(self):
        return len(self.roots)

    @property
    def births(self):
        if self._births is None:
            b = np.array([n.birth_time for n in self.nodes])
            b.setflags(write=False)
            self._births = b
        return self._births

    @property
    def deaths(self):
        if self._deaths is None:
            d = np.array([n.death_time for n in self.nodes])
            d.setflags(write=False)
            self._deaths = d
        return self._deaths

    def __eq__(self, other):
        if not isinstance(other, Forest):
            return NotImplemented
        return (self.ceiling_a == other.ceiling_a
                and self.roots == other.roots
                and self.nodes == other.nodes)

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __repr__(self):
        return ("Forest(m=%d, nodes=%d, a=%g)"
                % (self.m, len(self.nodes), self.ceiling_a))


def build_forest(records, ceiling_a=math.inf):
    """Assemble a Forest from (parent_ref, birth, death) triples.

    parent_ref indexes into `records` (None for roots).  Ids are assigned
    densely in birth order, stable in record order for ties (the roots, all
    born at 0, keep their record order), and children are sorted by birth.
    """
    if not records:
        raise ValidationError("no records")
    births = np.array([r[1] for r in records])
    order = np.argsort(births, kind="stable")
    old2new = np.empty(len(records), dtype=np.int64)
    old2new[order] = np.arange(len(records))
    kids = [[] for _ in records]
    roots = []
    for old_idx, (parent_ref, birth, _death) in enumerate(records):
        if parent_ref is None:
            roots.append(int(old2new[old_idx]))
        else:
            kids[parent_ref].append(old_idx)
    nodes = []
    for new_id, old_idx in enumerate(order):
        parent_ref, birth, death = records[old_idx]
        # ids are dense in birth order, so sorting children by id sorts
        # them by birth
        child_ids = sorted(int(old2new[c]) for c in kids[old_idx])
        nodes.append(TreeNode(
            id=new_id,
            parent=None if parent_ref is None else int(old2new[parent_ref]),
            birth_time=float(birth),
            death_time=float(death),
            children=tuple(child_ids)))
    roots.sort()
    return Forest(nodes, roots, ceiling_a=ceiling_a)


@dataclass(frozen=True)
class PopulationTrajectory:
    """Cadlag step process: counts[k] holds after jump_times[k]."""

    jump_times: np.ndarray
    counts: np.ndarray
    initial_count: int

    def __post_init__(self):
        t = np.asarray(self.jump_times, dtype=np.float64)
        c = np.asarray(self.counts, dtype=np.int64)
        if t.shape != c.shape or t.ndim != 1:
            raise ValidationError("jump_times and counts must align")
        if np.any(np.diff(t) < 0):
            raise ValidationError("jump_times must be nondecreasing")
        steps = np.diff(np.concatenate(([self.initial_count], c)))
        if t.shape[0] and np.any(np.abs(steps) != 1):
            raise ValidationError("counts must change by exactly 1 per jump")
        if np.any(c < 0) or self.initial_count < 0:
            raise ValidationError("counts must stay nonnegative")
        dead = np.flatnonzero(c == 0)
        if dead.shape[0] and dead[0] != t.shape[0] - 1:
            raise ValidationError("population jumped after absorption at 0")
        object.__setattr__(self, "jump_times", t)
        object.__setattr__(self, "counts", c)

    def value_at(self, t):
        """Count at time t (right-continuous)."""
        if t < 0:
            raise ValidationError("time must be nonnegative")
        idx = int(np.searchsorted(self.jump_times, t, side="right"))
        return self.initial_count if idx == 0 else int(self.counts[idx - 1])

    def values_at(self, times):
        times = np.asarray(times, dtype=np.float64)
        idx = np.searchsorted(self.jump_times, times, side="right")
        ext = np.concatenate(([self.initial_count], self.counts))
        return ext[idx]


def alive_count(forest, t):
    """Number of individuals with birth <= t < death.

    t must avoid the event times themselves: the evaluation convention at a
    jump is deliberately left undefined.
    """
    t = float(t)
    if t < 0:
        raise ValidationError("time must be nonnegative")
    if np.any(forest.births == t) or np.any(forest.deaths == t):
        raise ValidationError(
            "alive_count is undefined exactly at a birth/death time")
    return int(np.count_nonzero((forest.births <= t) & (t < forest.deaths)))


def trajectory(forest):
    """Event-sorted view of the forest: +1 per birth (roots excluded, they
    are the initial count), -1 per death.

    A birth and a death at the same instant is an error (the step order
    would be ambiguous); ties of the same type are kept as consecutive
    jumps.
    """
    births = forest.births
    deaths = forest.deaths
    birth_times = births[births > 0.0]
    times = np.concatenate((birth_times, deaths))
    deltas = np.concatenate((np.ones(birth_times.shape[0], dtype=np.int64),
                             -np.ones(deaths.shape[0], dtype=np.int64)))
    order = np.lexsort((-deltas, times))
    times = times[order]
    deltas = deltas[order]
    same = np.flatnonzero(np.diff(times) == 0.0)
    if np.any(deltas[same] != deltas[same + 1]):
        raise ValidationError(
            "a birth and a death collide at the same instant")
    counts = forest.m + np.cumsum(deltas)
    return PopulationTrajectory(jump_times=times, counts=counts,
                                initial_count=forest.m)


def extinction_time(forest):
    """Latest death time."""
    return float(forest.deaths.max())


def total_individuals(forest):
    """Number of nodes ever alive."""
    return len(forest.nodes)


def write_forest(forest, file):
    """JSON {a, roots, nodes:[{id,parent,birth,death}]}, ids ascending;
    floats serialized with full round-trip precision."""
    file = Path(file)
    a = forest.ceiling_a
    doc = {
        "a": None if math.isinf(a) else a,
        "roots": list(forest.roots),
        "nodes": [
            {"id": n.id, "parent": n.parent, "birth": n.birth_time,
             "death": n.death_time}
            for n in forest.nodes
        ],
    }
    file.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return file


def read_forest(file):
    """Load a forest file written by write_forest."""
    doc = json.loads(Path(file).read_text())
    a = doc.get("a")
    recs = sorted(doc["nodes"], key=lambda r: r["id"])
    if [r["id"] for r in recs] != list(range(len(recs))):
        raise ValidationError("forest file ids must be dense")
    kids = [[] for _ in recs]
    for r in recs:
        if r["parent"] is not None:
            kids[r["parent"]].append(r)
    nodes = []
    for r in recs:
        child_ids = [c["id"]
                     for c in sorted(kids[r["id"]], key=lambda c: c["birth"])]
        nodes.append(TreeNode(id=r["id"], parent=r["parent"],
                              birth_time=float(r["birth"]),
                              death_time=float(r["death"]),
                              children=tuple(child_ids)))
    return Forest(nodes, doc["roots"],
                  ceiling_a=math.inf if a is None else float(a))
