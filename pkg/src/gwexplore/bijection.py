"""The bijection between canonical exploration paths and binary forests.

Each excursion above zero encodes one tree.  Within an excursion the
leftmost local maximum is the owner's death time; the lowest local minimum
splits off the subtree of the owner's first offspring (everything to its
right), and the left remainder is the owner with its later offspring.  Both
directions are implemented iteratively with explicit work stacks, so deep
excursions cannot overflow the call stack.
"""

import numpy as np

from gwexplore.errors import ValidationError
from gwexplore.paths import ExplorationPath
from gwexplore.trees import build_forest

__all__ = ["path_to_forest", "forest_to_path"]


def path_to_forest(path):
    """Map an exploration path to the forest it encodes.

    Heights become absolute times verbatim: the base of a sub-excursion is
    the owner's birth time, its leftmost maximum the owner's death time, and
    maxima clipped at the ceiling mark killed individuals.  Ids come out
    dense in birth order.
    """
    h = path.heights
    zeros = np.flatnonzero(h == 0.0)
    records = []
    for s0, e0 in zip(zeros[:-1], zeros[1:]):
        # work items: slice (s, e) with implied closing height h[s], plus
        # the owner's parent record index
        work = [(int(s0), int(e0), None)]
        while work:
            s, e, parent = work.pop()
            rec = len(records)
            records.append((parent, float(h[s]), float(h[s + 1])))
            cur = e
            while cur > s + 2:
                mins = h[s + 2:cur - 1:2]
                q = s + 2 + 2 * int(np.argmin(mins))
                work.append((q, cur, rec))
                cur = q
    return build_forest(records, ceiling_a=path.ceiling_a)


def forest_to_path(forest, slope_p=2.0):
    """Emit the canonical exploration path of a forest.

    Inverse of path_to_forest: per tree, ascend to the owner's death, then
    visit its children in reverse birth order, descending to each child's
    birth before exploring that child's subtree.  Birth times within one
    tree must be distinct (the distinct-minima rule on the path side).
    """
    nodes = forest.nodes
    extrema = [0.0]
    for root in forest.roots:
        seen = {}
        stack = [(root, False)]
        while stack:
            nid, emit_min = stack.pop()
            node = nodes[nid]
            if emit_min:
                b = node.birth_time
                if b in seen:
                    raise ValidationError(
                        "duplicate birth time %r within one tree" % b)
                seen[b] = nid
                extrema.append(b)
            extrema.append(node.death_time)
            for child in node.children:
                stack.append((child, True))
        extrema.append(0.0)
    return ExplorationPath(extrema, slope_p, ceiling_a=forest.ceiling_a,
                           excursion_count=forest.m)
