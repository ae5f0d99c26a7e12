"""Reachable accumulated-weight levels inside a sphere of radius l_max.

Arbitrary weight vectors do not reach every integer between 0 and l_max,
so trellis nodes are indexed through the set L of levels actually
reachable by sums of weights.  L is the smallest set containing 0 and
closed under adding any alphabet weight without exceeding l_max.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass

from .alphabet import WeightedAlphabet

__all__ = ["WeightLevelSet", "compute_weight_levels"]


@dataclass(frozen=True)
class WeightLevelSet:
    """Sorted reachable levels with O(log |L|) level-to-row lookup."""

    l_max: int
    levels: tuple[int, ...]

    def __post_init__(self):
        if self.l_max < 0:
            raise ValueError("l_max must be nonnegative")
        if not self.levels or self.levels[0] != 0:
            raise ValueError("level set must contain 0")
        if any(b <= a for a, b in zip(self.levels, self.levels[1:])):
            raise ValueError("levels must be strictly increasing")
        if self.levels[-1] > self.l_max:
            raise ValueError("levels must not exceed l_max")

    def __len__(self) -> int:
        return len(self.levels)

    def __contains__(self, level: int) -> bool:
        return self.row(level) >= 0

    def row(self, level: int) -> int:
        """Row index of `level` in the sorted array, or -1 if absent."""
        i = bisect_left(self.levels, level)
        if i < len(self.levels) and self.levels[i] == level:
            return i
        return -1


def compute_weight_levels(alphabet: WeightedAlphabet, l_max: int) -> WeightLevelSet:
    """Fixed-point closure of {0} under level + weight <= l_max."""
    if l_max < 0:
        raise ValueError("l_max must be nonnegative")
    seen = {0}
    frontier = [0]
    weights = sorted(set(alphabet.weights))
    while frontier:
        nxt = []
        for level in frontier:
            for w in weights:
                t = level + w
                if t <= l_max and t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    return WeightLevelSet(l_max, tuple(sorted(seen)))
