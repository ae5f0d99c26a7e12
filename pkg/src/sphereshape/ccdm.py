"""Constant-composition distribution matching by exact ranking.

Every output sequence is a permutation of one fixed multiset of
amplitudes, so the codebook is the set of multiset permutations in
lexicographic order (by alphabet entry).  Encoding is unranking and
decoding is ranking, both with exact big-integer arithmetic; this keeps
the matcher bijective at any block length, which an arithmetic-coding
implementation only approaches.
"""

from __future__ import annotations

import math
from typing import Sequence

from .alphabet import TargetDistribution

__all__ = [
    "composition_from_distribution",
    "multinomial",
    "max_payload_bits",
    "encode",
    "decode",
]


def composition_from_distribution(dist: TargetDistribution, n: int) -> tuple[int, ...]:
    """Round n * probs to an integer composition by largest remainder.

    The floor of each scaled probability is kept and the leftover slots
    go to the entries with the largest fractional parts; remainder ties
    favor the lower alphabet index, so the result is deterministic.
    """
    if n < 1:
        raise ValueError("composition length must be at least 1")
    scaled = [n * p for p in dist.probs]
    base = [math.floor(s) for s in scaled]
    leftover = n - sum(base)
    by_remainder = sorted(
        range(len(scaled)), key=lambda k: (-(scaled[k] - base[k]), k)
    )
    for k in by_remainder[:leftover]:
        base[k] += 1
    return tuple(base)


def multinomial(composition: Sequence[int]) -> int:
    """Number of distinct orderings of the composition's multiset."""
    if any(c < 0 for c in composition):
        raise ValueError("composition counts must be nonnegative")
    total = 0
    result = 1
    for c in composition:
        total += c
        result *= math.comb(total, c)
    return result


def max_payload_bits(composition: Sequence[int]) -> int:
    """Largest k with 2^k <= multinomial(composition)."""
    return multinomial(composition).bit_length() - 1


def encode(
    amplitudes: Sequence[int], composition: Sequence[int], index: int
) -> tuple[int, ...]:
    """Sequence of rank `index` among the multiset permutations.

    Lexicographic order follows the order of `amplitudes`.  The count of
    completions after fixing entry k is remaining * c_k / slots, an
    exact integer division, so the whole walk stays exact.
    """
    if len(amplitudes) != len(composition):
        raise ValueError("amplitudes and composition must have equal length")
    counts = list(composition)
    n = sum(counts)
    remaining = multinomial(counts)
    if not 0 <= index < remaining:
        raise ValueError(f"index {index} outside [0, {remaining})")
    out = []
    for pos in range(n):
        slots = n - pos
        for k, c in enumerate(counts):
            if not c:
                continue
            sub = remaining * c // slots
            if index < sub:
                out.append(amplitudes[k])
                counts[k] -= 1
                remaining = sub
                break
            index -= sub
    return tuple(out)


def decode(
    amplitudes: Sequence[int], composition: Sequence[int], sequence: Sequence[int]
) -> int:
    """Rank of a sequence; exact inverse of encode.

    Raises ValueError if the sequence is not a permutation of the
    composition's multiset.
    """
    if len(amplitudes) != len(composition):
        raise ValueError("amplitudes and composition must have equal length")
    counts = list(composition)
    n = sum(counts)
    if len(sequence) != n:
        raise ValueError(f"expected {n} amplitudes, got {len(sequence)}")
    k_of = {a: k for k, a in enumerate(amplitudes)}
    remaining = multinomial(counts)
    index = 0
    for pos, a in enumerate(sequence):
        slots = n - pos
        k = k_of.get(a)
        if k is None:
            raise ValueError(f"amplitude {a} not in alphabet")
        if not counts[k]:
            raise ValueError("sequence does not match the composition")
        for j in range(k):
            if counts[j]:
                index += remaining * counts[j] // slots
        remaining = remaining * counts[k] // slots
        counts[k] -= 1
    return index
