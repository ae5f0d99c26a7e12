"""Index-to-sequence codec over a shaping trellis.

shape maps an integer index to the amplitude sequence of the same rank
in lexicographic order (by alphabet index), deshape inverts it.  Both
walk the trellis once, so a call costs N * M/2 big-integer compares and
subtractions; no codebook is ever materialized.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .trellis import Trellis

__all__ = [
    "shape",
    "deshape",
    "shape_bits",
    "deshape_bits",
    "bits_to_index",
    "index_to_bits",
]


def shape(trellis: Trellis, index: int) -> tuple[int, ...]:
    """Amplitude sequence of rank `index` in the codebook.

    At each stage the index is bracketed against the running sum of
    suffix counts of the candidate edges taken in alphabet order; the
    edge whose bracket contains the index is emitted and the index is
    rebased to the offset inside that subtree.
    """
    if not 0 <= index < trellis.num_sequences:
        raise ValueError(
            f"index {index} outside [0, {trellis.num_sequences})"
        )
    amps = trellis.alphabet.amplitudes
    edges = trellis.edges
    counts = trellis.counts
    out = []
    row = 0
    i = index
    for stage in range(trellis.n):
        nxt = counts[stage + 1]
        for k, target in edges[row]:
            c = nxt[target]
            if i < c:
                out.append(amps[k])
                row = target
                break
            i -= c
        else:
            raise AssertionError("index not exhausted; trellis counts invalid")
    return tuple(out)


def deshape(trellis: Trellis, sequence: Sequence[int]) -> int:
    """Rank of an amplitude sequence; exact inverse of shape.

    Raises ValueError if the sequence has the wrong length, contains an
    amplitude outside the alphabet, or its accumulated weight leaves the
    sphere.
    """
    if len(sequence) != trellis.n:
        raise ValueError(f"expected {trellis.n} amplitudes, got {len(sequence)}")
    k_of = {a: k for k, a in enumerate(trellis.alphabet.amplitudes)}
    edges = trellis.edges
    counts = trellis.counts
    index = 0
    row = 0
    for stage, a in enumerate(sequence):
        k = k_of.get(a)
        if k is None:
            raise ValueError(f"amplitude {a} not in alphabet")
        nxt = counts[stage + 1]
        for kk, target in edges[row]:
            if kk == k:
                row = target
                break
            index += nxt[target]
        else:
            raise ValueError("sequence weight exceeds l_max")
    return index


def bits_to_index(bits: str | Iterable[int]) -> int:
    """Parse a bit string, most significant bit first."""
    if not isinstance(bits, str):
        bits = "".join(str(int(b)) for b in bits)
    if not bits:
        return 0
    if set(bits) - {"0", "1"}:
        raise ValueError("bits must be 0 or 1")
    return int(bits, 2)


def index_to_bits(index: int, k_bits: int) -> str:
    """Render an index as exactly k_bits bits, most significant first."""
    if index < 0 or index >> k_bits:
        raise ValueError(f"index {index} does not fit in {k_bits} bits")
    if k_bits == 0:
        return ""
    return format(index, f"0{k_bits}b")


def shape_bits(trellis: Trellis, bits: str | Iterable[int]) -> tuple[int, ...]:
    """Shape a binary payload; the payload length fixes the code rate."""
    if not isinstance(bits, str):
        bits = "".join(str(int(b)) for b in bits)
    if len(bits) > trellis.max_payload_bits:
        raise ValueError(
            f"{len(bits)}-bit payload needs 2^{len(bits)} sequences; trellis "
            f"holds only 2^{trellis.max_payload_bits} whole payload blocks"
        )
    return shape(trellis, bits_to_index(bits))


def deshape_bits(trellis: Trellis, sequence: Sequence[int], k_bits: int) -> str:
    """Recover the k_bits payload that shaped `sequence`."""
    index = deshape(trellis, sequence)
    if index >> k_bits:
        raise ValueError(
            f"sequence has rank {index}, outside the {k_bits}-bit codebook"
        )
    return index_to_bits(index, k_bits)
