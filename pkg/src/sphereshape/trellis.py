"""Enumeration trellis over (stage, accumulated weight) nodes.

The trellis stores, for every stage n and reachable level l, the exact
number of ways to finish a length-N sequence from that node without the
total weight exceeding l_max.  These suffix counts drive both the codec
(index arithmetic) and codebook analysis, so they are kept as exact big
integers throughout; counts grow past 2^400 at practical block lengths.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from functools import cached_property

from .alphabet import WeightedAlphabet
from .weight_levels import WeightLevelSet, compute_weight_levels

__all__ = [
    "Trellis",
    "build_trellis",
    "select_l_max",
    "InfeasibleRateError",
    "trellis_to_classical_energy_view",
]

_MAGIC = b"SSTC"
_VERSION = 1


def _read_exact(fh, size: int) -> bytes:
    data = fh.read(size)
    if len(data) != size:
        raise ValueError("truncated trellis cache")
    return data


class InfeasibleRateError(ValueError):
    """Requested payload size exceeds what the alphabet can carry."""


@dataclass(frozen=True, eq=False)
class Trellis:
    """Suffix-count table for sequences of total weight at most l_max.

    counts[n][r] is the number of admissible suffixes of length N - n
    starting from accumulated-weight level level_set.levels[r].  Row 0
    is always level 0, so counts[0][0] is the codebook size.

    eq stays identity-based: comparing or hashing hundreds of thousands
    of big integers by value would be pure overhead, and caches keyed by
    trellis want identity semantics anyway.
    """

    alphabet: WeightedAlphabet
    n: int
    level_set: WeightLevelSet
    counts: tuple[tuple[int, ...], ...]

    @property
    def l_max(self) -> int:
        return self.level_set.l_max

    @property
    def num_sequences(self) -> int:
        return self.counts[0][0]

    @property
    def max_payload_bits(self) -> int:
        """Largest k with 2^k <= num_sequences."""
        return self.num_sequences.bit_length() - 1

    @cached_property
    def edges(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per-row outgoing edges as (alphabet index k, target row).

        Parallel edges (equal weights) appear in alphabet-index order;
        that order is what makes the codec deterministic.
        """
        rows = []
        for level in self.level_set.levels:
            out = []
            for k, w in enumerate(self.alphabet.weights):
                r = self.level_set.row(level + w)
                if r >= 0:
                    out.append((k, r))
            rows.append(tuple(out))
        return tuple(rows)

    def count(self, stage: int, level: int) -> int:
        """T at (stage, level); zero for levels outside the level set."""
        r = self.level_set.row(level)
        return self.counts[stage][r] if r >= 0 else 0

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack("<III", _VERSION, self.n, len(self.alphabet)))
            fh.write(struct.pack("<QQ", self.l_max, len(self.level_set)))
            for a in self.alphabet.amplitudes:
                fh.write(struct.pack("<Q", a))
            for w in self.alphabet.weights:
                fh.write(struct.pack("<Q", w))
            for level in self.level_set.levels:
                fh.write(struct.pack("<Q", level))
            for stage in self.counts:
                for c in stage:
                    raw = c.to_bytes((c.bit_length() + 7) // 8, "little")
                    fh.write(struct.pack("<I", len(raw)))
                    fh.write(raw)

    @classmethod
    def load(cls, path) -> "Trellis":
        with open(path, "rb") as fh:
            magic = _read_exact(fh, 4)
            if magic != _MAGIC:
                raise ValueError("not a trellis cache file")
            version, n, half_m = struct.unpack("<III", _read_exact(fh, 12))
            if version != _VERSION:
                raise ValueError(f"unsupported trellis cache version {version}")
            l_max, n_levels = struct.unpack("<QQ", _read_exact(fh, 16))
            amps = struct.unpack(f"<{half_m}Q", _read_exact(fh, 8 * half_m))
            weights = struct.unpack(f"<{half_m}Q", _read_exact(fh, 8 * half_m))
            levels = struct.unpack(f"<{n_levels}Q", _read_exact(fh, 8 * n_levels))
            counts = []
            for _ in range(n + 1):
                row = []
                for _ in range(n_levels):
                    (nbytes,) = struct.unpack("<I", _read_exact(fh, 4))
                    row.append(int.from_bytes(_read_exact(fh, nbytes), "little"))
                counts.append(tuple(row))
            if fh.read(1):
                raise ValueError("trailing bytes in trellis cache")
        return cls(
            WeightedAlphabet(amps, weights),
            n,
            WeightLevelSet(l_max, levels),
            tuple(counts),
        )


def build_trellis(alphabet: WeightedAlphabet, n: int, l_max: int) -> Trellis:
    """Fill the suffix-count table by backward recursion.

    T_N = 1 on every reachable level; T_n(l) sums T_{n+1}(l + w) over
    alphabet weights w with l + w <= l_max.
    """
    if n < 1:
        raise ValueError("sequence length must be at least 1")
    level_set = compute_weight_levels(alphabet, l_max)
    levels = level_set.levels
    nl = len(levels)
    # per-row targets once, so the hot loop is pure list indexing
    targets = []
    for level in levels:
        targets.append([level_set.row(level + w) for w in alphabet.weights])
        # row() is -1 for overshoot; filtered below
    counts = [None] * (n + 1)
    counts[n] = tuple([1] * nl)
    trans = [[t for t in row if t >= 0] for row in targets]
    for stage in range(n - 1, -1, -1):
        nxt = counts[stage + 1]
        cur = []
        for row in trans:
            total = 0
            for t in row:
                total += nxt[t]
            cur.append(total)
        counts[stage] = tuple(cur)
    return Trellis(alphabet, n, level_set, tuple(counts))


def _total_weight_counts(weights, n: int, cap: int) -> list[int]:
    """coeff[t] = number of length-n sequences with total weight exactly t."""
    coeff = [0] * (cap + 1)
    coeff[0] = 1
    step = sorted(weights)
    for _ in range(n):
        nxt = [0] * (cap + 1)
        for t, c in enumerate(coeff):
            if c:
                for w in step:
                    u = t + w
                    if u > cap:
                        break
                    nxt[u] += c
        coeff = nxt
    return coeff


def select_l_max(alphabet: WeightedAlphabet, n: int, k_bits: int) -> tuple[int, Trellis]:
    """Smallest sphere radius whose trellis holds at least 2^k_bits sequences.

    A single exact total-weight distribution (one polynomial-power pass)
    gives the codebook size at every radius at once; the returned trellis
    is built exactly once, at the selected radius.
    """
    if k_bits < 0:
        raise ValueError("k_bits must be nonnegative")
    target = 1 << k_bits
    m = len(alphabet)
    if m ** n < target:
        raise InfeasibleRateError(
            f"{k_bits} bits over {n} symbols needs {target} sequences; "
            f"alphabet of size {m} has only {m}**{n}"
        )
    w_max = alphabet.weights[-1]
    cap = max(w_max, 8)
    while True:
        coeff = _total_weight_counts(alphabet.weights, n, cap)
        running = 0
        for t, c in enumerate(coeff):
            running += c
            if running >= target:
                return t, build_trellis(alphabet, n, t)
        if cap >= w_max * n:
            raise InfeasibleRateError("exhausted all radii without reaching target")
        cap = min(2 * cap, w_max * n)


def trellis_to_classical_energy_view(trellis: Trellis) -> dict[int, dict[int, int]]:
    """Relabel nodes of the 8-ASK alphabet by accumulated energy.

    With amplitudes (1, 3, 5, 7) and weights (0, 1, 3, 6), a node at
    stage n and level l carries accumulated energy e = 8 l + n, since
    each amplitude satisfies a^2 = 8 w + 1.  Returns, per stage, a map
    from energy to suffix count; this is the node layout of the original
    energy-based formulation.
    """
    from .alphabet import classical_ess_alphabet

    ref = classical_ess_alphabet(8)
    if (trellis.alphabet.amplitudes, trellis.alphabet.weights) != (
        ref.amplitudes,
        ref.weights,
    ):
        raise ValueError("energy view is defined for the classical 8-ASK alphabet")
    view: dict[int, dict[int, int]] = {}
    for stage in range(trellis.n + 1):
        per_stage = {}
        for r, level in enumerate(trellis.level_set.levels):
            c = trellis.counts[stage][r]
            if c:
                per_stage[8 * level + stage] = c
        view[stage] = per_stage
    return view
