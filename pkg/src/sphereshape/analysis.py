"""Exact codebook statistics without enumerating the codebook.

Statistics of the first K sequences (total energy, per-amplitude
occupancy) are additive over symbols, so they propagate through the
trellis by the same backward recursion as the counts themselves.  A
single forward walk along the index-K boundary then adds up whole
included subtrees.  Everything stays in exact integer arithmetic; the
only floating-point steps are the final divisions and logarithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from weakref import WeakKeyDictionary

from .alphabet import TargetDistribution, WeightedAlphabet
from .distributions import entropy
from .trellis import Trellis

__all__ = [
    "PrefixStats",
    "codebook_prefix_stats",
    "divergence_bits",
    "rate_loss_bits",
    "CodebookReport",
    "summarize_codebook",
]

_table_memo: "WeakKeyDictionary[Trellis, tuple]" = WeakKeyDictionary()


@dataclass(frozen=True)
class PrefixStats:
    """Exact aggregate statistics of the first `size` codewords.

    occupancy[k] counts how often alphabet entry k occurs across all
    size * N emitted amplitudes; total_energy is the sum of squared
    amplitudes over the same set.
    """

    size: int
    total_energy: int
    occupancy: tuple[int, ...]

    def total_weight(self, alphabet: WeightedAlphabet) -> int:
        return sum(o * w for o, w in zip(self.occupancy, alphabet.weights))


def _suffix_stat_tables(trellis: Trellis):
    """Per-node suffix sums of energy and per-entry occupancy.

    energy[n][r] = sum over all suffixes from node (n, r) of their
    energy; occ[n][r][k] likewise counts symbol occurrences.  Same
    recursion as the counts, with the edge's own contribution
    (energy or one occurrence) weighted by the subtree count.
    """
    cached = _table_memo.get(trellis)
    if cached is not None:
        return cached
    counts = trellis.counts
    edges = trellis.edges
    energies = trellis.alphabet.energies
    m = len(trellis.alphabet)
    nl = len(trellis.level_set)
    n = trellis.n
    zero_occ = (0,) * m
    e_tab = [None] * (n + 1)
    o_tab = [None] * (n + 1)
    e_tab[n] = [0] * nl
    o_tab[n] = [zero_occ] * nl
    for stage in range(n - 1, -1, -1):
        t_nxt = counts[stage + 1]
        e_nxt = e_tab[stage + 1]
        o_nxt = o_tab[stage + 1]
        e_cur = [0] * nl
        o_cur = [zero_occ] * nl
        for r in range(nl):
            e_sum = 0
            o_sum = [0] * m
            for k, tr in edges[r]:
                c = t_nxt[tr]
                if not c:
                    continue
                e_sum += e_nxt[tr] + energies[k] * c
                ot = o_nxt[tr]
                for j in range(m):
                    o_sum[j] += ot[j]
                o_sum[k] += c
            e_cur[r] = e_sum
            o_cur[r] = tuple(o_sum)
        e_tab[stage] = e_cur
        o_tab[stage] = o_cur
    result = (e_tab, o_tab)
    _table_memo[trellis] = result
    return result


def codebook_prefix_stats(trellis: Trellis, size: int | None = None) -> PrefixStats:
    """Exact statistics of the first `size` codewords in index order.

    Defaults to the whole codebook.  Runs in O(N * M/2) big-integer
    operations after the one-time table build for this trellis.
    """
    total = trellis.num_sequences
    if size is None:
        size = total
    if not 1 <= size <= total:
        raise ValueError(f"size must be in [1, {total}], got {size}")
    e_tab, o_tab = _suffix_stat_tables(trellis)
    counts = trellis.counts
    edges = trellis.edges
    energies = trellis.alphabet.energies
    m = len(trellis.alphabet)
    rem = size
    energy = 0
    occ = [0] * m
    prefix_energy = 0
    prefix_occ = [0] * m
    row = 0
    for stage in range(trellis.n):
        if rem == 0:
            break
        t_nxt = counts[stage + 1]
        for k, target in edges[row]:
            c = t_nxt[target]
            if not c:
                continue
            if rem < c:
                # boundary passes through this subtree: fix the symbol, descend
                prefix_energy += energies[k]
                prefix_occ[k] += 1
                row = target
                break
            # subtree lies entirely below the boundary: add it wholesale
            energy += (prefix_energy + energies[k]) * c + e_tab[stage + 1][target]
            ot = o_tab[stage + 1][target]
            for j in range(m):
                occ[j] += prefix_occ[j] * c + ot[j]
            occ[k] += c
            rem -= c
            if rem == 0:
                break
    if rem:
        raise AssertionError("boundary walk failed to exhaust the prefix")
    return PrefixStats(size, energy, tuple(occ))


def _log2_int(n: int) -> float:
    """log2 of a positive integer too large for float conversion."""
    b = n.bit_length()
    if b <= 960:
        return math.log2(n)
    shift = b - 64
    return math.log2(n >> shift) + shift


def divergence_bits(
    stats: PrefixStats, alphabet: WeightedAlphabet, dist: TargetDistribution
) -> float:
    """Divergence of the uniform codebook from the i.i.d. target, in bits.

    Equals -log2 K plus the mean total self-information of the
    codewords; the latter comes from exact occupancies, so no codeword
    is ever visited.
    """
    p_of = dict(zip(dist.amplitudes, dist.probs))
    si = []
    for a in alphabet.amplitudes:
        if a not in p_of:
            raise ValueError(f"target distribution lacks amplitude {a}")
        si.append(-math.log2(p_of[a]))
    mean_self_info = math.fsum(
        float(Fraction(o, stats.size)) * s for o, s in zip(stats.occupancy, si)
    )
    return mean_self_info - _log2_int(stats.size)


def rate_loss_bits(dist: TargetDistribution, n: int, k_bits: int) -> float:
    """Entropy of the target minus the realized rate, bits per amplitude."""
    return entropy(dist.probs) - k_bits / n


@dataclass(frozen=True)
class CodebookReport:
    """Floating-point summary of a shaping codebook.

    The codebook is the first 2^k_bits sequences of the trellis;
    log2_trellis_size shows how far the full sequence count overshoots
    it.  total_weight_bits is the summed self-information of every
    emitted amplitude under the target distribution (the quantity whose
    per-codeword mean, minus k_bits, is the divergence); it and the
    other target-relative fields are None when no target is given.
    """

    n: int
    l_max: int
    k_bits: int
    rate_bits: float
    log2_trellis_size: float
    avg_energy: float
    avg_weight: float
    amplitude_freqs: dict[int, float]
    total_weight_bits: float | None
    divergence_bits: float | None
    rate_loss_bits: float | None


def summarize_codebook(
    trellis: Trellis,
    k_bits: int | None = None,
    dist: TargetDistribution | None = None,
) -> CodebookReport:
    """Report on the codebook of the first 2^k_bits sequences.

    k_bits defaults to the largest payload the trellis supports.  The
    divergence and rate loss fields need the target distribution and
    are None without it.
    """
    if k_bits is None:
        k_bits = trellis.max_payload_bits
    size = 1 << k_bits
    stats = codebook_prefix_stats(trellis, size)
    denom = Fraction(size * trellis.n)
    freqs = {
        a: float(Fraction(o) / denom)
        for a, o in zip(trellis.alphabet.amplitudes, stats.occupancy)
    }
    total_weight = divergence = None
    if dist is not None:
        divergence = divergence_bits(stats, trellis.alphabet, dist)
        try:
            total_weight = (divergence + k_bits) * float(size)
        except OverflowError:
            total_weight = math.inf
    return CodebookReport(
        n=trellis.n,
        l_max=trellis.l_max,
        k_bits=k_bits,
        rate_bits=k_bits / trellis.n,
        log2_trellis_size=_log2_int(trellis.num_sequences),
        avg_energy=float(Fraction(stats.total_energy) / denom),
        avg_weight=float(Fraction(stats.total_weight(trellis.alphabet)) / denom),
        amplitude_freqs=freqs,
        total_weight_bits=total_weight,
        divergence_bits=divergence,
        rate_loss_bits=(
            rate_loss_bits(dist, trellis.n, k_bits) if dist else None
        ),
    )
