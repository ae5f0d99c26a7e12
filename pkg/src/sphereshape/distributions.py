"""Target distribution families and entropy tools.

Maxwell-Boltzmann inputs maximize entropy under an average-energy
constraint; the entropy-tuning transform p -> p^(1+lam)/Z sharpens or
flattens any base distribution, which is the knob used to trade rate
loss against divergence at finite block length.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

from .alphabet import TargetDistribution

__all__ = [
    "entropy",
    "maxwell_boltzmann",
    "entropy_tune",
    "find_lambda_for_entropy",
]

_MAX_BISECT = 300


def entropy(probs: Iterable[float]) -> float:
    """Shannon entropy in bits; zero-probability terms contribute zero."""
    return -math.fsum(p * math.log2(p) for p in probs if p > 0.0)


def _normalized_exp(logits: Sequence[float]) -> list[float]:
    # max-shift before exponentiation so the mode never underflows
    top = max(logits)
    raw = [math.exp(x - top) for x in logits]
    z = math.fsum(raw)
    return [r / z for r in raw]


def maxwell_boltzmann(amplitudes: Sequence[int], lam: float) -> TargetDistribution:
    """Distribution with P(a) proportional to exp(-lam * a^2).

    lam = 0 is uniform; positive lam favors low-energy amplitudes.
    """
    if not math.isfinite(lam):
        raise ValueError("lam must be finite")
    probs = _normalized_exp([-lam * a * a for a in amplitudes])
    return TargetDistribution(tuple(amplitudes), tuple(probs))


def entropy_tune(dist: TargetDistribution, lam: float) -> TargetDistribution:
    """Reweight probabilities as p^(1 + lam), renormalized.

    lam = 0 returns the distribution unchanged; lam -> -1 flattens it
    toward uniform; large lam concentrates mass on the mode.
    """
    if lam <= -1.0 or not math.isfinite(lam):
        raise ValueError("lam must be finite and greater than -1")
    probs = _normalized_exp([(1.0 + lam) * math.log(p) for p in dist.probs])
    return TargetDistribution(dist.amplitudes, tuple(probs))


def _tuned_entropy(log_p: Sequence[float], lam: float) -> float:
    return entropy(_normalized_exp([(1.0 + lam) * lp for lp in log_p]))


def find_lambda_for_entropy(
    dist: TargetDistribution, target_bits: float, tol: float = 1e-9
) -> tuple[float, TargetDistribution]:
    """Tuning exponent lam whose reweighted distribution hits an entropy.

    Entropy is monotone nonincreasing in lam, so plain bisection over
    (-1, inf) converges; the upper bracket is grown by doubling first.
    Raises ValueError when the target lies outside the reachable range
    (above the uniform entropy or below the entropy of the flat
    distribution over the modal symbols).
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if target_bits <= 0.0:
        raise ValueError("target entropy must be positive")
    log_p = [math.log(p) for p in dist.probs]
    h0 = _tuned_entropy(log_p, 0.0)
    if abs(target_bits - h0) <= tol:
        return 0.0, entropy_tune(dist, 0.0)
    if target_bits > h0:
        # flatten: lam in (-1, 0); entropy rises toward log2(alphabet size)
        lo, hi = -1.0 + 1e-15, 0.0
        if _tuned_entropy(log_p, lo) < target_bits - tol:
            raise ValueError(
                f"target entropy {target_bits} exceeds the uniform limit"
            )
    else:
        # sharpen: grow the upper bracket until entropy falls below target
        lo, hi = 0.0, 1.0
        for _ in range(_MAX_BISECT):
            if _tuned_entropy(log_p, hi) <= target_bits:
                break
            lo, hi = hi, 2.0 * hi
        else:
            raise ValueError(f"target entropy {target_bits} below reachable range")
    # invariant: entropy(lo) >= target >= entropy(hi)
    for _ in range(_MAX_BISECT):
        mid = (lo + hi) / 2.0
        h = _tuned_entropy(log_p, mid)
        if abs(h - target_bits) <= tol:
            return mid, entropy_tune(dist, mid)
        if h > target_bits:
            lo = mid
        else:
            hi = mid
    raise ValueError(f"bisection did not reach tolerance {tol}")
