"""Capacity of peak-power-constrained ASK over AWGN, via Blahut-Arimoto.

Under a peak power constraint the capacity-achieving input over a fixed
ASK constellation is not uniform and not Maxwell-Boltzmann; it comes
out of the Blahut-Arimoto fixed point on a finely quantized output.
The optimized input, folded to amplitudes, is what the shaping code
should target at a given peak SNR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, rel_entr

from .alphabet import TargetDistribution

__all__ = [
    "ask_symbols",
    "sigma_from_peak_snr_db",
    "output_edges",
    "transition_matrix",
    "blahut_arimoto",
    "BAResult",
    "CapacityResult",
    "optimize_ppc_distribution",
]

_LN2 = math.log(2.0)
_SUPPORT_EPS = 1e-6


def ask_symbols(m: int) -> tuple[int, ...]:
    """The m-ASK constellation -(m-1), ..., -1, 1, ..., m-1."""
    if m < 2 or m % 2:
        raise ValueError("m must be a positive even integer")
    return tuple(range(-(m - 1), m, 2))


def sigma_from_peak_snr_db(m: int, psnr_db: float) -> float:
    """Noise level at which (m-1)^2 / sigma^2 matches the given peak SNR."""
    return (m - 1) / math.sqrt(10.0 ** (psnr_db / 10.0))


def output_edges(m: int, sigma: float, bins: int = 2048) -> np.ndarray:
    """Uniform bin edges spanning all symbols plus six sigma of noise.

    The returned edges bound `bins` finite cells; the two unbounded
    tails outside the span are appended by transition_matrix, so the
    full output alphabet has bins + 2 cells.
    """
    if bins < 1:
        raise ValueError("bins must be positive")
    span = (m - 1) + 6.0 * sigma
    return np.linspace(-span, span, bins + 1)


def transition_matrix(symbols, sigma: float, edges: np.ndarray) -> np.ndarray:
    """Rows P(cell | x) from Gaussian CDF differences.

    Column 0 and column -1 are the open tails, so every row sums to
    exactly 1 up to float rounding, with no renormalization.
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    x = np.asarray(symbols, dtype=float)[:, None]
    cdf = ndtr((edges[None, :] - x) / sigma)
    left = cdf[:, :1]
    right = 1.0 - cdf[:, -1:]
    return np.hstack([left, np.diff(cdf, axis=1), right])


@dataclass(frozen=True)
class BAResult:
    capacity_bits: float
    input_probs: np.ndarray
    pointwise_info_bits: np.ndarray
    iterations: int
    converged: bool


def _pointwise_info_bits(trans: np.ndarray, q: np.ndarray) -> np.ndarray:
    # D(P(.|x) || q) per input, in bits; rel_entr handles the 0 log 0 cells
    return rel_entr(trans, q[None, :]).sum(axis=1) / _LN2


def blahut_arimoto(
    trans: np.ndarray, tol: float = 1e-7, max_iter: int = 100000
) -> BAResult:
    """Capacity of a discrete memoryless channel given its transition rows.

    Iterates the standard multiplicative update until the gap between
    the upper bound max_x D(P(.|x)||q) and the lower bound sum_x r_x
    D(P(.|x)||q) falls below tol bits.  Returns the lower bound; when
    max_iter is hit first, converged is False and the caller decides.
    """
    trans = np.asarray(trans, dtype=float)
    if trans.ndim != 2 or np.any(trans < 0):
        raise ValueError("transition matrix must be a nonnegative 2d array")
    if not np.allclose(trans.sum(axis=1), 1.0, atol=1e-12):
        raise ValueError("transition rows must sum to 1")
    n_in = trans.shape[0]
    r = np.full(n_in, 1.0 / n_in)
    info = np.zeros(n_in)
    lower = 0.0
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        q = r @ trans
        info = _pointwise_info_bits(trans, q)
        upper = float(info.max())
        lower = float(r @ info)
        if upper - lower < tol:
            converged = True
            break
        r = r * np.exp2(info - upper)
        r /= r.sum()
    return BAResult(lower, r, info, iterations, converged)


@dataclass(frozen=True)
class CapacityResult:
    """Optimized input for the peak-power-constrained ASK channel."""

    psnr_db: float
    capacity_bits: float
    symbols: tuple[int, ...]
    input_probs: tuple[float, ...]
    amplitude_dist: TargetDistribution
    kkt_residual: float
    iterations: int
    converged: bool


def optimize_ppc_distribution(
    psnr_db: float,
    m: int = 8,
    bins: int = 2048,
    tol: float = 1e-7,
    max_iter: int = 100000,
) -> CapacityResult:
    """Capacity-achieving m-ASK input at a given peak SNR.

    The Blahut-Arimoto solution is symmetrized over x and -x (the
    channel is symmetric, so this cannot lower mutual information) and
    folded into a distribution over amplitudes.  kkt_residual reports
    how far the returned input is from the optimality condition:
    pointwise information equal on the support, nowhere above capacity.
    """
    symbols = ask_symbols(m)
    sigma = sigma_from_peak_snr_db(m, psnr_db)
    trans = transition_matrix(symbols, sigma, output_edges(m, sigma, bins))
    ba = blahut_arimoto(trans, tol=tol, max_iter=max_iter)
    r = 0.5 * (ba.input_probs + ba.input_probs[::-1])
    q = r @ trans
    info = _pointwise_info_bits(trans, q)
    capacity = float(r @ info)
    support = r > _SUPPORT_EPS
    kkt_residual = max(
        float(info.max() - capacity),
        float(np.abs(info[support] - capacity).max()),
    )
    half = len(symbols) // 2
    folded = r[half:] + r[half - 1 :: -1]
    folded /= folded.sum()
    amp_dist = TargetDistribution(symbols[half:], tuple(folded))
    return CapacityResult(
        psnr_db=psnr_db,
        capacity_bits=capacity,
        symbols=symbols,
        input_probs=tuple(float(p) for p in r),
        amplitude_dist=amp_dist,
        kkt_residual=kkt_residual,
        iterations=ba.iterations,
        converged=ba.converged,
    )
