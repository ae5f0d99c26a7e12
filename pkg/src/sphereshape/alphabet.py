"""Channel-input alphabets and integer weight functions.

A shaping code operates on an alphabet of channel-input amplitudes, each
carrying a nonnegative integer weight.  Weights generalize the squared
amplitudes of energy-based shaping: any target distribution can be turned
into integer weights by quantizing scaled self-information, after which
the same trellis machinery applies unchanged.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "TargetDistribution",
    "WeightedAlphabet",
    "quantize_weights",
    "normalize_weights",
    "classical_ess_alphabet",
]

_PROB_SUM_TOL = 1e-12


@dataclass(frozen=True)
class TargetDistribution:
    """A discrete distribution over channel-input amplitudes.

    Attributes:
        amplitudes: strictly increasing positive integers.
        probs: matching probabilities, all positive, summing to one
            within 1e-12.
    """

    amplitudes: tuple[int, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", tuple(int(a) for a in self.amplitudes))
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        if len(self.amplitudes) != len(self.probs):
            raise ValueError("amplitudes and probs must have equal length")
        if not self.amplitudes:
            raise ValueError("empty distribution")
        if any(a <= 0 for a in self.amplitudes):
            raise ValueError("amplitudes must be positive integers")
        if any(b <= a for a, b in zip(self.amplitudes, self.amplitudes[1:])):
            raise ValueError("amplitudes must be strictly increasing")
        if any(p <= 0.0 for p in self.probs):
            raise ValueError("probabilities must be positive")
        s = math.fsum(self.probs)
        if abs(s - 1.0) > _PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {s!r}, not 1")

    def to_json(self) -> str:
        return json.dumps({"amplitudes": list(self.amplitudes), "probs": list(self.probs)})

    @classmethod
    def from_json(cls, text: str | dict) -> "TargetDistribution":
        obj = json.loads(text) if isinstance(text, str) else text
        return cls(tuple(obj["amplitudes"]), tuple(obj["probs"]))


@dataclass(frozen=True)
class WeightedAlphabet:
    """Amplitudes paired with nonnegative integer weights.

    Entries are kept sorted by weight; the entry order is the alphabet
    index k used everywhere downstream (trellis edges, codec output,
    sequence serialization), so the amplitude-to-weight binding is part
    of the codec contract.  Duplicate weights are allowed and appear as
    parallel trellis edges ordered by k.
    """

    amplitudes: tuple[int, ...]
    weights: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", tuple(int(a) for a in self.amplitudes))
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if len(self.amplitudes) != len(self.weights):
            raise ValueError("amplitudes and weights must have equal length")
        if not self.amplitudes:
            raise ValueError("empty alphabet")
        if any(a <= 0 for a in self.amplitudes):
            raise ValueError("amplitudes must be positive integers")
        if len(set(self.amplitudes)) != len(self.amplitudes):
            raise ValueError("amplitudes must be distinct")
        if self.weights[0] != 0:
            raise ValueError("minimum weight must be zero")
        if any(b < a for a, b in zip(self.weights, self.weights[1:])):
            raise ValueError("weights must be sorted ascending")

    def __len__(self) -> int:
        return len(self.amplitudes)

    @property
    def energies(self) -> tuple[int, ...]:
        return tuple(a * a for a in self.amplitudes)

    def to_json(self) -> str:
        return json.dumps({"amplitudes": list(self.amplitudes), "weights": list(self.weights)})

    @classmethod
    def from_json(cls, text: str | dict) -> "WeightedAlphabet":
        obj = json.loads(text) if isinstance(text, str) else text
        return cls(tuple(obj["amplitudes"]), tuple(obj["weights"]))


def quantize_weights(
    dist: TargetDistribution,
    f: float,
    log_base: float = 2.0,
    relative: bool = True,
) -> WeightedAlphabet:
    """Quantize scaled self-information into integer weights.

    Each amplitude gets the raw weight floor(f * s + 1/2), with s its
    self-information in units of 1/f, rounded half up.  Entries are then
    sorted by raw weight (ties keep the input order) and shifted so the
    most probable amplitude sits at weight zero.

    The two conventions differ in when that shift happens:

      relative=True   s = log(p_max / p): self-information measured
                      against the most probable amplitude, so the shift
                      is built into the quantization itself.
      relative=False  s = -log(p): absolute self-information; the
                      minimum raw weight is subtracted after rounding.

    They agree in the fine-grid limit but pick different integer vectors
    at moderate f, which visibly moves shaping performance.

    Args:
        dist: target distribution to approximate.
        f: positive quantization scale; larger f refines the grid.
        log_base: base of the self-information logarithm.  Base 2 makes
            f count bits; natural log makes it count nats.
        relative: anchor self-information at the modal amplitude before
            rounding instead of after.

    Returns:
        WeightedAlphabet in weight order.
    """
    if not (f > 0.0) or not math.isfinite(f):
        raise ValueError("quantization scale f must be positive and finite")
    if not (log_base > 0.0) or log_base == 1.0 or not math.isfinite(log_base):
        raise ValueError("log_base must be positive and != 1")
    lb = math.log(log_base)
    if relative:
        ref = math.log(max(dist.probs))
        raw = [math.floor(f * (ref - math.log(p)) / lb + 0.5) for p in dist.probs]
    else:
        raw = [math.floor(-f * math.log(p) / lb + 0.5) for p in dist.probs]
    order = sorted(range(len(raw)), key=lambda k: (raw[k], k))
    base = raw[order[0]]
    return WeightedAlphabet(
        tuple(dist.amplitudes[k] for k in order),
        tuple(raw[k] - base for k in order),
    )


def normalize_weights(raw_weights: Iterable[int]) -> tuple[int, ...]:
    """Canonicalize a weight vector: sort, shift to zero, reduce by gcd.

    The gcd division is applied unconditionally so that equivalent
    weight vectors (equal up to affine scaling) normalize identically.
    """
    ws = sorted(int(w) for w in raw_weights)
    if not ws:
        raise ValueError("empty weight vector")
    ws = [w - ws[0] for w in ws]
    g = math.gcd(*ws)
    if g > 1:
        ws = [w // g for w in ws]
    return tuple(ws)


def classical_ess_alphabet(m: int) -> WeightedAlphabet:
    """Weighted alphabet reproducing energy-based shaping for m-ASK.

    Amplitudes are 1, 3, ..., m-1 and weights are the normalized squared
    amplitudes, e.g. (0, 1, 3, 6) for m = 8.  A sphere in this weight
    metric is exactly an energy sphere.
    """
    if m < 2 or m % 2:
        raise ValueError("m must be a positive even integer")
    amps = tuple(range(1, m, 2))
    return WeightedAlphabet(amps, normalize_weights(a * a for a in amps))


def reversed_alphabet(alphabet: WeightedAlphabet, m: int | None = None) -> WeightedAlphabet:
    """Mirror amplitudes a -> m - a, keeping weights fixed.

    With the classical m-ASK alphabet this turns a minimum-energy
    codebook into the matching maximum-energy one: index order and
    sequence count are unchanged, only the emitted amplitudes flip.
    """
    if m is None:
        m = max(alphabet.amplitudes) + min(alphabet.amplitudes)
    mirrored = tuple(m - a for a in alphabet.amplitudes)
    if any(a <= 0 for a in mirrored):
        raise ValueError(f"mirror constant {m} maps some amplitude below 1")
    return WeightedAlphabet(mirrored, alphabet.weights)


__all__.append("reversed_alphabet")
