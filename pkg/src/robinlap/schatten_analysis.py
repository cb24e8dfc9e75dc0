"""Decay exponents, Schatten partial sums and membership thresholds.

If ``s_k = O(k^{-alpha})`` the operator lies in ``S_p`` for every ``p > 1/alpha``;
a measured exponent is therefore compared against a threshold ``p_th`` via
``1/alpha <= p_th + tolerance``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ValidationError

MIN_FIT_POINTS = 50
DEFAULT_TOLERANCE = 0.15


class ThresholdKind(enum.Enum):
    ROBIN_NEUMANN = "robin_neumann"
    DIRICHLET_NEUMANN = "dirichlet_neumann"
    COMPOSITE = "composite"

    @classmethod
    def parse(cls, value) -> "ThresholdKind":
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            raise ValidationError(f"unknown threshold kind {value!r}") from None


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    intercept: float
    k_range: tuple[int, int]
    rms_residual: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["k_range"] = list(self.k_range)
        return d


@dataclass(frozen=True)
class ThresholdSpec:
    kind: ThresholdKind
    n: int
    p_threshold: float
    p0: float | None = None

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value, "n": self.n}
        if self.p0 is not None:
            d["p0"] = self.p0
        d["p"] = self.p_threshold
        return d


@dataclass(frozen=True)
class Verdict:
    consistent: bool
    exponent: float
    implied_p: float          # membership holds for all p > implied_p
    p_threshold: float
    margin: float             # p_threshold - implied_p
    tolerance: float

    @property
    def label(self) -> str:
        return "consistent" if self.consistent else "inconsistent"


def _values(spectrum) -> np.ndarray:
    return np.asarray(getattr(spectrum, "values", spectrum), dtype=float)


def default_window(length: int) -> tuple[int, int]:
    """``[K/10, K]`` (1-based, inclusive)."""
    return max(1, length // 10), length


def fit_decay_exponent(spectrum, k_range=None) -> DecayFit:
    """OLS fit of ``log s_k`` on ``log k`` over the 1-based inclusive ``k_range``."""
    s = _values(spectrum)
    lo, hi = default_window(s.size) if k_range is None else map(int, k_range)
    if lo < 1 or hi > s.size or lo > hi:
        raise ValidationError(f"k_range [{lo}, {hi}] outside spectrum of length {s.size}")
    if hi - lo + 1 < MIN_FIT_POINTS:
        raise ValidationError(
            f"k_range [{lo}, {hi}] has fewer than {MIN_FIT_POINTS} points")
    window = s[lo - 1:hi]
    if np.any(window <= 0) or not np.all(np.isfinite(window)):
        first = lo + int(np.argmax(~(window > 0)))
        raise ValidationError(
            f"s_k is zero or non-finite at k={first}; shrink the fit window below it")
    x = np.log(np.arange(lo, hi + 1, dtype=float))
    y = np.log(window)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return DecayFit(float(-slope), float(intercept), (lo, hi),
                    float(np.sqrt(np.mean(resid ** 2))))


def schatten_partial_sums(spectrum, p: float, checkpoints) -> np.ndarray:
    """``sum_{k <= K} s_k^p`` at each checkpoint ``K``."""
    if not p > 0:
        raise ValidationError("p must be positive")
    s = _values(spectrum)
    cums = np.cumsum(s ** p)
    out = []
    for K in checkpoints:
        K = int(K)
        if K < 0 or K > s.size:
            raise ValidationError(f"checkpoint {K} outside spectrum of length {s.size}")
        out.append(cums[K - 1] if K > 0 else 0.0)
    return np.array(out, dtype=float)


def threshold(kind, n: int, p0: float | None = None) -> ThresholdSpec:
    kind = ThresholdKind.parse(kind)
    if int(n) != n or n < 2:
        raise ValidationError(f"n must be an integer >= 2, got {n}")
    n = int(n)
    if kind is ThresholdKind.ROBIN_NEUMANN:
        return ThresholdSpec(kind, n, (n - 1) / 3.0)
    if kind is ThresholdKind.DIRICHLET_NEUMANN:
        return ThresholdSpec(kind, n, (n - 1) / 2.0)
    if p0 is None:
        raise ValidationError("the composite threshold needs p0")
    if not p0 > 0:
        raise ValidationError("p0 must be positive")
    p0 = float(p0)
    return ThresholdSpec(kind, n, (n - 1) * p0 / (n - 1 + 3.0 * p0), p0)


def verdict(fit: DecayFit, bound: ThresholdSpec, tolerance: float = DEFAULT_TOLERANCE) -> Verdict:
    """Compare ``1/alpha`` with the threshold; ``margin > 0`` means room to spare."""
    implied = 1.0 / fit.exponent if fit.exponent > 0 else math.inf
    return Verdict(implied <= bound.p_threshold + tolerance, fit.exponent, implied,
                   bound.p_threshold, bound.p_threshold - implied, tolerance)
