"""Plug-in (maximum-likelihood) entropy and mutual-information estimators.

Everything is in bits. The estimators are deliberately uncorrected: the
clustering algorithms budget for the plug-in bias through their threshold
schedules, so no Miller-Madow style adjustment is applied anywhere.

Entropy sums use ``math.fsum``, which is correctly rounded and therefore
independent of summation order; this is what makes plugin_mi exactly
symmetric under swapping its two coordinates.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "JointCounts",
    "plugin_entropy",
    "plugin_mi",
    "plugin_triple_mi",
    "binary_entropy",
    "entropy_bias_bound",
]


@dataclass(frozen=True)
class JointCounts:
    """A contingency table over one, two, or three alphabet coordinates."""

    table: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64)
        if t.ndim not in (1, 2, 3):
            raise ValueError("table must have 1, 2, or 3 coordinates")
        if np.any(t < 0):
            raise ValueError("counts must be nonnegative")
        if t.sum() < 1:
            raise ValueError("need at least one observation")
        object.__setattr__(self, "table", t)

    @property
    def n(self):
        return int(self.table.sum())


def _table(counts, ndim):
    t = counts.table if isinstance(counts, JointCounts) else JointCounts(counts).table
    if t.ndim != ndim:
        raise ValueError(f"expected a {ndim}-coordinate table, got {t.ndim}")
    return t


def _entropy_from_flat(flat, n):
    s = math.fsum(c * math.log2(c) for c in flat if c > 0)
    return math.log2(n) - s / n


def plugin_entropy(counts):
    """ML entropy of a 1-D count vector, in [0, log2(alphabet size)]."""
    t = _table(counts, 1)
    return max(0.0, _entropy_from_flat(t, int(t.sum())))


def plugin_mi(counts):
    """ML mutual information from a 2-D contingency table.

    Computed as H(X) + H(Y) - H(X,Y); exact negatives cannot occur, so any
    value in [-1e-12, 0) is roundoff and clamps to 0.
    """
    t = _table(counts, 2)
    n = int(t.sum())
    hx = _entropy_from_flat(t.sum(axis=1), n)
    hy = _entropy_from_flat(t.sum(axis=0), n)
    hxy = _entropy_from_flat(t.ravel(), n)
    mi = hx + hy - hxy
    if mi < 0:
        if mi < -1e-12:
            raise AssertionError(f"plug-in MI {mi} below the roundoff floor")
        mi = 0.0
    return mi


def plugin_triple_mi(counts):
    """MI between coordinate 1 and the pair (2, 3) of a 3-D table.

    The pair is flattened into one product-alphabet coordinate and handed to
    plugin_mi, which avoids an extra entropy subtraction.
    """
    t = _table(counts, 3)
    return plugin_mi(t.reshape(t.shape[0], -1))


def binary_entropy(p):
    """h(p) = -p log2 p - (1-p) log2(1-p); h(0) = h(1) = 0."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def entropy_bias_bound(alphabet_size, n):
    """Magnitude bound log2(1 + (|X|-1)/n) on the plug-in entropy bias.

    The plug-in estimator is negatively biased; its bias b_n satisfies
    -log2(1 + (|X|-1)/n) <= b_n <= 0.
    """
    if alphabet_size < 1 or n < 1:
        raise ValueError("alphabet_size and n must be positive")
    return math.log2(1.0 + (alphabet_size - 1) / n)
