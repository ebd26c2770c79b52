"""f-divergences on finite alphabets and their smoothness-constant bounds.

All divergences are reported in bits (base-2 logs). ``tv_distance`` is the
half-L1 total variation, so Pinsker reads D >= (2 log2 e) * delta^2 and the
f-divergence generated by f(x)=|x-1| equals exactly 2*delta.

Constant conventions for an ``FDivergenceSpec`` on a ratio range [r, R]:

* ``C`` upper-bounds the curvature x*f''(x) on [r, R].
* ``c`` is the bits-calibrated lower constant min(x*f''(x)) / log2(e).
  With that calibration the curvature sandwich c*D <= D_f <= C*D holds
  against the base-2 KL divergence D, and kappa = 2*c*log2(e) gives a valid
  lower bound kappa*delta^2 <= D_f (for the KL generator kappa collapses to
  the exact Pinsker constant 2*log2 e). Supplying the raw curvature minimum
  for ``c`` instead would overshoot the sandwich by a log2(e) factor.
* ``L`` makes D_f <= L*delta hold; 2*Lip(f) on [r, R] suffices under the
  half-L1 convention.

The caller owns (c, C, L); ``curvature_in_range`` spot-checks the curvature
claim by sampling the generator numerically.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "LOG2E",
    "as_pmf",
    "empirical_pmf",
    "tv_distance",
    "kl_divergence",
    "FDivergenceSpec",
    "f_divergence",
    "check_bounds",
    "BoundsReport",
    "curvature_in_range",
    "total_variation_spec",
    "kl_spec",
    "hellinger_spec",
]

LOG2E = math.log2(math.e)


def as_pmf(mass):
    """Validate and return a pmf as a float array.

    Entries must be nonnegative and sum to 1 within 1e-12.
    """
    p = np.asarray(mass, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("pmf must be a nonempty 1-D vector")
    if np.any(p < 0):
        raise ValueError("pmf entries must be nonnegative")
    if abs(float(p.sum()) - 1.0) > 1e-12:
        raise ValueError(f"pmf sums to {p.sum()!r}, not 1 within 1e-12")
    return p


def empirical_pmf(samples, alphabet_size):
    """Empirical distribution of integer symbols 0..alphabet_size-1."""
    s = np.asarray(samples)
    if s.size == 0:
        raise ValueError("empty sample set")
    if s.min() < 0 or s.max() >= alphabet_size:
        raise ValueError("symbol outside the alphabet")
    counts = np.bincount(s.ravel(), minlength=alphabet_size)
    return counts / s.size


def tv_distance(p, q):
    """Half-L1 total variation delta(p, q) in [0, 1]."""
    p, q = as_pmf(p), as_pmf(q)
    if p.shape != q.shape:
        raise ValueError("alphabet size mismatch")
    return 0.5 * float(np.abs(p - q).sum())


def kl_divergence(p, q):
    """KL divergence in bits; +inf when support(p) is not within support(q)."""
    p, q = as_pmf(p), as_pmf(q)
    if p.shape != q.shape:
        raise ValueError("alphabet size mismatch")
    mask = p > 0
    if np.any(q[mask] == 0):
        return math.inf
    pm = p[mask]
    return float(np.sum(pm * np.log2(pm / q[mask])))


@dataclass(frozen=True)
class FDivergenceSpec:
    """A convex generator f with caller-supplied smoothness constants.

    ``generator`` must accept numpy arrays of ratios in [0, inf) and satisfy
    f(1) = 0 (checked at construction). ``tail_slope`` is lim f(x)/x as
    x -> inf; it prices p_i mass sitting on q_i = 0 (inf for superlinear
    generators such as KL).
    """

    name: str
    generator: callable
    c: float
    C: float
    L: float
    tail_slope: float = math.inf

    def __post_init__(self):
        if self.name not in ("total_variation", "kl", "custom"):
            raise ValueError(f"unknown spec name {self.name!r}")
        f1 = float(self.generator(np.array([1.0]))[0])
        if abs(f1) > 1e-12:
            raise ValueError(f"generator not normalized: f(1) = {f1!r}")
        if self.name != "total_variation":
            if not (0 < self.c <= self.C < math.inf):
                raise ValueError("need 0 < c <= C < inf")
            if not (0 < self.L < math.inf):
                raise ValueError("need finite positive L")

    @property
    def kappa(self):
        return 2.0 * self.c * LOG2E


def f_divergence(spec, p, q):
    """D_f(p||q) = sum_i q_i f(p_i / q_i), with standard zero conventions."""
    p, q = as_pmf(p), as_pmf(q)
    if p.shape != q.shape:
        raise ValueError("alphabet size mismatch")
    pos = q > 0
    ratios = p[pos] / q[pos]
    total = float(np.sum(q[pos] * spec.generator(ratios)))
    escaped = float(p[~pos].sum())  # p mass on q's zeros
    if escaped > 0:
        if math.isinf(spec.tail_slope):
            return math.inf
        total += spec.tail_slope * escaped
    return total


@dataclass(frozen=True)
class BoundsReport:
    pinsker_ok: bool
    sandwich_ok: bool
    lipschitz_ok: bool
    delta: float
    kl: float
    f_div: float

    def all_ok(self):
        return self.pinsker_ok and self.sandwich_ok and self.lipschitz_ok


def check_bounds(spec, p, q, slack=1e-9):
    """Evaluate the Pinsker, curvature-sandwich and Lipschitz inequalities.

    Requires strictly positive pmfs so the ratio range is finite. Each flag
    is true iff the corresponding inequality holds within ``slack``.
    """
    p, q = as_pmf(p), as_pmf(q)
    if np.any(p == 0) or np.any(q == 0):
        raise ValueError("check_bounds needs strictly positive pmfs")
    delta = tv_distance(p, q)
    d = kl_divergence(p, q)
    df = f_divergence(spec, p, q)
    pinsker = d >= 2.0 * LOG2E * delta * delta - slack
    upper = math.inf if (math.isinf(spec.C) and d > 0) else spec.C * d
    sandwich = (spec.c * d <= df + slack) and (df <= upper + slack)
    lipschitz = (spec.kappa * delta * delta <= df + slack) and (df <= spec.L * delta + slack)
    return BoundsReport(pinsker, sandwich, lipschitz, delta, d, df)


def curvature_in_range(spec, r, R, points=1000, tol=1e-5):
    """Numerically check c <= x*f''(x) <= C on [r, R] by finite differences.

    ``c`` is compared after undoing its bits calibration (see module
    docstring). Returns True when every sampled point passes within ``tol``.
    """
    if not (0 < r <= 1 <= R):
        raise ValueError("need 0 < r <= 1 <= R")
    x = np.linspace(r, R, points)
    h = np.maximum(1e-5 * x, 1e-8)
    second = (spec.generator(x + h) - 2 * spec.generator(x) + spec.generator(x - h)) / (h * h)
    curv = x * second
    lo = spec.c * LOG2E  # raw curvature floor implied by the calibrated c
    return bool(np.all(curv >= lo - tol) and np.all(curv <= spec.C + tol))


# ---------------------------------------------------------------------------
# stock generators


def _tv_gen(x):
    return np.abs(x - 1.0)


def _kl_gen(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    nz = x > 0
    out[nz] = x[nz] * np.log2(x[nz])
    return out


def _hellinger_gen(x):
    return (np.sqrt(x) - 1.0) ** 2


def total_variation_spec():
    """f(x) = |x-1|. Curvature constants are vacuous (not twice differentiable)."""
    return FDivergenceSpec("total_variation", _tv_gen, 0.0, math.inf, 2.0, tail_slope=1.0)


def kl_spec(r, R):
    """f(x) = x log2 x with constants valid on the ratio range [r, R].

    Curvature x*f''(x) = log2(e) everywhere, so c = 1 (bits-calibrated) and
    C = log2(e) regardless of the range; only L depends on [r, R].
    """
    if not (0 < r <= 1 <= R):
        raise ValueError("need 0 < r <= 1 <= R")
    lip = max(abs(math.log2(math.e * r)), abs(math.log2(math.e * R)))
    return FDivergenceSpec("kl", _kl_gen, 1.0, LOG2E, 2.0 * lip)


def hellinger_spec(r, R):
    """Squared Hellinger generator f(x) = (sqrt(x)-1)^2 on the range [r, R]."""
    if not (0 < r <= 1 <= R):
        raise ValueError("need 0 < r <= 1 <= R")
    c = 0.5 / math.sqrt(R) / LOG2E
    C = 0.5 / math.sqrt(r)
    lip = max(1.0 / math.sqrt(r) - 1.0, 1.0 - 1.0 / math.sqrt(R))
    return FDivergenceSpec("custom", _hellinger_gen, c, C, 2.0 * lip, tail_slope=1.0)
