"""Stochastic worker models and response-matrix generators.

Three model families produce the ell x n response matrix (rows = objects,
columns = workers, integer symbols with the null response encoded as 0):

* ``TemporaryWorkerModel``: every cell is an independent draw from the class
  channel Q_t, i.e. each response comes from a transient worker. An optional
  per-worker perturbation adds channel heterogeneity while keeping the
  pool-averaged cell marginal equal to Q_t exactly.
* ``MemoryWorkerModel`` variant ``same_class_copy``: each worker answers the
  sequence in order and, with probability rho, repeats their answer to the
  most recent same-class object (one of the zeta most recent, chosen
  uniformly, when memory_depth > 1), otherwise answers fresh from Q_t. The
  per-position marginal is exactly Q_t for every rho.
* variants ``inertial`` and ``unified``: two-class chains where the answer
  to an object follows a 2x2 transition from the answer to the most recent
  same-class object. These are the worst-case channels used to probe the
  memory regime; ``unified`` also separates the two class marginals so both
  the distance and memory qualities are positive.
* variant ``full_markov``: adds a copy of the immediately previous answer
  (any class) with probability prev_prob. This honors the marginal
  invariance only approximately; deviation grows with prev_prob and the
  channel separation. Kept as the "everything depends on Y_{i-1} too"
  stress family.

Sampling is ancestral per column and deterministic given the seed. All
randomness is drawn up front as uniform matrices in a fixed order and fed
to the kernels in ``_kernels``, so the numba and numpy paths produce
bit-identical matrices.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .divergence import as_pmf, f_divergence, tv_distance
from .infoest import binary_entropy
from .partitions import LabelAlphabet, ObjectSequence

__all__ = [
    "ResponseMatrix",
    "TemporaryWorkerModel",
    "MemoryWorkerModel",
    "neighbors",
    "sample_temporary",
    "sample_memory",
    "resample_permutation",
    "marginal_channels",
    "distance_quality",
    "solve_unified_channel",
    "unified_from_qualities",
    "inertial_model",
    "model_from_config",
    "load_model",
]


def _labels_array(labels):
    seq = labels if isinstance(labels, ObjectSequence) else ObjectSequence(tuple(labels))
    return seq.as_array(), seq


@dataclass(frozen=True)
class ResponseMatrix:
    """Worker responses: entries[i, j] is worker j's answer on object i+1."""

    entries: np.ndarray
    alphabet: LabelAlphabet
    worker_assignment: np.ndarray  # worker identity per cell

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.int64)
        if e.ndim != 2:
            raise ValueError("entries must be an ell x n matrix")
        if e.size and (e.min() < 0 or e.max() > self.alphabet.tau):
            raise ValueError("symbol outside the response alphabet")
        w = np.asarray(self.worker_assignment, dtype=np.int64)
        if w.shape != e.shape:
            raise ValueError("worker_assignment shape mismatch")
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "worker_assignment", w)

    @property
    def ell(self):
        return self.entries.shape[0]

    @property
    def n(self):
        return self.entries.shape[1]

    def row_pmfs(self):
        """Empirical pmf of each object's responses over the full alphabet."""
        counts = _kernels.row_counts(self.entries, self.alphabet.response_alphabet_size)
        return counts / self.n

    def to_csv(self, path):
        np.savetxt(path, self.entries, fmt="%d", delimiter=",")


def neighbors(labels, i, zeta=1):
    """Neighbor set of object i: {i-1} plus the zeta most recent same-class indices.

    Indices are 1-based; returns an empty set for i = 1.
    """
    arr, _ = _labels_array(labels)
    if not 1 <= i <= arr.size:
        raise ValueError(f"index {i} outside 1..{arr.size}")
    if zeta < 1:
        raise ValueError("zeta must be >= 1")
    if i == 1:
        return set()
    out = {i - 1}
    found = 0
    for k in range(i - 1, 0, -1):
        if arr[k - 1] == arr[i - 1]:
            out.add(k)
            found += 1
            if found == zeta:
                break
    return out


def _same_class_parents(arr, zeta):
    """(ell, zeta) array of 0-based most-recent same-class indices, -1 padded."""
    ell = arr.size
    parents = np.full((ell, zeta), -1, dtype=np.int64)
    counts = np.zeros(ell, dtype=np.int64)
    last = {}
    for i in range(ell):
        t = arr[i]
        chain = last.get(t, [])
        take = chain[-zeta:][::-1]  # most recent first
        for k, p in enumerate(take):
            parents[i, k] = p
        counts[i] = len(take)
        last.setdefault(t, []).append(i)
    return parents, counts


def _cdf_rows(channels, arr):
    cdf = np.cumsum(channels[arr - 1], axis=1)
    cdf[:, -1] = 1.0  # guard against cumsum drift
    return cdf


@dataclass(frozen=True)
class TemporaryWorkerModel:
    """Memoryless crowd: channels[t-1] is the pool-averaged pmf Q_t over the alphabet."""

    channels: np.ndarray
    perturbation: float = 0.0

    def __post_init__(self):
        ch = np.asarray(self.channels, dtype=np.float64)
        if ch.ndim != 2 or ch.shape[1] != ch.shape[0] + 1:
            raise ValueError("channels must be tau rows over tau+1 symbols")
        for row in ch:
            as_pmf(row)
        if not 0.0 <= self.perturbation < 1.0:
            raise ValueError("perturbation must lie in [0, 1)")
        if self.perturbation > 0.0:
            # mean-zero mixing with the uniform pmf must stay inside the simplex
            a = ch.shape[1]
            mn = ch.min()
            limit = 1.0 if mn >= 1.0 / a else mn / (1.0 / a - mn)
            if self.perturbation > limit + 1e-12:
                raise ValueError(
                    f"perturbation {self.perturbation} exceeds the simplex-safe "
                    f"limit {limit:.6g} for these channels"
                )
        object.__setattr__(self, "channels", ch)

    @property
    def tau(self):
        return self.channels.shape[0]

    @property
    def alphabet(self):
        return LabelAlphabet(self.tau)

    def sample(self, labels, n, seed):
        return sample_temporary(self, labels, n, seed)


@dataclass(frozen=True)
class MemoryWorkerModel:
    """Long-term workers whose answers depend on their own earlier answers."""

    variant: str
    copy_prob: float = 0.0
    base_channels: np.ndarray = None
    memory_depth: int = 1
    epsilon: float = None
    p: float = None
    a: float = None
    b: float = None
    prev_prob: float = 0.0

    def __post_init__(self):
        if self.variant not in ("same_class_copy", "inertial", "unified", "full_markov"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if not 0.0 <= self.copy_prob < 1.0:
            raise ValueError("copy_prob must lie in [0, 1)")
        if self.memory_depth < 1:
            raise ValueError("memory_depth must be >= 1")
        if self.variant in ("same_class_copy", "full_markov"):
            if self.base_channels is None:
                raise ValueError(f"{self.variant} needs base_channels")
            ch = np.asarray(self.base_channels, dtype=np.float64)
            if ch.ndim != 2 or ch.shape[1] != ch.shape[0] + 1:
                raise ValueError("base_channels must be tau rows over tau+1 symbols")
            for row in ch:
                as_pmf(row)
            object.__setattr__(self, "base_channels", ch)
        if self.variant == "full_markov":
            if not 0.0 <= self.prev_prob < 1.0 or self.copy_prob + self.prev_prob >= 1.0:
                raise ValueError("need copy_prob + prev_prob < 1")
        if self.variant == "inertial":
            if self.epsilon is None or not 0.0 <= self.epsilon < 0.5:
                raise ValueError("inertial needs epsilon in [0, 1/2)")
        if self.variant == "unified":
            for name in ("p", "a", "b"):
                v = getattr(self, name)
                if v is None or not 0.0 <= v <= 1.0:
                    raise ValueError(f"unified needs {name} in [0, 1]")
            resid = self.a * self.p + (1.0 - self.b) * (1.0 - self.p) - self.p
            if abs(resid) > 1e-9:
                raise ValueError(f"(p, a, b) violate stationarity by {resid:.3g}")

    @property
    def tau(self):
        if self.variant in ("inertial", "unified"):
            return 2
        return self.base_channels.shape[0]

    @property
    def alphabet(self):
        return LabelAlphabet(self.tau)

    def sample(self, labels, n, seed):
        return sample_memory(self, labels, n, seed)

    def resample_permutation(self, labels, permutation, n, seed):
        return resample_permutation(self, labels, permutation, n, seed)


def sample_temporary(model, labels, n, seed):
    """ell x n matrix with i.i.d. cells: Y[i, j] ~ Q_{T_i} (pool-averaged)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    arr, _ = _labels_array(labels)
    if arr.max() > model.tau:
        raise ValueError("label outside the model's class alphabet")
    rng = np.random.default_rng(seed)
    u = rng.random((arr.size, n))
    if model.perturbation > 0.0:
        # each cell is its own transient worker with channel (1-w)Q + wU,
        # w ~ Uniform(-s, s); the mean over the worker pool is exactly Q
        w = rng.uniform(-model.perturbation, model.perturbation, size=(arr.size, n))
        a = model.channels.shape[1]
        base = model.channels[arr - 1]  # (ell, A)
        cell = (1.0 - w[..., None]) * base[:, None, :] + w[..., None] / a
        cdf = np.cumsum(cell, axis=2)
        cdf[..., -1] = 1.0
        entries = np.minimum((u[..., None] >= cdf).sum(axis=2), a - 1)
    else:
        entries = _kernels.sample_rows(_cdf_rows(model.channels, arr), u)
    workers = np.arange(arr.size * n, dtype=np.int64).reshape(arr.size, n)
    return ResponseMatrix(entries, model.alphabet, workers)


def _inertial_tables(eps, ell, arr):
    atab = 3  # symbols (xi, 1, 2)
    stay = np.array([0.0, 0.5 + eps, 0.5 - eps])
    flip = np.array([0.0, 0.5 - eps, 0.5 + eps])
    init = np.tile(np.array([0.0, 0.5, 0.5]), (ell, 1))
    trans = np.empty((ell, atab, atab))
    trans[:, 0] = init[0]  # prev = xi never occurs
    trans[:, 1] = stay
    trans[:, 2] = flip
    return init, trans


def _unified_tables(p, a, b, ell, arr):
    atab = 3
    init = np.empty((ell, atab))
    trans = np.empty((ell, atab, atab))
    m1 = np.array([0.0, p, 1.0 - p])
    m2 = np.array([0.0, 1.0 - p, p])
    # row-stochastic transitions indexed [previous symbol, new symbol]
    w1 = {1: np.array([0.0, a, 1.0 - a]), 2: np.array([0.0, 1.0 - b, b])}
    w2 = {1: np.array([0.0, b, 1.0 - b]), 2: np.array([0.0, 1.0 - a, a])}
    for i in range(ell):
        w, m = (w1, m1) if arr[i] == 1 else (w2, m2)
        init[i] = m
        trans[i, 0] = m
        trans[i, 1] = w[1]
        trans[i, 2] = w[2]
    return init, trans


def sample_memory(model, labels, n, seed):
    """Ancestral per-column sampling of a memory model; columns independent."""
    if n < 1:
        raise ValueError("n must be >= 1")
    arr, _ = _labels_array(labels)
    if arr.max() > model.tau:
        raise ValueError("label outside the model's class alphabet")
    ell = arr.size
    rng = np.random.default_rng(seed)
    if model.variant in ("inertial", "unified"):
        if model.variant == "inertial":
            init, trans = _inertial_tables(model.epsilon, ell, arr)
        else:
            init, trans = _unified_tables(model.p, model.a, model.b, ell, arr)
        parents, _ = _same_class_parents(arr, 1)
        u = rng.random((ell, n))
        entries = _kernels.sample_kernel_chain(
            parents[:, 0], np.cumsum(trans, axis=2), np.cumsum(init, axis=1), u
        )
    else:
        parents, counts = _same_class_parents(arr, model.memory_depth)
        cdf = _cdf_rows(model.base_channels, arr)
        u_choice = rng.random((ell, n))
        u_target = rng.random((ell, n))
        u_fresh = rng.random((ell, n))
        entries = _kernels.sample_mixture_chain(
            parents,
            counts,
            model.copy_prob,
            model.prev_prob if model.variant == "full_markov" else 0.0,
            cdf,
            u_choice,
            u_target,
            u_fresh,
        )
    workers = np.tile(np.arange(n, dtype=np.int64), (ell, 1))
    return ResponseMatrix(entries, model.alphabet, workers)


def resample_permutation(model, labels, permutation, n, seed):
    """Fresh responses for the sequence presented in permuted order.

    ``permutation`` maps presentation position p (1-based) to the original
    object index permutation[p-1]; memory structure follows the new order.
    Returns (permuted ObjectSequence, ResponseMatrix).
    """
    _, seq = _labels_array(labels)
    perm = tuple(int(x) for x in permutation)
    if sorted(perm) != list(range(1, seq.ell + 1)):
        raise ValueError("permutation must be a bijection on 1..ell")
    permuted = ObjectSequence(tuple(seq.labels[k - 1] for k in perm))
    return permuted, model.sample(permuted, n, seed)


# ---------------------------------------------------------------------------
# channel helpers and qualities


def marginal_channels(model):
    """Per-class marginal response pmfs as a (tau, tau+1) array."""
    if isinstance(model, TemporaryWorkerModel):
        return model.channels.copy()
    if model.variant in ("same_class_copy", "full_markov"):
        return model.base_channels.copy()
    if model.variant == "inertial":
        return np.array([[0.0, 0.5, 0.5], [0.0, 0.5, 0.5]])
    p = model.p
    return np.array([[0.0, p, 1.0 - p], [0.0, 1.0 - p, p]])


def distance_quality(model, spec=None):
    """theta_d: minimum divergence between distinct class marginals.

    Uses total variation by default; pass an FDivergenceSpec for the
    generic version.
    """
    ch = marginal_channels(model)
    tau = ch.shape[0]
    if tau < 2:
        raise ValueError("distance quality needs at least two classes")
    best = math.inf
    for i in range(tau):
        for j in range(tau):
            if i == j:
                continue
            d = tv_distance(ch[i], ch[j]) if spec is None else f_divergence(spec, ch[i], ch[j])
            best = min(best, d)
    return best


def solve_unified_channel(p, theta_m, tol=1e-10):
    """Solve (a, b) for the two-class memory chain with marginal p.

    Constraints: stationarity a*p + (1-b)*(1-p) = p, and neighbor
    information h(p) - p*h(a) - (1-p)*h(b) = 2*theta_m. Solved by bisection
    on a; requires 0 <= 2*theta_m <= h(p).
    """
    if not 0.5 <= p < 1.0:
        raise ValueError("p must lie in [1/2, 1)")
    target = 2.0 * theta_m
    hp = binary_entropy(p)
    if not 0.0 <= target <= hp + 1e-12:
        raise ValueError(f"2*theta_m = {target:.6g} outside [0, h(p) = {hp:.6g}]")

    def b_of(a):
        return 1.0 - p * (1.0 - a) / (1.0 - p)

    def gap(a):
        return hp - p * binary_entropy(a) - (1.0 - p) * binary_entropy(b_of(a)) - target

    lo, hi = p, 1.0  # gap(p) = -target <= 0, gap(1) = h(p) - target >= 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gap(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    a = 0.5 * (lo + hi)
    return a, b_of(a)


def unified_from_qualities(theta_d, theta_m):
    """Two-class unified model with TV distance theta_d and memory theta_m."""
    if not 0.0 <= theta_d < 1.0:
        raise ValueError("theta_d must lie in [0, 1)")
    p = (1.0 + theta_d) / 2.0
    a, b = solve_unified_channel(p, theta_m)
    return MemoryWorkerModel(variant="unified", p=p, a=a, b=b)


def inertial_model(epsilon):
    """Binary copy-chain channel with symmetric transitions 1/2 +- epsilon."""
    return MemoryWorkerModel(variant="inertial", epsilon=epsilon)


# ---------------------------------------------------------------------------
# JSON configuration


def model_from_config(cfg):
    """Build a worker model from a plain dict (parsed JSON).

    Temporary: {"kind": "temporary", "channels": [[...]], "perturbation": 0.0}
    Memory: {"kind": "memory", "variant": ..., plus the variant's fields};
    a unified model may instead give {"theta_d": ..., "theta_m": ...}.
    """
    kind = cfg.get("kind")
    if kind == "temporary":
        return TemporaryWorkerModel(
            channels=np.asarray(cfg["channels"], dtype=np.float64),
            perturbation=float(cfg.get("perturbation", 0.0)),
        )
    if kind == "memory":
        variant = cfg.get("variant")
        if variant == "unified" and "p" not in cfg:
            return unified_from_qualities(float(cfg["theta_d"]), float(cfg["theta_m"]))
        fields = {}
        for key in ("copy_prob", "epsilon", "p", "a", "b", "prev_prob"):
            if key in cfg:
                fields[key] = float(cfg[key])
        if "memory_depth" in cfg:
            fields["memory_depth"] = int(cfg["memory_depth"])
        if "base_channels" in cfg:
            fields["base_channels"] = np.asarray(cfg["base_channels"], dtype=np.float64)
        return MemoryWorkerModel(variant=variant, **fields)
    raise ValueError(f"unknown model kind {kind!r}")


def load_model(path):
    with open(path) as fh:
        return model_from_config(json.load(fh))
