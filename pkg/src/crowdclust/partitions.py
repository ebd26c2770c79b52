"""Object labels, partitions of [ell], and the refinement lattice.

Indices are 1-based throughout: a partition of ``ell`` objects covers
{1, ..., ell}. Canonical form (clusters sorted by minimum element, indices
sorted within each cluster) makes partition equality bit-exact, so the 0/1
block error is a plain ``!=``.
"""

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LabelAlphabet",
    "ObjectSequence",
    "Partition",
    "correct_partition",
    "refines",
    "meet",
    "clustering_error",
]


@dataclass(frozen=True)
class LabelAlphabet:
    """Class alphabet [tau] plus the distinguished null response symbol.

    Responses live on the alphabet {xi} + [tau]; the null symbol xi is
    encoded as integer 0, classes as 1..tau.
    """

    tau: int

    def __post_init__(self):
        if not isinstance(self.tau, int) or self.tau < 1:
            raise ValueError(f"tau must be a positive integer, got {self.tau!r}")

    @property
    def null_symbol(self):
        return 0

    @property
    def response_alphabet_size(self):
        return self.tau + 1

    @property
    def labels(self):
        return tuple(range(1, self.tau + 1))


@dataclass(frozen=True)
class ObjectSequence:
    """A sequence of class labels T_1..T_ell, optionally with its prior."""

    labels: tuple
    prior: tuple = None

    def __post_init__(self):
        labels = tuple(int(t) for t in self.labels)
        if not labels:
            raise ValueError("labels must be nonempty")
        if any(t < 1 for t in labels):
            raise ValueError("labels are 1-based positive integers")
        object.__setattr__(self, "labels", labels)
        if self.prior is not None:
            prior = tuple(float(p) for p in self.prior)
            if any(p < 0 for p in prior):
                raise ValueError("prior entries must be nonnegative")
            if abs(sum(prior) - 1.0) > 1e-12:
                raise ValueError("prior must sum to 1 within 1e-12")
            if len(prior) < max(labels):
                raise ValueError("prior shorter than the label range")
            object.__setattr__(self, "prior", prior)

    @property
    def ell(self):
        return len(self.labels)

    def as_array(self):
        return np.asarray(self.labels, dtype=np.int64)


@dataclass(frozen=True)
class Partition:
    """A partition of {1..ell} in canonical form.

    Construct via ``Partition.from_clusters`` unless the blocks are already
    canonical. Instances are immutable and hashable.
    """

    clusters: tuple
    ell: int = field(default=None)

    def __post_init__(self):
        seen = set()
        for c in self.clusters:
            if not c:
                raise ValueError("empty cluster")
            for i in c:
                if i in seen:
                    raise ValueError(f"index {i} appears in two clusters")
                seen.add(i)
        ell = self.ell if self.ell is not None else (max(seen) if seen else 0)
        if seen != set(range(1, ell + 1)):
            raise ValueError(f"clusters do not cover 1..{ell} exactly")
        object.__setattr__(self, "ell", ell)

    @classmethod
    def from_clusters(cls, clusters, ell=None):
        blocks = tuple(
            sorted((tuple(sorted(int(i) for i in c)) for c in clusters), key=lambda c: c[0])
        )
        return cls(blocks, ell)

    @classmethod
    def singletons(cls, ell):
        return cls(tuple((i,) for i in range(1, ell + 1)), ell)

    def cluster_of(self):
        """Map index -> position of its cluster in the canonical order."""
        out = {}
        for k, c in enumerate(self.clusters):
            for i in c:
                out[i] = k
        return out

    def to_json(self):
        return json.dumps([list(c) for c in self.clusters])

    @classmethod
    def from_json(cls, text, ell=None):
        return cls.from_clusters(json.loads(text), ell)

    def __len__(self):
        return len(self.clusters)


def correct_partition(seq):
    """Ground-truth partition: indices grouped by equal labels.

    ``seq`` is an ObjectSequence or a plain iterable of labels.
    """
    labels = seq.labels if isinstance(seq, ObjectSequence) else tuple(seq)
    if not labels:
        raise ValueError("empty label sequence")
    groups = {}
    for i, t in enumerate(labels, start=1):
        groups.setdefault(t, []).append(i)
    return Partition.from_clusters(groups.values(), len(labels))


def _check_same_ground(p, q):
    if p.ell != q.ell:
        raise ValueError(f"ground-set mismatch: {p.ell} vs {q.ell}")


def refines(p, q):
    """True iff every cluster of p is contained in some cluster of q."""
    _check_same_ground(p, q)
    where = q.cluster_of()
    for c in p.clusters:
        k = where[c[0]]
        if any(where[i] != k for i in c[1:]):
            return False
    return True


def meet(parts):
    """Greatest lower bound in the refinement order (coarsest common refinement).

    Two indices share a block of the meet iff they share a block in every
    input partition.
    """
    parts = list(parts)
    if not parts:
        raise ValueError("meet of an empty list")
    ell = parts[0].ell
    for p in parts[1:]:
        if p.ell != ell:
            raise ValueError("partitions on different ground sets")
    maps = [p.cluster_of() for p in parts]
    groups = {}
    for i in range(1, ell + 1):
        key = tuple(m[i] for m in maps)
        groups.setdefault(key, []).append(i)
    return Partition.from_clusters(groups.values(), ell)


def clustering_error(estimate, truth):
    """0/1 block error: True iff the two partitions differ at all."""
    _check_same_ground(estimate, truth)
    return estimate.clusters != truth.clusters
