"""Receptive fields: a cubic lattice of points on the objective hyperplane.

The lattice is spanned by an orthonormal basis of the hyperplane built
constructively from ``c`` (no Gram-Schmidt).  Point ``k`` of the field is the
lattice node whose mixed-radix digits, base ``2*eta + 1``, spell ``k`` with the
first basis direction as the least significant digit.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

DEFAULT_CELL_CAP = 2**40
_INT64_LIMIT = 2**63 - 1


class FieldCapError(ValueError):
    """Field cardinality exceeds the configured cell cap."""

    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"receptive field has {size} points, above the cap of {cap}")


class FieldOverflowError(FieldCapError):
    """Field cardinality does not even fit a 64-bit ordinal."""

    def __init__(self, size: int, cap: int):
        super().__init__(size, cap)
        self.args = (f"receptive field size {size} overflows 64-bit ordinals",)


@dataclass(frozen=True, eq=False)
class BasisSet:
    """Orthogonal basis ``c_vectors[0] = c, c_vectors[1:]`` spanning the hyperplane.

    ``c_vectors`` and ``e_vectors`` are in working coordinates, i.e. after
    ``permutation`` has been applied to the original ones
    (``working = original[permutation]``).  ``directions`` gives the unit
    vectors back in original coordinates; receptive points are built from it.
    """

    n: int
    c_vectors: np.ndarray
    e_vectors: np.ndarray
    permutation: tuple[int, ...]
    directions: np.ndarray = field(init=False)

    def __post_init__(self):
        perm = np.asarray(self.permutation)
        dirs = np.empty_like(self.e_vectors)
        dirs[:, perm] = self.e_vectors
        for arr in (self.c_vectors, self.e_vectors, dirs):
            arr.setflags(write=False)
        object.__setattr__(self, "directions", dirs)


def build_basis(c) -> BasisSet:
    c = np.asarray(c, dtype=float)
    n = c.size
    if c.ndim != 1 or n < 2:
        raise ValueError(f"c must be a vector of length >= 2, got shape {c.shape}")
    if not np.any(c != 0.0):
        raise ValueError("cannot build a basis for c = 0")

    perm = list(range(n))
    if c[-1] == 0.0:
        j = int(np.argmax(np.abs(c)))
        perm[j], perm[-1] = perm[-1], perm[j]
    w = c[perm]

    cv = np.zeros((n, n))
    cv[0] = w
    for k in range(1, n):
        pos = k - 1
        if w[pos] != 0.0:
            tail = w[pos + 1:]
            cv[k, pos] = -float(np.sum(tail * tail)) / w[pos]
            cv[k, pos + 1:] = tail
        else:
            cv[k, pos] = 1.0
    norms = np.sqrt(np.sum(cv[1:] * cv[1:], axis=1))
    ev = cv[1:] / norms[:, None]
    return BasisSet(n=n, c_vectors=cv, e_vectors=ev, permutation=tuple(perm))


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """Centre ``z``, rank ``eta`` (half-width in cells) and density ``delta`` (cell edge).

    ``allow_zero_rank`` exists for tests of the single-point field.
    """

    z: np.ndarray
    eta: int
    delta: float
    n: int | None = None
    allow_zero_rank: bool = False

    def __post_init__(self):
        z = np.array(self.z, dtype=float)
        z.setflags(write=False)
        object.__setattr__(self, "z", z)
        if self.n is None:
            object.__setattr__(self, "n", z.size)
        if z.shape != (self.n,):
            raise ValueError(f"z must have length n={self.n}, got shape {z.shape}")
        if int(self.eta) != self.eta:
            raise ValueError(f"eta must be an integer, got {self.eta}")
        object.__setattr__(self, "eta", int(self.eta))
        min_eta = 0 if self.allow_zero_rank else 1
        if self.eta < min_eta:
            raise ValueError(f"eta must be >= {min_eta}, got {self.eta}")
        if not (np.isfinite(self.delta) and self.delta > 0):
            raise ValueError(f"delta must be a positive real, got {self.delta}")
        object.__setattr__(self, "delta", float(self.delta))

    @property
    def radix(self) -> int:
        return 2 * self.eta + 1


def field_size(spec: FieldSpec, cap: int | None = DEFAULT_CELL_CAP) -> int:
    """Number of receptive points, ``(2 eta + 1) ** (n - 1)``.

    Raises :class:`FieldOverflowError` beyond 64-bit ordinals and
    :class:`FieldCapError` beyond ``cap`` (``None`` disables the cap).
    """
    size = spec.radix ** (spec.n - 1)
    if size > _INT64_LIMIT:
        raise FieldOverflowError(size, cap if cap is not None else _INT64_LIMIT)
    if cap is not None and size > cap:
        raise FieldCapError(size, cap)
    return size


def receptive_point(k: int, spec: FieldSpec, basis: BasisSet) -> np.ndarray:
    """Receptive point with ordinal ``k`` (ordinal decode, then lattice offset)."""
    size = field_size(spec, cap=None)
    if not 0 <= k < size:
        raise IndexError(f"ordinal {k} outside [0, {size})")
    n, p, eta, delta = spec.n, spec.radix, spec.eta, spec.delta
    digits = [0] * n
    for j in range(n - 1, 0, -1):
        h = p ** (j - 1)
        digits[j] = k // h
        k = k % h
    s = np.zeros(n)
    for j in range(1, n):
        s = s + (digits[j] * delta - eta * delta) * basis.directions[j - 1]
    return s + spec.z


def enumerate_field(spec: FieldSpec, basis: BasisSet, cap: int | None = DEFAULT_CELL_CAP) -> np.ndarray:
    """All receptive points as a ``(K, n)`` array in nested-loop order.

    The outermost loop runs over the last basis direction and the innermost
    over the first, so row ``k`` equals ``receptive_point(k)`` exactly.
    """
    size = field_size(spec, cap=cap)
    n, eta, delta = spec.n, spec.eta, spec.delta
    # product() varies its last slot fastest: slots are (i_{n-1}, ..., i_1)
    loops = np.array(list(itertools.product(range(spec.radix), repeat=n - 1)), dtype=np.int64)
    loops = loops.reshape(size, n - 1)
    s = np.zeros((size, n))
    for j in range(1, n):
        offset = loops[:, n - 1 - j] * delta - eta * delta
        s = s + offset[:, None] * basis.directions[j - 1][None, :]
    return s + spec.z[None, :]


def count_G(n: int) -> int:
    """Arithmetic/comparison operations to compute one receptive point."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return 4 * n * n + 5 * n - 9


@dataclass
class FieldAxiomReport:
    """Outcome of each lattice condition; ``violations`` maps name to witnesses."""

    checked: tuple[str, ...]
    violations: dict[str, list] = field(default_factory=dict)

    CONDITIONS = ("center_member", "radius_bound", "min_separation", "unit_neighbor", "hull_covering")

    def passed(self, name: str) -> bool:
        return not self.violations.get(name)

    @property
    def ok(self) -> bool:
        return all(self.passed(name) for name in self.checked)


def _hull_samples(points: np.ndarray, samples: int, rng: np.random.Generator) -> np.ndarray:
    # half sparse combinations (reach faces and corners), half over all points
    k, n = points.shape
    out = np.empty((samples, n))
    sparse = samples // 2
    width = min(k, n + 1)
    for t in range(sparse):
        idx = rng.choice(k, size=rng.integers(1, width + 1), replace=False)
        w = rng.dirichlet(np.full(idx.size, 0.5))
        out[t] = w @ points[idx]
    if samples > sparse:
        w = rng.dirichlet(np.full(k, 0.2), size=samples - sparse)
        out[sparse:] = w @ points
    return out


def check_field_axioms(points, spec: FieldSpec, samples: int = 1000, rng=None, rtol: float = 1e-9) -> FieldAxiomReport:
    """Check a point set against the receptive-field conditions.

    * ``center_member``: ``z`` is one of the points (exact equality);
    * ``radius_bound``: every point within ``eta * delta * sqrt(n)`` of ``z``;
    * ``min_separation``: distinct points at least ``delta`` apart;
    * ``unit_neighbor``: every point has a neighbour at distance ``delta``;
    * ``hull_covering``: ``samples`` random convex combinations each lie within
      ``delta * sqrt(n) / 2`` of some point.

    Distance comparisons use relative tolerance ``rtol`` (of ``delta``).
    """
    pts = np.asarray(points, dtype=float)
    rng = np.random.default_rng(rng)
    n, eta, delta = spec.n, spec.eta, spec.delta
    report = FieldAxiomReport(checked=FieldAxiomReport.CONDITIONS)
    v = report.violations

    if not np.any(np.all(pts == spec.z[None, :], axis=1)):
        v["center_member"] = [spec.z.copy()]

    radius = np.linalg.norm(pts - spec.z[None, :], axis=1)
    limit = eta * delta * np.sqrt(n) * (1.0 + rtol)
    v["radius_bound"] = [(int(i), float(radius[i])) for i in np.nonzero(radius > limit)[0]]

    tree = cKDTree(pts)
    if len(pts) > 1:
        nn, nn_idx = tree.query(pts, k=2)
        close = np.nonzero(nn[:, 1] < delta * (1.0 - rtol))[0]
        v["min_separation"] = [(int(i), int(nn_idx[i, 1]), float(nn[i, 1])) for i in close]
        lonely = []
        for i, nbrs in enumerate(tree.query_ball_point(pts, r=delta * (1.0 + rtol))):
            d = np.linalg.norm(pts[nbrs] - pts[i], axis=1)
            if not np.any(np.abs(d - delta) <= rtol * delta):
                lonely.append(int(i))
        v["unit_neighbor"] = lonely
    else:
        v["unit_neighbor"] = [0]

    if samples > 0:
        xs = _hull_samples(pts, samples, rng)
        dist, _ = tree.query(xs)
        bound = 0.5 * delta * np.sqrt(n) * (1.0 + rtol)
        v["hull_covering"] = [xs[i] for i in np.nonzero(dist > bound)[0]]
    return report
