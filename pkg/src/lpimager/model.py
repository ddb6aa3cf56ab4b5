"""LP problem container and the geometry of the objective hyperplane.

A problem is ``max <c, x>`` subject to ``A x <= b``.  The objective
hyperplane passes through an anchor point ``z`` with normal ``c`` and is
placed so that the whole feasible polytope lies on its negative side.

All dot products that feed image values go through :func:`rowdot`, which
accumulates coordinates left to right.  Each row's result is therefore
independent of which other rows are evaluated alongside it, which is what
lets partitioned (parallel) image builds reproduce sequential ones bit for
bit.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

DEFAULT_EPS_FEAS = 1e-9
DEFAULT_EPS_REC = 1e-12
DEFAULT_EPS_SIGMA = 1e-9


def rowdot(rows: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Dot every row of ``rows`` with ``x`` using a fixed summation order."""
    acc = rows[:, 0] * x[0]
    for j in range(1, rows.shape[1]):
        acc = acc + rows[:, j] * x[j]
    return acc


def vdot(a: np.ndarray, x: np.ndarray) -> float:
    """Scalar version of :func:`rowdot`; bitwise equal to the row-wise result."""
    return float(rowdot(np.asarray(a, dtype=float)[None, :], np.asarray(x, dtype=float))[0])


def row_norms(rows: np.ndarray) -> np.ndarray:
    """Euclidean norm of every row, with the summation order of :func:`rowdot`."""
    acc = rows[:, 0] * rows[:, 0]
    for j in range(1, rows.shape[1]):
        acc = acc + rows[:, j] * rows[:, j]
    return np.sqrt(acc)


def norm(x) -> float:
    return float(row_norms(np.asarray(x, dtype=float)[None, :])[0])


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LpProblem:
    """Dense LP ``max <c, x> s.t. A x <= b`` with ``A`` of shape ``(m, n)``.

    Construction checks structure only (shapes, finiteness, ``c != 0``,
    ``n >= 2``, ``m >= 1``).  Zero rows and coincident hyperplanes are
    reported by :func:`validate_problem` instead of raising here.
    """

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        A, b, c = _frozen(self.A), _frozen(self.b), _frozen(self.c)
        if A.ndim != 2:
            raise ValueError(f"A must be 2-D, got shape {A.shape}")
        m, n = A.shape
        if n < 2:
            raise ValueError(f"dimension n must be >= 2, got {n}")
        if m < 1:
            raise ValueError("at least one constraint is required")
        if b.shape != (m,):
            raise ValueError(f"b must have shape ({m},), got {b.shape}")
        if c.shape != (n,):
            raise ValueError(f"c must have shape ({n},), got {c.shape}")
        for name, arr in (("A", A), ("b", b), ("c", c)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")
        if not np.any(c != 0.0):
            raise ValueError("objective gradient c must be nonzero")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def rows(self) -> np.ndarray:
        return self.A

    def canonical_json(self) -> str:
        doc = {
            "n": self.n,
            "m": self.m,
            "rows": self.A.tolist(),
            "b": self.b.tolist(),
            "c": self.c.tolist(),
        }
        return json.dumps(doc, separators=(",", ":"))

    def fingerprint(self) -> str:
        """SHA-256 of the canonical JSON encoding of ``(n, m, rows, b, c)``."""
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()

    def without_row(self, i: int) -> "LpProblem":
        keep = np.arange(self.m) != i
        return LpProblem(self.A[keep], self.b[keep], self.c)


@dataclass(frozen=True, eq=False)
class Box:
    """Axis-aligned bounds ``lo <= x <= hi``."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo, hi = _frozen(self.lo), _frozen(self.hi)
        if lo.ndim != 1 or lo.shape != hi.shape:
            raise ValueError(f"box bounds must be 1-D of equal length, got {lo.shape} and {hi.shape}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=(size, self.lo.size))


@dataclass(frozen=True, eq=False)
class ObjectiveFrame:
    """Objective gradient ``c`` and the anchor ``z`` of the objective hyperplane."""

    c: np.ndarray
    z: np.ndarray
    c_norm: float = field(init=False)

    def __post_init__(self):
        c, z = _frozen(self.c), _frozen(self.z)
        if c.shape != z.shape or c.ndim != 1:
            raise ValueError(f"c and z must be vectors of equal length, got {c.shape} and {z.shape}")
        c_norm = norm(c)
        if not c_norm > 0.0:
            raise ValueError("objective gradient c must be nonzero")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "c_norm", c_norm)

    @property
    def n(self) -> int:
        return self.c.size

    def level(self, x) -> float:
        """Signed ``<c, x - z>``; nonpositive on the objective half-space."""
        return vdot(self.c, np.asarray(x, dtype=float) - self.z)


@dataclass
class ValidationReport:
    row_zero_violations: list[int] = field(default_factory=list)
    degenerate_pairs: list[tuple[int, int]] = field(default_factory=list)
    frame_violation_witnesses: list[np.ndarray] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.row_zero_violations or self.degenerate_pairs or self.frame_violation_witnesses)


def validate_problem(p: LpProblem, tol: float = 1e-9) -> ValidationReport:
    """Report zero rows and pairs of constraints that define the same hyperplane.

    Two constraints coincide when their rows and right-hand sides are positive
    multiples of each other; the comparison is made after scaling each row to
    unit length.
    """
    report = ValidationReport()
    norms = np.linalg.norm(p.A, axis=1)
    zero = norms <= tol
    report.row_zero_violations = [int(i) for i in np.nonzero(zero)[0]]

    live = np.nonzero(~zero)[0]
    if live.size < 2:
        return report
    unit = p.A[live] / norms[live, None]
    ub = p.b[live] / norms[live]
    block = 256
    for start in range(0, live.size, block):
        stop = min(start + block, live.size)
        diff = np.abs(unit[start:stop, None, :] - unit[None, :, :]).max(axis=2)
        bdiff = np.abs(ub[start:stop, None] - ub[None, :])
        same = (diff <= tol) & (bdiff <= tol * (1.0 + np.abs(ub[start:stop, None])))
        for a, bb in zip(*np.nonzero(same)):
            i, j = start + int(a), int(bb)
            if i < j:
                report.degenerate_pairs.append((int(live[i]), int(live[j])))
    report.degenerate_pairs.sort()
    return report


def recessive_tolerance(row, c, eps_rec: float = DEFAULT_EPS_REC) -> float:
    return eps_rec * norm(row) * norm(c)


def is_recessive(row, c, eps_rec: float | None = None) -> bool:
    """True iff ``<row, c>`` is positive, i.e. the ray along ``-c`` leaves the
    boundary hyperplane into the interior of the half-space.

    ``eps_rec`` is an absolute threshold; by default it is
    ``1e-12 * |row| * |c|``.
    """
    row = np.asarray(row, dtype=float)
    c = np.asarray(c, dtype=float)
    if eps_rec is None:
        eps_rec = recessive_tolerance(row, c)
    return vdot(row, c) > eps_rec


def feasibility_bounds(b: np.ndarray, eps_feas: float = DEFAULT_EPS_FEAS) -> np.ndarray:
    """Right-hand sides relaxed by ``eps_feas * (1 + |b_i|)``."""
    return b + eps_feas * (1.0 + np.abs(b))


def membership(p: LpProblem, x, eps_feas: float = DEFAULT_EPS_FEAS) -> bool:
    x = np.asarray(x, dtype=float)
    if x.shape != (p.n,):
        raise ValueError(f"point must have length {p.n}, got shape {x.shape}")
    return bool(np.all(rowdot(p.A, x) <= feasibility_bounds(p.b, eps_feas)))


def objective_value(c, x) -> float:
    return vdot(c, x)


def ortho_project(frame: ObjectiveFrame, x) -> np.ndarray:
    """Orthogonal projection of ``x`` onto the objective hyperplane."""
    x = np.asarray(x, dtype=float)
    t = vdot(frame.c, x - frame.z) / vdot(frame.c, frame.c)
    return x - t * frame.c


def distance_to_objective(frame: ObjectiveFrame, x) -> float:
    """Signed distance ``<c, z - x> / |c|`` from ``x`` up to the objective hyperplane.

    Nonnegative for points of the objective half-space; a negative value means
    ``x`` lies above the hyperplane.
    """
    return vdot(frame.c, frame.z - np.asarray(x, dtype=float)) / frame.c_norm


def build_frame(p: LpProblem, box: Box, margin: float, anchor=None) -> ObjectiveFrame:
    """Place the objective hyperplane strictly above ``box`` (and hence above M).

    ``U = sum_j max(c_j lo_j, c_j hi_j)`` bounds ``<c, x>`` over the box; the
    hyperplane is the level set ``<c, x> = U + margin``, so every box point has
    ``<c, x - z> <= -margin``.  Without ``anchor`` the hyperplane point is
    ``z = (U + margin) c / |c|^2``.  With ``anchor`` (e.g. a known interior
    point), ``z`` is the orthogonal projection of ``anchor`` onto that same
    hyperplane, which centres receptive fields over the polytope.
    """
    if not margin > 0:
        raise ValueError(f"margin must be positive, got {margin}")
    if box.lo.shape != (p.n,):
        raise ValueError(f"box has dimension {box.lo.size}, problem has {p.n}")
    bad = np.nonzero(box.lo > box.hi)[0]
    if bad.size:
        j = int(bad[0])
        raise ValueError(f"inverted box on coordinate {j}: lo={box.lo[j]} > hi={box.hi[j]}")
    c = p.c
    upper = float(np.sum(np.maximum(c * box.lo, c * box.hi)))
    level = upper + margin
    cc = vdot(c, c)
    if anchor is None:
        z = (level / cc) * c
    else:
        anchor = np.asarray(anchor, dtype=float)
        z = anchor + ((level - vdot(c, anchor)) / cc) * c
    return ObjectiveFrame(c, z)
