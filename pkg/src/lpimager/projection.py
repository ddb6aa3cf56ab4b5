"""Objective projections of receptive points onto half-spaces and onto M.

Two independent routes compute the first point of ``M`` hit by the ray
``g - sigma * c``:

* the *candidate* route maps every recessive constraint ``i`` to the distance
  of its boundary crossing (if that crossing lies in ``M``) and folds with a
  minimum that treats ``inf`` as the identity;
* the *interval* route intersects the per-constraint ranges of ``sigma`` along
  the ray (:func:`sigma_interval`).

:class:`ProjectionContext` holds the per-problem precomputation and a
vectorised candidate kernel whose output is bitwise identical to folding the
scalar :func:`f_k` over the same index range.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .model import (
    DEFAULT_EPS_FEAS,
    DEFAULT_EPS_REC,
    DEFAULT_EPS_SIGMA,
    LpProblem,
    ObjectiveFrame,
    distance_to_objective,
    feasibility_bounds,
    membership,
    norm,
    recessive_tolerance,
    row_norms,
    rowdot,
    vdot,
)

INF = math.inf


def reduce_min(a: float, b: float) -> float:
    """Minimum on the reals extended by ``inf``.

    Ties between ``0.0`` and ``-0.0`` resolve to ``-0.0`` so the result does
    not depend on argument order.
    """
    if a < b:
        return a
    if b < a:
        return b
    return a if math.copysign(1.0, a) < 0 else b


def gamma_halfspace(g, row, b_i: float, c, eps_rec: float | None = None) -> np.ndarray:
    """Point where the ray from ``g`` along ``-c`` crosses ``<row, x> = b_i``."""
    g = np.asarray(g, dtype=float)
    row = np.asarray(row, dtype=float)
    c = np.asarray(c, dtype=float)
    if eps_rec is None:
        eps_rec = recessive_tolerance(row, c)
    rc = vdot(row, c)
    if not rc > eps_rec:
        raise ValueError(f"half-space is not recessive: <row, c> = {rc}")
    sigma = (vdot(row, g) - b_i) / rc
    return g - sigma * c


@dataclass(frozen=True)
class SigmaInterval:
    """Range of ``sigma`` for which ``g - sigma * c`` lies in ``M``."""

    lo: float
    hi: float
    empty: bool

    def sigma_m(self) -> float:
        """Smallest nonnegative admissible ``sigma``, or ``inf`` when the ray misses."""
        if self.empty or self.hi < 0.0:
            return INF
        return max(self.lo, 0.0)


def sigma_interval(p: LpProblem, g, c, eps_feas: float = DEFAULT_EPS_FEAS, eps_rec: float = DEFAULT_EPS_REC) -> SigmaInterval:
    """Intersect the ``sigma``-ranges of all constraints along ``g - sigma * c``.

    Rows with ``<a_i, c>`` within the recessivity tolerance of zero do not
    depend on ``sigma``; they are tested at ``g`` with the feasibility
    tolerance and empty the interval if violated.
    """
    g = np.asarray(g, dtype=float)
    c = np.asarray(c, dtype=float)
    ag = p.A @ g
    ac = p.A @ c
    tol_rec = eps_rec * np.linalg.norm(p.A, axis=1) * np.linalg.norm(c)
    pos = ac > tol_rec
    neg = ac < -tol_rec
    flat = ~(pos | neg)
    if np.any(ag[flat] > p.b[flat] + eps_feas * (1.0 + np.abs(p.b[flat]))):
        return SigmaInterval(-INF, INF, True)
    ratio = np.empty_like(ag)
    live = pos | neg
    ratio[live] = (ag[live] - p.b[live]) / ac[live]
    lo = float(ratio[pos].max()) if np.any(pos) else -INF
    hi = float(ratio[neg].min()) if np.any(neg) else INF
    return SigmaInterval(lo, hi, lo > hi)


@dataclass(frozen=True, eq=False)
class ProjectionContext:
    """Per-problem precomputation shared (read-only) by all image workers."""

    problem: LpProblem
    frame: ObjectiveFrame
    eps_feas: float = DEFAULT_EPS_FEAS
    eps_rec: float = DEFAULT_EPS_REC
    eps_sigma: float = DEFAULT_EPS_SIGMA
    row_c: np.ndarray = field(init=False, repr=False)
    recessive: np.ndarray = field(init=False, repr=False)
    bounds: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        p, c = self.problem, self.frame.c
        if p.n != self.frame.n:
            raise ValueError(f"frame dimension {self.frame.n} does not match problem dimension {p.n}")
        if not np.array_equal(p.c, c):
            raise ValueError("frame gradient differs from the problem's objective")
        row_c = rowdot(p.A, c)
        thresholds = self.eps_rec * row_norms(p.A) * self.frame.c_norm
        for name, arr in (("row_c", row_c), ("recessive", row_c > thresholds), ("bounds", feasibility_bounds(p.b, self.eps_feas))):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def m(self) -> int:
        return self.problem.m

    def f_k(self, i: int, g) -> float:
        return f_k(i, g, self.problem, self.frame, self.eps_feas, self.eps_rec, self.eps_sigma)

    def reduce_range(self, g: np.ndarray, lo: int = 0, hi: int | None = None) -> tuple[float, int]:
        """Fold of :meth:`f_k` over constraints ``lo..hi-1``; returns ``(value, argmin)``.

        ``argmin`` is ``-1`` when every constraint maps to ``inf``.  Candidates
        are visited in increasing distance and the first one inside ``M`` wins,
        so no more than a handful of full membership tests are made.  A
        candidate is first screened against the constraint whose crossing is
        deepest in this range; that test is one row of the full membership
        test with identical arithmetic, so screening never changes the answer.
        """
        p, frame = self.problem, self.frame
        hi = p.m if hi is None else hi
        rec = np.nonzero(self.recessive[lo:hi])[0] + lo
        if rec.size == 0:
            return INF, -1
        u = rowdot(p.A[rec], g)
        sigma = (u - p.b[rec]) / self.row_c[rec]
        keep = sigma >= -self.eps_sigma
        rec, sigma = rec[keep], sigma[keep]
        if rec.size == 0:
            return INF, -1
        c = frame.c
        gam = g[None, :] - sigma[:, None] * c[None, :]
        rho = rowdot(frame.z[None, :] - gam, c) / frame.c_norm + 0.0
        order = np.argsort(rho, kind="stable")

        w = rec[int(np.argmax(sigma))]
        screened = rowdot(gam, p.A[w]) <= self.bounds[w]
        for pos in order:
            if screened[pos] and np.all(rowdot(p.A, gam[pos]) <= self.bounds):
                return float(rho[pos]), int(rec[pos])
        return INF, -1

    def min_distance(self, g: np.ndarray) -> float:
        return self.reduce_range(g)[0]


def f_k(
    i: int,
    g_k,
    p: LpProblem,
    frame: ObjectiveFrame,
    eps_feas: float = DEFAULT_EPS_FEAS,
    eps_rec: float = DEFAULT_EPS_REC,
    eps_sigma: float = DEFAULT_EPS_SIGMA,
) -> float:
    """Distance to the crossing of constraint ``i`` if it is a point of ``M``, else ``inf``.

    ``inf`` is also returned for non-recessive constraints and for crossings
    that lie behind ``g_k`` (``sigma < -eps_sigma``).
    """
    g_k = np.asarray(g_k, dtype=float)
    row = p.A[i]
    rc = vdot(row, frame.c)
    if not rc > eps_rec * norm(row) * frame.c_norm:
        return INF
    sigma = (vdot(row, g_k) - p.b[i]) / rc
    if sigma < -eps_sigma:
        return INF
    gamma = g_k - sigma * frame.c
    if not membership(p, gamma, eps_feas):
        return INF
    return distance_to_objective(frame, gamma) + 0.0


def reduce_naive(p: LpProblem, frame: ObjectiveFrame, g, **tolerances) -> float:
    """Literal Map/Reduce over all constraints; O(m^2 n), for testing."""
    return reduce(reduce_min, (f_k(i, g, p, frame, **tolerances) for i in range(p.m)), INF)


def gamma_polytope(p: LpProblem, frame: ObjectiveFrame, g, ctx: ProjectionContext | None = None) -> np.ndarray | None:
    """First point of ``M`` on the ray from ``g`` along ``-c``; ``None`` if the ray misses."""
    ctx = ctx if ctx is not None else ProjectionContext(p, frame)
    g = np.asarray(g, dtype=float)
    _, i = ctx.reduce_range(g)
    if i < 0:
        return None
    row = p.A[i]
    sigma = (vdot(row, g) - p.b[i]) / ctx.row_c[i]
    return g - sigma * frame.c
