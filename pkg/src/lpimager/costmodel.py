"""Operation counts and the scalability bound of the master/worker image builder.

Symbols: ``t_c`` master-worker exchange time per worker and iteration,
``t_map`` one worker's time to map the whole constraint list, ``t_a`` one
fold of the minimum operator, ``m`` the constraint count.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .field import count_G  # noqa: F401  (part of the cost-model surface)

# numbers exchanged per worker and iteration: the ordinal out, the distance back
C_C = 2
# comparisons per fold of the minimum operator
C_A = 1


def count_Fk(n: int, m: int) -> int:
    """Operations for one map-function call once the receptive point is known.

    The membership test dominates with ``m(2n-1)`` arithmetic operations plus
    ``m`` comparisons; the crossing point and its distance add ``11n - 3``.
    """
    return 2 * m * n + 11 * n - 3


def count_Map(n: int, m: int) -> int:
    return 4 * n * n * m + 2 * m * m * n + 16 * n * m - 12 * m


@dataclass(frozen=True)
class CostParams:
    t_c: float
    t_map: float
    t_a: float
    m: int
    D: float | None = None
    tau_op: float | None = None
    tau_tr: float | None = None

    def __post_init__(self):
        for name in ("t_c", "t_map", "t_a"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive, got {getattr(self, name)}")
        if not self.m >= 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        for name in ("D", "tau_op", "tau_tr"):
            val = getattr(self, name)
            if val is not None and not val > 0:
                raise ValueError(f"{name} must be strictly positive when given, got {val}")

    @classmethod
    def from_machine(cls, n: int, m: int, tau_op: float, tau_tr: float, D: float) -> "CostParams":
        """Timing parameters from per-operation and per-number costs."""
        return cls(
            t_c=C_C * tau_tr + 2 * D,
            t_map=count_Map(n, m) * tau_op,
            t_a=C_A * tau_op,
            m=m,
            D=D,
            tau_op=tau_op,
            tau_tr=tau_tr,
        )


def _bound(t_c: float, t_map: float, t_a: float, m: int) -> float:
    r = t_c / (t_a * math.log(2.0))
    x = t_map / t_a + 4 * m
    # (sqrt(r^2 + x) - r) / 2 rewritten to avoid cancellation when r >> x
    return 0.5 * x / (math.sqrt(r * r + x) + r)


def scalability_bound(params: CostParams) -> float:
    """Worker count at which the speedup of the master/worker build peaks.

    ``L_max = (sqrt(r**2 + t_map/t_a + 4m) - r) / 2`` with ``r = t_c / (t_a ln 2)``,
    the positive root of ``L**2 + r L - (t_map/t_a + 4m)/4``.  It tends to
    ``sqrt(t_map/t_a + 4m) / 2`` as ``t_c -> 0`` and to ``0+`` as ``t_c`` grows.
    """
    return _bound(params.t_c, params.t_map, params.t_a, params.m)


def scalability_bound_analytic(n: int, m: int, tau_op: float, tau_tr: float, D: float) -> float:
    """Scalability bound with ``t_c = 2(tau_tr + D)``, ``t_map = c_Map tau_op``, ``t_a = tau_op``.

    ``tau_tr`` and ``D`` may be zero (the communication-free limit).
    """
    if not (n >= 2 and m >= 1 and tau_op > 0 and tau_tr >= 0 and D >= 0):
        raise ValueError("need n >= 2, m >= 1, tau_op > 0 and tau_tr, D >= 0")
    return _bound(2.0 * (tau_tr + D), count_Map(n, m) * tau_op, tau_op, m)


@dataclass(frozen=True)
class TimingSample:
    """Duration of one master iteration with ``workers`` workers."""

    workers: int
    seconds: float


def iteration_model(workers: int, m: int) -> np.ndarray:
    """Regressors ``[log2 L, 1/L, m/L + L - 2]`` for ``(t_c, t_map, t_a)``.

    One iteration costs a tree broadcast/gather (``t_c log2 L``), a share of
    the map (``t_map / L``), the workers' local folds (``t_a (m/L - 1)``) and
    the master's fold of ``L`` partial results (``t_a (L - 1)``).
    """
    L = float(workers)
    return np.array([math.log2(L), 1.0 / L, m / L + L - 2.0])


@dataclass
class FitReport:
    t_c: float
    t_map: float
    t_a: float
    m: int
    residuals: dict[int, float]
    rel_rms: float
    warnings: list[str] = field(default_factory=list)

    @property
    def params(self) -> CostParams:
        return CostParams(self.t_c, self.t_map, self.t_a, self.m)

    def predicted(self, workers: int) -> float:
        return float(iteration_model(workers, self.m) @ np.array([self.t_c, self.t_map, self.t_a]))

    def bound(self) -> float | None:
        try:
            return scalability_bound(self.params)
        except ValueError:
            return None


def fit_params(run_log, m: int) -> FitReport:
    """Nonnegative least-squares fit of ``(t_c, t_map, t_a)`` to iteration timings.

    ``run_log`` is an iterable of :class:`TimingSample` (or ``(workers,
    seconds)`` pairs) from constraint-split builds.  Each worker count is
    summarised by its median.  Parameters that fit to (near) zero are listed
    in ``warnings``; in particular a vanishing ``t_map`` means the timings show
    no parallel benefit.
    """
    per_count: dict[int, list[float]] = defaultdict(list)
    for sample in run_log:
        workers, seconds = (sample.workers, sample.seconds) if isinstance(sample, TimingSample) else sample
        per_count[int(workers)].append(float(seconds))
    counts = sorted(per_count)
    if len(counts) < 3:
        raise ValueError(f"need timings for at least 3 distinct worker counts, got {counts}")
    medians = np.array([float(np.median(per_count[L])) for L in counts])
    X = np.vstack([iteration_model(L, m) for L in counts])
    scale = np.abs(X).max(axis=0)
    coef, _ = nnls(X / scale, medians)
    coef = coef / scale
    fitted = X @ coef
    residuals = {L: float(r) for L, r in zip(counts, medians - fitted)}
    rel_rms = float(np.sqrt(np.mean(((medians - fitted) / medians) ** 2)))

    warnings = []
    total = float(medians.max())
    for name, val, col in zip(("t_c", "t_map", "t_a"), coef, range(3)):
        if float(np.max(np.abs(X[:, col]))) * val <= 1e-3 * total:
            warnings.append(f"{name} is negligible ({val:.3g} s)")
    if medians[-1] >= 0.95 * medians[0]:
        warnings.append(
            f"t_map is unreliable: no parallel benefit ({medians[0]:.3g} s at L={counts[0]}, {medians[-1]:.3g} s at L={counts[-1]})"
        )
    if rel_rms > 0.1:
        warnings.append(f"poor fit: relative rms residual {rel_rms:.2f}")
    return FitReport(float(coef[0]), float(coef[1]), float(coef[2]), m, residuals, rel_rms, warnings)
