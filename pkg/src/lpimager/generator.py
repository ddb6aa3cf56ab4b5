"""Random bounded LP instances with a known interior point, and problem files.

Instances are the box ``0 <= x_j <= box_hi`` plus ``m_extra`` dense random
constraints, each oriented so that the box centre satisfies it with slack.
That makes the feasible region nonempty and bounded by construction.

Randomness comes from NumPy's ``PCG64`` bit generator, whose output for a
given seed is fixed across platforms and NumPy releases.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .model import Box, LpProblem, rowdot

PROBLEM_SUFFIX = ".lp.json"
_KNOWN_FIELDS = {"n", "m", "rows", "b", "c", "box", "feasible_point"}


class ProblemFormatError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorParams:
    box_hi: float = 100.0
    slack_margin: float = 1.0
    coeff_range: tuple[float, float] = (-10.0, 10.0)
    # slack is drawn from [slack_margin, slack_margin + cut_depth * reach], where
    # reach is max <a, x - p> over the box; cut_depth < 1 makes most rows cut the box
    cut_depth: float = 0.5

    def __post_init__(self):
        lo, hi = self.coeff_range
        if not self.box_hi > 0:
            raise ValueError(f"box_hi must be positive, got {self.box_hi}")
        if not self.slack_margin > 0:
            raise ValueError(f"slack_margin must be positive, got {self.slack_margin}")
        if not lo < hi:
            raise ValueError(f"coeff_range must be increasing, got {self.coeff_range}")
        if not self.cut_depth >= 0:
            raise ValueError(f"cut_depth must be nonnegative, got {self.cut_depth}")
        if self.slack_margin > 0.5 * self.box_hi:
            raise ValueError("slack_margin must not exceed half the box edge")


@dataclass(eq=False)
class ProblemBundle:
    problem: LpProblem
    interior_point: np.ndarray | None = None
    box: Box | None = None
    seed: int | None = None
    recipe: dict | None = field(default=None)

    def to_dict(self) -> dict:
        p = self.problem
        doc = {"n": p.n, "m": p.m, "rows": p.A.tolist(), "b": p.b.tolist(), "c": p.c.tolist()}
        if self.box is not None:
            doc["box"] = {"lo": self.box.lo.tolist(), "hi": self.box.hi.tolist()}
        if self.interior_point is not None:
            doc["feasible_point"] = np.asarray(self.interior_point, dtype=float).tolist()
        return doc


def _dense_rows(rng: np.random.Generator, count: int, n: int, lo: float, hi: float) -> np.ndarray:
    a = rng.uniform(lo, hi, size=(count, n))
    while True:
        zero = a == 0.0
        if not zero.any():
            return a
        a[zero] = rng.uniform(lo, hi, size=int(zero.sum()))


def generate(n: int, m_extra: int, seed: int, params: GeneratorParams | None = None) -> ProblemBundle:
    """Random instance with ``m = 2n + m_extra`` constraints; see the module docstring."""
    params = params or GeneratorParams()
    if int(n) != n or n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n}")
    if int(m_extra) != m_extra or m_extra < 0:
        raise ValueError(f"m_extra must be a nonnegative integer, got {m_extra}")
    n, m_extra = int(n), int(m_extra)
    rng = np.random.Generator(np.random.PCG64(seed))
    lo, hi = params.coeff_range
    half = 0.5 * params.box_hi
    center = np.full(n, half)

    eye = np.eye(n)
    rows = [-eye, eye]
    rhs = [np.zeros(n), np.full(n, params.box_hi)]
    if m_extra:
        a = _dense_rows(rng, m_extra, n, lo, hi)
        reach = half * np.sum(np.abs(a), axis=1)
        slack = params.slack_margin + params.cut_depth * reach * rng.uniform(0.0, 1.0, size=m_extra)
        rows.append(a)
        rhs.append(rowdot(a, center) + slack)

    c = _dense_rows(rng, 1, n, lo, hi)[0]
    c_norm = float(np.linalg.norm(c))
    if c_norm < 1.0:
        c = c / c_norm

    problem = LpProblem(np.vstack(rows), np.concatenate(rhs), c)
    recipe = {"n": n, "m_extra": m_extra, **asdict(params)}
    recipe["coeff_range"] = list(params.coeff_range)
    return ProblemBundle(
        problem=problem,
        interior_point=center,
        box=Box(np.zeros(n), np.full(n, params.box_hi)),
        seed=seed,
        recipe=recipe,
    )


def _vector(doc, key, length, where):
    val = doc[key]
    if not isinstance(val, list) or len(val) != length:
        got = len(val) if isinstance(val, list) else type(val).__name__
        raise ProblemFormatError(f"{where}: expected {length} numbers, got {got}")
    try:
        return np.array(val, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ProblemFormatError(f"{where}: non-numeric entry ({exc})") from None


def bundle_from_dict(doc: dict) -> ProblemBundle:
    if not isinstance(doc, dict):
        raise ProblemFormatError("problem file must contain a JSON object")
    unknown = sorted(set(doc) - _KNOWN_FIELDS)
    if unknown:
        raise ProblemFormatError(f"unknown field(s): {', '.join(unknown)}")
    missing = sorted({"n", "m", "rows", "b", "c"} - set(doc))
    if missing:
        raise ProblemFormatError(f"missing field(s): {', '.join(missing)}")
    n, m = doc["n"], doc["m"]
    if not (isinstance(n, int) and isinstance(m, int)):
        raise ProblemFormatError("n and m must be integers")
    rows = doc["rows"]
    if not isinstance(rows, list) or len(rows) != m:
        raise ProblemFormatError(f"rows: expected {m} rows, got {len(rows) if isinstance(rows, list) else 'non-list'}")
    A = np.empty((m, n))
    for i, row in enumerate(rows):
        A[i] = _vector({"row": row}, "row", n, f"rows[{i}]")
    b = _vector(doc, "b", m, "b")
    c = _vector(doc, "c", n, "c")
    box = None
    if "box" in doc:
        bx = doc["box"]
        if not isinstance(bx, dict) or set(bx) != {"lo", "hi"}:
            raise ProblemFormatError("box must be an object with exactly 'lo' and 'hi'")
        box = Box(_vector(bx, "lo", n, "box.lo"), _vector(bx, "hi", n, "box.hi"))
    point = _vector(doc, "feasible_point", n, "feasible_point") if "feasible_point" in doc else None
    try:
        problem = LpProblem(A, b, c)
    except ValueError as exc:
        raise ProblemFormatError(str(exc)) from None
    return ProblemBundle(problem=problem, interior_point=point, box=box)


def dumps_problem(bundle: ProblemBundle) -> str:
    return json.dumps(bundle.to_dict(), separators=(",", ":")) + "\n"


def write_problem(bundle: ProblemBundle, path) -> None:
    Path(path).write_text(dumps_problem(bundle), encoding="utf-8")


def read_problem(path) -> ProblemBundle:
    """Load a problem file; raises :class:`ProblemFormatError` on schema violations."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"malformed JSON: {exc}") from None
    return bundle_from_dict(doc)
