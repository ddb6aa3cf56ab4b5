"""LP images: the ordered list of distances seen from a receptive field."""
from __future__ import annotations

import io
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .field import DEFAULT_CELL_CAP, BasisSet, FieldSpec, field_size, receptive_point
from .model import LpProblem, ObjectiveFrame
from .projection import ProjectionContext

ORDER_TAG = "algorithm2"


class ImageBuildError(RuntimeError):
    """A worker failed while computing the value of one receptive point."""

    def __init__(self, ordinal: int, detail: str):
        self.ordinal = ordinal
        self.detail = detail
        super().__init__(f"image build failed at ordinal {ordinal}: {detail}")


def _encode(v: float):
    return "inf" if math.isinf(v) else float(v)


def _decode(v) -> float:
    if v == "inf":
        return math.inf
    if isinstance(v, str):
        raise ValueError(f"unexpected image value {v!r}")
    return float(v)


@dataclass(eq=False)
class LpImage:
    values: np.ndarray
    n: int
    m: int
    eta: int
    delta: float
    z: np.ndarray
    c: np.ndarray
    problem_sha256: str
    mode: str = "sequential"
    workers: int = 1
    wall_time: float = 0.0
    strategy: str | None = None
    iteration_times: list[float] = field(default_factory=list, repr=False)

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def hits(self) -> int:
        return int(np.count_nonzero(np.isfinite(self.values)))

    @property
    def misses(self) -> int:
        return self.size - self.hits

    def min_finite(self) -> float | None:
        finite = self.values[np.isfinite(self.values)]
        return float(finite.min()) if finite.size else None

    def values_bytes(self) -> bytes:
        """Raw IEEE-754 bytes of the values (misses are +inf)."""
        return np.ascontiguousarray(self.values, dtype="<f8").tobytes()

    def as_grid(self) -> np.ndarray:
        """Values reshaped to an ``(n-1)``-dimensional array indexed ``[i_{n-1}, ..., i_1]``."""
        p = 2 * self.eta + 1
        return self.values.reshape((p,) * (self.n - 1))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "eta": self.eta,
            "delta": self.delta,
            "z": self.z.tolist(),
            "c": self.c.tolist(),
            "order": ORDER_TAG,
            "values": [_encode(v) for v in self.values.tolist()],
            "problem_sha256": self.problem_sha256,
            "mode": self.mode,
            "workers": self.workers,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":")) + "\n"

    def to_csv(self) -> str:
        out = io.StringIO()
        meta = self.to_dict()
        del meta["values"]
        for key, val in meta.items():
            out.write(f"# {key}: {json.dumps(val)}\n")
        for v in self.values.tolist():
            out.write("inf\n" if math.isinf(v) else f"{v!r}\n")
        return out.getvalue()

    @classmethod
    def from_dict(cls, doc: dict) -> "LpImage":
        if doc.get("order") != ORDER_TAG:
            raise ValueError(f"unsupported value order {doc.get('order')!r}")
        values = np.array([_decode(v) for v in doc["values"]], dtype=float)
        return cls(
            values=values,
            n=int(doc["n"]),
            m=int(doc["m"]),
            eta=int(doc["eta"]),
            delta=float(doc["delta"]),
            z=np.array(doc["z"], dtype=float),
            c=np.array(doc["c"], dtype=float),
            problem_sha256=doc["problem_sha256"],
            mode=doc.get("mode", "sequential"),
            workers=int(doc.get("workers", 1)),
        )

    @classmethod
    def from_json(cls, text: str) -> "LpImage":
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_csv(cls, text: str) -> "LpImage":
        meta, values = {}, []
        for line in text.splitlines():
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition(":")
                meta[key.strip()] = json.loads(val)
            elif line.strip():
                token = line.strip()
                values.append(token if token == "inf" else float(token))
        meta["values"] = values
        return cls.from_dict(meta)

    def write(self, path, fmt: str = "json") -> None:
        text = {"json": self.to_json, "csv": self.to_csv}[fmt]()
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _new_image(p: LpProblem, frame: ObjectiveFrame, spec: FieldSpec, values, mode: str, workers: int) -> LpImage:
    return LpImage(
        values=np.asarray(values, dtype=float),
        n=p.n,
        m=p.m,
        eta=spec.eta,
        delta=spec.delta,
        z=np.array(spec.z),
        c=np.array(frame.c),
        problem_sha256=p.fingerprint(),
        mode=mode,
        workers=workers,
    )


def build_image_sequential(
    p: LpProblem,
    frame: ObjectiveFrame,
    spec: FieldSpec,
    basis: BasisSet,
    cap: int | None = DEFAULT_CELL_CAP,
    ctx: ProjectionContext | None = None,
) -> LpImage:
    """Image value ``k`` is the minimum over constraints of the map function at point ``k``."""
    size = field_size(spec, cap=cap)
    ctx = ctx if ctx is not None else ProjectionContext(p, frame)
    start = time.perf_counter()
    values = np.empty(size)
    for k in range(size):
        g = receptive_point(k, spec, basis)
        values[k] = ctx.reduce_range(g)[0]
    image = _new_image(p, frame, spec, values, "sequential", 1)
    image.wall_time = time.perf_counter() - start
    return image
