"""Master/worker image building.

Two partitionings are supported:

``constraint-split``
    Every worker owns a contiguous block of constraints.  For each receptive
    point the master sends the ordinal ``k`` to all workers, each worker folds
    the map function over its block, the master folds the partial results in
    worker order, appends the value and then broadcasts the exit flag.  This
    is the per-iteration protocol whose timings feed the cost model.

``point-split``
    Every worker owns a contiguous block of ordinals and computes complete
    image values; the master places them by ordinal.

Workers are threads or processes talking over queues; the problem, frame and
basis are shared read-only.  The minimum fold is exact, so both strategies
reproduce the sequential image bit for bit for any worker count.
"""
from __future__ import annotations

import multiprocessing
import queue
import threading
import time
import traceback
from functools import reduce

import numpy as np

from .field import DEFAULT_CELL_CAP, BasisSet, FieldSpec, field_size, receptive_point
from .image import ImageBuildError, LpImage, _new_image
from .model import LpProblem, ObjectiveFrame
from .projection import INF, ProjectionContext, reduce_min

STRATEGIES = ("point-split", "constraint-split")
BACKENDS = ("thread", "process")
DEFAULT_BACKEND = {"point-split": "process", "constraint-split": "thread"}
_POLL_SECONDS = 0.5


def block_ranges(total: int, parts: int) -> list[tuple[int, int]]:
    """Split ``range(total)`` into ``parts`` contiguous blocks; the last takes the remainder."""
    if parts < 1:
        raise ValueError(f"parts must be >= 1, got {parts}")
    size = total // parts
    bounds = [(l * size, (l + 1) * size) for l in range(parts)]
    bounds[-1] = (bounds[-1][0], total)
    return bounds


def _constraint_worker(l, lo, hi, state, inbox, outbox):
    ctx, spec, basis = state
    while True:
        k = inbox.get()
        try:
            g = receptive_point(k, spec, basis)
            outbox.put((l, k, ctx.reduce_range(g, lo, hi)[0], None))
        except Exception:
            outbox.put((l, k, None, traceback.format_exc()))
        if inbox.get():
            return


def _point_worker(l, state, inbox, outbox):
    ctx, spec, basis = state
    while True:
        job = inbox.get()
        if job is None:
            return
        lo, hi = job
        values = np.empty(hi - lo)
        k = lo
        try:
            for k in range(lo, hi):
                values[k - lo] = ctx.reduce_range(receptive_point(k, spec, basis))[0]
        except Exception:
            outbox.put((l, k, None, traceback.format_exc()))
            continue
        outbox.put((l, lo, values, None))


class _Pool:
    """Fixed set of workers, one inbox each and a shared result channel."""

    def __init__(self, backend: str, count: int):
        if backend == "thread":
            self._make_queue, self._make_worker = queue.Queue, threading.Thread
        elif backend == "process":
            mp = multiprocessing.get_context()
            self._make_queue, self._make_worker = mp.Queue, mp.Process
        else:
            raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
        self.inboxes = [self._make_queue() for _ in range(count)]
        self.outbox = self._make_queue()
        self.workers = []

    def start(self, target, args_for):
        for l, inbox in enumerate(self.inboxes):
            w = self._make_worker(target=target, args=(*args_for(l), inbox, self.outbox), daemon=True)
            w.start()
            self.workers.append(w)

    def send_all(self, msg):
        for inbox in self.inboxes:
            inbox.put(msg)

    def recv(self, ordinal: int):
        while True:
            try:
                return self.outbox.get(timeout=_POLL_SECONDS)
            except queue.Empty:
                if not all(w.is_alive() for w in self.workers):
                    raise ImageBuildError(ordinal, "a worker exited unexpectedly") from None

    def join(self):
        for w in self.workers:
            w.join(timeout=10)


def _run_constraint_split(state, size, m, workers, backend):
    pool = _Pool(backend, workers)
    ranges = block_ranges(m, workers)
    pool.start(_constraint_worker, lambda l: (l, ranges[l][0], ranges[l][1], state))
    values, times = np.empty(size), []
    failure = None
    try:
        k = 0
        while True:
            t0 = time.perf_counter()
            pool.send_all(k)
            partial = [INF] * workers
            for _ in range(workers):
                l, _k, rho, err = pool.recv(k)
                if err is not None and failure is None:
                    failure = ImageBuildError(k, err)
                partial[l] = rho
            if failure is None:
                values[k] = reduce(reduce_min, partial, INF)
            k += 1
            done = k >= size or failure is not None
            pool.send_all(done)
            times.append(time.perf_counter() - t0)
            if done:
                break
    finally:
        pool.join()
    if failure is not None:
        raise failure
    return values, times


def _run_point_split(state, size, workers, backend):
    pool = _Pool(backend, workers)
    pool.start(_point_worker, lambda l: (l, state))
    values = np.empty(size)
    failure = None
    try:
        for inbox, block in zip(pool.inboxes, block_ranges(size, workers)):
            inbox.put(block)
        for _ in range(workers):
            l, lo, vals, err = pool.recv(-1)
            if err is not None:
                failure = failure or ImageBuildError(lo, err)
            else:
                values[lo:lo + vals.size] = vals
        pool.send_all(None)
    finally:
        pool.join()
    if failure is not None:
        raise failure
    return values


def build_image_parallel(
    p: LpProblem,
    frame: ObjectiveFrame,
    spec: FieldSpec,
    basis: BasisSet,
    workers: int,
    strategy: str = "point-split",
    backend: str | None = None,
    cap: int | None = DEFAULT_CELL_CAP,
    ctx: ProjectionContext | None = None,
) -> LpImage:
    """Build the image with ``workers`` workers; see the module docstring for strategies.

    ``backend`` defaults to processes for point-split (pure-Python work per
    point) and threads for constraint-split (one round trip per point).
    A worker exception is re-raised as :class:`ImageBuildError` carrying the
    ordinal that failed.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    backend = backend or DEFAULT_BACKEND[strategy]
    size = field_size(spec, cap=cap)
    ctx = ctx if ctx is not None else ProjectionContext(p, frame)
    state = (ctx, spec, basis)

    start = time.perf_counter()
    times: list[float] = []
    if strategy == "constraint-split":
        values, times = _run_constraint_split(state, size, p.m, workers, backend)
    else:
        values = _run_point_split(state, size, workers, backend)
    image = _new_image(p, frame, spec, values, "parallel", workers)
    image.wall_time = time.perf_counter() - start
    image.iteration_times = times
    image.strategy = strategy
    return image
