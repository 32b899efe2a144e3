"""Windowed DTW / DDTW distances, warp paths and pairwise distance matrices."""
from __future__ import annotations

import csv
import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .errors import DataError, DimensionMismatch, PairFailure, SeriesTooShort, UnknownInstanceId
from .series import LabeledInstance, derivative_transform

DEFAULT_WINDOW = 100


class Measure(str, enum.Enum):
    DTW = "dtw"
    DDTW = "ddtw"


@dataclass(frozen=True)
class WarpConfig:
    """Distance settings.

    ``window`` is the Sakoe-Chiba half-width in samples, or ``None`` for an
    unbounded band. When the two lengths differ by more than the window the
    band is widened to ``|m - n|`` so the end cell stays reachable.
    """

    window: Optional[int] = DEFAULT_WINDOW
    measure: Measure = Measure.DTW
    normalize_by_path: bool = False

    def __post_init__(self):
        if self.window is not None:
            if isinstance(self.window, bool) or int(self.window) != self.window or self.window < 1:
                raise ValueError(f"window must be a positive integer or None, got {self.window!r}")
            object.__setattr__(self, "window", int(self.window))
        object.__setattr__(self, "measure", Measure(self.measure))


@dataclass(frozen=True)
class WarpPath:
    steps: tuple[tuple[int, int], ...]  # 1-based (i, j)
    total: float

    def __len__(self):
        return len(self.steps)


def _pair(S, T) -> tuple[np.ndarray, np.ndarray]:
    a = np.ascontiguousarray(np.asarray(S, dtype=np.float64))
    b = np.ascontiguousarray(np.asarray(T, dtype=np.float64))
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch(f"channel counts differ: {a.shape[1]} vs {b.shape[1]}")
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise SeriesTooShort("series must have at least one sample")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise DataError("series contain non-finite values")
    return a, b


def point_distance(u, v) -> float:
    """Euclidean distance between two p-vectors."""
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise DimensionMismatch(f"vector lengths differ: {u.size} vs {v.size}")
    acc = 0.0
    for a, b in zip(u.tolist(), v.tolist()):
        acc += (a - b) * (a - b)
    return math.sqrt(acc)


def _band(a, b, cfg):
    return _kernels.effective_band(a.shape[0], b.shape[0], cfg.window)


def _raw_dtw(a, b, cfg):
    band = _band(a, b, cfg)
    if cfg.normalize_by_path:
        D = _kernels.dtw_table(a, b, band)
        steps = _kernels.backtrack(D)
        return float(D[-1, -1]) / steps.shape[0]
    return float(_kernels.dtw_value(a, b, band))


def dtw_distance(S, T, cfg: WarpConfig = WarpConfig()) -> float:
    """DTW cumulative distance between an m x p and an n x p series.

    Ignores ``cfg.measure``; see :func:`distance` for measure dispatch.
    """
    a, b = _pair(S, T)
    return _raw_dtw(a, b, cfg)


def dtw_path(S, T, cfg: WarpConfig = WarpConfig()) -> WarpPath:
    """Optimal warp path and its raw (unnormalized) cumulative cost."""
    a, b = _pair(S, T)
    D = _kernels.dtw_table(a, b, _band(a, b, cfg))
    steps = _kernels.backtrack(D) + 1
    return WarpPath(tuple((int(i), int(j)) for i, j in steps), float(D[-1, -1]))


def ddtw_distance(S, T, cfg: WarpConfig = WarpConfig()) -> float:
    a, b = _pair(S, T)
    if a.shape[0] < 3 or b.shape[0] < 3:
        raise SeriesTooShort(f"DDTW needs at least 3 samples per series, got {a.shape[0]} and {b.shape[0]}")
    return dtw_distance(derivative_transform(a), derivative_transform(b), cfg)


def distance(S, T, cfg: WarpConfig = WarpConfig()) -> float:
    if cfg.measure is Measure.DDTW:
        return ddtw_distance(S, T, cfg)
    return dtw_distance(S, T, cfg)


def path(S, T, cfg: WarpConfig = WarpConfig()) -> WarpPath:
    """Warp path under the configured measure (derivative series for DDTW)."""
    if cfg.measure is Measure.DDTW:
        a, b = _pair(S, T)
        return dtw_path(derivative_transform(a), derivative_transform(b), cfg)
    return dtw_path(S, T, cfg)


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    entries: np.ndarray
    instance_ids: tuple[str, ...]
    config: Optional[WarpConfig] = None

    def __post_init__(self):
        e = np.array(self.entries, dtype=np.float64)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise DataError(f"distance matrix must be square, got shape {e.shape}")
        if len(self.instance_ids) != e.shape[0]:
            raise DataError(f"{len(self.instance_ids)} ids for a {e.shape[0]}x{e.shape[0]} matrix")
        if not np.all(np.isfinite(e)) or np.any(e < 0):
            raise DataError("distance matrix entries must be finite and nonnegative")
        if not np.array_equal(e, e.T):
            raise DataError("distance matrix is not symmetric")
        if np.any(np.diag(e) != 0):
            raise DataError("distance matrix diagonal must be zero")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "instance_ids", tuple(str(i) for i in self.instance_ids))

    def __len__(self):
        return self.entries.shape[0]

    def index(self, instance_id: str) -> int:
        try:
            return self.instance_ids.index(instance_id)
        except ValueError:
            raise UnknownInstanceId(f"unknown instance id {instance_id!r}") from None

    def reorder(self, ids: Sequence[str]) -> "DistanceMatrix":
        """Rows/columns permuted to follow ``ids``."""
        idx = [self.index(i) for i in ids]
        return DistanceMatrix(self.entries[np.ix_(idx, idx)], tuple(ids), self.config)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.instance_ids)
            for row in self.entries:
                w.writerow([format(v, ".17g") for v in row])

    @classmethod
    def from_csv(cls, path, config: Optional[WarpConfig] = None) -> "DistanceMatrix":
        path = Path(path)
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows:
            raise DataError(f"{path}: empty distance matrix file")
        ids = rows[0]
        body = [r for r in rows[1:] if r]
        try:
            entries = np.array([[float(v) for v in r] for r in body], dtype=np.float64)
        except ValueError as exc:
            raise DataError(f"{path}: {exc}") from None
        if entries.shape != (len(ids), len(ids)):
            raise DataError(f"{path}: expected {len(ids)}x{len(ids)} values, got shape {entries.shape}")
        return cls(entries, tuple(ids), config)


def _prepare(instances, cfg):
    arrays = []
    for inst in instances:
        x = np.ascontiguousarray(np.asarray(inst.series, dtype=np.float64))
        if cfg.measure is Measure.DDTW:
            try:
                x = np.ascontiguousarray(derivative_transform(x).samples)
            except SeriesTooShort as exc:
                raise SeriesTooShort(f"instance {inst.instance_id!r}: {exc}") from None
        arrays.append(x)
    return arrays


def pairwise_matrix(instances: Sequence[LabeledInstance], cfg: WarpConfig = WarpConfig(),
                    workers: int = 1) -> DistanceMatrix:
    """Symmetric matrix of the configured measure over all instance pairs.

    Each unordered pair is computed once and mirrored. Pairs are independent,
    so ``workers > 1`` evaluates them on a thread pool (the compiled kernels
    release the GIL); the result does not depend on the worker count.
    """
    n = len(instances)
    if n < 2:
        raise DataError(f"need at least 2 instances, got {n}")
    ids = [inst.instance_id or str(k) for k, inst in enumerate(instances)]
    if len(set(ids)) != n:
        raise DataError("instance ids must be unique")
    p = {np.asarray(inst.series).shape[1] for inst in instances}
    if len(p) != 1:
        raise DimensionMismatch(f"instances have differing channel counts: {sorted(p)}")

    arrays = _prepare(instances, cfg)
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    out = np.zeros((n, n))

    def work(pair):
        a, b = pair
        try:
            out[a, b] = out[b, a] = _raw_dtw(arrays[a], arrays[b], cfg)
        except Exception as exc:
            raise PairFailure(ids[a], ids[b], exc) from exc

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for _ in pool.map(work, pairs):
                pass
    else:
        for pair in pairs:
            work(pair)
    return DistanceMatrix(out, tuple(ids), cfg)
