"""Sequence types, validation, normalization and the derivative transform."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidSeries, SeriesTooShort

NORMALIZATIONS = ("none", "zscore", "minmax")


@dataclass(frozen=True)
class Violation:
    kind: str  # "empty" | "ragged" | "non_finite" | "shape"
    message: str
    row: Optional[int] = None
    col: Optional[int] = None

    def __str__(self):
        return self.message


def validate(samples) -> list[Violation]:
    """Check an m x p sample matrix against the TimeSeries invariants.

    Accepts nested sequences (possibly ragged) or arrays. Returns an empty
    list when the input is a legal series, otherwise one entry per problem:
    ragged rows, non-finite entries (with 0-based coordinates), or emptiness.
    """
    if isinstance(samples, TimeSeries):
        samples = samples.samples
    if isinstance(samples, np.ndarray) and samples.dtype.kind == "f":
        if samples.ndim != 2:
            return [Violation("shape", f"expected a 2-D matrix, got {samples.ndim}-D")]
        if samples.shape[0] == 0:
            return [Violation("empty", "series has no time steps")]
        if samples.shape[1] == 0:
            return [Violation("empty", "series has no channels", row=0)]
        return [Violation("non_finite", f"non-finite entry {samples[i, j]!r} at ({i}, {j})", row=int(i), col=int(j))
                for i, j in np.argwhere(~np.isfinite(samples))]
    if isinstance(samples, np.ndarray):
        if samples.ndim != 2:
            return [Violation("shape", f"expected a 2-D matrix, got {samples.ndim}-D")]
        rows = samples
    else:
        rows = list(samples)
        is_row = [isinstance(r, (Sequence, np.ndarray)) and not isinstance(r, str) for r in rows]
        if rows and not any(is_row):
            rows = [[v] for v in rows]  # flat sequence: one channel
        elif not all(is_row):
            return [Violation("shape", "expected a sequence of rows")]

    if len(rows) == 0:
        return [Violation("empty", "series has no time steps")]

    width = len(rows[0])
    out = []
    if width == 0:
        out.append(Violation("empty", "series has no channels", row=0))
    for i, row in enumerate(rows):
        if len(row) != width:
            out.append(Violation("ragged", f"row {i} has {len(row)} entries, expected {width}", row=i))
        for j, v in enumerate(row):
            try:
                ok = math.isfinite(float(v))
            except (TypeError, ValueError):
                ok = False
            if not ok:
                out.append(Violation("non_finite", f"non-finite entry {v!r} at ({i}, {j})", row=i, col=j))
    return out


def _as_matrix(samples) -> np.ndarray:
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Immutable m x p matrix of finite samples (rows are time steps)."""

    samples: np.ndarray
    dim_names: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        raw = self.samples
        if not isinstance(raw, np.ndarray):
            problems = validate(raw)
            if problems:
                raise InvalidSeries(problems)
        arr = np.array(_as_matrix(raw), dtype=np.float64, order="C", copy=True)
        problems = validate(arr)
        if problems:
            raise InvalidSeries(problems)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        if self.dim_names is not None:
            names = tuple(self.dim_names)
            if len(names) != arr.shape[1]:
                raise InvalidSeries([Violation("shape", f"{len(names)} dim_names for {arr.shape[1]} channels")])
            object.__setattr__(self, "dim_names", names)

    @property
    def length(self) -> int:
        return self.samples.shape[0]

    @property
    def n_channels(self) -> int:
        return self.samples.shape[1]

    def __len__(self):
        return self.samples.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.samples
        return self.samples.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return self.dim_names == other.dim_names and np.array_equal(self.samples, other.samples)

    __hash__ = None


@dataclass(frozen=True)
class LabeledInstance:
    series: TimeSeries
    label: str
    subject: str = ""
    trial: str = ""
    instance_id: str = field(default="")

    def __post_init__(self):
        if not isinstance(self.series, TimeSeries):
            object.__setattr__(self, "series", TimeSeries(self.series))


def check_labels(instances: Sequence[LabeledInstance], label_set: Sequence[str]) -> None:
    allowed = set(label_set)
    for inst in instances:
        if inst.label not in allowed:
            raise InvalidSeries([Violation("label", f"label {inst.label!r} of {inst.instance_id or '?'} "
                                                    f"not in label set {list(label_set)}")])


def _rewrap(series, values: np.ndarray):
    if isinstance(series, TimeSeries):
        return TimeSeries(values, series.dim_names)
    return TimeSeries(values)


def znormalize(series) -> TimeSeries:
    """Per-channel z-normalization with the population standard deviation.

    Constant channels map to all zeros.
    """
    x = _as_matrix(series)
    if x.shape[0] < 2:
        raise SeriesTooShort(f"znormalize needs at least 2 samples, got {x.shape[0]}")
    flat = np.ptp(x, axis=0) == 0
    mu = np.where(flat, x[0], x.mean(axis=0))
    sd = x.std(axis=0)  # population sd
    # sd can underflow to 0 on subnormal spreads; leave those unscaled too
    sd = np.where(flat | (sd == 0), 1.0, sd)
    return _rewrap(series, (x - mu) / sd)


def minmax_normalize(series) -> TimeSeries:
    """Per-channel rescale to [0, 1]; constant channels map to 0."""
    x = _as_matrix(series)
    lo = x.min(axis=0)
    span = x.max(axis=0) - lo
    return _rewrap(series, (x - lo) / np.where(span > 0, span, 1.0))


def normalize(series, policy: str = "zscore") -> TimeSeries:
    if policy == "zscore":
        return znormalize(series)
    if policy == "minmax":
        return minmax_normalize(series)
    if policy == "none":
        return series if isinstance(series, TimeSeries) else TimeSeries(series)
    raise ValueError(f"unknown normalization policy {policy!r}; expected one of {NORMALIZATIONS}")


def derivative_transform(series) -> TimeSeries:
    """Channel-wise derivative estimate used by DDTW.

    Interior points get the mean of the left slope and the centred slope,
    ``((s[i] - s[i-1]) + (s[i+1] - s[i-1]) / 2) / 2``. The two endpoints copy
    their nearest interior value so the output keeps length m.
    """
    x = _as_matrix(series)
    m = x.shape[0]
    if m < 3:
        raise SeriesTooShort(f"derivative transform needs at least 3 samples, got {m}")
    d = np.empty_like(x)
    d[1:-1] = ((x[1:-1] - x[:-2]) + (x[2:] - x[:-2]) / 2.0) / 2.0
    d[0] = d[1]
    d[-1] = d[-2]
    return _rewrap(series, d)
