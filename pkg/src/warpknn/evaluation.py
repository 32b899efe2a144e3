"""Fold plans, replicated cross-validation and prevalence-weighted metrics."""
from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import DataError, EmptyClass, KTooLarge, TooManyFolds
from .knn import classify

MASK64 = (1 << 64) - 1
METRIC_NAMES = ("accuracy", "sensitivity", "specificity")


class SplitMix64:
    """SplitMix64 generator (Steele, Lea & Flood 2014).

    Chosen because it is a few lines in any language, so fold plans can be
    reproduced outside Python. ``below(n)`` draws uniformly from [0, n) by
    rejecting raw outputs under ``2**64 mod n``; ``shuffle`` is a
    Fisher-Yates pass from the last element down.
    """

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        floor = (1 << 64) % n
        while True:
            r = self.next()
            if r >= floor:
                return r % n

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


@dataclass(frozen=True)
class FoldPlan:
    assignments: tuple[int, ...]
    n_folds: int
    seed: int = 0
    mode: str = "stratified"

    def __post_init__(self):
        a = tuple(int(x) for x in self.assignments)
        object.__setattr__(self, "assignments", a)
        if self.n_folds < 1:
            raise ValueError("n_folds must be positive")
        if any(f < 0 or f >= self.n_folds for f in a):
            raise ValueError(f"fold indices must lie in [0, {self.n_folds})")
        counts = np.bincount(np.asarray(a, dtype=np.int64), minlength=self.n_folds)
        if np.any(counts == 0):
            raise ValueError(f"fold plan has empty folds: {np.flatnonzero(counts == 0).tolist()}")

    def __len__(self):
        return len(self.assignments)

    def folds(self) -> list[np.ndarray]:
        a = np.asarray(self.assignments)
        return [np.flatnonzero(a == f) for f in range(self.n_folds)]


def _sorted_classes(labels):
    uniq = set(labels)
    try:
        return sorted(uniq)
    except TypeError:
        return sorted(uniq, key=str)


def stratified_folds(labels: Sequence, n: int, seed: int = 0) -> FoldPlan:
    """Stratified n-fold assignment.

    Classes are visited in sorted order; each class's members are shuffled with
    :class:`SplitMix64` (one stream for the whole plan) and dealt to folds
    round-robin, with the dealing position carried over from one class to the
    next. Per-class fold counts therefore differ by at most one, and so do the
    overall fold sizes.
    """
    N = len(labels)
    if n < 2:
        raise ValueError(f"need at least 2 folds, got {n}")
    if n > N:
        raise TooManyFolds(f"{n} folds requested for {N} instances")
    rng = SplitMix64(seed)
    assign = [0] * N
    pos = 0
    for c in _sorted_classes(labels):
        members = [i for i, y in enumerate(labels) if y == c]
        rng.shuffle(members)
        for i in members:
            assign[i] = pos % n
            pos += 1
    return FoldPlan(tuple(assign), n, int(seed) & MASK64, "stratified")


def loo_folds(N: int) -> FoldPlan:
    if N < 2:
        raise ValueError(f"leave-one-out needs at least 2 instances, got {N}")
    return FoldPlan(tuple(range(N)), N, 0, "loo")


@dataclass(frozen=True)
class Protocol:
    """``kfold`` with ``n_folds`` folds, or ``loo``."""

    kind: str = "kfold"
    n_folds: int = 10

    def __post_init__(self):
        if self.kind not in ("kfold", "loo"):
            raise ValueError(f"unknown protocol {self.kind!r}")

    def plan(self, labels: Sequence, seed: int) -> FoldPlan:
        if self.kind == "loo":
            return loo_folds(len(labels))
        return stratified_folds(labels, self.n_folds, seed)

    def __str__(self):
        return "loo" if self.kind == "loo" else f"{self.n_folds}-fold"


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """C x C counts, rows = actual class, columns = predicted class."""

    counts: np.ndarray
    class_ids: tuple

    def __post_init__(self):
        c = np.array(self.counts, dtype=np.int64)
        ids = tuple(self.class_ids)
        if c.shape != (len(ids), len(ids)):
            raise DataError(f"confusion counts of shape {c.shape} for {len(ids)} classes")
        if np.any(c < 0):
            raise DataError("confusion counts must be nonnegative")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)
        object.__setattr__(self, "class_ids", ids)

    @classmethod
    def from_pairs(cls, actual: Sequence, predicted: Sequence, class_ids: Sequence) -> "ConfusionMatrix":
        pos = {c: i for i, c in enumerate(class_ids)}
        counts = np.zeros((len(pos), len(pos)), dtype=np.int64)
        for a, p in zip(actual, predicted):
            counts[pos[a], pos[p]] += 1
        return cls(counts, tuple(class_ids))

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        if self.class_ids != other.class_ids:
            raise DataError("cannot add confusion matrices over different classes")
        return ConfusionMatrix(self.counts + other.counts, self.class_ids)

    def __eq__(self, other):
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return self.class_ids == other.class_ids and np.array_equal(self.counts, other.counts)

    __hash__ = None


@dataclass(frozen=True)
class ClassStats:
    tp: int
    fn: int
    fp: int
    tn: int
    sensitivity: float
    specificity: float
    accuracy: float


@dataclass(frozen=True)
class EvalReport:
    confusion: ConfusionMatrix
    accuracy: float
    sensitivity: float
    specificity: float
    per_class: dict
    replication_stats: dict  # metric -> (mean, population sd)
    replications: int = 1
    meta: dict = field(default_factory=dict)


def _distances(matrix) -> np.ndarray:
    return np.asarray(getattr(matrix, "entries", matrix), dtype=np.float64)


def run_cv(matrix, labels: Sequence, k: int, plan: FoldPlan,
           class_ids: Optional[Sequence] = None) -> ConfusionMatrix:
    """Classify every instance against the out-of-fold instances only."""
    D = _distances(matrix)
    N = len(labels)
    if D.shape != (N, N):
        raise DataError(f"distance matrix of shape {D.shape} for {N} labels")
    if len(plan) != N:
        raise DataError(f"fold plan covers {len(plan)} instances, expected {N}")
    class_ids = tuple(class_ids) if class_ids is not None else tuple(_sorted_classes(labels))
    actual, predicted = [], []
    for f, test in enumerate(plan.folds()):
        n_train = N - test.size
        if k > n_train:
            raise KTooLarge(f"k={k} exceeds the {n_train} training instances of fold {f}")
        for q in test.tolist():
            actual.append(labels[q])
            predicted.append(classify(D[q], labels, k, exclude=test).label)
    return ConfusionMatrix.from_pairs(actual, predicted, class_ids)


def _class_stats(confusion: ConfusionMatrix):
    c = confusion.counts
    N = int(c.sum())
    if N == 0:
        raise EmptyClass("confusion matrix is empty")
    if len(confusion.class_ids) < 2:
        raise DataError("metrics need at least two classes")
    rows = c.sum(axis=1)
    cols = c.sum(axis=0)
    empty = [confusion.class_ids[i] for i in np.flatnonzero(rows == 0)]
    if empty:
        raise EmptyClass(f"classes with no actual instances: {empty}")
    out = []
    for i in range(c.shape[0]):
        tp = int(c[i, i])
        fn = int(rows[i]) - tp
        fp = int(cols[i]) - tp
        tn = N - tp - fn - fp
        out.append((tp, fn, fp, tn))
    return N, out


def metrics(confusion: ConfusionMatrix) -> EvalReport:
    """One-vs-rest counts per class and the prevalence-weighted aggregates.

    Each aggregate is ``sum_i rho_i * m_i`` with ``rho_i = n_i / N``, where
    ``m_i`` is the per-class accuracy ``(TP+TN)/(TP+FN+FP+TN)``, sensitivity
    ``TP/(TP+FN)`` or specificity ``TN/(FP+TN)``. Sums are accumulated as exact
    fractions and rounded once.
    """
    N, counts = _class_stats(confusion)
    acc = sen = spe = Fraction(0)
    per_class = {}
    for cid, (tp, fn, fp, tn) in zip(confusion.class_ids, counts):
        rho = Fraction(tp + fn, N)
        a = Fraction(tp + tn, tp + fn + fp + tn)
        s = Fraction(tp, tp + fn)
        p = Fraction(tn, fp + tn)
        acc += rho * a
        sen += rho * s
        spe += rho * p
        per_class[cid] = ClassStats(tp, fn, fp, tn, float(s), float(p), float(a))
    acc, sen, spe = float(acc), float(sen), float(spe)
    return EvalReport(
        confusion=confusion,
        accuracy=acc,
        sensitivity=sen,
        specificity=spe,
        per_class=per_class,
        replication_stats={"accuracy": (acc, 0.0), "sensitivity": (sen, 0.0), "specificity": (spe, 0.0)},
        replications=1,
    )


def replicate(matrix, labels: Sequence, k: int, protocol: Protocol, R: int = 100,
              base_seed: int = 0, class_ids: Optional[Sequence] = None) -> EvalReport:
    """Run ``protocol`` R times with seeds ``base_seed .. base_seed + R - 1``.

    Aggregates are the replication means; ``replication_stats`` holds mean and
    population sd. The confusion matrix and per-class figures are pooled over
    all replications.
    """
    if R < 1:
        raise ValueError(f"need at least one replication, got {R}")
    class_ids = tuple(class_ids) if class_ids is not None else tuple(_sorted_classes(labels))
    cache = {}
    runs = []
    pooled = None
    for r in range(R):
        plan = protocol.plan(labels, base_seed + r)
        # identical plans (always the case for LOO) give identical results
        conf = cache.get(plan.assignments)
        if conf is None:
            conf = cache[plan.assignments] = run_cv(matrix, labels, k, plan, class_ids)
        runs.append(metrics(conf))
        pooled = conf if pooled is None else pooled + conf

    stats = {}
    for name in METRIC_NAMES:
        values = [getattr(rep, name) for rep in runs]
        stats[name] = (statistics.mean(values), statistics.pstdev(values))
    per_class = metrics(pooled).per_class
    return EvalReport(
        confusion=pooled,
        accuracy=stats["accuracy"][0],
        sensitivity=stats["sensitivity"][0],
        specificity=stats["specificity"][0],
        per_class=per_class,
        replication_stats=stats,
        replications=R,
        meta={"k": str(k), "protocol": str(protocol), "base_seed": str(base_seed)},
    )
