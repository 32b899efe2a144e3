"""Distance-weighted k-nearest-neighbour classification (Dudani weights)."""
from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass
from typing import Hashable, Iterable, Optional, Sequence, Union

import numpy as np

from .errors import EmptyTrainingSet, KTooLarge, UnsortedDistances

# class scores closer than this are treated as tied; absorbs last-bit
# differences so predictions do not flip when all distances are rescaled
SCORE_TOL = 1e-12

Neighbor = namedtuple("Neighbor", "index label distance")
KScore = namedtuple("KScore", "k accuracy sd")


@dataclass(frozen=True)
class NeighborSet:
    neighbors: tuple[Neighbor, ...]
    weights: tuple[float, ...]

    @property
    def k(self):
        return len(self.neighbors)


@dataclass(frozen=True)
class Prediction:
    label: Hashable
    class_scores: dict
    neighbors: Optional[NeighborSet] = None


def neighbor_weights(distances: Sequence[float]) -> np.ndarray:
    """Weights ``(d_k - d_i) / (d_k - d_1)`` for distances sorted ascending.

    If every distance equals the first (this includes k == 1) all weights
    are 1, which reduces to an unweighted vote.
    """
    d = np.asarray(distances, dtype=np.float64).ravel()
    if d.size == 0:
        raise ValueError("need at least one neighbour distance")
    if np.any(d[1:] < d[:-1]):
        raise UnsortedDistances(f"neighbour distances must be nondecreasing: {d.tolist()}")
    d1, dk = d[0], d[-1]
    if dk == d1:
        return np.ones_like(d)
    return (dk - d) / (dk - d1)


def _lexi_min(labels):
    try:
        return min(labels)
    except TypeError:
        return min(labels, key=str)


def nearest(query_distances, k: int, exclude: Union[int, Iterable[int], None] = None) -> np.ndarray:
    """Indices of the k smallest eligible distances; ties go to the lower index."""
    d = np.asarray(query_distances, dtype=np.float64).ravel()
    eligible = np.ones(d.size, dtype=bool)
    if exclude is not None:
        if isinstance(exclude, (int, np.integer)):
            eligible[int(exclude)] = False
        else:
            eligible[np.fromiter(exclude, dtype=np.int64)] = False
    idx = np.flatnonzero(eligible)
    if idx.size == 0:
        raise EmptyTrainingSet("no eligible training instances")
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if k > idx.size:
        raise KTooLarge(f"k={k} exceeds the {idx.size} eligible training instances")
    if not np.all(np.isfinite(d[idx])):
        raise ValueError("query distances must be finite")
    return idx[np.argsort(d[idx], kind="stable")[:k]]


def classify(query_distances, labels: Sequence, k: int,
             exclude: Union[int, Iterable[int], None] = None) -> Prediction:
    """Predict a label from one row of distances to the training instances.

    ``exclude`` removes an index (or several) from the candidate pool, e.g. the
    query itself when it is part of the matrix. Class-score ties are broken
    by the smaller summed neighbour distance, then by the smallest class id.
    """
    d = np.asarray(query_distances, dtype=np.float64).ravel()
    if len(labels) != d.size:
        raise ValueError(f"{len(labels)} labels for {d.size} distances")
    order = nearest(d, k, exclude)
    dist = d[order]
    w = neighbor_weights(dist)

    scores: dict = {}
    dsum: dict = {}
    for i, wi, di in zip(order.tolist(), w.tolist(), dist.tolist()):
        y = labels[i]
        scores[y] = scores.get(y, 0.0) + wi
        dsum[y] = dsum.get(y, 0.0) + di

    top = max(scores.values())
    tied = [y for y, s in scores.items() if s >= top - SCORE_TOL]
    if len(tied) > 1:
        closest = min(dsum[y] for y in tied)
        tied = [y for y in tied if dsum[y] <= closest * (1 + SCORE_TOL)]
    label = _lexi_min(tied) if len(tied) > 1 else tied[0]

    hood = NeighborSet(
        tuple(Neighbor(int(i), labels[i], float(di)) for i, di in zip(order, dist)),
        tuple(float(x) for x in w),
    )
    return Prediction(label, scores, hood)


def tune_k(matrix, labels: Sequence, k_range: Iterable[int], folds,
           replications: int = 1, base_seed: int = 0) -> list[KScore]:
    """Cross-validated accuracy for every k in ``k_range``.

    ``folds`` is either a fixed :class:`~warpknn.evaluation.FoldPlan` (sd is
    then 0) or a :class:`~warpknn.evaluation.Protocol`, in which case each k
    is evaluated over ``replications`` seeded plans.
    """
    from .evaluation import FoldPlan, metrics, replicate, run_cv

    ks = list(k_range)
    if not ks:
        raise ValueError("k_range is empty")
    out = []
    for k in ks:
        if isinstance(folds, FoldPlan):
            out.append(KScore(k, metrics(run_cv(matrix, labels, k, folds)).accuracy, 0.0))
        else:
            rep = replicate(matrix, labels, k, folds, replications, base_seed)
            mean, sd = rep.replication_stats["accuracy"]
            out.append(KScore(k, mean, sd))
    return out
