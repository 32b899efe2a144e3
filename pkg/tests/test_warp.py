import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from warpknn import (DimensionMismatch, DistanceMatrix, LabeledInstance, SeriesTooShort,
                     TimeSeries, WarpConfig, ddtw_distance, derivative_transform, dtw_distance,
                     dtw_path, pairwise_matrix, point_distance)
from warpknn.errors import DataError, PairFailure, UnknownInstanceId
from warpknn.warp import distance, path

UNBOUNDED = WarpConfig(window=None)


def small_pairs(count, seed, max_len=6):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        p = int(rng.integers(1, 3))
        m, n = rng.integers(1, max_len + 1, size=2)
        yield rng.normal(size=(m, p)), rng.normal(size=(n, p))


def assert_path_ok(steps, m, n, band=None):
    assert steps[0] == (1, 1) and steps[-1] == (m, n)
    for (i0, j0), (i1, j1) in zip(steps, steps[1:]):
        assert (i1 - i0, j1 - j0) in {(1, 0), (0, 1), (1, 1)}
    if band is not None:
        assert all(abs(i - j) <= band for i, j in steps)


series = arrays(np.float64, st.tuples(st.integers(1, 8), st.just(2)),
                elements=st.floats(-50, 50, allow_nan=False))


# point distance

def test_point_distance_examples():
    assert point_distance([1.5, -2.0], [1.5, -2.0]) == 0.0
    assert point_distance([0, 0], [3, 4]) == 5.0


def test_point_distance_matches_termwise_oracle():
    rng = np.random.default_rng(0)
    for _ in range(50):
        u, v = rng.normal(size=6), rng.normal(size=6)
        assert abs(point_distance(u, v) - oracles.point_dist(u.tolist(), v.tolist())) <= 1e-12


def test_point_distance_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        point_distance([1, 2], [1, 2, 3])


# dtw distance

def test_dtw_single_legal_path():
    assert dtw_distance([[0.0], [0.0]], [[1.0]]) == 2.0


def test_dtw_identity():
    x = np.random.default_rng(1).normal(size=(40, 3))
    for w in (1, 5, None):
        assert dtw_distance(x, x, WarpConfig(window=w)) == 0.0


def test_dtw_channel_mismatch():
    with pytest.raises(DimensionMismatch):
        dtw_distance(np.zeros((4, 2)), np.zeros((4, 3)))


def test_dtw_matches_brute_force_unbounded():
    for S, T in small_pairs(600, seed=11):
        got = dtw_distance(S, T, UNBOUNDED)
        assert abs(got - oracles.brute_dtw(S.tolist(), T.tolist())) <= 1e-12


def test_dtw_matches_brute_force_banded():
    for S, T in small_pairs(300, seed=12):
        w = int(np.random.default_rng(len(S) * 7 + len(T)).integers(1, 4))
        band = max(w, abs(len(S) - len(T)))
        got = dtw_distance(S, T, WarpConfig(window=w))
        assert abs(got - oracles.brute_dtw(S.tolist(), T.tolist(), band)) <= 1e-12


def test_dtw_matches_loop_oracle_on_long_series():
    rng = np.random.default_rng(5)
    for w in (3, 10, 100, None):
        S, T = rng.normal(size=(60, 3)), rng.normal(size=(45, 3))
        assert abs(dtw_distance(S, T, WarpConfig(window=w)) - oracles.loop_dtw(S.tolist(), T.tolist(), w)) <= 1e-9


def test_band_widens_to_length_difference():
    # lengths 10 and 2 with window 1 would otherwise be infeasible
    S, T = np.arange(10.0), np.array([0.0, 9.0])
    assert math.isfinite(dtw_distance(S, T, WarpConfig(window=1)))
    assert dtw_distance(S, T, WarpConfig(window=1)) == dtw_distance(S, T, UNBOUNDED)


@given(series, series)
def test_dtw_symmetric_and_nonnegative(S, T):
    for w in (1, 3, None):
        cfg = WarpConfig(window=w)
        a, b = dtw_distance(S, T, cfg), dtw_distance(T, S, cfg)
        assert a >= 0 and abs(a - b) <= 1e-9 * (1 + a)


@given(series, series)
def test_window_monotonicity(S, T):
    vals = [dtw_distance(S, T, WarpConfig(window=w)) for w in (1, 2, 4, 8)]
    vals.append(dtw_distance(S, T, UNBOUNDED))
    assert all(x >= y - 1e-9 for x, y in zip(vals, vals[1:]))


@given(st.integers(1, 12), st.data())
def test_euclidean_dominance(m, data):
    shape = (m, 2)
    el = st.floats(-50, 50, allow_nan=False)
    S = data.draw(arrays(np.float64, shape, elements=el))
    T = data.draw(arrays(np.float64, shape, elements=el))
    lockstep = sum(oracles.point_dist(s, t) for s, t in zip(S.tolist(), T.tolist()))
    assert dtw_distance(S, T, UNBOUNDED) <= lockstep + 1e-9


def test_normalize_by_path_divides_by_path_length():
    rng = np.random.default_rng(9)
    S, T = rng.normal(size=(20, 2)), rng.normal(size=(14, 2))
    raw = dtw_path(S, T)
    scaled = dtw_distance(S, T, WarpConfig(normalize_by_path=True))
    assert scaled == raw.total / len(raw.steps)


def test_window_validation():
    for bad in (0, -3, 2.5, True):
        with pytest.raises(ValueError):
            WarpConfig(window=bad)


# warp path

def test_path_of_identical_series_is_diagonal():
    x = np.random.default_rng(2).normal(size=(7, 2))
    wp = dtw_path(x, x)
    assert wp.steps == tuple((i, i) for i in range(1, 8)) and wp.total == 0.0


def test_path_single_row_against_many():
    wp = dtw_path([[1.0, 2.0]], np.zeros((5, 2)))
    assert wp.steps == tuple((1, j) for j in range(1, 6))


def test_path_invariants_and_cost_against_oracle():
    for S, T in small_pairs(500, seed=21):
        for cfg in (UNBOUNDED, WarpConfig(window=1)):
            wp = dtw_path(S, T, cfg)
            m, n = len(S), len(T)
            band = None if cfg.window is None else max(1, abs(m - n))
            assert_path_ok(wp.steps, m, n, band)
            cells = [(i - 1, j - 1) for i, j in wp.steps]
            cost = oracles.path_cost(S.tolist(), T.tolist(), cells)
            assert abs(cost - dtw_distance(S, T, cfg)) <= 1e-9
            assert abs(cost - oracles.brute_dtw(S.tolist(), T.tolist(), band)) <= 1e-9


def test_path_prefers_diagonal_on_ties():
    # all cells cost 0: every path ties, the diagonal must win
    wp = dtw_path(np.zeros((4, 1)), np.zeros((4, 1)))
    assert wp.steps == ((1, 1), (2, 2), (3, 3), (4, 4))
    # on a tie between up and left, (i-1, j) is taken first
    wp = dtw_path(np.zeros((3, 1)), np.zeros((2, 1)))
    assert wp.steps == ((1, 1), (2, 1), (3, 2))


# ddtw

def test_ddtw_is_dtw_of_derivatives_bitwise():
    rng = np.random.default_rng(31)
    for _ in range(100):
        p = int(rng.integers(1, 4))
        S = rng.normal(size=(int(rng.integers(3, 30)), p))
        T = rng.normal(size=(int(rng.integers(3, 30)), p))
        cfg = WarpConfig(window=int(rng.integers(1, 20)))
        expected = dtw_distance(derivative_transform(S), derivative_transform(T), cfg)
        assert ddtw_distance(S, T, cfg) == expected


def test_ddtw_against_composed_oracle():
    for S, T in small_pairs(200, seed=41):
        if len(S) < 3 or len(T) < 3:
            continue
        expected = oracles.brute_dtw(oracles.derivative_series(S.tolist()), oracles.derivative_series(T.tolist()))
        assert abs(ddtw_distance(S, T, UNBOUNDED) - expected) <= 1e-12


def test_ddtw_offset_invariance():
    x = np.random.default_rng(4).normal(size=(25, 3))
    assert ddtw_distance(x, x) == 0.0
    shifted = x + np.array([4.0, -2.0, 0.5])
    assert ddtw_distance(x, shifted) == pytest.approx(0.0, abs=1e-12)


def test_ddtw_too_short():
    with pytest.raises(SeriesTooShort):
        ddtw_distance(np.zeros((2, 1)), np.zeros((5, 1)))


def test_measure_dispatch():
    rng = np.random.default_rng(6)
    S, T = rng.normal(size=(12, 2)), rng.normal(size=(15, 2))
    assert distance(S, T, WarpConfig(measure="ddtw")) == ddtw_distance(S, T)
    assert distance(S, T, WarpConfig(measure="dtw")) == dtw_distance(S, T)
    assert path(S, T, WarpConfig(measure="ddtw")).total == ddtw_distance(S, T)


# pairwise matrix

def instances(n, seed=0, p=2):
    rng = np.random.default_rng(seed)
    return [LabeledInstance(TimeSeries(rng.normal(size=(int(rng.integers(10, 30)), p))), "a", instance_id=f"i{k}")
            for k in range(n)]


def test_pairwise_recomputation():
    data = instances(5)
    for cfg in (WarpConfig(), WarpConfig(window=3, measure="ddtw")):
        M = pairwise_matrix(data, cfg)
        assert np.all(np.diag(M.entries) == 0) and np.array_equal(M.entries, M.entries.T)
        for a in range(5):
            for b in range(5):
                if a != b:
                    assert M.entries[a, b] == distance(data[a].series, data[b].series, cfg)


def test_pairwise_identical_instances():
    x = TimeSeries(np.arange(12.0).reshape(6, 2))
    M = pairwise_matrix([LabeledInstance(x, "a", instance_id="p"), LabeledInstance(x, "a", instance_id="q")])
    assert M.entries.tolist() == [[0.0, 0.0], [0.0, 0.0]]


@pytest.mark.parametrize("workers", [2, 4, 8])
def test_pairwise_independent_of_worker_count(workers):
    data = instances(12, seed=3)
    assert np.array_equal(pairwise_matrix(data, workers=1).entries, pairwise_matrix(data, workers=workers).entries)


def test_pairwise_failure_names_pair():
    data = instances(3, p=1)
    short = LabeledInstance(TimeSeries([[0.0], [1.0]]), "a", instance_id="tiny")
    with pytest.raises(SeriesTooShort, match="tiny"):
        pairwise_matrix(data + [short], WarpConfig(measure="ddtw"))
    with pytest.raises(DimensionMismatch):
        wide = LabeledInstance(TimeSeries(np.zeros((5, 3))), "a", instance_id="wide")
        pairwise_matrix(data + [wide])


def test_pair_failure_carries_pair():
    err = PairFailure("a", "b", ValueError("boom"))
    assert err.pair == ("a", "b") and "boom" in str(err)


def test_matrix_csv_roundtrip(tmp_path):
    M = pairwise_matrix(instances(6, seed=8))
    f = tmp_path / "m.csv"
    M.to_csv(f)
    lines = f.read_text().splitlines()
    assert lines[0] == ",".join(M.instance_ids) and len(lines) == 7
    back = DistanceMatrix.from_csv(f)
    assert np.array_equal(back.entries, M.entries) and back.instance_ids == M.instance_ids


def test_matrix_invariants_enforced():
    with pytest.raises(DataError):
        DistanceMatrix([[0, 1], [2, 0]], ("a", "b"))
    with pytest.raises(DataError):
        DistanceMatrix([[1, 1], [1, 0]], ("a", "b"))
    with pytest.raises(DataError):
        DistanceMatrix([[0, -1], [-1, 0]], ("a", "b"))
    M = DistanceMatrix([[0, 1], [1, 0]], ("a", "b"))
    with pytest.raises(UnknownInstanceId):
        M.index("c")
    assert M.reorder(["b", "a"]).instance_ids == ("b", "a")
