import numpy as np
import pytest

from conftest import corpus, matrix
from warpknn import (Protocol, SynthSpec, WarpConfig, build_dataset, load_kinematics,
                     load_manifest, pairwise_matrix, replicate, synth_dataset)
from warpknn.synth import write_corpus


def test_same_seed_same_corpus():
    a, b = synth_dataset(SynthSpec(seed=7)), synth_dataset(SynthSpec(seed=7))
    assert [x.instance_id for x in a] == [x.instance_id for x in b]
    assert all(x.series == y.series for x, y in zip(a, b))
    c = synth_dataset(SynthSpec(seed=8))
    assert any(x.series != y.series for x, y in zip(a, c))


def test_shape_and_labels():
    data = synth_dataset(SynthSpec(per_class=4, length_range=(10, 14)))
    assert len(data) == 12
    assert [x.label for x in data] == ["helix"] * 4 + ["lissajous"] * 4 + ["zigzag"] * 4
    assert all(10 <= x.series.length <= 14 and x.series.n_channels == 3 for x in data)
    assert data[0].instance_id == "helix_001"


@pytest.mark.parametrize("bad", [
    dict(classes=("helix",)), dict(classes=("helix", "spiral")), dict(length_range=(2, 5)),
    dict(length_range=(9, 5)), dict(per_class=0), dict(noise_sd=-1.0)])
def test_spec_validation(bad):
    with pytest.raises(ValueError):
        SynthSpec(**bad)


def test_noiseless_fixed_length_is_exactly_separable():
    spec = SynthSpec(per_class=4, length_range=(30, 30), noise_sd=0.0, warp=False)
    data = synth_dataset(spec)
    M = pairwise_matrix(data, WarpConfig())
    labels = [x.label for x in data]
    for a in range(len(data)):
        for b in range(len(data)):
            if labels[a] == labels[b]:
                assert M.entries[a, b] == 0.0
    for k in range(1, 4):
        r = replicate(M, labels, k, Protocol("loo"), R=1)
        assert r.accuracy == 1.0


def test_default_corpus_triple_audit():
    data, labels = corpus("default")
    D = matrix("default", "dtw").entries
    y = np.asarray(labels)
    good = total = 0
    for a in range(len(labels)):
        same = np.flatnonzero((y == y[a]) & (np.arange(len(y)) != a))
        other = np.flatnonzero(y != y[a])
        cmp = D[a, other][None, :] > D[a, same][:, None]
        good += int(cmp.sum())
        total += cmp.size
    assert total == 60 * 19 * 40
    assert good / total >= 0.95


@pytest.mark.parametrize("layout", ["compact", "jigsaws"])
def test_written_corpus_round_trips(tmp_path, layout):
    data = synth_dataset(SynthSpec(per_class=3, length_range=(12, 16)))
    path = write_corpus(data, tmp_path, layout=layout, normalization="none")
    man = load_manifest(path)
    assert len(man.entries) == 9
    hand = "left" if layout == "jigsaws" else "both"
    back = build_dataset(man, hand=hand)
    assert all(np.array_equal(x.series.samples, y.series.samples) for x, y in zip(back, data))
    assert [x.label for x in back] == [x.label for x in data]
    if layout == "jigsaws":
        right = load_kinematics(man.entries[0].path, man.layout.column_map("right")).samples
        assert np.array_equal(right[:, 0], -data[0].series.samples[:, 0])
        assert man.hands() == ["left", "right", "both"]


def test_corpus_bytes_reproducible(tmp_path):
    spec = SynthSpec(per_class=2, length_range=(8, 10))
    write_corpus(synth_dataset(spec), tmp_path / "a")
    write_corpus(synth_dataset(spec), tmp_path / "b")
    files_a = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*.*"))
    files_b = sorted(p.relative_to(tmp_path / "b") for p in (tmp_path / "b").rglob("*.*"))
    assert files_a == files_b and len(files_a) == 7
    for rel in files_a:
        assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()
