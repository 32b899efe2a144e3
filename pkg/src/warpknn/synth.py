"""Synthetic 3-D trajectory corpora for exercising the classifier.

Three curve families stand in for the surgical tasks: a looping helix, a
lissajous figure-eight and a zigzag (triangle wave along a drifting axis).
Every instance is a family curve sampled at a random length, optionally
pushed through a random monotone time warp, plus Gaussian noise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .kinematics import (JIGSAWS_WIDTH, PSM_LEFT_X, PSM_RIGHT_X, DatasetManifest, Layout,
                         ManifestEntry, write_kinematics, write_manifest)
from .series import LabeledInstance, TimeSeries

TWO_PI = 2.0 * math.pi


def helix(u):
    return np.column_stack([np.cos(2 * TWO_PI * u), np.sin(2 * TWO_PI * u), 2.0 * u - 1.0])


def lissajous(u):
    return np.column_stack([np.sin(TWO_PI * u), 0.5 * np.sin(2 * TWO_PI * u), 0.3 * np.cos(TWO_PI * u)])


def zigzag(u):
    phase = (4.0 * u) % 1.0
    tri = 1.0 - 4.0 * np.abs(phase - 0.5)
    return np.column_stack([2.0 * u - 1.0, tri, 0.2 * np.sin(TWO_PI * u)])


FAMILIES = {"helix": helix, "lissajous": lissajous, "zigzag": zigzag}


@dataclass(frozen=True)
class SynthSpec:
    classes: tuple[str, ...] = ("helix", "lissajous", "zigzag")
    per_class: int = 20
    length_range: tuple[int, int] = (80, 120)
    noise_sd: float = 0.05
    seed: int = 42
    warp: bool = True  # random monotone time reparameterization

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "length_range", tuple(int(x) for x in self.length_range))
        lo, hi = self.length_range
        if len(self.classes) < 2:
            raise ValueError("need at least two classes")
        if len(set(self.classes)) != len(self.classes):
            raise ValueError("class families must be distinct")
        unknown = [c for c in self.classes if c not in FAMILIES]
        if unknown:
            raise ValueError(f"unknown families {unknown}; choose from {sorted(FAMILIES)}")
        if lo < 3 or hi < lo:
            raise ValueError(f"length range must satisfy 3 <= min <= max, got {self.length_range}")
        if self.per_class < 1:
            raise ValueError("per_class must be at least 1")
        if not self.noise_sd >= 0:
            raise ValueError("noise_sd must be nonnegative")


def synth_dataset(spec: SynthSpec = SynthSpec()) -> list[LabeledInstance]:
    """Deterministic labelled corpus, ordered class by class."""
    rng = np.random.default_rng(spec.seed)
    lo, hi = spec.length_range
    out = []
    for family in spec.classes:
        curve = FAMILIES[family]
        for j in range(spec.per_class):
            m = int(rng.integers(lo, hi + 1))
            u = np.linspace(0.0, 1.0, m)
            if spec.warp:
                # u + a sin(2 pi u) / (2 pi) is monotone for |a| < 1 and fixes 0 and 1
                a = rng.uniform(-0.5, 0.5)
                u = u + a * np.sin(TWO_PI * u) / TWO_PI
            x = curve(u) + rng.normal(0.0, spec.noise_sd, size=(m, 3))
            out.append(LabeledInstance(TimeSeries(x, ("x", "y", "z")), family, "synth",
                                       str(j + 1), f"{family}_{j + 1:03d}"))
    return out


COMPACT_LAYOUT = Layout(3, {"both": ((1, "x"), (2, "y"), (3, "z"))})


def jigsaws_layout_record(x: np.ndarray) -> np.ndarray:
    """Embed a 3-D curve into 76-column records.

    The curve goes to the PSM-left position columns and its mirror image
    (x negated) to the PSM-right ones; every other column is zero.
    """
    rec = np.zeros((x.shape[0], JIGSAWS_WIDTH))
    rec[:, PSM_LEFT_X - 1:PSM_LEFT_X + 2] = x
    rec[:, PSM_RIGHT_X - 1:PSM_RIGHT_X + 2] = x * np.array([-1.0, 1.0, 1.0])
    return rec


def write_corpus(instances, out_dir, layout: str = "compact",
                 normalization: str = "zscore") -> Path:
    """Write one kinematics file per instance plus ``manifest.json``.

    Returns the manifest path.
    """
    out_dir = Path(out_dir)
    data_dir = out_dir / "kinematics"
    data_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for inst in instances:
        x = np.asarray(inst.series)
        rec = jigsaws_layout_record(x) if layout == "jigsaws" else x
        p = data_dir / f"{inst.instance_id}.txt"
        write_kinematics(p, rec)
        entries.append(ManifestEntry(p, inst.label, inst.subject, inst.trial, inst.instance_id))
    labels = tuple(dict.fromkeys(inst.label for inst in instances))
    if layout == "jigsaws":
        lay, hand = Layout.jigsaws(), "all"
    elif layout == "compact":
        lay, hand = COMPACT_LAYOUT, "both"
    else:
        raise ValueError(f"unknown layout {layout!r}")
    manifest = DatasetManifest(tuple(entries), labels, hand, normalization, None, lay)
    path = out_dir / "manifest.json"
    write_manifest(manifest, path)
    return path
