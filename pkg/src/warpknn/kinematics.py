"""Kinematic text files, column maps, manifests and dataset assembly.

Kinematics file: plain text, one record per line, whitespace-separated
decimals (plain or scientific), same width on every line. Trailing whitespace
and trailing blank lines are ignored.

Manifest (JSON)::

    {
      "label_set": ["KT", "NP", "SU"],
      "hand_selection": "both",          # left | right | both | all
      "normalization": "zscore",         # none | zscore | minmax
      "window": 100,                     # optional default for the CLI
      "layout": {                        # optional, default = JIGSAWS PSM map
        "expected_width": 76,
        "hands": {"left": [[39, "psm_left_x"], ...], "right": [...]}
      },
      "entries": [
        {"path": "kinematics/Knot_Tying_B001.txt", "label": "KT",
         "subject": "B", "trial": "1", "id": "optional-unique-id"}
      ]
    }

Entry paths are resolved relative to the manifest file. Column indices are
1-based. A layout without a "both" map gets one by concatenating left then
right.
"""
from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import DataError, EmptyFile, MalformedRow, ManifestError, NonFiniteValue
from .series import NORMALIZATIONS, LabeledInstance, TimeSeries, normalize

HANDS = ("left", "right", "both")

# JIGSAWS record: 4 manipulators (MTM-L, MTM-R, PSM-L, PSM-R) x 19 variables
# (position 3, rotation 9, linear velocity 3, angular velocity 3, gripper 1).
# The block order is an assumption; override it through the manifest layout.
JIGSAWS_WIDTH = 76
VARS_PER_ARM = 19
PSM_LEFT_X = 2 * VARS_PER_ARM + 1   # 39
PSM_RIGHT_X = 3 * VARS_PER_ARM + 1  # 58

_NUM = r"(?:[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?|[+-]?(?i:nan|inf|infinity))"
_ROW = re.compile(rf"\s*(?:{_NUM}\s+)*{_NUM}\s*")


@dataclass(frozen=True)
class ColumnMap:
    channels: tuple[tuple[int, str], ...]  # (1-based column, name)
    expected_width: int

    def __post_init__(self):
        chans = tuple((int(i), str(name)) for i, name in self.channels)
        object.__setattr__(self, "channels", chans)
        idx = [i for i, _ in chans]
        if not chans:
            raise ValueError("column map selects no channels")
        if len(set(idx)) != len(idx):
            raise ValueError(f"duplicate column indices in map: {idx}")
        bad = [i for i in idx if not 1 <= i <= self.expected_width]
        if bad:
            raise ValueError(f"column indices {bad} outside [1, {self.expected_width}]")

    @property
    def indices(self) -> list[int]:
        return [i for i, _ in self.channels]

    @property
    def names(self) -> list[str]:
        return [n for _, n in self.channels]


def _psm(side: str, first: int):
    return [(first + k, f"psm_{side}_{axis}") for k, axis in enumerate("xyz")]


def default_column_map(hand_selection: str = "both") -> ColumnMap:
    """PSM tool-tip Cartesian positions in a 76-column JIGSAWS record."""
    if hand_selection == "left":
        chans = _psm("left", PSM_LEFT_X)
    elif hand_selection == "right":
        chans = _psm("right", PSM_RIGHT_X)
    elif hand_selection == "both":
        chans = _psm("left", PSM_LEFT_X) + _psm("right", PSM_RIGHT_X)
    else:
        raise ValueError(f"hand selection must be one of {HANDS}, got {hand_selection!r}")
    return ColumnMap(tuple(chans), JIGSAWS_WIDTH)


def load_kinematics(path, cmap: ColumnMap) -> TimeSeries:
    """Read a kinematics file and keep the mapped columns, in map order."""
    path = Path(path)
    lines = path.read_text().splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise EmptyFile(f"{path}: no records")

    width = cmap.expected_width
    rows = np.empty((len(lines), width))
    for r, line in enumerate(lines, start=1):
        fields = line.split()
        if len(fields) != width or not _ROW.fullmatch(line):
            raise MalformedRow(path, r, len(fields), width)
        rows[r - 1] = np.array(fields, dtype=np.float64)

    bad = np.argwhere(~np.isfinite(rows))
    if bad.size:
        raise NonFiniteValue(path, int(bad[0, 0]) + 1, int(bad[0, 1]) + 1)
    cols = np.asarray(cmap.indices) - 1
    return TimeSeries(rows[:, cols], tuple(cmap.names))


def write_kinematics(path, samples: np.ndarray) -> None:
    """Write records with shortest round-trip float formatting."""
    samples = np.asarray(samples, dtype=np.float64)
    with open(path, "w") as fh:
        for row in samples:
            fh.write(" ".join(repr(float(v)) for v in row))
            fh.write("\n")


@dataclass(frozen=True)
class ManifestEntry:
    path: Path
    label: str
    subject: str = ""
    trial: str = ""
    instance_id: str = ""


@dataclass(frozen=True)
class Layout:
    expected_width: int
    hands: dict  # hand -> tuple of (column, name)

    def column_map(self, hand: str) -> ColumnMap:
        if hand not in self.hands:
            raise ManifestError(f"layout defines no column map for hand {hand!r} "
                                f"(available: {sorted(self.hands)})")
        return ColumnMap(tuple(self.hands[hand]), self.expected_width)

    @classmethod
    def jigsaws(cls) -> "Layout":
        return cls(JIGSAWS_WIDTH, {h: default_column_map(h).channels for h in HANDS})

    @classmethod
    def from_dict(cls, d: dict) -> "Layout":
        try:
            width = int(d["expected_width"])
            hands = {h: tuple((int(i), str(n)) for i, n in chans) for h, chans in d["hands"].items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise ManifestError(f"invalid layout: {exc}") from None
        if "both" not in hands and "left" in hands and "right" in hands:
            hands["both"] = hands["left"] + hands["right"]
        for h, chans in hands.items():
            try:
                ColumnMap(chans, width)
            except ValueError as exc:
                raise ManifestError(f"layout for hand {h!r}: {exc}") from None
        return cls(width, hands)

    def to_dict(self) -> dict:
        return {"expected_width": self.expected_width,
                "hands": {h: [list(c) for c in chans] for h, chans in self.hands.items()}}


@dataclass(frozen=True)
class DatasetManifest:
    entries: tuple[ManifestEntry, ...]
    label_set: tuple[str, ...]
    hand_selection: str = "both"
    normalization: str = "zscore"
    window: Optional[int] = None
    layout: Layout = field(default_factory=Layout.jigsaws)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        object.__setattr__(self, "label_set", tuple(self.label_set))
        if self.hand_selection not in HANDS + ("all",):
            raise ManifestError(f"hand_selection must be one of {HANDS + ('all',)}, got {self.hand_selection!r}")
        if self.normalization not in NORMALIZATIONS:
            raise ManifestError(f"normalization must be one of {NORMALIZATIONS}, got {self.normalization!r}")
        labels = set(self.label_set)
        paths, ids = set(), set()
        for e in self.entries:
            if e.label not in labels:
                raise ManifestError(f"entry {e.path}: label {e.label!r} not in label_set {list(self.label_set)}")
            if e.path in paths:
                raise ManifestError(f"duplicate path {e.path}")
            if e.instance_id in ids:
                raise ManifestError(f"duplicate instance id {e.instance_id!r}")
            paths.add(e.path)
            ids.add(e.instance_id)

    def hands(self) -> list[str]:
        """Hand scenarios this manifest asks for ('all' expands to every defined hand)."""
        if self.hand_selection == "all":
            return [h for h in HANDS if h in self.layout.hands]
        return [self.hand_selection]


def load_manifest(path) -> DatasetManifest:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ManifestError(f"manifest not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: invalid JSON: {exc}") from None
    base = path.parent
    try:
        entries = []
        for k, e in enumerate(raw["entries"]):
            p = Path(e["path"])
            p = p if p.is_absolute() else base / p
            entries.append(ManifestEntry(p, str(e["label"]), str(e.get("subject", "")),
                                         str(e.get("trial", "")), str(e.get("id") or p.stem)))
        layout = Layout.from_dict(raw["layout"]) if "layout" in raw else Layout.jigsaws()
        window = raw.get("window")
        return DatasetManifest(
            entries=tuple(entries),
            label_set=tuple(str(x) for x in raw["label_set"]),
            hand_selection=raw.get("hand_selection", "all"),
            normalization=raw.get("normalization", "zscore"),
            window=None if window is None else int(window),
            layout=layout,
        )
    except (KeyError, TypeError) as exc:
        raise ManifestError(f"{path}: missing or invalid field {exc}") from None


def write_manifest(manifest: DatasetManifest, path) -> None:
    path = Path(path)
    base = path.parent.resolve()

    def rel(p: Path):
        try:
            return Path(p).resolve().relative_to(base).as_posix()
        except ValueError:
            return str(p)

    doc = {
        "label_set": list(manifest.label_set),
        "hand_selection": manifest.hand_selection,
        "normalization": manifest.normalization,
        "layout": manifest.layout.to_dict(),
        "entries": [{"path": rel(e.path), "label": e.label, "subject": e.subject,
                     "trial": e.trial, "id": e.instance_id} for e in manifest.entries],
    }
    if manifest.window is not None:
        doc["window"] = manifest.window
    path.write_text(json.dumps(doc, indent=2) + "\n")


def build_dataset(manifest: DatasetManifest, hand: Optional[str] = None,
                  normalization: Optional[str] = None, workers: int = 1) -> list[LabeledInstance]:
    """Load, channel-select and normalize every manifest entry, in manifest order.

    Channels are selected first and normalized afterwards.
    """
    hand = hand or manifest.hand_selection
    if hand == "all":
        raise ManifestError("build_dataset needs a single hand selection, not 'all'")
    policy = normalization or manifest.normalization
    if policy not in NORMALIZATIONS:
        raise ManifestError(f"unknown normalization {policy!r}")
    cmap = manifest.layout.column_map(hand)

    def load(entry: ManifestEntry) -> LabeledInstance:
        try:
            series = normalize(load_kinematics(entry.path, cmap), policy)
        except FileNotFoundError:
            raise DataError(f"{entry.path}: file not found") from None
        except DataError as exc:
            if str(entry.path) in str(exc):
                raise
            raise DataError(f"{entry.path}: {exc}") from exc
        return LabeledInstance(series, entry.label, entry.subject, entry.trial, entry.instance_id)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(load, manifest.entries))
    return [load(e) for e in manifest.entries]
