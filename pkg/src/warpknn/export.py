"""Report serialization: human tables, key-value CSV and plot data.

Report CSV schema (two columns, header ``key,value``)::

    replications,<int>
    meta.<name>,<str>                       one row per metadata item
    accuracy|sensitivity|specificity,<float>
    <metric>.mean / <metric>.sd,<float>     replication statistics
    class.<i>.id,<class id>                 i = 0..C-1 in confusion order
    class.<i>.tp|fn|fp|tn,<int>
    class.<i>.sensitivity|specificity|accuracy,<float>
    confusion.<i>.<j>,<int>                 row = actual, column = predicted

Floats use the shortest representation that round-trips exactly.

Confusion CSV: header ``actual\\predicted,<id>,...`` then one row per actual
class. Plot data: CSV with header ``x,y,series``.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Mapping, Sequence

from .errors import DataError
from .evaluation import METRIC_NAMES, ClassStats, ConfusionMatrix, EvalReport
from .knn import KScore

FORMATS = ("table", "csv", "plotdata")


def _pct(x: float) -> str:
    return f"{100.0 * x:.2f}%"


def report_table(report: EvalReport, title: str = "") -> str:
    buf = io.StringIO()
    if title:
        print(title, file=buf)
    meta = ", ".join(f"{k}={v}" for k, v in report.meta.items())
    if meta:
        print(meta, file=buf)
    print(f"replications: {report.replications}", file=buf)
    print(f"{'metric':<12} {'mean':>9} {'sd':>9}", file=buf)
    for name in METRIC_NAMES:
        mean, sd = report.replication_stats[name]
        print(f"{name:<12} {_pct(mean):>9} {_pct(sd):>9}", file=buf)

    ids = [str(c) for c in report.confusion.class_ids]
    w = max(8, *(len(c) for c in ids))
    print(file=buf)
    print(f"{'class':<{w}} {'TP':>6} {'FN':>6} {'FP':>6} {'TN':>6} {'sens':>8} {'spec':>8} {'acc':>8}", file=buf)
    for cid, s in report.per_class.items():
        print(f"{str(cid):<{w}} {s.tp:>6} {s.fn:>6} {s.fp:>6} {s.tn:>6} "
              f"{_pct(s.sensitivity):>8} {_pct(s.specificity):>8} {_pct(s.accuracy):>8}", file=buf)

    print(file=buf)
    print("confusion (rows = actual, columns = predicted)", file=buf)
    print(f"{'':<{w}} " + " ".join(f"{c:>{w}}" for c in ids), file=buf)
    for cid, row in zip(ids, report.confusion.counts.tolist()):
        print(f"{cid:<{w}} " + " ".join(f"{v:>{w}}" for v in row), file=buf)
    return buf.getvalue()


def report_rows(report: EvalReport) -> list[tuple[str, str]]:
    rows = [("replications", str(report.replications))]
    rows += [(f"meta.{k}", str(v)) for k, v in report.meta.items()]
    for name in METRIC_NAMES:
        rows.append((name, repr(getattr(report, name))))
    for name in METRIC_NAMES:
        mean, sd = report.replication_stats[name]
        rows += [(f"{name}.mean", repr(mean)), (f"{name}.sd", repr(sd))]
    for i, cid in enumerate(report.confusion.class_ids):
        s = report.per_class[cid]
        rows.append((f"class.{i}.id", str(cid)))
        rows += [(f"class.{i}.{f}", str(getattr(s, f))) for f in ("tp", "fn", "fp", "tn")]
        rows += [(f"class.{i}.{f}", repr(getattr(s, f))) for f in ("sensitivity", "specificity", "accuracy")]
    for i, row in enumerate(report.confusion.counts.tolist()):
        rows += [(f"confusion.{i}.{j}", str(v)) for j, v in enumerate(row)]
    return rows


def write_report_csv(report: EvalReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["key", "value"])
        w.writerows(report_rows(report))


def read_report_csv(path) -> EvalReport:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["key", "value"]:
        raise DataError(f"{path}: not a report CSV (missing key,value header)")
    kv = {}
    for r in rows[1:]:
        if len(r) != 2:
            raise DataError(f"{path}: malformed row {r}")
        kv[r[0]] = r[1]
    try:
        meta = {k[5:]: v for k, v in kv.items() if k.startswith("meta.")}
        C = sum(1 for k in kv if k.startswith("class.") and k.endswith(".id"))
        ids = tuple(kv[f"class.{i}.id"] for i in range(C))
        counts = [[int(kv[f"confusion.{i}.{j}"]) for j in range(C)] for i in range(C)]
        per_class = {
            ids[i]: ClassStats(*(int(kv[f"class.{i}.{f}"]) for f in ("tp", "fn", "fp", "tn")),
                               *(float(kv[f"class.{i}.{f}"]) for f in ("sensitivity", "specificity", "accuracy")))
            for i in range(C)
        }
        stats = {n: (float(kv[f"{n}.mean"]), float(kv[f"{n}.sd"])) for n in METRIC_NAMES}
        return EvalReport(
            confusion=ConfusionMatrix(counts, ids),
            accuracy=float(kv["accuracy"]),
            sensitivity=float(kv["sensitivity"]),
            specificity=float(kv["specificity"]),
            per_class=per_class,
            replication_stats=stats,
            replications=int(kv["replications"]),
            meta=meta,
        )
    except (KeyError, ValueError) as exc:
        raise DataError(f"{path}: incomplete report: {exc}") from None


def write_confusion_csv(confusion: ConfusionMatrix, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["actual\\predicted", *confusion.class_ids])
        for cid, row in zip(confusion.class_ids, confusion.counts.tolist()):
            w.writerow([cid, *row])


def report_plotdata(report: EvalReport, series_prefix: str = "") -> list[tuple]:
    """Per-class bars: x = class id, y = metric value, series = metric name."""
    out = []
    for name in ("accuracy", "sensitivity", "specificity"):
        for cid, s in report.per_class.items():
            out.append((cid, getattr(s, name), f"{series_prefix}{name}"))
    return out


def k_table(scores: Sequence[KScore], title: str = "") -> str:
    buf = io.StringIO()
    if title:
        print(title, file=buf)
    print(f"{'k':>4} {'accuracy':>10} {'sd':>9}", file=buf)
    for s in scores:
        print(f"{s.k:>4} {_pct(s.accuracy):>10} {_pct(s.sd):>9}", file=buf)
    return buf.getvalue()


def k_plotdata(scores: Sequence[KScore], series: str) -> list[tuple]:
    return [(s.k, s.accuracy, series) for s in scores]


def write_plotdata(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "series"])
        for x, y, label in rows:
            w.writerow([x, repr(float(y)), label])


def write_k_csv(scores: Sequence[KScore], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "accuracy_mean", "accuracy_sd"])
        for s in scores:
            w.writerow([s.k, repr(float(s.accuracy)), repr(float(s.sd))])


def export_results(result, fmt: str, path, label: str = "") -> Path:
    """Write an EvalReport or a tune-k score list in one of :data:`FORMATS`.

    For score lists ``label`` names the plot series (e.g. ``"dtw loo"``).
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    path = Path(path)
    try:
        if isinstance(result, EvalReport):
            if fmt == "table":
                path.write_text(report_table(result, label))
            elif fmt == "csv":
                write_report_csv(result, path)
            else:
                write_plotdata(report_plotdata(result, f"{label} " if label else ""), path)
        else:
            scores = list(result)
            if fmt == "table":
                path.write_text(k_table(scores, label))
            elif fmt == "csv":
                write_k_csv(scores, path)
            else:
                write_plotdata(k_plotdata(scores, label or "accuracy"), path)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc.strerror or exc}") from None
    return path


def scenario_table(reports: Mapping[str, EvalReport], measure: str, protocol: str) -> str:
    """Accuracy mean (sd) per hand scenario, one column each."""
    names = list(reports)
    w = 16
    head = f"{'':<10}" + "".join(f"{n:>{w}}" for n in names)
    sub = f"{'':<10}" + "".join(f"{measure.upper():>{w}}" for _ in names)
    mean = f"{protocol:<10}" + "".join(f"{_pct(r.replication_stats['accuracy'][0]):>{w}}" for r in reports.values())
    sd = f"{'':<10}" + "".join(f"{'(' + _pct(r.replication_stats['accuracy'][1]) + ')':>{w}}" for r in reports.values())
    return "\n".join([head, sub, mean, sd]) + "\n"


def write_scenario_csv(reports: Mapping[str, EvalReport], measure: str, protocol: str, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["scenario", "measure", "protocol", "k", "accuracy_mean", "accuracy_sd",
                    "sensitivity_mean", "specificity_mean"])
        for name, r in reports.items():
            w.writerow([name, measure, protocol, r.meta.get("k", ""),
                        repr(r.replication_stats["accuracy"][0]), repr(r.replication_stats["accuracy"][1]),
                        repr(r.replication_stats["sensitivity"][0]), repr(r.replication_stats["specificity"][0])])
