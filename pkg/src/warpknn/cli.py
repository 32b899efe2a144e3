"""Command-line interface.

Subcommands: ``distance``, ``matrix``, ``tune-k``, ``evaluate``, ``synth``.
Any long flag can also be supplied through ``--config FILE`` (JSON object keyed
by the flag's destination name, e.g. ``{"measure": "ddtw", "k_max": 12}``);
flags given on the command line win.

Exit codes: 0 ok, 1 usage error, 2 data error, 3 internal error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .errors import DataError, UnknownInstanceId
from .evaluation import Protocol, replicate
from .export import (FORMATS, export_results, k_table, report_table, scenario_table,
                     write_confusion_csv, write_scenario_csv)
from .kinematics import build_dataset, load_manifest
from .knn import tune_k
from .series import NORMALIZATIONS, LabeledInstance, normalize
from .synth import FAMILIES, SynthSpec, synth_dataset, write_corpus
from .warp import DEFAULT_WINDOW, DistanceMatrix, Measure, WarpConfig, distance, pairwise_matrix, path

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3
SCENARIO_ORDER = ("right", "left", "both")
DEFAULT_K = {"dtw": 6, "ddtw": 3}
_UNSET = object()  # --window not given: manifest value, else DEFAULT_WINDOW


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _window(text):
    if str(text).lower() in ("none", "unbounded"):
        return None
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("window must be >= 1 (or 'none')")
    return value


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _formats(text):
    items = [s.strip() for s in str(text).split(",") if s.strip()]
    bad = [s for s in items if s not in FORMATS]
    if bad or not items:
        raise argparse.ArgumentTypeError(f"formats must be a subset of {','.join(FORMATS)}")
    return items


def _synth_args(p):
    g = p.add_argument_group("synthetic corpus")
    g.add_argument("--classes", default=",".join(FAMILIES),
                   help="comma-separated curve families (default: %(default)s)")
    g.add_argument("--per-class", type=_positive, default=20)
    g.add_argument("--min-length", type=int, default=80)
    g.add_argument("--max-length", type=int, default=120)
    g.add_argument("--noise", type=float, default=0.05, help="Gaussian noise sd")
    g.add_argument("--synth-seed", type=int, default=42)
    g.add_argument("--no-warp", action="store_true", help="disable random time reparameterization")


def _data_args(p):
    src = p.add_argument_group("data source (exactly one)")
    src.add_argument("--manifest", type=Path, help="dataset manifest (JSON)")
    src.add_argument("--synth", action="store_true", help="generate the synthetic corpus in memory")
    _synth_args(p)
    g = p.add_argument_group("distance")
    g.add_argument("--hand", choices=("left", "right", "both", "all"),
                   help="PSM channels to use (default: the manifest's hand_selection)")
    g.add_argument("--normalization", choices=NORMALIZATIONS,
                   help="per-instance normalization (default: manifest setting, else zscore)")
    g.add_argument("--measure", choices=[m.value for m in Measure], default="dtw")
    g.add_argument("--window", type=_window, default=_UNSET,
                   help="Sakoe-Chiba half-width in samples, or 'none' "
                        f"(default: the manifest's window, else {DEFAULT_WINDOW})")
    g.add_argument("--normalize-by-path", action="store_true",
                   help="divide the cumulative cost by the warp path length")
    g.add_argument("--workers", type=_positive, default=1, help="parallel workers for distances")


def _eval_args(p):
    g = p.add_argument_group("protocol")
    g.add_argument("--protocol", choices=("kfold", "loo"), default="kfold")
    g.add_argument("--folds", type=int, default=10, help="folds for --protocol kfold")
    g.add_argument("--replications", type=_positive, default=100)
    g.add_argument("--seed", type=int, default=0, help="base seed for fold plans")
    g.add_argument("--matrix", type=Path, help="precomputed distance matrix CSV")
    g.add_argument("--out-dir", type=Path, help="directory for report artifacts")
    g.add_argument("--formats", type=_formats, default=list(FORMATS),
                   help="comma-separated subset of %s" % ",".join(FORMATS))


def build_parser():
    parser = _Parser(prog="warpknn", description="DTW/DDTW weighted-kNN trajectory classification")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)
    cmds = {}

    p = cmds["distance"] = sub.add_parser("distance", help="distance between two instances")
    _data_args(p)
    p.add_argument("--a", required=True, help="first instance id")
    p.add_argument("--b", required=True, help="second instance id")
    p.add_argument("--path-out", type=Path, help="write the warp path as CSV")

    p = cmds["matrix"] = sub.add_parser("matrix", help="pairwise distance matrix CSV")
    _data_args(p)
    p.add_argument("--out", type=Path, required=True)

    p = cmds["tune-k"] = sub.add_parser("tune-k", help="accuracy as a function of k")
    _data_args(p)
    _eval_args(p)
    p.add_argument("--k-min", type=_positive, default=1)
    p.add_argument("--k-max", type=_positive, default=10)

    p = cmds["evaluate"] = sub.add_parser("evaluate", help="replicated cross-validation report")
    _data_args(p)
    _eval_args(p)
    p.add_argument("--k", type=_positive, help="neighbours (default: 6 for dtw, 3 for ddtw)")

    p = cmds["synth"] = sub.add_parser("synth", help="write a synthetic corpus and manifest")
    _synth_args(p)
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--layout", choices=("compact", "jigsaws"), default="compact",
                   help="3-column files, or 76-column records with PSM position columns filled")
    p.add_argument("--normalization", choices=NORMALIZATIONS, default="zscore",
                   help="normalization recorded in the generated manifest")
    for p in cmds.values():
        p.add_argument("--config", type=Path, help="JSON file supplying flag defaults")
    return parser, cmds


def parse_args(argv):
    parser, cmds = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config", type=Path)
    known, _ = pre.parse_known_args(argv)
    if known.config is not None and known.command in cmds:
        try:
            cfg = json.loads(known.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config {known.config}: {exc}")
        if not isinstance(cfg, dict):
            parser.error(f"config {known.config} must hold a JSON object")
        sub = cmds[known.command]
        dests = {a.dest: a for a in sub._actions}
        unknown = sorted(set(cfg) - set(dests))
        if unknown:
            parser.error(f"unknown keys in config {known.config}: {', '.join(unknown)}")
        defaults = {}
        for key, value in cfg.items():
            action = dests[key]
            if action.type is not None and value is not None and not isinstance(value, bool):
                value = action.type(str(value)) if action.type is not Path else Path(value)
            defaults[key] = value
        sub.set_defaults(**defaults)
        for key in defaults:
            dests[key].required = False
    return parser.parse_args(argv)


def _synth_spec(args):
    return SynthSpec(
        classes=tuple(c.strip() for c in args.classes.split(",") if c.strip()),
        per_class=args.per_class,
        length_range=(args.min_length, args.max_length),
        noise_sd=args.noise,
        seed=args.synth_seed,
        warp=not args.no_warp,
    )


def _scenarios(args, allow_all=False):
    """Map scenario name -> list of instances for the configured data source."""
    if bool(args.manifest) == bool(args.synth):
        raise UsageError("give exactly one data source: --manifest PATH or --synth")
    window_unset = args.window is _UNSET
    if window_unset:
        args.window = DEFAULT_WINDOW
    if args.synth:
        if args.hand not in (None, "both"):
            raise UsageError("--hand applies to manifest data only")
        policy = args.normalization or "zscore"
        data = [LabeledInstance(normalize(inst.series, policy), inst.label, inst.subject, inst.trial,
                                inst.instance_id) for inst in synth_dataset(_synth_spec(args))]
        return {"synth": data}
    manifest = load_manifest(args.manifest)
    if window_unset and manifest.window is not None:
        args.window = manifest.window
    hands = [args.hand] if args.hand else manifest.hands()
    if hands == ["all"]:
        hands = [h for h in SCENARIO_ORDER if h in manifest.layout.hands]
    if len(hands) > 1 and not allow_all:
        hands = ["both"] if "both" in hands else hands[:1]
    if allow_all:
        hands = sorted(hands, key=lambda h: SCENARIO_ORDER.index(h))
    return {h: build_dataset(manifest, h, args.normalization, args.workers) for h in hands}


def _single(args):
    scen = _scenarios(args)
    (name, data), = scen.items()
    return name, data


def _config(args):
    return WarpConfig(args.window, Measure(args.measure), args.normalize_by_path)


def _by_id(data, instance_id):
    for inst in data:
        if inst.instance_id == instance_id:
            return inst
    raise UnknownInstanceId(f"unknown instance id {instance_id!r}")


def _matrix_for(args, data):
    cfg = _config(args)
    if getattr(args, "matrix", None):
        m = DistanceMatrix.from_csv(args.matrix, cfg)
        ids = [inst.instance_id for inst in data]
        if sorted(m.instance_ids) != sorted(ids):
            raise DataError(f"{args.matrix}: instance ids do not match the dataset")
        return m.reorder(ids)
    return pairwise_matrix(data, cfg, workers=args.workers)


def _protocol(args):
    return Protocol("loo") if args.protocol == "loo" else Protocol("kfold", args.folds)


def cmd_distance(args):
    _, data = _single(args)
    a, b = _by_id(data, args.a), _by_id(data, args.b)
    cfg = _config(args)
    print(repr(distance(a.series, b.series, cfg)))
    if args.path_out:
        wp = path(a.series, b.series, cfg)
        with open(args.path_out, "w") as fh:
            fh.write("i,j\n")
            for i, j in wp.steps:
                fh.write(f"{i},{j}\n")


def cmd_matrix(args):
    _, data = _single(args)
    m = pairwise_matrix(data, _config(args), workers=args.workers)
    m.to_csv(args.out)
    print(f"wrote {len(m)}x{len(m)} {args.measure} matrix to {args.out}")


def _ensure_dir(d):
    if d is None:
        return None
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataError(f"cannot create output directory {d}: {exc.strerror or exc}") from None
    return d


def cmd_tune_k(args):
    if args.k_max < args.k_min:
        raise UsageError("--k-max must be >= --k-min")
    _, data = _single(args)
    labels = [inst.label for inst in data]
    protocol = _protocol(args)
    scores = tune_k(_matrix_for(args, data), labels, range(args.k_min, args.k_max + 1),
                    protocol, args.replications, args.seed)
    label = f"{args.measure} {protocol}"
    print(k_table(scores, label), end="")
    out = _ensure_dir(args.out_dir)
    if out:
        names = {"table": "tune_k.txt", "csv": "tune_k.csv", "plotdata": "tune_k_plotdata.csv"}
        for fmt in args.formats:
            export_results(scores, fmt, out / names[fmt], label)


def cmd_evaluate(args):
    scen = _scenarios(args, allow_all=True)
    if args.matrix and len(scen) > 1:
        raise UsageError("--matrix needs a single hand scenario; pass --hand")
    k = args.k or DEFAULT_K[args.measure]
    protocol = _protocol(args)
    out = _ensure_dir(args.out_dir)
    reports = {}
    for name, data in scen.items():
        labels = [inst.label for inst in data]
        rep = replicate(_matrix_for(args, data), labels, k, protocol, args.replications, args.seed)
        rep.meta.update({"measure": args.measure, "scenario": name,
                         "window": str(args.window), "normalize_by_path": str(args.normalize_by_path)})
        reports[name] = rep
        title = f"{args.measure} {protocol} k={k} [{name}]"
        print(report_table(rep, title))
        if out:
            suffix = "" if len(scen) == 1 else f"_{name}"
            names = {"table": f"report{suffix}.txt", "csv": f"report{suffix}.csv",
                     "plotdata": f"plotdata{suffix}.csv"}
            for fmt in args.formats:
                export_results(rep, fmt, out / names[fmt], title if fmt == "table" else args.measure)
            write_confusion_csv(rep.confusion, out / f"confusion{suffix}.csv")
    if len(scen) > 1:
        table = scenario_table(reports, args.measure, str(protocol))
        print(table, end="")
        if out:
            (out / "scenarios.txt").write_text(table)
            write_scenario_csv(reports, args.measure, str(protocol), out / "scenarios.csv")


def cmd_synth(args):
    out = _ensure_dir(args.out_dir)
    spec = _synth_spec(args)
    manifest = write_corpus(synth_dataset(spec), out, args.layout, args.normalization)
    print(f"wrote {len(spec.classes) * spec.per_class} instances and {manifest}")


COMMANDS = {"distance": cmd_distance, "matrix": cmd_matrix, "tune-k": cmd_tune_k,
            "evaluate": cmd_evaluate, "synth": cmd_synth}


def main(argv=None) -> int:
    args = parse_args(sys.argv[1:] if argv is None else list(argv))
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"warpknn {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"warpknn {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"warpknn {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"warpknn {args.command}: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
