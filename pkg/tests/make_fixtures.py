"""Regenerate tests/fixtures/*.json with the reference implementations.

    python tests/make_fixtures.py

Slow on purpose (pure-Python DTW). Only rerun when the synthetic generator or
the fold-plan algorithm changes deliberately.
"""
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from warpknn.synth import SynthSpec, synth_dataset  # noqa: E402

HERE = Path(__file__).parent / "fixtures"

CORPORA = {
    "default": SynthSpec(),
    "hard": SynthSpec(per_class=12, length_range=(30, 50), noise_sd=1.2),
}


def corpus(spec):
    data = synth_dataset(spec)
    series = [oracles.zscore(inst.series.samples.tolist()) for inst in data]
    return series, [inst.label for inst in data], [inst.instance_id for inst in data]


def matrix(series, measure, window=100):
    if measure == "ddtw":
        series = [oracles.derivative_series(s) for s in series]
    n = len(series)
    D = [[0.0] * n for _ in range(n)]
    for a, b in oracles.all_pairs(n):
        D[a][b] = D[b][a] = oracles.loop_dtw(series[a], series[b], window)
    return D


def protocol_stats(D, labels, k, n_folds, R, base_seed):
    accs, sens, spes = [], [], []
    for r in range(R):
        plan = oracles.stratified_plan(labels, n_folds, base_seed + r) if n_folds else list(range(len(labels)))
        acc, sen, spe = oracles.weighted_metrics(oracles.cross_validate(D, labels, k, plan))
        accs.append(float(acc))
        sens.append(float(sen))
        spes.append(float(spe))
    return {"accuracy": oracles.mean_sd(accs), "sensitivity": oracles.mean_sd(sens),
            "specificity": oracles.mean_sd(spes)}


def build(name, spec, measures):
    series, labels, ids = corpus(spec)
    out = {"spec": {"per_class": spec.per_class, "length_range": list(spec.length_range),
                    "noise_sd": spec.noise_sd, "seed": spec.seed}, "ids": ids, "measures": {}}
    for measure in measures:
        print(f"{name}/{measure}: distances", flush=True)
        D = matrix(series, measure)
        plan0 = oracles.stratified_plan(labels, 10, 0)
        entry = {
            "spot_distances": [[ids[a], ids[b], D[a][b]] for a, b in [(0, 1), (0, len(ids) - 1), (5, 17)]],
            "fold_plan_seed0": plan0,
            "cv10_k3_seed0_confusion": oracles.cross_validate(D, labels, 3, plan0),
            "tune_k_10fold_R10": {str(k): protocol_stats(D, labels, k, 10, 10, 0)["accuracy"] for k in range(1, 11)},
            "loo": {str(k): protocol_stats(D, labels, k, 0, 1, 0)["accuracy"][0] for k in range(1, 11)},
            "replicate_k3_10fold_R100": protocol_stats(D, labels, 3, 10, 100, 0),
        }
        out["measures"][measure] = entry
    HERE.mkdir(exist_ok=True)
    (HERE / f"synth_{name}.json").write_text(json.dumps(out, indent=1) + "\n")


if __name__ == "__main__":
    build("hard", CORPORA["hard"], ["dtw", "ddtw"])
    build("default", CORPORA["default"], ["dtw"])
