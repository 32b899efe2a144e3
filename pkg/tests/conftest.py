import json
import sys
from functools import lru_cache
from pathlib import Path

import pytest

HERE = Path(__file__).parent
sys.path.insert(0, str(HERE))

from warpknn import SynthSpec, WarpConfig, normalize, pairwise_matrix, synth_dataset  # noqa: E402
from warpknn.series import LabeledInstance  # noqa: E402

SPECS = {
    "default": SynthSpec(),
    "hard": SynthSpec(per_class=12, length_range=(30, 50), noise_sd=1.2),
}


@lru_cache(maxsize=None)
def corpus(name):
    data = [LabeledInstance(normalize(x.series, "zscore"), x.label, x.subject, x.trial, x.instance_id)
            for x in synth_dataset(SPECS[name])]
    return data, [x.label for x in data]


@lru_cache(maxsize=None)
def matrix(name, measure):
    return pairwise_matrix(corpus(name)[0], WarpConfig(window=100, measure=measure), workers=4)


@lru_cache(maxsize=None)
def frozen(name):
    return json.loads((HERE / "fixtures" / f"synth_{name}.json").read_text())


@pytest.fixture(scope="session")
def hard():
    data, labels = corpus("hard")
    return {"data": data, "labels": labels, "dtw": matrix("hard", "dtw"),
            "ddtw": matrix("hard", "ddtw"), "frozen": frozen("hard")}


# acceptance gate: one PASS/FAIL line per criterion in the terminal summary

_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or not mark.args:
        return
    num, title = mark.args
    prev = _criteria.get(num, (title, "PASS"))
    if rep.failed or (rep.when == "call" and rep.skipped):
        _criteria[num] = (title, "FAIL")
    elif rep.when == "call":
        _criteria[num] = prev


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        title, status = _criteria[num]
        terminalreporter.write_line(f"criterion {num}: {status}  {title}")
