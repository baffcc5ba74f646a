import itertools
import math
from collections import Counter
from pathlib import Path

import numpy as np
import pytest

from catshap import CategoricalDataset, IngestOptions, load_csv

DATA = Path(__file__).parent / "data"


def brute_entropy(rows, idx, base=2.0):
    """Entropy of the projection of ``rows`` on ``idx`` by plain tuple counting."""
    if not idx:
        return 0.0
    counts = Counter(tuple(r[i] for i in idx) for r in rows)
    n = len(rows)
    return -sum(c / n * math.log(c / n, base) for c in counts.values())


def brute_shapley(rows, n_features, base=2.0, max_size=None):
    """Textbook subset-sum Shapley values of the total-correlation game."""
    phi = []
    for i in range(n_features):
        others = [j for j in range(n_features) if j != i]
        total = 0.0
        for s in range(n_features):
            if max_size is not None and s > max_size - 1:
                break
            w = math.factorial(s) * math.factorial(n_features - s - 1) / math.factorial(n_features)
            for a in itertools.combinations(others, s):
                gain = (
                    brute_entropy(rows, list(a), base)
                    + brute_entropy(rows, [i], base)
                    - brute_entropy(rows, sorted(a + (i,)), base)
                )
                total += w * gain
        phi.append(total)
    return phi


def dataset_from_rows(rows, names=None):
    return CategoricalDataset.from_codes(np.asarray(rows, dtype=np.int64), names)


def random_dataset(rng, n_features, n_rows, max_arity=4):
    arities = rng.integers(1, max_arity + 1, size=n_features)
    codes = np.column_stack([rng.integers(a, size=n_rows) for a in arities])
    return CategoricalDataset.from_codes(codes)


@pytest.fixture
def dup_indep():
    """X0 uniform binary, X1 a copy of X0, X2 exactly independent of both."""
    return dataset_from_rows([[0, 0, 0], [0, 0, 1], [1, 1, 0], [1, 1, 1]])


@pytest.fixture(scope="session")
def breast_cancer():
    return load_csv(DATA / "breast_cancer.csv", IngestOptions(drop_columns=["Class"]))


_CRITERIA: dict[int, str] = {}
_STATUS: dict[int, bool] = {}


@pytest.fixture
def criterion(request):
    """Record one summary line per acceptance criterion, PASS unless the test fails."""
    num = request.node.get_closest_marker("criterion").args[0]
    notes: list[str] = []
    yield notes
    _CRITERIA[num] = "; ".join(notes)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None and rep.when == "call":
        _STATUS[marker.args[0]] = rep.passed


def pytest_terminal_summary(terminalreporter, config):
    status = _STATUS
    if not status:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(status):
        line = f"criterion {num:2d}: {'PASS' if status[num] else 'FAIL'}"
        if _CRITERIA.get(num):
            line += f"  ({_CRITERIA[num]})"
        terminalreporter.write_line(line)
