import io
import sys
import warnings

import numpy as np
import pytest

from ppgraph.pattern import MultiTypePointPattern, ObservationWindow
from ppgraph.sim import ClusterType, PoissonType, SimSpec

LANSING_COUNTS = {"blackoak": 135, "hickory": 702, "maple": 514, "misc": 105,
                  "redoak": 346, "whiteoak": 448}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_pattern(rng, counts, window=(0.0, 0.0, 1.0, 1.0)):
    x0, y0, x1, y1 = window
    labels = list(counts)
    xs, ys, ms = [], [], []
    for m, label in enumerate(labels):
        n = counts[label]
        xs.append(rng.uniform(x0, x1, n))
        ys.append(rng.uniform(y0, y1, n))
        ms.append(np.full(n, m))
    return MultiTypePointPattern(ObservationWindow(*window), labels, np.concatenate(xs),
                                 np.concatenate(ys), np.concatenate(ms))


def pattern_csv(pattern, type_col="type") -> bytes:
    buf = io.StringIO()
    buf.write(f"x,y,{type_col}\n")
    for x, y, m in zip(pattern.x, pattern.y, pattern.marks):
        buf.write(f"{float(x)!r},{float(y)!r},{pattern.types[m]}\n")
    return buf.getvalue().encode()


@pytest.fixture
def poisson3():
    return SimSpec({"a": PoissonType(300), "b": PoissonType(300), "c": PoissonType(300)}, seed=1)


@pytest.fixture
def chain_spec():
    return SimSpec({"a": ClusterType(150, 2.0, 0.02, (1,)),
                    "b": ClusterType(150, 2.0, 0.02, (1, 2)),
                    "c": ClusterType(150, 2.0, 0.02, (2,))}, seed=2)


@pytest.fixture(autouse=True)
def _quiet_runtime_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        terminalreporter.write_line(results[key])
