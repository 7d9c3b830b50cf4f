import io

import numpy as np
import pytest

from ppgraph.analysis import AnalysisConfig, analyze
from ppgraph.configfile import dump_sim_spec, parse, sim_spec_from_dict
from ppgraph.pattern import ValidationError, write_pattern
from ppgraph.sim import ClusterType, PoissonType, SimSpec, simulate, structure_of


def test_poisson_counts_unbiased():
    spec = SimSpec({"a": PoissonType(300)})
    counts = np.array([simulate(spec.with_seed(s)).n for s in range(200)])
    # Poisson(300): standard error of the mean is sqrt(300 / 200)
    assert abs(counts.mean() - 300) < 3 * np.sqrt(300 / 200)


def csv_bytes(pattern):
    buf = io.StringIO()
    write_pattern(pattern, buf)
    return buf.getvalue().encode()


def test_same_seed_same_bytes(chain_spec):
    assert csv_bytes(simulate(chain_spec)) == csv_bytes(simulate(chain_spec))
    assert csv_bytes(simulate(chain_spec)) != csv_bytes(simulate(chain_spec.with_seed(3)))


def test_points_in_unit_square(chain_spec, poisson3):
    for spec in (chain_spec, poisson3):
        pat = simulate(spec)
        assert pat.window.is_unit_square
        assert np.all((pat.x >= 0) & (pat.x < 1) & (pat.y >= 0) & (pat.y < 1))
        assert pat.types == spec.labels


def test_structure_examples(chain_spec, poisson3):
    assert structure_of(poisson3) == set()
    assert structure_of(chain_spec) == {("a", "b"), ("b", "c")}
    star = SimSpec({"hub": ClusterType(50, 3, 0.01, (1, 2, 3)),
                    "x": ClusterType(50, 3, 0.01, (1,)), "y": ClusterType(50, 3, 0.01, (2,)),
                    "z": ClusterType(50, 3, 0.01, (3,)), "n": PoissonType(100)})
    assert structure_of(star) == {("hub", "x"), ("hub", "y"), ("hub", "z")}


def test_spec_validation():
    with pytest.raises(ValidationError):
        PoissonType(0)
    with pytest.raises(ValidationError):
        ClusterType(10, 2, -0.1)
    with pytest.raises(ValidationError, match="parent"):
        SimSpec({"a": ClusterType(10, 2, 0.1, (1,)), "b": ClusterType(20, 2, 0.1, (1,))})
    with pytest.raises(ValidationError):
        SimSpec({})


def test_cluster_mean_count():
    spec = SimSpec({"a": ClusterType(100, 2.0, 0.02)})
    counts = [simulate(spec.with_seed(s)).n for s in range(100)]
    # compound Poisson: variance rho * (mu + mu^2)
    se = np.sqrt(100 * (2 + 4) / 100)
    assert abs(np.mean(counts) - 200) < 3 * se


def test_shared_parents_raise_coherence():
    shared = SimSpec({"a": ClusterType(100, 3.0, 0.02, (1,)),
                      "b": ClusterType(100, 3.0, 0.02, (1,))})
    indep = SimSpec({"a": ClusterType(100, 3.0, 0.02, (1,)),
                     "b": ClusterType(100, 3.0, 0.02, (2,))})
    cfg = AnalysisConfig(allow_bivariate=True)
    wins = 0
    for s in range(50):
        x = analyze(simulate(shared.with_seed(s)), cfg).sup[0, 1]
        y = analyze(simulate(indep.with_seed(s)), cfg).sup[0, 1]
        wins += x > y
    assert wins >= 45


def test_config_roundtrip(chain_spec):
    text = dump_sim_spec(chain_spec)
    back = sim_spec_from_dict(parse(text))
    assert back == chain_spec
    mixed = SimSpec({"p": PoissonType(123.5), "c": ClusterType(40, 2.5, 0.03, (2, 5))}, seed=9)
    assert sim_spec_from_dict(parse(dump_sim_spec(mixed))) == mixed


def test_config_errors():
    with pytest.raises(ValidationError, match="unknown model"):
        sim_spec_from_dict({"types": "a", "a.model": "hardcore"})
    with pytest.raises(ValueError, match="duplicate"):
        parse("seed = 1\nseed = 2\n")


def test_shared_middle_type_couples_ends_when_clustering_is_strong():
    # b pools both parent groups, so conditioning on b links a and c: the
    # population partial coherence of (a, c) grows with the offspring mean
    strong = SimSpec({"a": ClusterType(60, 10.0, 0.02, (1,)),
                      "b": ClusterType(60, 10.0, 0.02, (1, 2)),
                      "c": ClusterType(60, 10.0, 0.02, (2,))})
    hits = sum(analyze(simulate(strong.with_seed(s))).graph.has_edge("a", "c") for s in range(10))
    assert hits >= 8
