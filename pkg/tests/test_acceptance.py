import math

import pytest

from generate import generate
from lib.experiments import ARCOL, BASELINE_SCALED, DEFAULT_TARGETS, compare
from lib.models import LayoutConfig

pytestmark = pytest.mark.slow

CORPUS = {"cores": 3, "random": 2, "grids": 1, "cycles": 1}


@pytest.fixture(scope="module")
def sweep():
    graphs = {}
    for family, count in CORPUS.items():
        graphs.update(generate(family, count, seed=11, node_size=20.0))
    result = compare(graphs, DEFAULT_TARGETS, LayoutConfig(restarts=3, seed=11))
    assert result.errors == []
    return result.to_frame()


def test_aspect_ratio_attainment(sweep):
    errors = sweep[sweep["method"] == ARCOL]["ar_error"]
    assert len(errors) == sum(CORPUS.values()) * len(DEFAULT_TARGETS)
    assert (errors <= math.log(1.15)).mean() >= 0.5
    assert (errors <= math.log(1.5)).mean() >= 0.8


@pytest.mark.parametrize("target", ["1:3", "32:9"])
@pytest.mark.parametrize("metric", ["ksm", "eld", "nr"])
def test_beats_post_scaled_baseline_at_extreme_ratios(sweep, target, metric):
    cell = sweep[sweep["target"] == target]
    means = cell.groupby("method")[metric].mean()
    assert means[ARCOL] > means[BASELINE_SCALED]
