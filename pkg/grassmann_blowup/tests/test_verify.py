import sys
import os

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest
from core.gamma import birationality_check, make_gamma, run_gamma_pipeline
from core.plucker_model import ModelSystem
from core.polynomial import rho, x
from core.tower import TowerOptions, run_full_tower
from core.verify import certify, classify_blocks, input_singularities, pointwise_termination

PRIMES = (3, 5)


def pipeline(gamma, truncate_after=None):
    run = run_full_tower(ModelSystem(2, 4, (1, 2)), TowerOptions(primes=PRIMES, truncate_after=truncate_after))
    return run_gamma_pipeline(run, make_gamma(run.model, gamma), primes=PRIMES)


@pytest.fixture(scope="module")
def smooth_result():
    return pipeline([])


@pytest.fixture(scope="module")
def cone_result():
    return pipeline([(3, 4)])


# Γ = ∅: J* розміру 3 повного рангу, dim T = 4
def test_grassmannian_is_smooth(smooth_result):
    report = certify(smooth_result, PRIMES)
    assert report.verdict == "PASS"
    tested = [chart for chart in report.charts if chart.points]
    assert tested
    for chart in tested:
        assert chart.expected_rank == 3
        assert chart.min_rank == 3
        assert set(chart.tangent_dimensions) == {4}
        assert chart.dimension_mismatches == 0


def test_base_points_are_original(smooth_result):
    state = smooth_result.base_states["L0"]
    chart = state.chart
    # усі члени обох біномів ненульові: x_(13,24)·x34 = x13·x24 = 2, x_(14,23)·x34 = x14·x23 = 1
    values = {(1, 3): 1, (2, 4): 2, (1, 4): 1, (2, 3): 1, (3, 4): 1}
    point = {x(u): c for u, c in values.items()}
    point[rho((1, 3), (2, 4))] = 2
    point[rho((1, 4), (2, 3))] = 1
    termination = pointwise_termination(chart, point, 3)
    assert set(termination.values()) == {0}
    blocks = classify_blocks(point, chart, state, 3, termination)
    assert len(blocks) == 1
    assert blocks[0].case == "beta"
    assert blocks[0].original == [1, 2]


# Конус: вхід сингулярний у початку координат, результат гладкий
def test_cone_is_resolved(cone_result):
    singular = input_singularities(cone_result.run.model, cone_result.scheme, 3)
    assert {x(u): 0 for u in cone_result.run.model.plucker_indices} in singular

    report = certify(cone_result, PRIMES)
    assert report.verdict == "PASS"
    assert not report.failures


def test_cone_birationality(cone_result):
    for p in PRIMES:
        check = birationality_check(cone_result, p)
        assert check["input"] > 0
        assert check["match"]
        assert check["injective"]
        assert check["max_fibre"] == 1
        assert not check["collisions"]


def test_smooth_birationality(smooth_result):
    check = birationality_check(smooth_result, 3)
    assert check["match"]
    assert check["injective"]


# Без ℘ і ð сертифікат не проходить
def test_truncated_tower_fails():
    result = pipeline([(3, 4)], truncate_after="theta")
    report = certify(result, PRIMES)
    assert report.verdict == "FAIL"
    assert report.failures


def test_report_is_deterministic(cone_result):
    first = certify(cone_result, PRIMES).to_dict()
    second = certify(pipeline([(3, 4)]), PRIMES).to_dict()
    assert first == second


if __name__ == "__main__":
    pytest.main()
