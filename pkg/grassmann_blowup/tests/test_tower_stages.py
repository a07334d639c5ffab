import sys
import os

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest
from core.chart_atlas import main_key, render_label, rho_divisor
from core.errors import ChartBudgetExceeded, InvalidParameters, TowerNonTermination
from core.plucker_model import ModelSystem, residual_certificate
from core.points import enumerate_points
from core.tower import TowerOptions, lambda_o_choices, parse_gate, run_full_tower
from core.verify import pointwise_termination
from stages.wp import WpStage


@pytest.fixture(scope="module")
def gr24_run():
    return run_full_tower(ModelSystem(2, 4, (1, 2)), TowerOptions(primes=(3, 5)))


@pytest.fixture(scope="module")
def gr24_theta_run():
    return run_full_tower(ModelSystem(2, 4, (1, 2)), TowerOptions(primes=(3, 5), truncate_after="theta"))


def test_options_and_policies():
    model = ModelSystem(2, 4, (1, 2))
    assert lambda_o_choices(model, "all") == [(0,), (1,), (2,)]
    assert lambda_o_choices(model, "first") == [(0,)]
    assert lambda_o_choices(model, "explicit:2") == [(2,)]
    assert parse_gate("exact-budget:50") == ("exact-budget", 50)
    assert parse_gate("always") == ("always", None)

    with pytest.raises(InvalidParameters):
        lambda_o_choices(model, "some")
    with pytest.raises(InvalidParameters):
        parse_gate("exact-budget:0")
    with pytest.raises(InvalidParameters):
        TowerOptions(truncate_after="eth")


# ϑ не зачіпає карту, де провідна ϱ-змінна ≡ 1
def test_theta_skips_lead_unit_chart(gr24_run):
    theta = [event for event in gr24_run.events if event.index.stage == "theta"]
    assert len(theta) == 1
    assert sorted(parent for parent, _, _ in theta[0].splits) == ["L1", "L2"]
    assert gr24_run.records["theta"] == [{"k": 1, "charts": 2}]


def test_wp_first_binomial(gr24_run):
    record = next(r for r in gr24_run.records["wp"] if (r["k"], r["tau"]) == (1, 1))
    assert record["rounds"] == 1
    centers = [[render_label(label) for label in event.center]
               for event in gr24_run.events if event.index.stage == "wp" and event.index.tau == 1]
    assert centers == [["X34", "X13"], ["X34", "X24"]]


def test_stages_completed(gr24_run, gr24_theta_run):
    assert gr24_run.completed == ["theta", "wp", "eth"]
    assert gr24_theta_run.completed == ["theta"]
    assert len(gr24_run.summary_rows()) == 2
    manifest = gr24_run.to_manifest()
    assert manifest["final_charts"] == [chart.id for chart in gr24_run.leaves]
    assert not manifest["partial"]


# Показник змінної в члені головного бінома дорівнює табличній кратності її дивізора
def test_multiplicities_match_charts(gr24_run):
    registry = gr24_run.registry
    for chart in gr24_run.leaves:
        for row in chart.main:
            for b in row:
                k, tau = b.index
                for sign, mono in (("+", b.plus), ("-", b.minus)):
                    for var, exp in mono:
                        label = chart.label_of_var(var)
                        assert exp == registry.multiplicity(label, main_key(sign, k, tau)), (chart.id, b.index, var)


def test_plus_terms_square_free_after_wp():
    run = run_full_tower(ModelSystem(2, 4, (1, 2)), TowerOptions(primes=(3,), truncate_after="wp"))
    for chart in run.leaves:
        for row in chart.main:
            for b in row:
                assert all(exp == 1 for _, exp in b.plus)


def test_residuals_follow_from_main_binomials(gr24_theta_run):
    for chart in gr24_theta_run.leaves:
        for k, row in enumerate(chart.residual, start=1):
            for residual in row:
                _, s, t = residual.index
                first, second = chart.main_binomial(k, s), chart.main_binomial(k, t)
                assert residual_certificate(first, second, residual) is not None


# Кожен головний біном завершується в кожній F_p-точці фінальних карт
@pytest.mark.parametrize("p", [3, 5])
def test_main_binomials_terminate_pointwise(gr24_run, p):
    for chart in gr24_run.leaves:
        points = enumerate_points(chart.system(gr24_run.theta_level), chart.variables, p)
        for point in points.rows():
            status = pointwise_termination(chart, point, p)
            assert all(depth is not None for depth in status.values()), chart.id


def system_signatures(run):
    return {frozenset(str(eq) for eq in chart.system(run.theta_level)) for chart in run.leaves}


# Провідна ϱ-змінна x_(m,u_k) після ϑ ніде не зникає на картах, що її містять
@pytest.mark.parametrize("d, n, m, policy", [(2, 4, (1, 2), "all"), (2, 5, (4, 5), "explicit:1,2,1")])
def test_lead_rho_nonvanishing_after_theta(d, n, m, policy):
    model = ModelSystem(d, n, m)
    run = run_full_tower(model, TowerOptions(primes=(3,), truncate_after="theta"), policy)
    checked = 0
    for chart in run.leaves:
        units = run.units(chart)
        for k in range(1, model.upsilon + 1):
            label = rho_divisor(model.lead_pair(k))
            if chart.holds(label):
                assert chart.var_of_label(label) in units, (chart.id, k)
                checked += 1
    assert checked


def test_lead_rho_nonvanishing_pointwise(gr24_theta_run):
    label = rho_divisor(gr24_theta_run.model.lead_pair(1))
    for chart in gr24_theta_run.leaves:
        if not chart.holds(label):
            continue
        var = chart.var_of_label(label)
        points = enumerate_points(chart.system(gr24_theta_run.theta_level), chart.variables, 5)
        assert len(points)
        assert all(points.column(var) % 5)


def test_prune_does_not_change_surviving_equations(gr24_run):
    unpruned = run_full_tower(ModelSystem(2, 4, (1, 2)), TowerOptions(primes=(3, 5), prune=False))
    assert not unpruned.pruned
    assert system_signatures(gr24_run) <= system_signatures(unpruned)
    assert len(unpruned.leaves) >= len(gr24_run.leaves)


# Структурно пропущені центри не мають жодної F_p-точки на карті
@pytest.mark.parametrize("p", [3, 5])
def test_skipped_centers_have_no_points(gr24_run, p):
    for chart_id, _, center in gr24_run.skipped:
        chart = gr24_run.charts[chart_id]
        fixed = {chart.var_of_label(center[0]): 0, chart.var_of_label(center[1]): 0}
        points = enumerate_points(chart.system(gr24_run.theta_level), chart.variables, p, fixed=fixed)
        assert points.exhaustive
        assert len(points) == 0, (chart_id, center)


def test_always_gate_only_adds_blowups(gr24_run):
    forced = run_full_tower(ModelSystem(2, 4, (1, 2)), TowerOptions(primes=(3, 5), gate="always"))
    assert not forced.skipped
    assert len(forced.events) >= len(gr24_run.events)
    assert len(forced.charts) >= len(gr24_run.charts)
    assert not forced.unterminated()
    if not gr24_run.skipped:
        assert system_signatures(forced) == system_signatures(gr24_run)


def test_round_records_and_bound(gr24_run):
    for record in gr24_run.records["wp"] + gr24_run.records["eth"]:
        assert record["rounds"] <= record["bound"] + sum(record["steps"])
        assert all(h >= 1 for h in record["steps"])


def test_round_bound_violation_raises(monkeypatch):
    monkeypatch.setattr(WpStage, "degree_bound", lambda self, k, tau: -1)
    with pytest.raises(TowerNonTermination, match="wp"):
        run_full_tower(ModelSystem(2, 4, (1, 2)), TowerOptions(primes=(3,)))


@pytest.fixture(scope="module")
def gr25_run():
    return run_full_tower(ModelSystem(2, 5, (4, 5)), TowerOptions(primes=(3,)))


# Gr(2,5) з типовими параметрами: вежа завершується, плюс-члени безквадратні, dim T = 6
def test_gr25_tower_completes(gr25_run):
    model = gr25_run.model
    assert gr25_run.completed == ["theta", "wp", "eth"]
    assert not gr25_run.partial
    assert gr25_run.leaves
    assert gr25_run.unterminated() == []
    rows = sum(len(row) for row in model.main) + len(model.linear)
    assert rows == 9
    for chart in gr25_run.leaves:
        assert len(chart.variables) == 15
        assert len(chart.variables) - rows == 6
        for row in chart.main:
            for b in row:
                assert all(exp == 1 for _, exp in b.plus), (chart.id, b.index)


def test_chart_budget():
    with pytest.raises(ChartBudgetExceeded) as info:
        run_full_tower(ModelSystem(2, 4, (1, 2)), TowerOptions(primes=(3,), max_charts=3))
    assert info.value.partial_run is not None
    assert info.value.partial_run.partial


if __name__ == "__main__":
    pytest.main()
