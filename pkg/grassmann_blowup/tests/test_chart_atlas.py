import sys
import os

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest
from core.chart_atlas import (DivisorRegistry, TowerIndex, base_chart, blow_up_chart, divisor_key, exceptional,
                              main_key, quotient_key, render_label, rho_divisor, update_multiplicities, varpi)
from core.errors import CenterMissesChart, InvalidChart
from core.plucker_model import ModelSystem
from core.polynomial import Monomial, Polynomial, delta, eps, rho, rho_pair, x
from core.tower import TowerOptions, run_full_tower

MODEL = ModelSystem(2, 4, (1, 2))
LEAD = ((1, 2), (3, 4))
THETA = (varpi((3, 4)), rho_divisor(LEAD))


def test_base_charts():
    lead_unit = base_chart(MODEL, (0,))
    assert lead_unit.id == "L0"
    assert len(lead_unit.variables) == 7
    assert rho((1, 2), (3, 4)) not in lead_unit.variables
    assert lead_unit.unit_pairs == [LEAD]

    # на L0 x_(12,34) ≡ 1: B_(11) = x_(13,24)·x34 − x13·x24
    b = lead_unit.main_binomial(1, 1)
    assert b.minus == Monomial.of(x((1, 3)), x((2, 4)))

    with pytest.raises(InvalidChart):
        base_chart(MODEL, (3,))


def test_theta_center_misses_lead_unit_chart():
    lead_unit = base_chart(MODEL, (0,))
    assert not lead_unit.holds(*THETA)
    with pytest.raises(CenterMissesChart):
        blow_up_chart(lead_unit, TowerIndex("theta", 1), THETA, 0)


# Тест одного роздуття та власного перетворення
def test_blow_up_proper_transform():
    chart = base_chart(MODEL, (1,))
    index = TowerIndex("theta", 1)
    first = blow_up_chart(chart, index, THETA, 0)
    second = blow_up_chart(chart, index, THETA, 1)

    assert first.id == "L1/theta[1]:0"
    assert eps((3, 4)) in first.variables
    assert delta((1, 2), (3, 4)) in second.variables
    assert first.label_of_var(eps((3, 4))) == exceptional(index)

    # x34 = ε, x_(12,34) = ε·y: член x_(12,34)·x14·x23 ділиться на ε
    b = first.main_binomial(1, 2)
    assert b.plus == Monomial.of(rho((1, 4), (2, 3)))
    assert b.minus == Monomial.of(rho((1, 2), (3, 4)), x((1, 4)), x((2, 3)))


def test_walk_to_base():
    chart = base_chart(MODEL, (1,))
    child = blow_up_chart(chart, TowerIndex("theta", 1), THETA, 0)
    point = {v: 1 for v in child.variables}
    point[eps((3, 4))] = 2
    path = child.walk_to_base(point, 3)
    assert [c.id for c, _ in path] == [child.id, chart.id]
    image = path[-1][1]
    assert image[x((3, 4))] == 2
    assert image[rho((1, 2), (3, 4))] == 2


def test_divisor_order():
    e = exceptional(TowerIndex("wp", 1, 1, 1, 1))
    labels = [varpi((1, 3)), rho_divisor(LEAD), e, exceptional(TowerIndex("theta", 1))]
    ordered = sorted(labels, key=divisor_key)
    assert ordered[0] == exceptional(TowerIndex("theta", 1))
    assert ordered[1] == e
    assert ordered[-1] == varpi((1, 3))
    assert render_label(rho_divisor(LEAD)) == "X(12,34)"
    assert render_label(varpi((3, 4))) == "X34"


def test_registry_multiplicities():
    registry = DivisorRegistry(MODEL)
    assert registry.multiplicity(varpi((3, 4)), main_key("+", 1, 1)) == 1
    assert registry.multiplicity(rho_divisor(LEAD), main_key("-", 1, 2)) == 1
    label = registry.register(TowerIndex("theta", 1), THETA)
    # X34 входить у плюс-член, X_(12,34) у мінус-член: кратності скорочуються
    assert registry.multiplicity(label, main_key("+", 1, 1)) == 0
    assert registry.multiplicity(label, main_key("-", 1, 1)) == 0
    assert label in registry.associated(("s", 1, 0))


def as_monomial(poly):
    (mono,) = poly.terms
    assert poly.terms[mono] == 1
    return mono


# Покрокове перенесення бінома збігається з композицією підстановок після ділення на виняткові множники
def test_transport_is_path_independent_gr24():
    run = run_full_tower(MODEL, TowerOptions(primes=(3, 5), gate="always"))
    charts = [chart for chart in run.charts.values() if chart.parent is not None]
    assert charts
    for chart in charts:
        assert chart.lineage()[-1].parent is None
        originals = [b for row in MODEL.main for b in row] + [b for row in MODEL.residual for b in row]
        stepwise = [b for row in chart.main for b in row] + [b for row in chart.residual for b in row]
        for original, moved in zip(originals, stepwise):
            plus = as_monomial(chart.pull_back(Polynomial.from_monomial(original.plus)))
            minus = as_monomial(chart.pull_back(Polynomial.from_monomial(original.minus)))
            factor = plus.divide(moved.plus)
            assert factor is not None
            assert factor == minus.divide(moved.minus)
            assert all(v.exceptional for v in factor.variables())


def find_quotient(model, plus, minus):
    return next(b for b in model.quotient if {b.plus, b.minus} == {plus, minus})


def test_registry_quotient_tables():
    model = ModelSystem(3, 6, (1, 2, 3))
    registry = DivisorRegistry(model)
    first, second = ((1, 2, 4), (1, 3, 5)), ((1, 3, 4), (1, 2, 5))
    b = find_quotient(model,
                      Monomial.of(rho_pair(first), rho_pair(((1, 3, 4), (1, 2, 6))), rho_pair(((1, 2, 5), (1, 3, 6)))),
                      Monomial.of(rho_pair(second), rho_pair(((1, 2, 4), (1, 3, 6))), rho_pair(((1, 3, 5), (1, 2, 6)))))
    (j,) = b.index
    plus_sign = "+" if rho_pair(first) in b.plus.variables() else "-"
    minus_sign = "-" if plus_sign == "+" else "+"
    assert registry.multiplicity(rho_divisor(first), quotient_key(plus_sign, j)) == 1
    assert registry.multiplicity(rho_divisor(second), quotient_key(minus_sign, j)) == 1
    assert registry.multiplicity(rho_divisor(first), quotient_key(minus_sign, j)) == 0

    # центр з обох членів: кратності скорочуються; з одного члена: додаються
    across = update_multiplicities(model, registry.tables[rho_divisor(first)], registry.tables[rho_divisor(second)])
    assert across.get(quotient_key("+", j), 0) == 0 and across.get(quotient_key("-", j), 0) == 0
    third = ((1, 2, 5), (1, 3, 6))
    same = update_multiplicities(model, registry.tables[rho_divisor(first)], registry.tables[rho_divisor(third)])
    assert same[quotient_key(plus_sign, j)] == 2

    rows = [row for row in registry.to_rows() if row["term"] == f"q{plus_sign}{j}"]
    assert len(rows) == 3


if __name__ == "__main__":
    pytest.main()
