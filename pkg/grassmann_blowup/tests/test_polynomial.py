import sys
import os

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from fractions import Fraction

import numpy as np
import pytest
import sympy
from core.errors import IncompatibleFields, MissingAssignment
from core.linalg import pivot_columns_mod_p, rank_mod_p, solve_mod_p
from core.points import enumerate_points, point_checksum
from core.polynomial import Binomial, Monomial, Polynomial, Var, delta, eps, rho, x

X13, X14, X23, X24 = x((1, 3)), x((1, 4)), x((2, 3)), x((2, 4))


def var(v, field=None):
    return Polynomial.variable(v, field)


def cone(field=None):
    return var(X13, field) * var(X24, field) - var(X14, field) * var(X23, field)


def test_monomial_arithmetic():
    a = Monomial.of(X13, X24)
    b = Monomial({X13: 2})
    assert (a * b).exponent(X13) == 3
    assert a.gcd(b) == Monomial.of(X13)
    assert (a * b).divide(b) == a
    assert a.divide(b) is None
    assert Monomial().is_one()
    assert Monomial({X13: 0}) == Monomial()


# Тест арифметики над ℚ проти sympy
def test_expansion_matches_sympy():
    p = (var(X13) + Fraction(1, 2) * var(X24)) ** 3 - var(X14) * cone()
    s13, s24, s14, s23 = (sympy.Symbol(str(v)) for v in (X13, X24, X14, X23))
    expected = sympy.expand((s13 + sympy.Rational(1, 2) * s24) ** 3 - s14 * (s13 * s24 - s14 * s23))
    assert sympy.simplify(p.to_sympy() - expected) == 0


def test_field_arithmetic():
    p = var(X13, 3) * 2 + var(X13, 3)
    assert p.is_zero()
    assert Polynomial.constant(Fraction(1, 2), 5).constant_value() == 3

    with pytest.raises(IncompatibleFields):
        var(X13) + var(X13, 3)


def test_substitute_and_derivative():
    c = cone()
    assert c.specialize({X13: 0, X14: 0}).is_zero()
    assert c.partial_derivative(X13) == var(X24)
    assert c.partial_derivative(X14) == -var(X23)
    assert c.substitute({X13: var(X14) * var(X23), X24: 1}) == var(X14) * var(X23) - var(X14) * var(X23)
    assert c.collect(X13)[1] == var(X24)

    with pytest.raises(MissingAssignment):
        c.evaluate({X13: 1})


def test_variable_rendering():
    assert str(rho((1, 3), (2, 4))) == "x[(13,24)]"
    assert str(rho((2, 4), (1, 3))) == "x[(13,24)]"
    assert str(x((3, 4))) == "x[34]"
    assert str(eps((3, 4))) == "eps[34]"
    assert str(delta((1, 2), (3, 4))) == "delta[(12,34)]"
    assert str(Var("rho", ((1, 10), (2, 3)))) == "x[(1.10,23)]"


VARIABLES = [X13, X14, X23, X24]


def random_polynomial(rng, field=None, terms=4, max_degree=2):
    poly = Polynomial.constant(int(rng.integers(-3, 4)), field)
    for _ in range(terms):
        exponents = {v: int(rng.integers(0, max_degree + 1)) for v in VARIABLES}
        poly = poly + Polynomial.from_monomial(Monomial(exponents), int(rng.integers(-4, 5)), field)
    return poly


def random_point(rng, field=None):
    bound = field if field else 7
    return {v: int(rng.integers(-bound, bound)) for v in VARIABLES}


# Аксіоми кільця на випадкових многочленах над ℚ та F_5
@pytest.mark.parametrize("field", [None, 5])
def test_ring_axioms_random(field):
    rng = np.random.default_rng(11)
    for _ in range(25):
        a, b, c = (random_polynomial(rng, field) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert a + b == b + a
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c
        assert (a - a).is_zero()
        assert a * Polynomial.constant(1, field) == a
        point = random_point(rng, field)
        value = (a * b + c).evaluate(point)
        expected = a.evaluate(point) * b.evaluate(point) + c.evaluate(point)
        if field:
            assert value % field == expected % field
        else:
            assert value == expected


@pytest.mark.parametrize("field", [None, 7])
def test_leibniz_rule_random(field):
    rng = np.random.default_rng(5)
    for _ in range(25):
        f, g = random_polynomial(rng, field), random_polynomial(rng, field)
        for v in VARIABLES:
            assert (f * g).partial_derivative(v) == f * g.partial_derivative(v) + g * f.partial_derivative(v)


def test_substitution_commutes_with_evaluation():
    rng = np.random.default_rng(3)
    for _ in range(25):
        f, g, h = (random_polynomial(rng) for _ in range(3))
        composed = f.substitute({X13: g, X24: h})
        point = random_point(rng)
        inner = dict(point)
        inner[X13] = g.evaluate(point)
        inner[X24] = h.evaluate(point)
        assert composed.evaluate(point) == f.evaluate(inner)


def test_monomial_quotient():
    b = Binomial(Monomial.of(rho((1, 3), (2, 4)), x((3, 4))), Monomial.of(rho((1, 2), (3, 4)), X13, X24), "main")
    factor = Monomial.of(eps((3, 4)))
    scaled = Polynomial.from_monomial(factor) * b.to_polynomial()
    assert scaled.monomial_quotient(b.to_polynomial()) == factor
    assert cone().monomial_quotient(var(X13) * var(X24) + var(X14) * var(X23)) is None


# Тест лінійної алгебри над F_p
def test_rank_and_solve_mod_p():
    A = np.array([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    assert rank_mod_p(A, 7) == 2
    assert rank_mod_p(np.array([[3, 0], [0, 1]]), 3) == 1
    assert pivot_columns_mod_p(A, 7) == [0, 1]
    assert pivot_columns_mod_p(A, 7, column_order=[2, 1, 0]) == [2, 1]

    M = np.array([[1, 1], [0, 1]])
    solution = solve_mod_p(M, np.array([3, 1]), 5)
    assert list(np.asarray(solution) % 5) == [2, 1]
    assert solve_mod_p(np.array([[1, 1], [1, 1]]), np.array([0, 1]), 5) is None


# Тест переліку точок
def test_enumerate_points_small_systems():
    single = enumerate_points([var(X13)], [X13], 3)
    assert len(single) == 1

    empty = enumerate_points([Polynomial.constant(1)], [X13], 3)
    assert len(empty) == 0


def test_cone_has_33_points_over_f3():
    points = enumerate_points([cone()], [X13, X14, X23, X24], 3)
    assert len(points) == 33
    assert points.exhaustive
    for row in points.rows():
        assert point_checksum([cone()], row, 3) == 0


def test_enumerate_points_with_fixed():
    points = enumerate_points([cone()], [X13, X14, X23, X24], 3, fixed={X13: 1, X14: 0})
    # x24 = 0, x23 довільне
    assert len(points) == 3
    assert set(points.column(X24).tolist()) == {0}


if __name__ == "__main__":
    pytest.main()
