import sys
import os

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest
from core.points import enumerate_points
from core.polynomial import Polynomial, x
from core.vanishing import ZeroPropagation, nonvanishing, support

A, B, C, D, E, F = (x(u) for u in [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])


def p(var):
    return Polynomial.variable(var)


ONE = Polynomial.constant(1)


def test_support_lists_term_variables():
    eq = p(A) * p(B) - p(C) * p(D)
    assert set(support(eq)) == {frozenset({A, B}), frozenset({C, D})}
    assert frozenset() in support(p(A) - ONE)


# Одиничний член, що лишився, змушує свою змінну до нуля
def test_single_term_chain():
    eqs = [p(A) * p(B) - p(C), p(C) * p(D) - ONE]
    solver = ZeroPropagation(eqs, depth=0)
    assert solver.refutes({A})
    assert solver.refutes({C})
    assert solver.refutes({D})
    assert solver.refutes({B})
    assert not ZeroPropagation(eqs[:1], depth=0).refutes({A})


def test_units_close_binomials():
    eqs = [p(A) * p(B) - p(C) * p(D)]
    assert not ZeroPropagation(eqs).refutes({A})
    assert ZeroPropagation(eqs, units={C, D}).refutes({A})
    assert not ZeroPropagation(eqs).refutes({A, C})


# A = C·D, C·(E + F) = 1, D·(E − F) = 1
BRANCHING = [p(A) - p(C) * p(D), p(C) * p(E) + p(C) * p(F) - ONE, p(D) * p(E) - p(D) * p(F) - ONE]


def test_branching_depth():
    eqs = BRANCHING
    solver = ZeroPropagation(eqs)
    assert not solver.refutes({A}, depth=0)
    assert solver.refutes({A}, depth=1)


def test_nonvanishing_collects_units():
    eqs = BRANCHING
    assert nonvanishing(eqs, [A, B, C, D, E, F], depth=0) == frozenset({C, D})
    assert nonvanishing(eqs, [A, B, C, D, E, F]) == frozenset({A, C, D})
    assert nonvanishing(eqs, [B], known={B}) == frozenset({B})


# Спростування ніколи не відкидає справжню точку
@pytest.mark.parametrize("prime", [3, 5])
def test_refutation_is_sound(prime):
    systems = [
        [p(A) * p(B) - p(C) * p(D), p(B) * p(E) - p(F)],
        [p(A) * p(B) - p(C), p(C) * p(D) - ONE],
        [p(A) - p(C) * p(D), p(C) * p(E) - ONE, p(D) * p(F) - ONE],
        [p(A) * p(E) - p(B) * p(D), p(A) * p(F) - p(C) * p(D), p(B) * p(F) - p(C) * p(E)],
    ]
    variables = [A, B, C, D, E, F]
    for eqs in systems:
        solver = ZeroPropagation(eqs, depth=3)
        for i, first in enumerate(variables):
            for second in variables[i:]:
                zero = {first, second}
                if solver.refutes(zero):
                    points = enumerate_points(eqs, variables, prime, fixed={v: 0 for v in zero})
                    assert len(points) == 0, (eqs, zero)


if __name__ == "__main__":
    pytest.main()
