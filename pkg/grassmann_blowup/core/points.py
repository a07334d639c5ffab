from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from core.errors import MissingAssignment
from core.polynomial import Polynomial, Var

EXHAUSTIVE_PRIME_LIMIT = 7


@dataclass
class PointSet:
    """
    Точки системи над F_p: рядок масиву values: одне присвоєння змінних variables.
    exhaustive = False означає, що під час перебору фронт обрізався випадковою вибіркою.
    """
    variables: tuple
    values: np.ndarray
    prime: int
    exhaustive: bool = True
    column_index: Dict[Var, int] = field(init=False, repr=False)

    def __post_init__(self):
        self.column_index = {v: i for i, v in enumerate(self.variables)}

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def column(self, var: Var) -> np.ndarray:
        return self.values[:, self.column_index[var]]

    def row(self, i: int) -> Dict[Var, int]:
        return {v: int(self.values[i, j]) for j, v in enumerate(self.variables)}

    def rows(self):
        for i in range(len(self)):
            yield self.row(i)


@dataclass(frozen=True)
class PointRecord:
    chart_id: str
    prime: int
    assignment: tuple
    checksum: int

    def as_dict(self) -> Dict[Var, int]:
        return dict(self.assignment)


def evaluate_columns(poly: Polynomial, columns: Dict[Var, np.ndarray], p: int, size: int) -> np.ndarray:
    """Векторизоване обчислення многочлена в рядках над F_p."""
    poly = poly.to_field(p)
    total = np.zeros(size, dtype=np.int64)
    for mono, coef in poly.terms.items():
        term = np.full(size, coef % p, dtype=np.int64)
        for var, exp in mono:
            if var not in columns:
                raise MissingAssignment(f"no column for {var}")
            col = columns[var]
            for _ in range(exp):
                term = (term * col) % p
        total = (total + term) % p
    return total


def _variable_order(equations: List[Polynomial], variables: Sequence[Var]) -> List[Var]:
    """
    Жадібний порядок змінних: спершу ті, що завершують найбільше рівнянь,
    щоб фільтрація фронту відбувалася якомога раніше.
    """
    var_sets = [eq.variables() for eq in equations]
    occurrences = {v: sum(1 for s in var_sets if v in s) for v in variables}
    assigned: set = set()
    order: List[Var] = []
    remaining = list(variables)
    while remaining:
        def score(v):
            trial = assigned | {v}
            completed = sum(1 for s in var_sets if v in s and s <= trial)
            return (completed, occurrences[v])

        best = max(remaining, key=lambda v: (score(v), -remaining.index(v)))
        order.append(best)
        assigned.add(best)
        remaining.remove(best)
    return order


def enumerate_points(equations: Iterable[Polynomial], variables: Sequence[Var], p: int,
                     exhaustive_threshold: int = 14, sample_budget: int = 100000, seed: int = 0,
                     fixed: Optional[Dict[Var, int]] = None) -> PointSet:
    """
    Перелічує точки системи рівнянь над F_p пошуком з поверненням у векторизованій формі.

    :param equations: Рівняння системи.
    :param variables: Усі змінні карти (разом із закріпленими).
    :param p: Просте число.
    :param exhaustive_threshold: Повний перебір, якщо вільних змінних не більше і p ≤ 7.
    :param sample_budget: Розмір фронту, до якого він обрізається у режимі вибірки.
    :param seed: Зерно генератора для відтворюваної вибірки.
    :param fixed: Змінні з наперед заданими значеннями (закріплені 0/1).
    :return: PointSet у порядку variables.
    """
    fixed = {v: int(c) % p for v, c in (fixed or {}).items()}
    variables = tuple(variables)
    free = [v for v in variables if v not in fixed]
    eqs = []
    for eq in equations:
        eq = eq.to_field(p)
        if fixed:
            eq = eq.specialize({v: c for v, c in fixed.items() if v in eq.variables()})
        if eq.is_zero():
            continue
        if eq.is_constant():
            return PointSet(variables, np.zeros((0, len(variables)), dtype=np.int64), p, True)
        extra = eq.variables() - set(free)
        if extra:
            raise MissingAssignment(f"equation uses unknown variables: {sorted(map(str, extra))}")
        eqs.append(eq)

    cap = None if (len(free) <= exhaustive_threshold and p <= EXHAUSTIVE_PRIME_LIMIT) else sample_budget
    rng = np.random.default_rng(seed)
    order = _variable_order(eqs, free)
    position = {v: i for i, v in enumerate(order)}
    pending = list(eqs)
    exhaustive = True

    frontier = np.zeros((1, 0), dtype=np.int64)
    digits = np.arange(p, dtype=np.int64)
    for step, var in enumerate(order):
        size = frontier.shape[0]
        frontier = np.hstack([np.repeat(frontier, p, axis=0), np.tile(digits, size).reshape(-1, 1)])
        ready = [eq for eq in pending if all(position[v] <= step for v in eq.variables())]
        if ready:
            pending = [eq for eq in pending if eq not in ready]
            columns = {v: frontier[:, position[v]] for v in order[:step + 1]}
            mask = np.ones(frontier.shape[0], dtype=bool)
            for eq in ready:
                mask &= evaluate_columns(eq, columns, p, frontier.shape[0]) == 0
            frontier = frontier[mask]
        if frontier.shape[0] == 0:
            break
        if cap is not None and frontier.shape[0] > cap:
            keep = np.sort(rng.choice(frontier.shape[0], size=cap, replace=False))
            frontier = frontier[keep]
            exhaustive = False

    if not order:
        frontier = np.zeros((1, 0), dtype=np.int64)
    count = frontier.shape[0] if (order == [] or frontier.shape[1] == len(order)) else 0
    values = np.zeros((count, len(variables)), dtype=np.int64)
    for j, v in enumerate(variables):
        if v in fixed:
            values[:, j] = fixed[v]
        elif count:
            values[:, j] = frontier[:, position[v]]
    return PointSet(variables, values, p, exhaustive)


def point_checksum(equations: Iterable[Polynomial], point: Dict[Var, int], p: int) -> int:
    """Сума значень рівнянь у точці (має бути 0 для точки системи)."""
    return sum(int(eq.to_field(p).evaluate(point)) for eq in equations) % p


def make_record(chart_id: str, point: Dict[Var, int], equations, p: int) -> PointRecord:
    return PointRecord(chart_id, p, tuple(sorted(point.items())), point_checksum(equations, point, p))
