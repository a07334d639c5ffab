from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from core.chart_atlas import Chart
from core.gamma import GammaResult, GammaScheme, GammaState
from core.linalg import rank_mod_p
from core.plucker_model import ModelSystem
from core.points import enumerate_points, evaluate_columns
from core.polynomial import Monomial, Polynomial, Var, rho_pair, x


@dataclass
class BlockClassification:
    """
    Блок J* для F_k у точці z: головні біноми розбито на оригінальні та внутрішні,
    для внутрішніх указано завершальну центральну змінну.
    """
    k: int
    case: str
    original: List[int]
    intrinsic: List[int]
    terminating: Dict[int, Optional[Var]]
    rows: List[Tuple[str, tuple, Polynomial]]
    designated: List[Var]
    used: List[Var] = field(default_factory=list)


@dataclass
class ChartReport:
    id: str
    points: int = 0
    expected_rank: int = 0
    min_rank: Optional[int] = None
    failures: List[dict] = field(default_factory=list)
    cases: Dict[str, int] = field(default_factory=dict)
    tangent_dimensions: List[int] = field(default_factory=list)
    dimension_mismatches: int = 0
    column_fallbacks: int = 0
    exhaustive: bool = True

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "points": self.points,
            "expected_rank": self.expected_rank,
            "min_rank": self.min_rank,
            "failures": self.failures,
            "cases": dict(sorted(self.cases.items())),
            "tangent_dimensions": sorted(set(self.tangent_dimensions)),
            "dimension_mismatches": self.dimension_mismatches,
            "column_fallbacks": self.column_fallbacks,
            "exhaustive": self.exhaustive,
        }


@dataclass
class SmoothnessReport:
    verdict: str
    primes: Tuple[int, ...]
    charts: List[ChartReport]
    undecided: List[str] = field(default_factory=list)
    partial: bool = False

    @property
    def failures(self) -> List[dict]:
        return [dict(f, chart=c.id) for c in self.charts for f in c.failures]

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "primes": list(self.primes),
            "undecided": list(self.undecided),
            "partial": self.partial,
            "charts": [c.to_dict() for c in self.charts],
        }

    def summary_rows(self) -> List[dict]:
        return [{"chart": c.id, "points": c.points, "expected_rank": c.expected_rank, "min_rank": c.min_rank,
                 "failures": len(c.failures), "dims": ",".join(map(str, sorted(set(c.tangent_dimensions))))}
                for c in self.charts]


def _monomial_value(mono: Monomial, point: Dict[Var, int], p: int) -> int:
    value = 1
    for var, exp in mono:
        value = (value * pow(int(point[var]), exp, p)) % p
    return value


def _value(poly: Polynomial, point: Dict[Var, int], p: int) -> int:
    return int(poly.to_field(p).evaluate(point)) % p


def pointwise_termination(chart: Chart, point: Dict[Var, int], p: int) -> Dict[Tuple[int, int], Optional[int]]:
    """
    Для кожного головного бінома: номер першого предка (0: базова карта), на якому
    в образі точки хоча б один член бінома ненульовий; None, якщо такого немає.
    """
    path = chart.walk_to_base(point, p)[::-1]
    out = {}
    for k, tau in chart.model.binomial_indices():
        out[(k, tau)] = None
        for depth, (ancestor, image) in enumerate(path):
            b = ancestor.main_binomial(k, tau)
            if _monomial_value(b.plus, image, p) or _monomial_value(b.minus, image, p):
                out[(k, tau)] = depth
                break
    return out


def classify_blocks(point: Dict[Var, int], chart: Chart, state: GammaState, p: int,
                    termination: Optional[Dict[Tuple[int, int], Optional[int]]] = None) -> List[BlockClassification]:
    """
    Розбиває головні біноми кожного F_k на оригінальні (завершуються на базовій карті)
    та внутрішні і призначає стовпці J* за випадками α / β / γ.
    """
    model = chart.model
    termination = termination if termination is not None else pointwise_termination(chart, point, p)
    lineage = chart.lineage()[::-1]
    pins = state.pins()
    blocks = []
    for k, F in enumerate(model.family, start=1):
        taus = list(range(1, len(F.terms)))
        original = [tau for tau in taus if termination[(k, tau)] == 0]
        intrinsic = [tau for tau in taus if termination[(k, tau)] not in (None, 0)]
        terminating = {}
        for tau in intrinsic:
            into = lineage[termination[(k, tau)]]
            terminating[tau] = chart.variable(into.transition.other)
        s_o = chart.lambda_o[k - 1]
        if not original:
            case = "alpha"
        elif s_o == 0:
            case = "beta"
        else:
            case = "gamma"

        rows = []
        for tau in original + intrinsic:
            poly = chart.main_binomial(k, tau).to_polynomial()
            if not poly.specialize({v: c for v, c in pins.items() if v in poly.variables()}).is_zero():
                rows.append(("main", (k, tau), poly))
        if k in state.alive:
            rows.append(("linear", (k,), chart.linear[k - 1]))

        designated = []
        if case == "alpha":
            for s, term in enumerate(F.terms):
                slot = ("r", term.pair)
                if slot not in chart.slots:
                    continue
                image = chart.pull_back(Polynomial.variable(rho_pair(term.pair)))
                if _value(image, point, p):
                    designated.append(chart.variable(slot))
        else:
            designated.append(chart.variable(("w", F.leading)))
            if case == "gamma" and ("r", F.terms[0].pair) in chart.slots:
                designated.append(chart.variable(("r", F.terms[0].pair)))
            for tau in original:
                slot = ("r", F.terms[tau].pair)
                if slot in chart.slots:
                    designated.append(chart.variable(slot))
        designated.extend(terminating[tau] for tau in intrinsic)
        blocks.append(BlockClassification(k, case, original, intrinsic, terminating, rows, designated))
    return blocks


class JacobianContext:
    """Кеш часткових похідних рядків карти по незакріплених змінних."""

    def __init__(self, chart: Chart, state: GammaState):
        self.chart = chart
        pins = state.pins()
        self.free = [v for v in chart.variables if v not in pins]
        self._cache: Dict[tuple, Dict[Var, Polynomial]] = {}

    def gradient(self, key: tuple, poly: Polynomial) -> Dict[Var, Polynomial]:
        if key not in self._cache:
            self._cache[key] = {v: poly.partial_derivative(v) for v in poly.variables() if v in self.free}
        return self._cache[key]

    def row_values(self, key: tuple, poly: Polynomial, point: Dict[Var, int], p: int) -> Dict[Var, int]:
        return {v: _value(d, point, p) for v, d in self.gradient(key, poly).items()}


def assemble_jstar(blocks: List[BlockClassification], context: JacobianContext, point: Dict[Var, int],
                   p: int) -> Tuple[np.ndarray, int, List[Var]]:
    """
    Складає J* блоками k = 1..Υ. Спершу пробуються призначені стовпці, далі: приємні змінні
    (нульові похідні в рядках попередніх блоків), поки ранг блоку не дорівнює кількості рядків.

    :return: (матриця над F_p, її ранг, список використаних стовпців).
    """
    used: List[Var] = []
    earlier: List[Dict[Var, int]] = []
    all_rows: List[Dict[Var, int]] = []
    for block in blocks:
        values = [context.row_values(key, poly, point, p) for _, key, poly in block.rows]
        pleasant = [v for v in context.free if v not in used and v not in block.designated
                    and all(row.get(v, 0) == 0 for row in earlier)]
        candidates = [v for v in block.designated if v in context.free and v not in used] + pleasant
        chosen: List[Var] = []
        for var in candidates:
            if len(chosen) == len(values):
                break
            trial = chosen + [var]
            matrix = np.array([[row.get(v, 0) for v in trial] for row in values], dtype=np.int64)
            if rank_mod_p(matrix, p) > len(chosen):
                chosen.append(var)
        block.used = chosen
        used.extend(chosen)
        earlier.extend(values)
        all_rows.extend(values)
    matrix = np.array([[row.get(v, 0) for v in used] for row in all_rows], dtype=np.int64).reshape(len(all_rows), len(used))
    return matrix, rank_mod_p(matrix, p), used


def full_jacobian_rank(context: JacobianContext, equations: List[Polynomial], point: Dict[Var, int], p: int) -> int:
    rows = [context.row_values(("eq", i), eq, point, p) for i, eq in enumerate(equations)]
    matrix = np.array([[row.get(v, 0) for v in context.free] for row in rows], dtype=np.int64)
    return rank_mod_p(matrix.reshape(len(rows), len(context.free)), p)


def certify_chart(state: GammaState, theta_level: int, primes: Tuple[int, ...], exhaustive_threshold: int = 14,
                  sample_budget: int = 100000, seed: int = 0) -> ChartReport:
    chart = state.chart
    report = ChartReport(chart.id)
    context = JacobianContext(chart, state)
    equations = state.equations(theta_level)
    pins = state.pins()
    for p in primes:
        points = enumerate_points(equations, chart.variables, p, exhaustive_threshold, sample_budget, seed, pins)
        report.exhaustive = report.exhaustive and points.exhaustive
        for i, point in enumerate(points.rows()):
            report.points += 1
            termination = pointwise_termination(chart, point, p)
            stuck = sorted(index for index, depth in termination.items() if depth is None)
            if stuck:
                report.failures.append({"prime": p, "point": i, "reason": "nonterminating",
                                        "binomials": [list(index) for index in stuck]})
                continue
            blocks = classify_blocks(point, chart, state, p, termination)
            rows = sum(len(block.rows) for block in blocks)
            report.expected_rank = rows
            matrix, rank, _ = assemble_jstar(blocks, context, point, p)
            for block in blocks:
                report.cases[block.case] = report.cases.get(block.case, 0) + 1
                if [v for v in block.used if v not in block.designated]:
                    report.column_fallbacks += 1
            report.min_rank = rank if report.min_rank is None else min(report.min_rank, rank)
            full = full_jacobian_rank(context, equations, point, p)
            report.tangent_dimensions.append(len(context.free) - full)
            if full != rows:
                report.dimension_mismatches += 1
            if rank < rows:
                weak = next((b.k for b in blocks if len(b.used) < len(b.rows)), None)
                report.failures.append({"prime": p, "point": i, "reason": "rank", "rank": rank, "rows": rows,
                                        "block": weak,
                                        "assignment": {str(v): int(c) for v, c in sorted(point.items())}})
    return report


def certify(result: GammaResult, primes: Tuple[int, ...] = (3, 5, 7), exhaustive_threshold: int = 14,
            sample_budget: int = 100000, seed: int = 0, n_jobs: int = 1) -> SmoothnessReport:
    """
    Перевіряє повний ранг J* у кожній переліченій F_p-точці кожної непорожньої фінальної карти.

    :return: SmoothnessReport з вердиктом PASS / FAIL / PARTIAL.
    """
    level = result.run.theta_level
    states = sorted(result.active(), key=lambda s: s.chart.id)
    print(f"[verify] {len(states)} charts, primes {list(primes)}")
    reports = Parallel(n_jobs=n_jobs)(
        delayed(certify_chart)(state, level, tuple(primes), exhaustive_threshold, sample_budget, seed)
        for state in states
    )
    undecided = sorted(state.chart.id for state in result.undecided())
    failed = any(r.failures for r in reports)
    if failed:
        verdict = "FAIL"
    elif undecided or result.run.partial:
        verdict = "PARTIAL"
    else:
        verdict = "PASS"
    print(f"[verify] verdict {verdict}")
    return SmoothnessReport(verdict, tuple(primes), list(reports), undecided, result.run.partial)


def input_singularities(model: ModelSystem, scheme: GammaScheme, p: int, **options) -> List[Dict[Var, int]]:
    """
    F_p-точки Z_Γ, у яких ранг якобіана F̄ (по координатах поза Γ) нижчий за максимальний.
    """
    free = [x(u) for u in model.plucker_indices if u not in scheme.gamma]
    fixed = {x(u): 0 for u in scheme.gamma}
    points = enumerate_points(scheme.equations(model), [x(u) for u in model.plucker_indices], p,
                              fixed=fixed, **options)
    if not len(points):
        return []
    columns = {v: points.column(v) for v in points.variables}
    size = len(points)
    tensor = np.zeros((size, len(model.fbar), len(free)), dtype=np.int64)
    for i, eq in enumerate(model.fbar):
        eq = eq.specialize({v: 0 for v in fixed if v in eq.variables()})
        for j, var in enumerate(free):
            derivative = eq.partial_derivative(var)
            if not derivative.is_zero():
                tensor[:, i, j] = evaluate_columns(derivative, columns, p, size)
    ranks = [rank_mod_p(tensor[i], p) for i in range(size)]
    top = max(ranks)
    return [points.row(i) for i in range(size) if ranks[i] < top]
