import json
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from core.chart_atlas import Chart
from core.errors import InvalidChart, InvalidParameters, UndecidedOracle
from core.indices import IndexTuple, enumerate_index_set, render_index, render_pair
from core.linalg import pivot_columns_mod_p, rank_mod_p, solve_mod_p
from core.plucker_model import ModelSystem
from core.points import PointSet, enumerate_points, evaluate_columns
from core.polynomial import Polynomial, Var, rho_pair, x
from core.tower import BlowupEvent, TowerRun

CONVENTIONS = ("rank", "intersection")


@dataclass
class Matroid:
    """
    Матроїд рангу d на [1, n].

    convention='rank': values: функція рангу r_I, вершина e_u належить багатограннику,
    якщо |u ∩ I| ≤ r_I для всіх I. convention='intersection': values: d_I = d − r_{[n]∖I},
    вершина належить, якщо |u ∩ I| ≥ d_I. Невказані множини отримують значення рівномірного матроїда.
    """
    d: int
    n: int
    values: Dict[FrozenSet[int], int] = field(default_factory=dict)
    convention: str = "rank"

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise InvalidParameters(f"unknown matroid convention '{self.convention}'")
        if not (1 <= self.d < self.n):
            raise InvalidParameters(f"require 1 ≤ d < n (got d={self.d}, n={self.n})")
        ground = range(1, self.n + 1)
        given = {frozenset(key): int(value) for key, value in self.values.items()}
        for key in given:
            if not key <= set(ground):
                raise InvalidParameters(f"subset {sorted(key)} is not inside [1, {self.n}]")
        full = {}
        for size in range(self.n + 1):
            for subset in combinations(ground, size):
                key = frozenset(subset)
                full[key] = given.get(key, self._uniform(size))
        self.values = full
        self._validate()

    def _uniform(self, size: int) -> int:
        if self.convention == "rank":
            return min(size, self.d)
        return max(0, self.d - (self.n - size))

    def _validate(self):
        everything = frozenset(range(1, self.n + 1))
        if self.values[frozenset()] != 0 or self.values[everything] != self.d:
            raise InvalidParameters("matroid must have value 0 on ∅ and d on [n]")
        rank = self.rank_function()
        for key, value in rank.items():
            if not 0 <= value <= len(key):
                raise InvalidParameters(f"rank of {sorted(key)} must lie in [0, {len(key)}]")
        keys = list(rank)
        for a in keys:
            for b in keys:
                if rank[a] + rank[b] < rank[a | b] + rank[a & b]:
                    raise InvalidParameters(f"submodularity fails for {sorted(a)} and {sorted(b)}")

    def rank_function(self) -> Dict[FrozenSet[int], int]:
        if self.convention == "rank":
            return dict(self.values)
        everything = frozenset(range(1, self.n + 1))
        return {key: self.d - self.values[everything - key] for key in self.values}

    def contains(self, u: IndexTuple) -> bool:
        """Чи лежить вершина e_u в матроїдному багатограннику."""
        members = set(u)
        for key, value in self.values.items():
            hits = len(members & key)
            if self.convention == "rank" and hits > value:
                return False
            if self.convention == "intersection" and hits < value:
                return False
        return True

    @classmethod
    def uniform(cls, d: int, n: int) -> "Matroid":
        return cls(d, n)

    @classmethod
    def from_dict(cls, data: dict, convention: str = "rank") -> "Matroid":
        values = {}
        for key, value in data.get("dI", {}).items():
            try:
                subset = json.loads(key)
            except json.JSONDecodeError:
                raise InvalidParameters(f"cannot parse subset key '{key}'")
            values[frozenset(int(i) for i in subset)] = int(value)
        return cls(int(data["d"]), int(data["n"]), values, data.get("convention", convention))


@dataclass(frozen=True)
class GammaScheme:
    """Γ-схема Z_Γ на карті U_m: x_u = 0 для u ∈ Γ. Інтегральність задається користувачем."""
    m: IndexTuple
    gamma: Tuple[IndexTuple, ...]
    integral: bool = True

    def variables(self) -> List[Var]:
        return [x(u) for u in self.gamma]

    def equations(self, model: ModelSystem) -> List[Polynomial]:
        return list(model.fbar) + [Polynomial.variable(x(u)) for u in self.gamma]

    def to_dict(self) -> dict:
        return {"m": list(self.m), "gamma": [render_index(u) for u in self.gamma], "integral": self.integral}


def make_gamma(model: ModelSystem, gamma: Iterable[IndexTuple], integral: bool = True) -> GammaScheme:
    members = sorted({tuple(u) for u in gamma})
    allowed = set(model.plucker_indices)
    for u in members:
        if u not in allowed:
            raise InvalidParameters(f"x{render_index(u)} is not a chart variable for m={render_index(model.m)}")
    return GammaScheme(model.m, tuple(members), integral)


def gamma_from_matroid(matroid: Matroid, m: IndexTuple) -> GammaScheme:
    """
    Γ = {u : e_u поза матроїдним багатогранником}.

    :raises InvalidChart: Якщо сама вершина m поза багатогранником.
    """
    m = tuple(m)
    if not matroid.contains(m):
        raise InvalidChart(f"vertex x{render_index(m)} is outside the matroid polytope; chart is incompatible")
    gamma = tuple(u for u in enumerate_index_set(matroid.d, matroid.n) if u != m and not matroid.contains(u))
    return GammaScheme(m, gamma, True)


def thin_cell_equations(matroid: Matroid, m: IndexTuple) -> Tuple[List[IndexTuple], List[IndexTuple]]:
    """Тонка клітина на карті m: (координати, що зникають, координати, що не зникають)."""
    scheme = gamma_from_matroid(matroid, m)
    nonzero = [u for u in enumerate_index_set(matroid.d, matroid.n) if u != tuple(m) and u not in scheme.gamma]
    return list(scheme.gamma), nonzero


def gamma_relevance(model: ModelSystem, k: int, gamma: Iterable[IndexTuple]) -> str:
    """F_k Γ-нерелевантне, якщо кожен член F̄_k містить змінну з Γ."""
    members = {x(u) for u in gamma}
    for mono in model.fbar[k - 1].terms:
        if not (mono.variables() & members):
            return "relevant"
    return "irrelevant"


@dataclass(frozen=True)
class RankRecord:
    rank: int
    witnesses: int
    prime: Optional[int] = None
    point: Optional[int] = None


def evaluate_matrix(entries: List[List[Polynomial]], points: PointSet) -> np.ndarray:
    """Значення матриці многочленів у кожній точці: масив (точки, рядки, стовпці)."""
    size = len(points)
    columns = {v: points.column(v) for v in points.variables}
    rows, cols = len(entries), len(entries[0]) if entries else 0
    out = np.zeros((size, rows, cols), dtype=np.int64)
    for i, row in enumerate(entries):
        for j, entry in enumerate(row):
            if not entry.is_zero():
                out[:, i, j] = evaluate_columns(entry, columns, points.prime, size)
    return out


def generic_rank(entries: List[List[Polynomial]], point_sets: List[PointSet]) -> RankRecord:
    """
    Максимальний ранг матриці по перелічених точках усіх простих.

    :raises UndecidedOracle: Якщо точок немає.
    """
    if not any(len(ps) for ps in point_sets):
        raise UndecidedOracle("no points to evaluate the linear system at")
    if not entries:
        return RankRecord(0, sum(len(ps) for ps in point_sets))
    best = RankRecord(-1, 0)
    for ps in point_sets:
        values = evaluate_matrix(entries, ps)
        for i in range(len(ps)):
            r = rank_mod_p(values[i], ps.prime)
            if r > best.rank:
                best = RankRecord(r, 1, ps.prime, i)
            elif r == best.rank:
                best = replace(best, witnesses=best.witnesses + 1)
    return best


@dataclass
class GammaState:
    """
    Стан Γ-перетворення на карті: слоти, закріплені в 0 та 1, множина ℱ* (номери k),
    і прапорці empty / redundant / undecided / inconsistent.
    """
    chart: Chart
    zero: FrozenSet[tuple] = frozenset()
    one: FrozenSet[tuple] = frozenset()
    alive: FrozenSet[int] = frozenset()
    empty: bool = False
    redundant: bool = False
    undecided: bool = False
    inconsistent: bool = False
    notes: Tuple[str, ...] = ()

    @property
    def active(self) -> bool:
        return not (self.empty or self.redundant or self.undecided)

    def derive(self, chart: Optional[Chart] = None, note: Optional[str] = None, **changes) -> "GammaState":
        notes = self.notes + ((note,) if note else ())
        return replace(self, chart=chart or self.chart, notes=notes, **changes)

    def pins(self) -> Dict[Var, int]:
        out = {self.chart.variable(slot): 0 for slot in self.zero}
        out.update({self.chart.variable(slot): 1 for slot in self.one})
        return out

    def equations(self, theta_level: int) -> List[Polynomial]:
        chart = self.chart
        eqs = [b.to_polynomial() for row in chart.main for b in row]
        for k, row in enumerate(chart.residual, start=1):
            if k > theta_level:
                eqs.extend(b.to_polynomial() for b in row)
        eqs.extend(b.to_polynomial() for b in chart.quotient)
        eqs.extend(chart.linear[k - 1] for k in sorted(self.alive))
        return [eq for eq in eqs if not eq.is_zero()]

    def system(self, theta_level: int) -> List[Polynomial]:
        """Рівняння разом із закріпленнями y та y − 1."""
        pins = [Polynomial.variable(v) - c for v, c in sorted(self.pins().items())]
        return pins + self.equations(theta_level)

    def to_dict(self, theta_level: int) -> dict:
        return {
            "id": self.chart.id,
            "zero": sorted(str(self.chart.variable(slot)) for slot in self.zero),
            "one": sorted(str(self.chart.variable(slot)) for slot in self.one),
            "linear": sorted(self.alive),
            "empty": self.empty,
            "redundant": self.redundant,
            "undecided": self.undecided,
            "inconsistent": self.inconsistent,
            "notes": list(self.notes),
            "equations": [str(eq) for eq in self.equations(theta_level)] if self.active else [],
        }


@dataclass
class GammaResult:
    scheme: GammaScheme
    run: TowerRun
    states: Dict[str, GammaState]
    base_states: Dict[str, GammaState]
    records: List[dict]

    @property
    def final(self) -> List[GammaState]:
        return [self.states[chart.id] for chart in self.run.leaves]

    def active(self) -> List[GammaState]:
        return [state for state in self.final if state.active]

    def undecided(self) -> List[GammaState]:
        return [state for state in self.final if state.undecided]

    def to_dict(self) -> dict:
        level = self.run.theta_level
        return {
            "gamma": self.scheme.to_dict(),
            "charts": [state.to_dict(level) for state in self.final],
            "records": self.records,
        }


class GammaPipeline:
    """
    Повторює ℱ-, ϑ-, ℘- та ð-перетворення Z_Γ вздовж журналу роздуттів готової вежі.
    Рішення про генеричний ранг ухвалюються переліком F_p-точок.
    """

    def __init__(self, run: TowerRun, scheme: GammaScheme, primes: Tuple[int, ...] = (3, 5, 7),
                 exhaustive_threshold: int = 14, sample_budget: int = 100000, seed: int = 0,
                 verbose: bool = False):
        if tuple(scheme.m) != tuple(run.model.m):
            raise InvalidParameters("Γ-scheme and tower use different charts m")
        self.run = run
        self.model = run.model
        self.scheme = scheme
        self.primes = tuple(primes)
        self.exhaustive_threshold = exhaustive_threshold
        self.sample_budget = sample_budget
        self.seed = seed
        self.verbose = verbose
        self.records: List[dict] = []

    def _points(self, equations: List[Polynomial], variables: List[Var],
                fixed: Dict[Var, int]) -> Tuple[List[PointSet], bool]:
        sets = [enumerate_points(equations, variables, p, self.exhaustive_threshold, self.sample_budget,
                                 self.seed, fixed) for p in self.primes]
        return sets, all(ps.exhaustive for ps in sets)

    # --- ℱ-перетворення ----------------------------------------------------------

    def initial_state(self, chart: Chart) -> GammaState:
        zero = frozenset(("w", u) for u in self.scheme.gamma)
        return GammaState(chart, zero=zero)

    def _prefix_system(self, state: GammaState, k: int):
        chart = state.chart
        variables = [x(u) for u in self.model.plucker_indices]
        for slot, var in sorted(chart.slots.items()):
            if slot[0] == "r" and self.model.pair_owner[slot[1]][0] < k:
                variables.append(var)
        allowed = set(variables)
        eqs = list(self.model.fbar)
        for j in range(1, k):
            eqs.extend(b.to_polynomial() for b in chart.main[j - 1])
            eqs.extend(b.to_polynomial() for b in chart.residual[j - 1])
            if j in state.alive:
                eqs.append(chart.linear[j - 1])
        eqs.extend(b.to_polynomial() for b in chart.quotient if b.variables() <= allowed)
        fixed = {v: c for v, c in state.pins().items() if v in allowed}
        return variables, [eq for eq in eqs if not eq.is_zero()], fixed

    def _linear_rows(self, chart: Chart, k: int, columns: List[tuple]) -> List[List[Polynomial]]:
        F = self.model.relation(k)
        position = {pair: i for i, pair in enumerate(columns)}
        units = {rho_pair(pair) for pair in chart.unit_pairs}
        rows = []
        row = [Polynomial() for _ in columns]
        for term in F.terms:
            row[position[term.pair]] = Polynomial.constant(term.sign)
        rows.append(row)
        for b in self.model.quotient:
            owners = {v: self.model.pair_owner[v.index][0] for v in b.variables()}
            mine = [v for v, owner in owners.items() if owner == k]
            if len(mine) != 2 or any(owner > k for owner in owners.values()):
                continue
            row = [Polynomial() for _ in columns]
            for mono, sign in ((b.plus, 1), (b.minus, -1)):
                own = next(v for v in mono.variables() if owners[v] == k)
                coef = mono.without([own] + list(units))
                row[position[own.index]] = row[position[own.index]] + Polynomial.from_monomial(coef, sign)
            rows.append(row)
        return rows

    def f_transform_step(self, state: GammaState, k: int) -> GammaState:
        """ℱ-перетворення для F_k на базовій карті."""
        if not state.active:
            return state
        chart = state.chart
        F = self.model.relation(k)
        unit = chart.unit_pairs[k - 1]
        members = set(self.scheme.gamma)
        if gamma_relevance(self.model, k, self.scheme.gamma) == "relevant":
            zero_pairs = [t.pair for t in F.terms if any(w in members for w in t.pair)]
            if unit in zero_pairs:
                return state.derive(empty=True, note=f"F{k}: unit pair {render_pair(unit)} vanishes")
            self.records.append({"chart": chart.id, "k": k, "case": "relevant",
                                 "zero": [render_pair(p) for p in zero_pairs]})
            return state.derive(zero=state.zero | {("r", p) for p in zero_pairs}, alive=state.alive | {k})

        columns = sorted(p for p in F.pairs if p != unit) + [unit]
        entries = self._linear_rows(chart, k, columns)
        variables, equations, fixed = self._prefix_system(state, k)
        point_sets, exhaustive = self._points(equations, variables, fixed)
        if not any(len(ps) for ps in point_sets):
            if exhaustive:
                return state.derive(empty=True, note=f"F{k}: no points on the prefix system")
            return state.derive(undecided=True, note=f"F{k}: sampling found no points")

        free = len(columns) - 1
        record = generic_rank([row[:free] for row in entries], point_sets)
        best = record.rank
        values = {ps.prime: evaluate_matrix(entries, ps) for ps in point_sets}

        consistent = False
        for ps in point_sets:
            for i in range(len(ps)):
                matrix = values[ps.prime][i]
                if rank_mod_p(matrix[:, :free], ps.prime) == best and rank_mod_p(matrix, ps.prime) == best:
                    consistent = True
                    break
            if consistent:
                break
        if not consistent:
            return state.derive(empty=True, note=f"F{k}: linear system needs the unit column")

        p = record.prime
        det = pivot_columns_mod_p(values[p][record.point][:, :free], p)
        pinned_one = [j for j in range(free) if j not in det]
        nonzero = set()
        for ps in point_sets:
            for i in range(len(ps)):
                matrix = values[ps.prime][i]
                a_det = matrix[:, det]
                if rank_mod_p(a_det, ps.prime) < len(det):
                    continue
                rhs = -(matrix[:, free] + matrix[:, pinned_one].sum(axis=1))
                solution = solve_mod_p(a_det, rhs, ps.prime)
                if solution is None:
                    continue
                nonzero.update(det[j] for j in range(len(det)) if solution[j] % ps.prime)
        zero_cols = [j for j in det if j not in nonzero]
        alive = state.alive | {k} if any(j in nonzero for j in det) else state.alive
        self.records.append({
            "chart": chart.id, "k": k, "case": "irrelevant", "rank": best, "witnesses": record.witnesses,
            "det": [render_pair(columns[j]) for j in det],
            "one": [render_pair(columns[j]) for j in pinned_one],
            "zero": [render_pair(columns[j]) for j in zero_cols],
        })
        return state.derive(zero=state.zero | {("r", columns[j]) for j in zero_cols},
                            one=state.one | {("r", columns[j]) for j in pinned_one},
                            alive=alive)

    # --- ϑ/℘/ð-перетворення ------------------------------------------------------

    def _star(self, state: GammaState, child: Chart, event: BlowupEvent, other: tuple,
              parent_points: Tuple[List[PointSet], bool]) -> GammaState:
        y = child.variable(other)
        pins = state.pins()
        eqs = state.derive(chart=child).equations(event.theta_level)
        rows = []
        for eq in eqs:
            eq = eq.specialize({v: c for v, c in pins.items() if v in eq.variables()})
            if y not in eq.variables():
                continue
            parts = eq.collect(y)
            if max(parts) > 1:
                return state.derive(undecided=True, note=f"{event.index.label}: {y} enters nonlinearly")
            rows.append((parts.get(1, Polynomial()), parts.get(0, Polynomial())))

        point_sets, exhaustive = parent_points
        if not any(len(ps) for ps in point_sets):
            if exhaustive:
                return state.derive(empty=True, note=f"{event.index.label}: parent transform has no points")
            return state.derive(undecided=True, note=f"{event.index.label}: sampling found no points")

        solvable = False
        constant_only = False
        nonzero = False
        for ps in point_sets:
            columns = {v: ps.column(v) for v in ps.variables}
            size = len(ps)
            b_vals = [evaluate_columns(b, columns, ps.prime, size) for b, _ in rows]
            a_vals = [evaluate_columns(a, columns, ps.prime, size) for _, a in rows]
            for i in range(size):
                hit = next((r for r in range(len(rows)) if b_vals[r][i] % ps.prime), None)
                if hit is None:
                    if any(a_vals[r][i] % ps.prime for r in range(len(rows))):
                        constant_only = True
                    continue
                solvable = True
                if a_vals[hit][i] % ps.prime:
                    nonzero = True

        if solvable:
            if nonzero:
                return state.derive(note=f"{event.index.label}: star-a, {y} determined")
            return state.derive(zero=state.zero | {other}, note=f"{event.index.label}: star-a, {y} = 0")
        if constant_only:
            return state.derive(undecided=True, inconsistent=True,
                                note=f"{event.index.label}: inconsistent linear system in {y}")
        return state.derive(one=state.one | {other}, note=f"{event.index.label}: star-b, {y} = 1")

    def blowup_transform_step(self, state: GammaState, event: BlowupEvent,
                              children: Tuple[Chart, Chart]) -> Tuple[GammaState, GammaState]:
        """Перетворення стану карти під дією одного роздуття: стани обох дочірніх карт."""
        parent = state.chart
        if not state.active:
            return tuple(state.derive(chart=child) for child in children)
        center = (parent.slot_of_label(event.center[0]), parent.slot_of_label(event.center[1]))
        contained = center[0] in state.zero and center[1] in state.zero
        parent_points = None
        if contained:
            parent_points = self._points(state.system(event.theta_level), parent.variables, state.pins())
        out = []
        for side, child in enumerate(children):
            pivot, other = center[side], center[1 - side]
            if self.run.is_pruned(child.id):
                out.append(state.derive(chart=child, empty=True, note=f"{event.index.label}: no points of the tower"))
            elif contained:
                base = state.derive(chart=child, zero=state.zero - {other})
                out.append(self._star(base, child, event, other, parent_points))
            elif pivot in state.zero:
                out.append(state.derive(chart=child, empty=True, note=f"{event.index.label}: pinned center side"))
            elif pivot in state.one:
                redundant = other in state.one and side == 1
                out.append(state.derive(chart=child, redundant=redundant))
            elif other in state.one:
                out.append(state.derive(chart=child, redundant=True))
            else:
                out.append(state.derive(chart=child))
        return tuple(out)

    def run_pipeline(self) -> GammaResult:
        print(f"[gamma] Γ={[render_index(u) for u in self.scheme.gamma]} over {len(self.run.bases)} base charts")
        states: Dict[str, GammaState] = {}
        for chart in self.run.bases:
            state = self.initial_state(chart)
            if self.run.is_pruned(chart.id):
                state = state.derive(empty=True, note="no points of the tower")
            for k in range(1, self.model.upsilon + 1):
                state = self.f_transform_step(state, k)
            states[chart.id] = state
        base_states = dict(states)
        for event in tqdm(self.run.events, desc="gamma", disable=not self.verbose):
            for parent_id, first, second in event.splits:
                children = (self.run.charts[first], self.run.charts[second])
                for child_state in self.blowup_transform_step(states[parent_id], event, children):
                    states[child_state.chart.id] = child_state
        result = GammaResult(self.scheme, self.run, states, base_states, self.records)
        print(f"[gamma] {len(result.active())} active of {len(result.final)} final charts, "
              f"{len(result.undecided())} undecided")
        return result


def run_gamma_pipeline(run: TowerRun, scheme: GammaScheme, **options) -> GammaResult:
    return GammaPipeline(run, scheme, **options).run_pipeline()


def torus_points(model: ModelSystem, scheme: GammaScheme, p: int, **options) -> set:
    """F_p-точки Z_Γ, у яких усі координати поза Γ ненульові."""
    variables = [x(u) for u in model.plucker_indices]
    fixed = {x(u): 0 for u in scheme.gamma}
    points = enumerate_points(model.fbar, variables, p, fixed=fixed, **options)
    keep = set()
    outside = [i for i, u in enumerate(model.plucker_indices) if u not in scheme.gamma]
    for i in range(len(points)):
        row = tuple(int(v) for v in points.values[i])
        if all(row[j] % p for j in outside):
            keep.add(row)
    return keep


def birationality_check(result: GammaResult, p: int, **options) -> dict:
    """
    Порівнює точки тора Z_Γ з образами точок фінальних карт, у яких усі незакріплені
    виняткові параметри ненульові.

    Сюр'єктивність: кожна точка тора є образом. Ін'єктивність: на кожній фінальній карті
    точка тора має рівно один прообраз.

    :return: {"prime", "input", "output", "match", "max_fibre", "injective", "collisions"}.
    """
    model = result.run.model
    torus = torus_points(model, result.scheme, p, **options)
    images = set()
    collisions = []
    max_fibre = 0
    level = result.run.theta_level
    for state in result.active():
        chart = state.chart
        pins = state.pins()
        points = enumerate_points(state.equations(level), chart.variables, p, fixed=pins, **options)
        free_exceptional = [v for v in chart.variables if v.exceptional and v not in pins]
        fibres: Dict[tuple, int] = {}
        for point in points.rows():
            if any(point[v] % p == 0 for v in free_exceptional):
                continue
            base = chart.walk_to_base(point, p)[-1][1]
            image = tuple(base[x(u)] % p for u in model.plucker_indices)
            if image in torus:
                images.add(image)
                fibres[image] = fibres.get(image, 0) + 1
        for image, size in fibres.items():
            max_fibre = max(max_fibre, size)
            if size > 1:
                collisions.append({"chart": chart.id, "image": list(image), "preimages": size})
    return {"prime": p, "input": len(torus), "output": len(images), "match": images == torus,
            "max_fibre": max_fibre, "injective": not collisions, "collisions": collisions}


def maximality_audit(result: GammaResult, primes: Tuple[int, ...] = (3, 5), **options) -> List[dict]:
    """
    Змінні активної фінальної карти, що зникають у всіх знайдених точках для кожного з простих,
    але не закріплені в 0. Порожній список означає, що множина закріплених нулів максимальна.
    """
    findings = []
    level = result.run.theta_level
    for state in result.active():
        chart = state.chart
        pins = state.pins()
        suspects = None
        for p in primes:
            points = enumerate_points(state.equations(level), chart.variables, p, fixed=pins, **options)
            if not len(points):
                continue
            vanishing = {var for var in chart.variables if var not in pins and not np.any(points.column(var) % p)}
            suspects = vanishing if suspects is None else suspects & vanishing
        for var in sorted(suspects or ()):
            findings.append({"chart": chart.id, "variable": str(var)})
    return findings
