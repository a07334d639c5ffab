from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Tuple

from core.errors import CenterMissesChart, InvalidChart
from core.indices import Pair, render_index, render_pair
from core.plucker_model import ModelSystem
from core.polynomial import PLAIN_TO_EXCEPTIONAL, Binomial, Monomial, Polynomial, Var, rho_pair, x

Slot = tuple
Label = tuple

STAGES = ("theta", "wp", "eth")


@dataclass(frozen=True)
class TowerIndex:
    """Індекс кроку вежі: theta[k], wp(k,τ)μ.h або eth(k,τ)μ.h."""
    stage: str
    k: int
    tau: int = 0
    mu: int = 0
    h: int = 0

    def __post_init__(self):
        if self.stage not in STAGES:
            raise InvalidChart(f"unknown tower stage '{self.stage}'")

    @property
    def label(self) -> str:
        if self.stage == "theta":
            return f"theta[{self.k}]"
        return f"{self.stage}({self.k},{self.tau}){self.mu}.{self.h}"

    def flat_key(self) -> tuple:
        # invlex на (k, τ, μ, h); рівні індекси впорядковано за стадією
        return (self.h, self.mu, self.tau, self.k), STAGES.index(self.stage)

    def __str__(self) -> str:
        return self.label


def varpi(u) -> Label:
    return ("varpi", tuple(u))


def rho_divisor(pair: Pair) -> Label:
    return ("rho", tuple(pair))


def exceptional(index: TowerIndex) -> Label:
    return ("exc", index)


def divisor_key(label: Label) -> tuple:
    """
    Ключ порядку <_♭: спершу виняткові дивізори (invlex на індексі),
    потім ϱ-дивізори, потім ϖ-дивізори, обидва лексикографічно.
    """
    kind, payload = label
    if kind == "exc":
        return (0, payload.flat_key())
    if kind == "rho":
        return (1, payload)
    return (2, payload)


def render_label(label: Label) -> str:
    kind, payload = label
    if kind == "varpi":
        return f"X{render_index(payload)}"
    if kind == "rho":
        return f"X{render_pair(payload)}"
    return f"E[{payload.label}]"


def _slot_var(slot: Slot, is_exceptional: bool) -> Var:
    kind = "x" if slot[0] == "w" else "rho"
    if is_exceptional:
        kind = PLAIN_TO_EXCEPTIONAL[kind]
    return Var(kind, slot[1])


@dataclass(frozen=True)
class Transition:
    """Роздуття з центром (slot0, slot1); side: слот, що стає винятковим параметром ζ."""
    index: TowerIndex
    center: Tuple[Slot, Slot]
    side: int

    @property
    def pivot(self) -> Slot:
        return self.center[self.side]

    @property
    def other(self) -> Slot:
        return self.center[1 - self.side]


class Chart:
    """
    Стандартна карта вежі роздуттів. Набір слотів (ϖ-індекси u ≠ m та ϱ-пари, крім пар,
    закріплених ≡1) не змінюється вздовж роздуттів; змінюються лише змінні в слотах та їхні дивізори.
    Рівняння обчислюються ліниво з рівнянь батьківської карти.
    """

    def __init__(self, model: ModelSystem, chart_id: str, lambda_o: Tuple[int, ...],
                 slots: Dict[Slot, Var], labels: Dict[Slot, Label],
                 parent: Optional["Chart"] = None, transition: Optional[Transition] = None):
        self.model = model
        self.id = chart_id
        self.lambda_o = tuple(lambda_o)
        self.slots = dict(slots)
        self.labels = dict(labels)
        self.parent = parent
        self.transition = transition
        self.depth = 0 if parent is None else parent.depth + 1
        self._by_label = {label: slot for slot, label in self.labels.items()}
        self._by_var = {var: slot for slot, var in self.slots.items()}

    @property
    def stage(self) -> str:
        return "base" if self.transition is None else self.transition.index.stage

    @property
    def unit_pairs(self) -> List[Pair]:
        return [F.terms[o].pair for F, o in zip(self.model.family, self.lambda_o)]

    @property
    def variables(self) -> List[Var]:
        return sorted(self.slots.values())

    @property
    def e_v(self) -> List[tuple]:
        return sorted(slot[1] for slot, var in self.slots.items() if slot[0] == "w" and var.exceptional)

    @property
    def d_v(self) -> List[Pair]:
        return sorted(slot[1] for slot, var in self.slots.items() if slot[0] == "r" and var.exceptional)

    def variable(self, slot: Slot) -> Var:
        return self.slots[slot]

    def slot_of_label(self, label: Label) -> Optional[Slot]:
        return self._by_label.get(label)

    def var_of_label(self, label: Label) -> Optional[Var]:
        slot = self._by_label.get(label)
        return None if slot is None else self.slots[slot]

    def slot_of_var(self, var: Var) -> Slot:
        return self._by_var[var]

    def label_of_var(self, var: Var) -> Label:
        return self.labels[self._by_var[var]]

    def holds(self, *labels: Label) -> bool:
        return all(label in self._by_label for label in labels)

    # --- рівняння -----------------------------------------------------------------

    def _lift(self, mono: Monomial) -> Tuple[Monomial, int]:
        t = self.transition
        old_i = self.parent.variable(t.pivot)
        old_j = self.parent.variable(t.other)
        e_i, e_j = mono.exponent(old_i), mono.exponent(old_j)
        rest = mono.without((old_i, old_j))
        zeta, y_j = self.variable(t.pivot), self.variable(t.other)
        return rest * Monomial({zeta: e_i + e_j, y_j: e_j}), e_i + e_j

    def proper_transform(self, binomial: Binomial) -> Binomial:
        """Підстановка y_i ↦ ζ, y_j ↦ ζ·y_j та ділення на найбільший спільний степінь ζ."""
        plus, lp = self._lift(binomial.plus)
        minus, lm = self._lift(binomial.minus)
        common = min(lp, lm)
        if common:
            power = Monomial({self.variable(self.transition.pivot): common})
            plus, minus = plus.divide(power), minus.divide(power)
        return binomial.with_terms(plus, minus)

    def pullback(self, poly: Polynomial) -> Polynomial:
        terms = {}
        for mono, coef in poly.terms.items():
            lifted, _ = self._lift(mono)
            terms[lifted] = terms.get(lifted, 0) + coef
        return Polynomial(terms, poly.field)

    def _base_binomial(self, binomial: Binomial) -> Binomial:
        units = [rho_pair(pair) for pair in self.unit_pairs]
        return binomial.with_terms(binomial.plus.without(units), binomial.minus.without(units))

    @cached_property
    def main(self) -> List[List[Binomial]]:
        if self.parent is None:
            return [[self._base_binomial(b) for b in row] for row in self.model.main]
        return [[self.proper_transform(b) for b in row] for row in self.parent.main]

    @cached_property
    def residual(self) -> List[List[Binomial]]:
        if self.parent is None:
            return [[self._base_binomial(b) for b in row] for row in self.model.residual]
        return [[self.proper_transform(b) for b in row] for row in self.parent.residual]

    @cached_property
    def quotient(self) -> List[Binomial]:
        if self.parent is None:
            return [self._base_binomial(b) for b in self.model.quotient]
        return [self.proper_transform(b) for b in self.parent.quotient]

    @cached_property
    def linear(self) -> List[Polynomial]:
        if self.parent is None:
            units = {rho_pair(pair): 1 for pair in self.unit_pairs}
            return [L.specialize({v: c for v, c in units.items() if v in L.variables()})
                    for L in self.model.linear]
        return [self.pullback(L) for L in self.parent.linear]

    def main_binomial(self, k: int, tau: int) -> Binomial:
        return self.main[k - 1][tau - 1]

    def system(self, theta_level: int) -> List[Polynomial]:
        """
        Рівняння 𝒱̃ на карті: головні, залишкові для F_k з k > theta_level, фактор-біноми і L.
        """
        eqs = [b.to_polynomial() for row in self.main for b in row]
        for k, row in enumerate(self.residual, start=1):
            if k > theta_level:
                eqs.extend(b.to_polynomial() for b in row)
        eqs.extend(b.to_polynomial() for b in self.quotient)
        eqs.extend(self.linear)
        return [eq for eq in eqs if not eq.is_zero()]

    def pull_back(self, poly: Polynomial) -> Polynomial:
        """Композиція підстановок від базової карти без ділення."""
        if self.parent is None:
            units = {rho_pair(pair): 1 for pair in self.unit_pairs}
            return poly.specialize({v: c for v, c in units.items() if v in poly.variables()})
        return self.pullback(self.parent.pull_back(poly))

    # --- точки ---------------------------------------------------------------------

    def to_parent(self, point: Dict[Var, int], p: Optional[int] = None) -> Dict[Var, int]:
        t = self.transition
        zeta = point[self.variable(t.pivot)]
        y_j = point[self.variable(t.other)]
        image = {}
        for slot, var in self.slots.items():
            if slot not in t.center:
                image[var] = point[var]
        value_j = zeta * y_j if p is None else (zeta * y_j) % p
        image[self.parent.variable(t.pivot)] = zeta
        image[self.parent.variable(t.other)] = value_j
        return image

    def walk_to_base(self, point: Dict[Var, int], p: Optional[int] = None) -> List[Tuple["Chart", Dict[Var, int]]]:
        """Образи точки на всіх предках: [(ця карта, точка), (батько, образ), ..., (база, образ)]."""
        path = [(self, dict(point))]
        chart, current = self, dict(point)
        while chart.parent is not None:
            current = chart.to_parent(current, p)
            chart = chart.parent
            path.append((chart, current))
        return path

    def lineage(self) -> List["Chart"]:
        chain, chart = [], self
        while chart is not None:
            chain.append(chart)
            chart = chart.parent
        return chain

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "stage": self.stage,
            "parent": None if self.parent is None else self.parent.id,
            "side": None if self.transition is None else self.transition.side,
            "eV": [render_index(u) for u in self.e_v],
            "dV": [render_pair(pair) for pair in self.d_v],
            "vars": [str(v) for v in self.variables],
            "main_binomials": [str(b) for row in self.main for b in row],
            "linear": [str(L) for L in self.linear],
        }

    def __repr__(self) -> str:
        return f"Chart({self.id})"


def base_chart(model: ModelSystem, lambda_o: Iterable[int]) -> Chart:
    """
    Карта ℛ_ℱ, на якій для кожного F закріплено x_(u_o,v_o) ≡ 1.

    :param lambda_o: Для кожного F_k номер члена s_{F,o} (0: провідний член).
    """
    lambda_o = tuple(lambda_o)
    if len(lambda_o) != model.upsilon:
        raise InvalidChart(f"need one term choice per relation ({model.upsilon}), got {len(lambda_o)}")
    for F, o in zip(model.family, lambda_o):
        if not 0 <= o < len(F.terms):
            raise InvalidChart(f"term choice {o} out of range for relation {F}")
    slots, labels = {}, {}
    for u in model.plucker_indices:
        slots[("w", u)] = x(u)
        labels[("w", u)] = varpi(u)
    for F, o in zip(model.family, lambda_o):
        for s, term in enumerate(F.terms):
            if s == o:
                continue
            slot = ("r", term.pair)
            slots[slot] = rho_pair(term.pair)
            labels[slot] = rho_divisor(term.pair)
    chart_id = "L" + "-".join(str(o) for o in lambda_o)
    return Chart(model, chart_id, lambda_o, slots, labels)


def blow_up_chart(chart: Chart, index: TowerIndex, center: Tuple[Label, Label], side: int) -> Chart:
    """
    Одна з двох карт роздуття вздовж перетину двох дивізорів.

    :param center: Пара дивізорів (Y0, Y1), обидва мають бути змінними карти.
    :param side: 0 або 1: який з центральних слотів стає винятковим параметром.
    :return: Дочірня карта.
    """
    if side not in (0, 1):
        raise InvalidChart(f"side must be 0 or 1, got {side}")
    slot0, slot1 = chart.slot_of_label(center[0]), chart.slot_of_label(center[1])
    if slot0 is None or slot1 is None:
        raise CenterMissesChart(f"center {render_label(center[0])} ∩ {render_label(center[1])} misses {chart.id}")
    transition = Transition(index, (slot0, slot1), side)
    slots, labels = dict(chart.slots), dict(chart.labels)
    slots[transition.pivot] = _slot_var(transition.pivot, True)
    labels[transition.pivot] = exceptional(index)
    child_id = f"{chart.id}/{index.label}:{side}"
    return Chart(chart.model, child_id, chart.lambda_o, slots, labels, chart, transition)


def main_key(sign: str, k: int, tau: int) -> tuple:
    return (sign, k, tau)


def linear_key(k: int, s: int) -> tuple:
    return ("s", k, s)


def quotient_key(sign: str, j: int) -> tuple:
    return ("q" + sign, j)


def update_multiplicities(model: ModelSystem, first: Dict[tuple, int], second: Dict[tuple, int]) -> Dict[tuple, int]:
    """
    Таблиця кратностей нового виняткового дивізора над центром Y0 ∩ Y1:
    m_{E,T} = m_{Y0,T} + m_{Y1,T} − l_B для членів головних і фактор-біномів, m_{E,s} = сума.
    """
    table = {}
    for row in model.main:
        for b in row:
            k, tau = b.index
            plus = first.get(main_key("+", k, tau), 0) + second.get(main_key("+", k, tau), 0)
            minus = first.get(main_key("-", k, tau), 0) + second.get(main_key("-", k, tau), 0)
            common = min(plus, minus)
            if plus - common:
                table[main_key("+", k, tau)] = plus - common
            if minus - common:
                table[main_key("-", k, tau)] = minus - common
    for b in model.quotient:
        (j,) = b.index
        plus = first.get(quotient_key("+", j), 0) + second.get(quotient_key("+", j), 0)
        minus = first.get(quotient_key("-", j), 0) + second.get(quotient_key("-", j), 0)
        common = min(plus, minus)
        if plus - common:
            table[quotient_key("+", j)] = plus - common
        if minus - common:
            table[quotient_key("-", j)] = minus - common
    for k, F in enumerate(model.family, start=1):
        for s in range(len(F.terms)):
            total = first.get(linear_key(k, s), 0) + second.get(linear_key(k, s), 0)
            if total:
                table[linear_key(k, s)] = total
    return table


class DivisorRegistry:
    """Таблиці кратностей m_{Y,T} для всіх дивізорів, що виникли у вежі."""

    def __init__(self, model: ModelSystem):
        self.model = model
        self.tables: Dict[Label, Dict[tuple, int]] = {}
        for u in model.plucker_indices:
            self.tables[varpi(u)] = {}
        for F in model.family:
            for term in F.terms:
                self.tables[rho_divisor(term.pair)] = {}
        for k, F in enumerate(model.family, start=1):
            for s, term in enumerate(F.terms):
                self._bump(rho_divisor(term.pair), linear_key(k, s))
            for tau, term in enumerate(F.terms[1:], start=1):
                self._bump(rho_divisor(term.pair), main_key("+", k, tau))
                self._bump(varpi(F.leading), main_key("+", k, tau))
                self._bump(rho_divisor(F.terms[0].pair), main_key("-", k, tau))
                for w in term.pair:
                    if w != model.m:
                        self._bump(varpi(w), main_key("-", k, tau))
        for b in model.quotient:
            (j,) = b.index
            for sign, mono in (("+", b.plus), ("-", b.minus)):
                for var, e in mono:
                    for _ in range(e):
                        self._bump(rho_divisor(var.index), quotient_key(sign, j))

    def _bump(self, label: Label, key: tuple):
        table = self.tables[label]
        table[key] = table.get(key, 0) + 1

    def multiplicity(self, label: Label, key: tuple) -> int:
        return self.tables.get(label, {}).get(key, 0)

    def register(self, index: TowerIndex, center: Tuple[Label, Label]) -> Label:
        label = exceptional(index)
        self.tables[label] = update_multiplicities(self.model, self.tables[center[0]], self.tables[center[1]])
        return label

    def associated(self, key: tuple) -> List[Label]:
        found = [label for label, table in self.tables.items() if table.get(key, 0) > 0]
        return sorted(found, key=divisor_key)

    def to_rows(self) -> List[dict]:
        rows = []
        for label in sorted(self.tables, key=divisor_key):
            for key, value in sorted(self.tables[label].items()):
                rows.append({"divisor": render_label(label), "term": "".join(map(str, key)), "multiplicity": value})
        return rows
