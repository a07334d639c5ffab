from dataclasses import dataclass, field
from itertools import product
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from joblib import Parallel, delayed

from core.chart_atlas import (Chart, DivisorRegistry, Label, TowerIndex, base_chart, blow_up_chart,
                              render_label)
from core.errors import ChartBudgetExceeded, InvalidParameters
from core.plucker_model import ModelSystem
from core.points import EXHAUSTIVE_PRIME_LIMIT, enumerate_points
from core.polynomial import Var, rho_pair
from core.vanishing import DEFAULT_DEPTH, ZeroPropagation, nonvanishing
from stages.eth import EthStage
from stages.theta import ThetaStage
from stages.wp import WpStage

STAGE_CLASSES = (ThetaStage, WpStage, EthStage)
GATE_POLICIES = ("nonempty", "always", "empty", "exact-budget")


def parse_gate(gate: str) -> Tuple[str, Optional[int]]:
    """'nonempty' | 'always' | 'empty' | 'exact-budget:N' -> (політика, бюджет)."""
    if gate in ("nonempty", "always", "empty"):
        return gate, None
    if gate.startswith("exact-budget:"):
        try:
            budget = int(gate.split(":", 1)[1])
        except ValueError:
            raise InvalidParameters(f"bad gate budget in '{gate}'")
        if budget <= 0:
            raise InvalidParameters("gate budget must be positive")
        return "exact-budget", budget
    raise InvalidParameters(f"unknown gate policy '{gate}'")


@dataclass
class TowerOptions:
    gate: str = "nonempty"
    primes: Tuple[int, ...] = (3, 5, 7)
    max_charts: int = 20000
    exhaustive_threshold: int = 14
    sample_budget: int = 100000
    seed: int = 0
    truncate_after: Optional[str] = None
    prune: bool = True
    certificate_depth: int = DEFAULT_DEPTH
    n_jobs: int = 1
    verbose: bool = False

    def __post_init__(self):
        parse_gate(self.gate)
        if self.truncate_after not in (None, "theta", "wp"):
            raise InvalidParameters("truncate_after must be 'theta', 'wp' or None")
        if self.max_charts < 1:
            raise InvalidParameters("chart budget must be positive")
        if self.certificate_depth < 0:
            raise InvalidParameters("certificate depth must be non-negative")
        if self.n_jobs == 0:
            raise InvalidParameters("n_jobs must be nonzero")




def lambda_o_choices(model: ModelSystem, policy: str) -> List[Tuple[int, ...]]:
    """
    Набори Λ^o базових карт.

    :param policy: 'all' (усі Π(𝔱_F+1) карт), 'first' (провідні члени) або 'explicit:i,j,...'.
    """
    if policy == "all":
        return list(product(*(range(len(F.terms)) for F in model.family)))
    if policy == "first":
        return [tuple(0 for _ in model.family)]
    if policy.startswith("explicit:"):
        try:
            choice = tuple(int(part) for part in policy.split(":", 1)[1].split(",") if part.strip())
        except ValueError:
            raise InvalidParameters(f"cannot parse Λ^o choice '{policy}'")
        return [choice]
    raise InvalidParameters(f"unknown Λ^o policy '{policy}'")


@dataclass
class BlowupEvent:
    index: TowerIndex
    center: Tuple[Label, Label]
    theta_level: int
    splits: List[Tuple[str, str, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "index": self.index.label,
            "center": [render_label(label) for label in self.center],
            "splits": [list(split) for split in self.splits],
        }


class TowerRun:
    """
    Стан вежі роздуттів: поточні листові карти, таблиці кратностей і журнал роздуттів,
    за яким конвеєр Γ повторює ті самі кроки.

    Для кожної карти ведеться множина одиниць: змінних, що не зникають на спільних нулях
    її рівнянь chart.system(theta_level). Вона успадковується від батьківської карти для слотів поза центром.
    Карта, на якій центр структурно не перетинає ці нулі, лишається нерозгорнутою.
    """

    def __init__(self, model: ModelSystem, options: TowerOptions, lambda_o: List[Tuple[int, ...]]):
        self.model = model
        self.options = options
        self.registry = DivisorRegistry(model)
        self.bases = [base_chart(model, choice) for choice in lambda_o]
        self.charts: Dict[str, Chart] = {chart.id: chart for chart in self.bases}
        self.leaves: List[Chart] = list(self.bases)
        self.pruned: List[str] = []
        self.skipped: List[Tuple[str, str, Tuple[Label, Label]]] = []
        self.events: List[BlowupEvent] = []
        self.records: Dict[str, list] = {}
        self.notes: List[str] = []
        self.theta_level = 0
        self.completed: List[str] = []
        self.partial = False
        self._gate_mode, self._gate_budget = parse_gate(options.gate)
        self._pruned: Set[str] = set()
        self._units: Dict[Tuple[str, int], FrozenSet[Var]] = {}
        self._solvers: Dict[Tuple[str, int], ZeroPropagation] = {}
        self._decisions: Dict[tuple, bool] = {}
        if options.prune:
            self.leaves = [chart for chart in self.leaves if not self._prune(chart)]

    def note(self, message: str):
        if message not in self.notes:
            self.notes.append(message)

    def is_pruned(self, chart_id: str) -> bool:
        return chart_id in self._pruned

    def holders(self, center: Tuple[Label, Label]) -> List[Chart]:
        return [chart for chart in self.leaves if chart.holds(*center)]

    # --- структурні сертифікати ------------------------------------------------------

    def units(self, chart: Chart) -> FrozenSet[Var]:
        """Змінні карти, що не зникають на нулях chart.system(theta_level)."""
        key = (chart.id, self.theta_level)
        if key not in self._units:
            known = frozenset()
            if chart.parent is not None:
                inherited = self.units(chart.parent)
                center = chart.transition.center
                known = frozenset(var for slot, var in chart.parent.slots.items()
                                  if var in inherited and slot not in center)
            self._units[key] = nonvanishing(chart.system(self.theta_level), chart.variables, known,
                                            self.options.certificate_depth)
        return self._units[key]

    def solver(self, chart: Chart) -> ZeroPropagation:
        key = (chart.id, self.theta_level)
        if key not in self._solvers:
            self._solvers[key] = ZeroPropagation(chart.system(self.theta_level), self.units(chart),
                                                 self.options.certificate_depth)
        return self._solvers[key]

    def meets(self, chart: Chart, center: Tuple[Label, Label]) -> bool:
        """False лише тоді, коли доведено, що обидві змінні центру не зникають одночасно."""
        zero = {chart.var_of_label(center[0]), chart.var_of_label(center[1])}
        return not self.solver(chart).refutes(zero)

    def _has_point(self, chart: Chart, center: Tuple[Label, Label]) -> bool:
        budget = self._gate_budget or self.options.sample_budget
        fixed = {chart.var_of_label(center[0]): 0, chart.var_of_label(center[1]): 0}
        for p in self.options.primes:
            points = enumerate_points(chart.system(self.theta_level), chart.variables, p,
                                      self.options.exhaustive_threshold, budget, self.options.seed, fixed)
            if len(points):
                return True
        return False

    def decide(self, chart: Chart, center: Tuple[Label, Label]) -> bool:
        """
        Чи роздувається карта вздовж центру.

        :param chart: Листова карта, що містить обидва дивізори центру.
        :param center: Пара дивізорів.
        :return: 'always' завжди True; 'nonempty' відкидає лише структурно неперетинні центри;
            'empty'/'exact-budget' ще й вимагають F_p-точку на центрі.
        """
        key = (chart.id, center, self.theta_level)
        if key not in self._decisions:
            if self._gate_mode == "always":
                decision = True
            elif not self.meets(chart, center):
                decision = False
            elif self._gate_mode == "nonempty":
                decision = True
            else:
                decision = self._has_point(chart, center)
            self._decisions[key] = decision
        return self._decisions[key]

    def _decide_all(self, charts: List[Chart], center: Tuple[Label, Label]) -> List[bool]:
        if self.options.n_jobs == 1 or len(charts) < 2:
            return [self.decide(chart, center) for chart in charts]
        return Parallel(n_jobs=self.options.n_jobs, prefer="threads")(
            delayed(self.decide)(chart, center) for chart in charts
        )

    def gate_passes(self, center: Tuple[Label, Label]) -> bool:
        """Хоча б одна листова карта містить обидві змінні центру і роздувається вздовж нього."""
        return any(self._decide_all(self.holders(center), center))

    def _prune(self, chart: Chart) -> bool:
        """
        Карта без жодної точки 𝒱̃ далі не розгортається: або поширення нулів доводить
        суперечність, або повний F_p-перебір для всіх простих не знаходить точок.
        """
        if self.solver(chart).refutes(()):
            return self._mark_pruned(chart)
        free = len(chart.variables)
        if free > self.options.exhaustive_threshold:
            return False
        for p in self.options.primes:
            if p > EXHAUSTIVE_PRIME_LIMIT:
                return False
            points = enumerate_points(chart.system(self.theta_level), chart.variables, p,
                                      self.options.exhaustive_threshold, self.options.sample_budget,
                                      self.options.seed)
            if len(points) or not points.exhaustive:
                return False
        return self._mark_pruned(chart)

    def _mark_pruned(self, chart: Chart) -> bool:
        self.pruned.append(chart.id)
        self._pruned.add(chart.id)
        return True

    # --- роздуття ------------------------------------------------------------------

    def blow_up(self, index: TowerIndex, center: Tuple[Label, Label], gated: bool = True) -> int:
        """
        Роздуває листові карти, що містять обидва дивізори центру.

        :param gated: Якщо False, роздуваються всі такі карти без перевірки decide.
        :return: Кількість розщеплених карт.
        """
        event = BlowupEvent(index, center, self.theta_level)
        holders = self.holders(center)
        verdicts = self._decide_all(holders, center) if gated else [True] * len(holders)
        split = {chart.id for chart, verdict in zip(holders, verdicts) if verdict}
        leaves = []
        for chart in self.leaves:
            if chart.id not in split:
                if chart.holds(*center):
                    self.skipped.append((chart.id, index.label, center))
                leaves.append(chart)
                continue
            children = [blow_up_chart(chart, index, center, side) for side in (0, 1)]
            event.splits.append((chart.id, children[0].id, children[1].id))
            for child in children:
                self.charts[child.id] = child
                if not (self.options.prune and self._prune(child)):
                    leaves.append(child)
        self.leaves = leaves
        if event.splits:
            self.registry.register(index, center)
            self.events.append(event)
        if len(self.charts) > self.options.max_charts:
            self.partial = True
            raise ChartBudgetExceeded(f"chart budget {self.options.max_charts} exceeded at {index.label}", self)
        return len(event.splits)

    # --- завершення ----------------------------------------------------------------

    def _invertible(self, chart: Chart, binomial) -> bool:
        """Жодна пара змінних із різних членів не зникає одночасно, отже обидва члени не зникають."""
        plus, minus = binomial.plus.variables(), binomial.minus.variables()
        if not plus or not minus:
            return False
        solver = self.solver(chart)
        return all(solver.refutes({a, b}) for a in plus for b in minus)

    def termination(self, chart: Chart) -> Dict[Tuple[int, int], dict]:
        """
        Ознака завершення кожного головного бінома на карті: один із членів дорівнює одиниці,
        складається лише зі звичайної змінної x_(m,u_k) або обидва члени структурно не зникають.
        """
        out = {}
        for row in chart.main:
            for b in row:
                k, _ = b.index
                lead = rho_pair(self.model.lead_pair(k))
                record = None
                for side, mono in (("plus", b.plus), ("minus", b.minus)):
                    if mono.is_one():
                        record = {"term": side, "variable": None}
                    elif mono.variables() == {lead} and chart.slots.get(("r", self.model.lead_pair(k))) == lead:
                        record = {"term": side, "variable": str(lead)}
                    if record:
                        break
                if record is None and self._invertible(chart, b):
                    record = {"term": "both", "variable": None}
                out[b.index] = record
        return out

    def unterminated(self) -> List[Tuple[str, Tuple[int, int]]]:
        missing = []
        for chart in self.leaves:
            for index, record in self.termination(chart).items():
                if record is None:
                    missing.append((chart.id, index))
        return missing

    def summary_rows(self) -> List[dict]:
        rows = []
        wp = {(r["k"], r["tau"]): r for r in self.records.get("wp", [])}
        eth = {(r["k"], r["tau"]): r for r in self.records.get("eth", [])}
        for k, tau in self.model.binomial_indices():
            rows.append({
                "k": k,
                "tau": tau,
                "rho": wp.get((k, tau), {}).get("rounds"),
                "sigma": ",".join(map(str, wp.get((k, tau), {}).get("steps", []))),
                "kappa": eth.get((k, tau), {}).get("rounds"),
                "varsigma": ",".join(map(str, eth.get((k, tau), {}).get("steps", []))),
            })
        return rows

    def to_manifest(self) -> dict:
        return {
            "m": list(self.model.m),
            "stages": list(self.completed),
            "partial": self.partial,
            "charts_created": len(self.charts),
            "final_charts": [chart.id for chart in self.leaves],
            "pruned": list(self.pruned),
            "skipped": [[cid, label, [render_label(y) for y in center]] for cid, label, center in self.skipped],
            "theta": self.records.get("theta", []),
            "wp": self.records.get("wp", []),
            "eth": self.records.get("eth", []),
            "events": [event.to_dict() for event in self.events],
            "notes": list(self.notes),
        }


def run_full_tower(model: ModelSystem, options: Optional[TowerOptions] = None,
                   lambda_policy: str = "all") -> TowerRun:
    """
    Запускає ϑ → ℘ → ð над базовими картами.

    :param model: Модель 𝒱_m.
    :param options: Параметри вежі; truncate_after обриває послідовність після ϑ або ℘.
    :param lambda_policy: Політика вибору Λ^o для базових карт.
    :return: TowerRun з фінальним атласом.
    """
    options = options or TowerOptions()
    run = TowerRun(model, options, lambda_o_choices(model, lambda_policy))
    print(f"[tower] m={model.m}, {len(run.bases)} base charts, gate={options.gate}")
    for stage_cls in STAGE_CLASSES:
        stage = stage_cls(run)
        run.records[stage.name] = stage.execute()
        run.completed.append(stage.name)
        if options.truncate_after == stage.name:
            print(f"[tower] truncated after {stage.name}")
            break
    print(f"[tower] {len(run.leaves)} final charts, {len(run.events)} blowups")
    return run
