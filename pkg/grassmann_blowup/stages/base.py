from abc import ABC, abstractmethod
from itertools import count, product
from typing import List, Tuple

from tqdm import tqdm

from core.chart_atlas import Label, TowerIndex, divisor_key
from core.errors import TowerNonTermination


class TowerStage(ABC):
    """
    Одна послідовність роздуттів вежі (ϑ, ℘ або ð).
    run: спільний TowerRun: атлас поточних карт, таблиці кратностей, журнал подій.
    """
    name = "stage"

    def __init__(self, run):
        self.run = run
        self.records = []

    @abstractmethod
    def steps(self) -> list:
        """Повертає впорядкований список кроків стадії"""
        pass

    @abstractmethod
    def run_step(self, step) -> dict:
        """Виконує один крок і повертає запис для звіту"""
        pass

    def execute(self) -> List[dict]:
        steps = self.steps()
        print(f"[{self.name}] {len(steps)} steps over {len(self.run.leaves)} charts")
        for step in tqdm(steps, desc=self.name, disable=not self.run.options.verbose):
            self.records.append(self.run_step(step))
        print(f"[{self.name}] done, {len(self.run.leaves)} charts")
        return self.records


class RoundStage(TowerStage):
    """
    Спільна логіка ℘ та ð: для кожного головного бінома B_(kτ) раунди μ = 1, 2, …
    Пари центрів раунду обчислюються з таблиць на початок раунду і роздуваються по черзі.
    """

    def steps(self) -> list:
        return self.run.model.binomial_indices()

    @abstractmethod
    def candidates(self, k: int, tau: int) -> Tuple[List[Label], List[Label]]:
        """Дивізори Y⁺ та Y⁻, з яких складаються пари центрів"""
        pass

    def centers(self, k: int, tau: int) -> List[Tuple[Label, Label]]:
        plus, minus = self.candidates(k, tau)
        pairs = [(a, b) for a, b in product(plus, minus) if a != b]
        pairs.sort(key=lambda pair: (divisor_key(pair[0]), divisor_key(pair[1])))
        return [pair for pair in pairs if self.run.gate_passes(pair)]

    def degree_bound(self, k: int, tau: int) -> int:
        """Найбільший сумарний степінь deg T⁺ + deg T⁻ бінома B_(kτ) на листових картах."""
        degrees = [chart.main_binomial(k, tau).plus.degree() + chart.main_binomial(k, tau).minus.degree()
                   for chart in self.run.leaves]
        return max(degrees, default=0)

    def run_step(self, step) -> dict:
        k, tau = step
        per_round = []
        bound = self.degree_bound(k, tau)
        accumulated = 0
        for mu in count(1):
            if mu > bound + accumulated + 1:
                raise TowerNonTermination(
                    f"{self.name}({k},{tau}) exceeded {bound + accumulated + 1} rounds "
                    f"(degree {bound}, {accumulated} exceptional divisors)"
                )
            h = 0
            for center in self.centers(k, tau):
                if not self.run.holders(center):
                    continue
                if self.run.blow_up(TowerIndex(self.name, k, tau, mu, h + 1), center):
                    h += 1
            if h == 0:
                break
            accumulated += h
            per_round.append(h)
        return {"k": k, "tau": tau, "rounds": len(per_round), "steps": per_round, "bound": bound}
