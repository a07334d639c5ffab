from typing import FrozenSet, Iterable, List, Optional, Set, Tuple

from core.polynomial import Polynomial, Var

DEFAULT_DEPTH = 2

Support = Tuple[FrozenSet[Var], ...]


def support(poly: Polynomial) -> Support:
    """Носій многочлена: множини змінних його членів (коефіцієнти ненульові)."""
    return tuple(sorted((mono.variables() for mono in poly.terms), key=lambda s: sorted(s)))


class ZeroPropagation:
    """
    Структурне доведення того, що множина нулів системи не має точок, у яких задані
    змінні дорівнюють нулю.

    Член рівняння зникає, щойно нульова одна з його змінних. Якщо живим лишився один член,
    його змінні поза одиницями (змінними, що ніде не зникають) мусять містити нуль;
    якщо два, і один складається лише з одиниць, то одиницями є й змінні другого.
    Коли висновки вичерпано, перебирається найкоротша диз'юнкція до глибини depth.
    Результат False означає лише те, що доведення не знайдено.
    """

    def __init__(self, equations: Iterable[Polynomial], units: Iterable[Var] = (), depth: int = DEFAULT_DEPTH):
        self.supports: List[Support] = [s for s in (support(eq) for eq in equations) if s]
        self.units = frozenset(units)
        self.depth = depth

    def refutes(self, zero: Iterable[Var], nonzero: Iterable[Var] = (), depth: Optional[int] = None) -> bool:
        """
        :param zero: Змінні, що покладаються рівними нулю.
        :param nonzero: Додаткові змінні, що вважаються ненульовими.
        :param depth: Глибина розгалужень (типово self.depth).
        :return: True, якщо точок із такими нулями немає.
        """
        depth = self.depth if depth is None else depth
        return self._search(set(zero), set(self.units) | set(nonzero), depth)

    def _propagate(self, zero: Set[Var], units: Set[Var]) -> Optional[List[FrozenSet[Var]]]:
        """Замикання нулів та одиниць; None при суперечності, інакше відкриті диз'юнкції."""
        changed = True
        while changed:
            changed = False
            if zero & units:
                return None
            for terms in self.supports:
                alive = [t for t in terms if not (t & zero)]
                if len(alive) == 1:
                    free = alive[0] - units
                    if not free:
                        return None
                    if len(free) == 1:
                        zero |= free
                        changed = True
                elif len(alive) == 2:
                    first, second = alive
                    if first <= units and not second <= units:
                        units |= second
                        changed = True
                    elif second <= units and not first <= units:
                        units |= first
                        changed = True
        if zero & units:
            return None
        open_choices = []
        for terms in self.supports:
            alive = [t for t in terms if not (t & zero)]
            if len(alive) == 1:
                free = alive[0] - units
                if len(free) > 1:
                    open_choices.append(free)
        return open_choices

    def _search(self, zero: Set[Var], units: Set[Var], depth: int) -> bool:
        choices = self._propagate(zero, units)
        if choices is None:
            return True
        if depth == 0 or not choices:
            return False
        branch = min(choices, key=lambda s: (len(s), sorted(s)))
        return all(self._search(set(zero) | {v}, set(units), depth - 1) for v in sorted(branch))


def nonvanishing(equations: List[Polynomial], variables: Iterable[Var], known: Iterable[Var] = (),
                 depth: int = DEFAULT_DEPTH) -> FrozenSet[Var]:
    """
    Змінні, що не зникають у жодній точці системи: known плюс ті, для яких
    ZeroPropagation спростовує var = 0. Спершу прохід без розгалужень, потім з ними.
    """
    solver = ZeroPropagation(equations, known, depth)
    found = set(known)
    for level in sorted({0, depth}):
        for var in sorted(variables):
            if var in found:
                continue
            if solver.refutes({var}, found, level):
                found.add(var)
    return frozenset(found)
