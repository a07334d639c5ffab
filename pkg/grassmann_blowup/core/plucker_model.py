from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from typing import Dict, List, Optional, Tuple

from core.errors import InvalidParameters, NotPrimary
from core.indices import (IndexTuple, Pair, canonical_pair, difference, enumerate_index_set,
                          is_basic, is_primary_index, m_rank, normalize_index, render_index,
                          render_pair, upsilon, wp_key)
from core.polynomial import Binomial, Monomial, Polynomial, Var, rho_pair, x


@dataclass(frozen=True)
class Term:
    sign: int
    pair: Pair


@dataclass(frozen=True)
class PluckerRelation:
    """
    Плюккерове співвідношення Σ sign·p_u·p_v. Для первинного співвідношення terms[0]:
    провідний член p_m·p_u зі знаком +1, решта відсортована лексикографічно за парами.
    """
    h: IndexTuple
    k: IndexTuple
    terms: Tuple[Term, ...]
    m: Optional[IndexTuple] = None
    leading: Optional[IndexTuple] = None

    @property
    def t(self) -> int:
        return len(self.terms) - 1

    @property
    def rank(self) -> int:
        return self.t - 2

    @property
    def is_primary(self) -> bool:
        return self.leading is not None

    @property
    def pairs(self) -> List[Pair]:
        return [term.pair for term in self.terms]

    def homogeneous(self, field: Optional[int] = None) -> Polynomial:
        poly = Polynomial(field=field)
        for term in self.terms:
            u, v = term.pair
            poly = poly + Polynomial.from_monomial(Monomial.of(x(u), x(v)), term.sign, field)
        return poly

    def __str__(self) -> str:
        parts = []
        for i, term in enumerate(self.terms):
            body = f"p{render_index(term.pair[0])}p{render_index(term.pair[1])}"
            sign = "-" if term.sign < 0 else "+"
            parts.append((f"-{body}" if sign == "-" else body) if i == 0 else f" {sign} {body}")
        return "".join(parts)


def plucker_relation(h: IndexTuple, k: IndexTuple) -> Optional[PluckerRelation]:
    """
    Розкладає F_{h,k} = Σ_λ (−1)^{λ−1} p_{h k_λ} p_{k∖k_λ}.

    :param h: Кортеж довжини d−1.
    :param k: Кортеж довжини d+1.
    :return: Співвідношення без нульових членів або None, якщо всі члени зникають.
    """
    h, k = tuple(h), tuple(k)
    if len(k) != len(h) + 2:
        raise InvalidParameters(f"need |k| = |h| + 2, got |h|={len(h)}, |k|={len(k)}")
    if tuple(sorted(set(h))) != h or tuple(sorted(set(k))) != k:
        raise InvalidParameters("h and k must be strictly increasing")
    terms = []
    for lam, entry in enumerate(k):
        first, sign = normalize_index(h + (entry,))
        if first is None:
            continue
        second = k[:lam] + k[lam + 1:]
        terms.append(Term(sign * (-1) ** lam, canonical_pair(first, second)))
    if not terms:
        return None
    return PluckerRelation(h, k, tuple(terms))


def primary_relation(m: IndexTuple, u: IndexTuple) -> PluckerRelation:
    """
    m-первинне співвідношення F_{m,u}: h = u∖u0, k = u0 ∪ m, де u0 = min(u∖m).
    Знак нормалізовано так, щоб провідний член p_m·p_u мав коефіцієнт +1.
    """
    m, u = tuple(m), tuple(u)
    if not is_primary_index(u, m):
        raise NotPrimary(f"{render_index(u)} is not in I^m for m={render_index(m)}")
    u0 = min(difference(u, m))
    h = tuple(e for e in u if e != u0)
    k = tuple(sorted(set(m) | {u0}))
    relation = plucker_relation(h, k)
    lead_pair = canonical_pair(m, u)
    leading = [t for t in relation.terms if t.pair == lead_pair]
    if not leading:
        raise NotPrimary(f"relation for {render_index(u)} lacks the leading term")
    flip = leading[0].sign
    rest = sorted((Term(t.sign * flip, t.pair) for t in relation.terms if t.pair != lead_pair),
                  key=lambda t: t.pair)
    return PluckerRelation(h, k, (Term(1, lead_pair),) + tuple(rest), m, u)


def dehomogenize(relation: PluckerRelation, m: IndexTuple, field: Optional[int] = None) -> Polynomial:
    """p_m ↦ 1, p_w ↦ x_w."""
    if not relation.is_primary or relation.m != tuple(m):
        raise NotPrimary("only m-primary relations are de-homogenized on the chart of m")
    return relation.homogeneous(field).specialize({x(m): 1})


def linearize(relation: PluckerRelation, field: Optional[int] = None) -> Polynomial:
    poly = Polynomial(field=field)
    for term in relation.terms:
        poly = poly + Polynomial.from_monomial(Monomial.of(rho_pair(term.pair)), term.sign, field)
    return poly


def _plucker_product(pair: Pair, m: IndexTuple) -> Monomial:
    return Monomial.of(*(x(w) for w in pair if w != tuple(m)))


def main_binomials(relation: PluckerRelation, k: int) -> List[Binomial]:
    """B_(kτ): x_(u_τ,v_τ)·x_{u_F} − x_(m,u_F)·x_{u_τ}·x_{v_τ}, τ = 1..𝔱_F."""
    m, u = relation.m, relation.leading
    lead = rho_pair(relation.terms[0].pair)
    out = []
    for tau, term in enumerate(relation.terms[1:], start=1):
        plus = Monomial.of(rho_pair(term.pair), x(u))
        minus = Monomial.of(lead) * _plucker_product(term.pair, m)
        out.append(Binomial(plus, minus, "main", (k, tau)))
    return out


def residual_binomials(relation: PluckerRelation, k: int) -> List[Binomial]:
    """B_(s,t): x_(u_s,v_s)·x_{u_t}x_{v_t} − x_(u_t,v_t)·x_{u_s}x_{v_s} для s < t."""
    m = relation.m
    out = []
    for s, t in combinations(range(1, len(relation.terms)), 2):
        ps, pt = relation.terms[s].pair, relation.terms[t].pair
        plus = Monomial.of(rho_pair(ps)) * _plucker_product(pt, m)
        minus = Monomial.of(rho_pair(pt)) * _plucker_product(ps, m)
        out.append(Binomial(plus, minus, "residual", (k, s, t)))
    return out


def quotient_binomials(family: List[PluckerRelation], bound: int = 3) -> List[Binomial]:
    """
    Перебір ϱ-лінійних біномів X − X′ ступеня ≤ bound з однаковим безквадратним φ-образом,
    де φ(x_(u,v)) = p_u·p_v. Кожне співвідношення дає щонайбільше одну змінну в кожен член.
    """
    found: Dict[frozenset, Binomial] = {}
    for size in range(2, bound + 1):
        for combo in combinations(range(len(family)), size):
            choices = [list(permutations(range(len(family[i].terms)), 2)) for i in combo]
            for picks in product(*choices):
                plus_pairs = [family[i].terms[a].pair for i, (a, _) in zip(combo, picks)]
                minus_pairs = [family[i].terms[b].pair for i, (_, b) in zip(combo, picks)]
                image_plus = sorted(w for pair in plus_pairs for w in pair)
                image_minus = sorted(w for pair in minus_pairs for w in pair)
                if image_plus != image_minus or len(set(image_plus)) != len(image_plus):
                    continue
                plus = Monomial.of(*(rho_pair(pair) for pair in plus_pairs))
                minus = Monomial.of(*(rho_pair(pair) for pair in minus_pairs))
                key = frozenset((plus, minus))
                if key in found:
                    continue
                first, second = sorted((plus, minus))
                found[key] = Binomial(first, second, "quotient", (len(found) + 1,))
    return list(found.values())


@dataclass
class ModelSystem:
    """
    Рівняння моделі 𝒱_m в ℛ_ℱ для фіксованої карти p_m ≠ 0.
    family[k-1]: співвідношення F_k; main[k-1]: список B_(k·).
    """
    d: int
    n: int
    m: IndexTuple
    quotient_bound: int = 3
    family: List[PluckerRelation] = field(init=False)
    fbar: List[Polynomial] = field(init=False)
    linear: List[Polynomial] = field(init=False)
    main: List[List[Binomial]] = field(init=False)
    residual: List[List[Binomial]] = field(init=False)
    quotient: List[Binomial] = field(init=False)
    pair_owner: Dict[Pair, Tuple[int, int]] = field(init=False)

    def __post_init__(self):
        self.m = tuple(self.m)
        index_set = enumerate_index_set(self.d, self.n)
        if self.m not in index_set:
            raise InvalidParameters(f"m={self.m} is not an increasing {self.d}-subset of [1, {self.n}]")
        if self.quotient_bound < 1:
            raise InvalidParameters("quotient bound must be ≥ 1")
        self.index_set = index_set
        self.family = primary_family(self.d, self.n, self.m)
        self.fbar = [dehomogenize(F, self.m) for F in self.family]
        self.linear = [linearize(F) for F in self.family]
        self.main = [main_binomials(F, k) for k, F in enumerate(self.family, start=1)]
        self.residual = [residual_binomials(F, k) for k, F in enumerate(self.family, start=1)]
        self.quotient = quotient_binomials(self.family, self.quotient_bound)
        self.pair_owner = {}
        for k, F in enumerate(self.family, start=1):
            for s, term in enumerate(F.terms):
                if term.pair in self.pair_owner:
                    raise InvalidParameters(f"pair {render_pair(term.pair)} appears in two relations")
                self.pair_owner[term.pair] = (k, s)

    @property
    def upsilon(self) -> int:
        return len(self.family)

    @property
    def plucker_indices(self) -> List[IndexTuple]:
        return [u for u in self.index_set if u != self.m]

    @property
    def basic_indices(self) -> List[IndexTuple]:
        return [u for u in self.plucker_indices if is_basic(u, self.m)]

    def relation(self, k: int) -> PluckerRelation:
        return self.family[k - 1]

    def leading(self, k: int) -> IndexTuple:
        return self.family[k - 1].leading

    def lead_pair(self, k: int) -> Pair:
        return self.family[k - 1].terms[0].pair

    def binomial_indices(self) -> List[Tuple[int, int]]:
        return [b.index for row in self.main for b in row]

    def main_binomial(self, k: int, tau: int) -> Binomial:
        return self.main[k - 1][tau - 1]

    def express_in_basic(self, u: IndexTuple) -> Polynomial:
        """Виражає x_u через базисні змінні індукцією за рангом."""
        return _basic_form(self, tuple(u), {})

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "n": self.n,
            "m": list(self.m),
            "upsilon": self.upsilon,
            "relations": [
                {
                    "u": list(F.leading),
                    "rank": F.rank,
                    "t": F.t,
                    "terms": [{"sign": t.sign, "pair": [list(t.pair[0]), list(t.pair[1])]} for t in F.terms],
                    "text": str(F),
                    "dehomogenized": str(self.fbar[k]),
                    "linear": str(self.linear[k]),
                }
                for k, F in enumerate(self.family)
            ],
            "main_binomials": [str(b) for row in self.main for b in row],
            "residual_binomials": [str(b) for row in self.residual for b in row],
            "quotient_binomials": [str(b) for b in self.quotient],
        }


def primary_family(d: int, n: int, m: IndexTuple) -> List[PluckerRelation]:
    m = tuple(m)
    indices = [u for u in enumerate_index_set(d, n) if u != m and is_primary_index(u, m)]
    indices.sort(key=lambda u: wp_key(u, m))
    return [primary_relation(m, u) for u in indices]


def _basic_form(model: ModelSystem, u: IndexTuple, memo: Dict[IndexTuple, Polynomial]) -> Polynomial:
    if u in memo:
        return memo[u]
    if u == model.m:
        result = Polynomial.constant(1)
    elif is_basic(u, model.m):
        result = Polynomial.variable(x(u))
    else:
        k = next(i for i, F in enumerate(model.family) if F.leading == u)
        rest = model.fbar[k] - Polynomial.variable(x(u))
        mapping = {}
        for var in rest.variables():
            mapping[var] = _basic_form(model, var.index, memo)
        result = -rest.substitute(mapping)
    memo[u] = result
    return result


def residual_certificate(first: Binomial, second: Binomial, residual: Binomial) -> Optional[Monomial]:
    """
    Шукає мономи a, b, c з a·B_s − b·B_t = ±c·B_(s,t), де a, b знімають плюс-члени.

    :return: Моном c або None, якщо такої комбінації немає.
    """
    common = first.plus.gcd(second.plus)
    a = second.plus.divide(common)
    b = first.plus.divide(common)
    combo = (Polynomial.from_monomial(a) * first.to_polynomial()
             - Polynomial.from_monomial(b) * second.to_polynomial())
    target = residual.to_polynomial()
    if combo.is_zero():
        return None
    return combo.monomial_quotient(target)


def jacobian(polys: List[Polynomial], variables: List[Var]) -> List[List[Polynomial]]:
    return [[poly.partial_derivative(v) for v in variables] for poly in polys]


def rank_table(model: ModelSystem) -> List[dict]:
    return [{"k": k, "u": render_index(F.leading), "rank": F.rank, "terms": len(F.terms),
             "m_rank": m_rank(F.leading, model.m)}
            for k, F in enumerate(model.family, start=1)]
