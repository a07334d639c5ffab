from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, NamedTuple, Optional, Union

import sympy

from core.errors import IncompatibleFields, MissingAssignment
from core.indices import IndexTuple, Pair, canonical_pair, render_index

Scalar = Union[int, Fraction]

KINDS = ("x", "rho", "eps", "delta")
PLAIN_TO_EXCEPTIONAL = {"x": "eps", "rho": "delta", "eps": "eps", "delta": "delta"}


class Var(NamedTuple):
    """
    Змінна карти: x_u (ϖ), x_(u,v) (ϱ), ε_w або δ_(u,v) (виняткові параметри).
    Для ϱ/δ індекс зберігається як канонічна пара.
    """
    kind: str
    index: tuple

    @property
    def exceptional(self) -> bool:
        return self.kind in ("eps", "delta")

    @property
    def is_pair(self) -> bool:
        return self.kind in ("rho", "delta")

    def __str__(self) -> str:
        if self.is_pair:
            u, v = self.index
            name = "x" if self.kind == "rho" else self.kind
            return f"{name}[({render_index(u)},{render_index(v)})]"
        return f"{self.kind}[{render_index(self.index)}]"


def x(u: IndexTuple) -> Var:
    return Var("x", tuple(u))


def rho(u: IndexTuple, v: IndexTuple) -> Var:
    return Var("rho", canonical_pair(u, v))


def rho_pair(pair: Pair) -> Var:
    return Var("rho", canonical_pair(*pair))


def eps(w: IndexTuple) -> Var:
    return Var("eps", tuple(w))


def delta(u: IndexTuple, v: IndexTuple) -> Var:
    return Var("delta", canonical_pair(u, v))


class Monomial(tuple):
    """Відсортований кортеж пар (змінна, степінь) з додатними степенями; порожній кортеж = 1."""

    __slots__ = ()

    def __new__(cls, items=()):
        merged: Dict[Var, int] = {}
        pairs = items.items() if isinstance(items, dict) else items
        for var, exp in pairs:
            merged[var] = merged.get(var, 0) + int(exp)
        if any(e < 0 for e in merged.values()):
            raise ValueError("Monomial exponents must be nonnegative")
        return super().__new__(cls, tuple(sorted((v, e) for v, e in merged.items() if e > 0)))

    @classmethod
    def of(cls, *variables: Var) -> "Monomial":
        return cls((v, 1) for v in variables)

    def as_dict(self) -> Dict[Var, int]:
        return dict(self)

    def variables(self) -> frozenset:
        return frozenset(v for v, _ in self)

    def exponent(self, var: Var) -> int:
        for v, e in self:
            if v == var:
                return e
        return 0

    def degree(self) -> int:
        return sum(e for _, e in self)

    def is_one(self) -> bool:
        return len(self) == 0

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(list(self) + list(other))

    def divides(self, other: "Monomial") -> bool:
        exps = other.as_dict()
        return all(exps.get(v, 0) >= e for v, e in self)

    def divide(self, other: "Monomial") -> Optional["Monomial"]:
        """self / other, або None якщо ділення неточне."""
        exps = self.as_dict()
        for v, e in other:
            if exps.get(v, 0) < e:
                return None
            exps[v] -= e
        return Monomial(exps)

    def gcd(self, other: "Monomial") -> "Monomial":
        mine = self.as_dict()
        return Monomial((v, min(e, mine[v])) for v, e in other if v in mine)

    def without(self, variables: Iterable[Var]) -> "Monomial":
        drop = set(variables)
        return Monomial((v, e) for v, e in self if v not in drop)

    def __str__(self) -> str:
        if not self:
            return "1"
        return "*".join(str(v) if e == 1 else f"{v}^{e}" for v, e in self)

    def __repr__(self) -> str:
        return f"Monomial({self})"


ONE = Monomial()


def _coerce(value, field: Optional[int]):
    if field is None:
        return Fraction(value)
    if isinstance(value, Fraction):
        return (value.numerator * pow(value.denominator, -1, field)) % field
    return int(value) % field


class Polynomial:
    """
    Розріджений многочлен над ℚ (field=None, коефіцієнти Fraction) або над F_p (field=p).
    Значення незмінні: усі операції повертають новий об'єкт.
    """

    __slots__ = ("terms", "field")

    def __init__(self, terms: Optional[Dict[Monomial, Scalar]] = None, field: Optional[int] = None):
        self.field = field
        clean = {}
        for mono, coef in (terms or {}).items():
            c = _coerce(coef, field)
            if c:
                clean[mono] = c
        self.terms = clean

    @classmethod
    def constant(cls, value: Scalar, field: Optional[int] = None) -> "Polynomial":
        return cls({ONE: value}, field)

    @classmethod
    def variable(cls, var: Var, field: Optional[int] = None) -> "Polynomial":
        return cls({Monomial.of(var): 1}, field)

    @classmethod
    def from_monomial(cls, mono: Monomial, coef: Scalar = 1, field: Optional[int] = None) -> "Polynomial":
        return cls({mono: coef}, field)

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.field != self.field:
                raise IncompatibleFields(f"field mismatch: {self.field} vs {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(other, self.field)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            terms[mono] = terms.get(mono, 0) + c
        return Polynomial(terms, self.field)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({m: -c for m, c in self.terms.items()}, self.field)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        terms: Dict[Monomial, Scalar] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = m1 * m2
                terms[mono] = terms.get(mono, 0) + c1 * c2
        return Polynomial(terms, self.field)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = Polynomial.constant(1, self.field)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other, self.field)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash((self.field, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m.is_one() for m in self.terms)

    def constant_value(self) -> Scalar:
        return self.terms.get(ONE, _coerce(0, self.field))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def variables(self) -> frozenset:
        out = set()
        for mono in self.terms:
            out.update(mono.variables())
        return frozenset(out)

    def degree_in(self, var: Var) -> int:
        return max((m.exponent(var) for m in self.terms), default=0)

    def total_degree(self) -> int:
        return max((m.degree() for m in self.terms), default=0)

    def to_field(self, p: int) -> "Polynomial":
        if self.field == p:
            return self
        if self.field is not None:
            raise IncompatibleFields(f"cannot move F_{self.field} polynomial to F_{p}")
        return Polynomial(dict(self.terms), p)

    def substitute(self, mapping: Dict[Var, Union["Polynomial", Scalar]]) -> "Polynomial":
        """Одночасна підстановка змінних многочленами або числами."""
        images = {v: self._lift(img) for v, img in mapping.items()}
        powers: Dict[tuple, Polynomial] = {}
        result = Polynomial(field=self.field)
        for mono, coef in self.terms.items():
            kept = []
            term = Polynomial.constant(coef, self.field)
            for var, exp in mono:
                if var in images:
                    key = (var, exp)
                    if key not in powers:
                        powers[key] = images[var] ** exp
                    term = term * powers[key]
                else:
                    kept.append((var, exp))
            if kept:
                term = term * Polynomial.from_monomial(Monomial(kept), 1, self.field)
            result = result + term
        return result

    def specialize(self, values: Dict[Var, Scalar]) -> "Polynomial":
        return self.substitute({v: Polynomial.constant(c, self.field) for v, c in values.items()})

    def partial_derivative(self, var: Var) -> "Polynomial":
        terms: Dict[Monomial, Scalar] = {}
        for mono, coef in self.terms.items():
            e = mono.exponent(var)
            if e == 0:
                continue
            exps = mono.as_dict()
            exps[var] = e - 1
            reduced = Monomial(exps)
            terms[reduced] = terms.get(reduced, 0) + coef * e
        return Polynomial(terms, self.field)

    def evaluate(self, point: Dict[Var, Scalar]) -> Scalar:
        total = _coerce(0, self.field)
        for mono, coef in self.terms.items():
            value = coef
            for var, exp in mono:
                if var not in point:
                    raise MissingAssignment(f"no value for {var}")
                value = value * _coerce(point[var], self.field) ** exp
                if self.field is not None:
                    value %= self.field
            total = total + value
        return _coerce(total, self.field)

    def collect(self, var: Var) -> Dict[int, "Polynomial"]:
        """Коефіцієнти при степенях змінної var."""
        buckets: Dict[int, Dict[Monomial, Scalar]] = {}
        for mono, coef in self.terms.items():
            e = mono.exponent(var)
            rest = mono.without([var])
            bucket = buckets.setdefault(e, {})
            bucket[rest] = bucket.get(rest, 0) + coef
        return {e: Polynomial(t, self.field) for e, t in sorted(buckets.items())}

    def monomial_quotient(self, other: "Polynomial") -> Optional[Monomial]:
        """
        Повертає моном c такий, що self = ±c·other, якщо обидва: біноми (або мономи) з
        однаковою структурою коефіцієнтів; інакше None.
        """
        if len(self.terms) != len(other.terms) or not self.terms:
            return None
        mine = sorted(self.terms.items())
        theirs = list(other.terms.items())
        for sign in (1, -1):
            factor = None
            for mono, coef in mine:
                match = None
                for omono, ocoef in theirs:
                    if _coerce(ocoef * sign, self.field) != coef:
                        continue
                    q = mono.divide(omono)
                    if q is not None and (factor is None or q == factor):
                        match = q
                        break
                if match is None:
                    factor = None
                    break
                factor = match
            if factor is not None and Polynomial.from_monomial(factor, sign, self.field) * other == self:
                return factor
        return None

    def to_sympy(self):
        expr = sympy.Integer(0)
        for mono, coef in self.terms.items():
            term = sympy.Rational(coef.numerator, coef.denominator) if isinstance(coef, Fraction) else sympy.Integer(coef)
            for var, exp in mono:
                term = term * sympy.Symbol(str(var)) ** exp
            expr += term
        return sympy.expand(expr)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda item: (-item[0].degree(), item[0]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for i, (mono, coef) in enumerate(self.sorted_terms()):
            c = coef
            if self.field is None and c < 0:
                sign, c = "-", -c
            else:
                sign = "+"
            body = str(mono)
            if mono.is_one():
                text = str(c)
            elif c == 1:
                text = body
            else:
                text = f"{c}*{body}"
            if i == 0:
                parts.append(text if sign == "+" else f"-{text}")
            else:
                parts.append(f" {sign} {text}")
        return "".join(parts)

    def __repr__(self) -> str:
        field = "Q" if self.field is None else f"F_{self.field}"
        return f"Polynomial[{field}]({self})"


@dataclass(frozen=True)
class Binomial:
    """
    Біноміальне рівняння plus − minus з коефіцієнтами +1/−1.
    tag ∈ {main, residual, quotient}; index = (k, τ) для головних, (k, s, t) для залишкових.
    """
    plus: Monomial
    minus: Monomial
    tag: str
    index: tuple = ()

    def to_polynomial(self, field: Optional[int] = None) -> Polynomial:
        return Polynomial.from_monomial(self.plus, 1, field) - Polynomial.from_monomial(self.minus, 1, field)

    def variables(self) -> frozenset:
        return self.plus.variables() | self.minus.variables()

    def with_terms(self, plus: Monomial, minus: Monomial) -> "Binomial":
        return Binomial(plus, minus, self.tag, self.index)

    def __str__(self) -> str:
        return f"{self.plus} - {self.minus}"
