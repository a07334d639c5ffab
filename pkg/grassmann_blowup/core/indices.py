from itertools import combinations
from typing import Optional, Sequence, Tuple

from sympy.combinatorics import Permutation

from core.errors import InvalidComparison, InvalidParameters, NotPrimary

IndexTuple = Tuple[int, ...]
Pair = Tuple[IndexTuple, IndexTuple]


def enumerate_index_set(d: int, n: int) -> list:
    """
    Повертає всі зростаючі послідовності довжини d з [1, n] у лексикографічному порядку.

    :param d: Довжина кортежу.
    :param n: Верхня межа значень.
    :return: Список кортежів I_{d,n}.
    """
    if not (1 <= d < n):
        raise InvalidParameters(f"require 1 ≤ d < n (got d={d}, n={n})")
    return list(combinations(range(1, n + 1), d))


def normalize_index(raw: Sequence[int]) -> Tuple[Optional[IndexTuple], int]:
    """
    Сортує кортеж і повертає знак сортувальної перестановки.
    Кортеж з повтором дає (None, 0): відповідна плюккерова координата дорівнює нулю.
    """
    raw = tuple(raw)
    if len(set(raw)) != len(raw):
        return None, 0
    order = sorted(range(len(raw)), key=raw.__getitem__)
    sign = Permutation(order).signature() if len(raw) > 1 else 1
    return tuple(raw[i] for i in order), sign


def _check_lengths(a: Sequence[int], b: Sequence[int]):
    if len(a) != len(b):
        raise InvalidComparison(f"cannot compare tuples of lengths {len(a)} and {len(b)}")


def compare_lex(a: Sequence[int], b: Sequence[int]) -> int:
    _check_lengths(a, b)
    for x, y in zip(a, b):
        if x != y:
            return -1 if x < y else 1
    return 0


def compare_invlex(a: Sequence[int], b: Sequence[int]) -> int:
    _check_lengths(a, b)
    for x, y in zip(reversed(tuple(a)), reversed(tuple(b))):
        if x != y:
            return -1 if x < y else 1
    return 0


def difference(u: IndexTuple, m: IndexTuple) -> IndexTuple:
    return tuple(x for x in u if x not in m)


def intersection(u: IndexTuple, m: IndexTuple) -> IndexTuple:
    return tuple(x for x in u if x in m)


def is_basic(u: IndexTuple, m: IndexTuple) -> bool:
    return len(difference(u, m)) == 1


def is_primary_index(u: IndexTuple, m: IndexTuple) -> bool:
    return len(difference(u, m)) >= 2


def m_rank(u: IndexTuple, m: IndexTuple) -> int:
    """Ранг m-первинного співвідношення з провідною змінною x_u: |u∖m| − 2."""
    extra = len(difference(u, m))
    if extra < 2:
        raise NotPrimary(f"{render_index(u)} is not in I^m for m={render_index(m)}")
    return extra - 2


def wp_key(u: IndexTuple, m: IndexTuple) -> tuple:
    """
    Ключ сортування для порядку <_℘ на I_{d,n}∖{m}.
    Базисні кортежі (|u∖m| = 1) передують усім кортежам з I^m.
    """
    if tuple(u) == tuple(m):
        raise InvalidComparison("the chart index m is not ordered by <_℘")
    outside = difference(u, m)
    if len(outside) == 1:
        return (0, outside, intersection(u, m))
    return (1, len(outside) - 2, outside, intersection(u, m))


def compare_wp(u: IndexTuple, v: IndexTuple, m: IndexTuple) -> int:
    _check_lengths(u, v)
    ku, kv = wp_key(u, m), wp_key(v, m)
    if ku == kv:
        return 0
    return -1 if ku < kv else 1


def canonical_pair(u: IndexTuple, v: IndexTuple) -> Pair:
    """Пара (u, v) і (v, u) задають ту саму ϱ-змінну; зберігаємо лексикографічно меншу першою."""
    u, v = tuple(u), tuple(v)
    return (u, v) if u <= v else (v, u)


def upsilon(d: int, n: int) -> int:
    from math import comb

    return comb(n, d) - 1 - d * (n - d)


def render_index(u: Sequence[int]) -> str:
    if all(x <= 9 for x in u):
        return "".join(str(x) for x in u)
    return ".".join(str(x) for x in u)


def render_pair(pair: Pair) -> str:
    return f"({render_index(pair[0])},{render_index(pair[1])})"


def parse_index(text: str, n: int = 9) -> IndexTuple:
    """
    Розбирає кортеж індексів: "34" -> (3, 4) при n ≤ 9, або "1.10" -> (1, 10).
    """
    text = text.strip()
    if not text:
        raise InvalidParameters("empty index tuple")
    if "." in text or n > 9:
        parts = [p for p in text.replace("(", "").replace(")", "").split(".") if p]
    else:
        parts = list(text.replace("(", "").replace(")", ""))
    try:
        values = tuple(int(p) for p in parts)
    except ValueError:
        raise InvalidParameters(f"cannot parse index tuple '{text}'")
    normalized, sign = normalize_index(values)
    if normalized is None or sign != 1:
        raise InvalidParameters(f"index tuple '{text}' must be strictly increasing")
    return normalized
