import numpy as np


def row_echelon_mod_p(matrix, p: int, n_pivot_cols: int = None):
    """
    Зводить матрицю над F_p до ступінчастого вигляду (зведеного за рядками).

    :param matrix: Матриця цілих чисел (m x n).
    :param p: Просте число.
    :param n_pivot_cols: Шукати опорні елементи лише в перших стовпцях; за замовчуванням у всіх.
    :return: (R, pivot_cols): зведена матриця int64 і список опорних стовпців.
    """
    R = np.asarray(matrix, dtype=np.int64) % p
    if R.ndim != 2:
        raise ValueError("matrix must be two-dimensional")
    R = R.copy()
    m, n = R.shape
    if n_pivot_cols is None:
        n_pivot_cols = n

    pivot_cols = []
    pivot_row = 0
    for col in range(n_pivot_cols):
        if pivot_row >= m:
            break
        nonzero = np.nonzero(R[pivot_row:, col])[0]
        if nonzero.size == 0:
            continue
        found = pivot_row + int(nonzero[0])
        if found != pivot_row:
            R[[pivot_row, found]] = R[[found, pivot_row]]
        inv = pow(int(R[pivot_row, col]), -1, p)
        R[pivot_row] = (R[pivot_row] * inv) % p
        factors = R[:, col].copy()
        factors[pivot_row] = 0
        R = (R - np.outer(factors, R[pivot_row])) % p
        pivot_cols.append(col)
        pivot_row += 1
    return R, pivot_cols


def rank_mod_p(matrix, p: int) -> int:
    matrix = np.asarray(matrix, dtype=np.int64)
    if matrix.size == 0:
        return 0
    _, pivots = row_echelon_mod_p(matrix, p)
    return len(pivots)


def pivot_columns_mod_p(matrix, p: int, column_order=None) -> list:
    """
    Лексикографічно перший набір стовпців максимального рангу.

    :param column_order: Порядок перегляду стовпців (за замовчуванням природний).
    :return: Індекси вибраних стовпців у вихідній нумерації.
    """
    matrix = np.asarray(matrix, dtype=np.int64)
    if matrix.size == 0:
        return []
    order = list(range(matrix.shape[1])) if column_order is None else list(column_order)
    _, pivots = row_echelon_mod_p(matrix[:, order], p)
    return [order[i] for i in pivots]


def solve_mod_p(A, b, p: int):
    """
    Розв'язує A·y = b над F_p. Вільні змінні прирівнюються до нуля.

    :return: Вектор розв'язку або None, якщо система несумісна.
    """
    A = np.asarray(A, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1) % p
    m, n = A.shape
    R, pivots = row_echelon_mod_p(np.hstack([A, b]), p, n_pivot_cols=n)
    for row in range(len(pivots), m):
        if R[row, n] % p != 0:
            return None
    y = np.zeros(n, dtype=np.int64)
    for row, col in enumerate(pivots):
        y[col] = R[row, n]
    return y
