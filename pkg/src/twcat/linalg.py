"""Exact linear algebra over the configured field.

Row reduction is delegated to python-flint (``fmpq_mat`` over the rationals,
``nmod_mat`` over prime fields); this module converts between numpy object
matrices of field elements and flint matrices and derives solutions, kernels
and ranks from the reduced row echelon form.
"""

from __future__ import annotations

import flint
import numpy as np

from .scalars import Field


def _to_flint(field: Field, m: np.ndarray):
    rows, cols = m.shape
    if field.p is None:
        return flint.fmpq_mat(rows, cols, list(m.flat)) if rows and cols else None
    return flint.nmod_mat(rows, cols, [int(x) for x in m.flat], field.p) if rows and cols else None


def _from_flint(field: Field, fm, rows: int, cols: int) -> np.ndarray:
    out = field.zeros(rows, cols)
    if fm is None:
        return out
    if field.p is None:
        flat = fm.entries()
    else:
        flat = [int(x) for x in fm.entries()]
    for k, x in enumerate(flat):
        out[k // cols, k % cols] = x
    return out


def rref(field: Field, m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and the pivot columns."""
    rows, cols = m.shape
    fm = _to_flint(field, m)
    if fm is None:
        return field.zeros(rows, cols), []
    red, rank = fm.rref()
    r = _from_flint(field, red, rows, cols)
    pivots = []
    for i in range(rank):
        for j in range(cols):
            if r[i, j] != 0:
                pivots.append(j)
                break
    return r, pivots


def rank(field: Field, m: np.ndarray) -> int:
    fm = _to_flint(field, m)
    return 0 if fm is None else fm.rank()


def solve(field: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """One solution ``x`` of ``a @ x = b`` (free variables set to zero), or None."""
    rows, cols = a.shape
    b = b.reshape(rows, 1)
    if cols == 0:
        return field.zeros(0, 1) if Field.is_zero_matrix(b) else None
    aug = np.concatenate([a, b], axis=1)
    r, pivots = rref(field, aug)
    if pivots and pivots[-1] == cols:
        return None
    x = field.zeros(cols, 1)
    for i, j in enumerate(pivots):
        x[j, 0] = r[i, cols]
    return x


def nullspace(field: Field, a: np.ndarray) -> list[np.ndarray]:
    """Basis of the right kernel of ``a`` as column vectors."""
    rows, cols = a.shape
    if rows == 0:
        return [field.eye(cols)[:, [j]] for j in range(cols)]
    r, pivots = rref(field, a)
    pivset = set(pivots)
    basis = []
    for f in range(cols):
        if f in pivset:
            continue
        v = field.zeros(cols, 1)
        v[f, 0] = field.one
        for i, j in enumerate(pivots):
            v[j, 0] = field.neg(r[i, f])
        basis.append(v)
    return basis


def right_inverse(field: Field, m: np.ndarray) -> np.ndarray | None:
    """A matrix ``s`` with ``m @ s = I`` when ``m`` has full row rank."""
    rows, cols = m.shape
    out = field.zeros(cols, rows)
    eye = field.eye(rows)
    for k in range(rows):
        x = solve(field, m, eye[:, [k]])
        if x is None:
            return None
        out[:, [k]] = x
    return out


def inverse(field: Field, m: np.ndarray) -> np.ndarray | None:
    if m.shape[0] != m.shape[1]:
        return None
    if m.shape[0] == 0:
        return field.zeros(0, 0)
    if rank(field, m) < m.shape[0]:
        return None
    return right_inverse(field, m)
