"""Independent reference computations used to cross-check the fast kernels.

Nothing here shares code with the closed-form exponential, the Fox-calculus
Jacobian or the lattice reduction it checks.
"""

from __future__ import annotations

from itertools import combinations
from math import gcd

import numpy as np


def exp_series(v, terms: int = 40) -> np.ndarray:
    """Truncated power series of the matrix exponential."""
    v = np.asarray(v, dtype=complex)
    out = np.eye(v.shape[0], dtype=complex)
    term = np.eye(v.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ v / k
        out = out + term
    return out


_BASIS = [np.array(b, dtype=complex) for b in ([[1, 0], [0, -1]], [[0, 1], [0, 0]], [[0, 0], [1, 0]])]


def _word_matrix(mats, letters) -> np.ndarray:
    out = np.eye(2, dtype=complex)
    for g, s in letters:
        out = out @ (mats[g] if s == 1 else np.linalg.inv(mats[g]))
    return out


def fd_jacobian(relators, matrices, h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian of the relator map in right-trivialized coordinates.

    ``relators`` are sequences of ``(generator, sign)`` letters.  Column
    ``3 i + b`` perturbs generator ``i`` to ``exp(+-h B_b) M_i``; row block
    ``r`` holds the traceless coordinates of ``dR_r R_r^-1``.
    """
    mats = [np.asarray(m, dtype=complex) for m in matrices]
    n = len(mats)
    rows = []
    for letters in relators:
        letters = list(letters)
        base_inv = np.linalg.inv(_word_matrix(mats, letters))
        block = np.zeros((3, 3 * n), dtype=complex)
        for i in range(n):
            for b, basis in enumerate(_BASIS):
                plus, minus = list(mats), list(mats)
                plus[i] = exp_series(h * basis) @ mats[i]
                minus[i] = exp_series(-h * basis) @ mats[i]
                d = (_word_matrix(plus, letters) - _word_matrix(minus, letters)) / (2 * h)
                m = d @ base_inv
                block[:, 3 * i + b] = [(m[0, 0] - m[1, 1]) / 2, m[0, 1], m[1, 0]]
        rows.append(block)
    if not rows:
        return np.zeros((0, 3 * n), dtype=complex)
    return np.vstack(rows)


def fd_local_dimension(relators, matrices, tol: float = 1e-6) -> int:
    """``3n`` minus the finite-difference Jacobian rank (threshold ``tol * sigma_max``)."""
    jac = fd_jacobian(relators, matrices)
    n3 = 3 * len(matrices)
    if jac.size == 0:
        return n3
    sv = np.linalg.svd(jac, compute_uv=False)
    if sv[0] == 0:
        return n3
    return n3 - int(np.sum(sv > tol * sv[0]))


def _det_int(m: list[list[int]]) -> int:
    """Exact integer determinant by fraction-free (Bareiss) elimination."""
    a = [row[:] for row in m]
    k = len(a)
    sign, prev = 1, 1
    for i in range(k - 1):
        if a[i][i] == 0:
            swap = next((r for r in range(i + 1, k) if a[r][i] != 0), None)
            if swap is None:
                return 0
            a[i], a[swap] = a[swap], a[i]
            sign = -sign
        for r in range(i + 1, k):
            for c in range(i + 1, k):
                a[r][c] = (a[r][c] * a[i][i] - a[r][i] * a[i][c]) // prev
        prev = a[i][i]
    return sign * a[k - 1][k - 1] if k else 1


def spans_by_minors(vectors, dim: int) -> bool:
    """Z^dim is spanned iff the maximal minors have gcd 1."""
    vecs = [list(v) for v in vectors]
    if dim == 0:
        return True
    if len(vecs) < dim:
        return False
    g = 0
    for cols in combinations(range(len(vecs)), dim):
        g = gcd(g, _det_int([[vecs[c][r] for c in cols] for r in range(dim)]))
        if g == 1:
            return True
    return False
