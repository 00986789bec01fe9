"""Dense linear algebra over a field context.

Plain Gaussian elimination: first-nonzero pivoting in the exact prime
field, partial pivoting with a relative magnitude threshold in complex
mode. Dimensions here are tiny (a handful of antennas and users), so
clarity beats asymptotics throughout.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateChannel, DimensionMismatch
from .field import FieldContext


def _pivot_threshold(field: FieldContext, m: np.ndarray) -> float:
    if field.mode == "gf":
        return 0.0
    scale = float(np.max(np.abs(m), initial=0.0))
    return field.pivot_rtol * max(1.0, scale)


def _select_pivot(field: FieldContext, col: np.ndarray, threshold: float):
    """Index of the pivot entry within ``col``, or None if all negligible."""
    if field.mode == "gf":
        nz = np.nonzero(col)[0]
        return int(nz[0]) if nz.size else None
    idx = int(np.argmax(np.abs(col)))
    if abs(col[idx]) <= threshold:
        return None
    return idx


def _rref(field: FieldContext, a: np.ndarray):
    """Reduced row-echelon form; returns (R, pivot_columns)."""
    m = field.convert(a).copy()
    rows, cols = m.shape
    threshold = _pivot_threshold(field, m)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        k = _select_pivot(field, m[r:, c], threshold)
        if k is None:
            continue
        k += r
        if k != r:
            m[[r, k]] = m[[k, r]]
        m[r] = field.mul(m[r], field.inv(m[r, c]))
        for other in range(rows):
            if other != r and not field.is_zero(m[other, c]):
                m[other] = field.sub(m[other], field.mul(m[other, c], m[r]))
        pivots.append(c)
        r += 1
    return m, pivots


def rank(field: FieldContext, a) -> int:
    """Rank of a matrix over the field (tolerance-based in complex mode)."""
    a = field.convert(a)
    if a.ndim != 2 or a.size == 0:
        raise DimensionMismatch(f"rank needs a nonempty 2-d matrix, got shape {a.shape}")
    _, pivots = _rref(field, a)
    return len(pivots)


def nullspace_basis(field: FieldContext, a) -> list[np.ndarray]:
    """Basis of {v : a @ v = 0}; empty list when the nullspace is trivial.

    Basis vectors follow the standard free-column construction from the
    reduced echelon form, so they are linearly independent by shape.
    """
    a = field.convert(a)
    if a.ndim != 2 or a.size == 0:
        raise DimensionMismatch(f"nullspace needs a nonempty 2-d matrix, got shape {a.shape}")
    r, pivots = _rref(field, a)
    cols = a.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = field.zeros(cols)
        v[f] = field.coeff(1)
        for row, pc in enumerate(pivots):
            v[pc] = field.neg(r[row, f])
        basis.append(v)
    return basis


def solve(field: FieldContext, a, b) -> np.ndarray:
    """One solution of a @ x = b (free variables set to zero).

    Raises DegenerateChannel when the system is inconsistent. ``b`` may
    be a vector or a matrix of stacked right-hand sides.
    """
    a = field.convert(a)
    b = field.convert(b)
    vector_rhs = b.ndim == 1
    if vector_rhs:
        b = b.reshape(-1, 1)
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"solve: {a.shape} vs rhs {b.shape}")
    n = a.shape[1]
    aug = np.concatenate([a, b], axis=1)
    r, pivots = _rref(field, aug)
    threshold = _pivot_threshold(field, aug)
    for row in range(len(pivots), r.shape[0]):
        # Zero coefficient row: any surviving rhs mass means no solution.
        resid = r[row, n:]
        if field.mode == "gf":
            bad = np.any(resid != 0)
        else:
            bad = bool(np.max(np.abs(resid), initial=0.0) > max(threshold, field.zero_atol))
        if bad:
            raise DegenerateChannel("linear system is inconsistent")
    if any(pc >= n for pc in pivots):
        raise DegenerateChannel("linear system is inconsistent")
    x = field.zeros((n, b.shape[1]))
    for row, pc in enumerate(pivots):
        x[pc] = r[row, n:]
    return x[:, 0] if vector_rhs else x


def invert(field: FieldContext, a) -> np.ndarray:
    """Inverse of a square matrix; DegenerateChannel if singular."""
    a = field.convert(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"invert needs a square matrix, got {a.shape}")
    n = a.shape[0]
    eye = field.zeros((n, n))
    for i in range(n):
        eye[i, i] = field.coeff(1)
    if rank(field, a) < n:
        raise DegenerateChannel("matrix is singular")
    return solve(field, a, eye)


def zero_forcing_vector(field: FieldContext, h_rows, k: int, group) -> np.ndarray:
    """Beamforming vector for user k within the served group.

    ``h_rows`` holds one channel functional per user (row k applied to a
    transmit vector gives user k's reception). The returned w satisfies
    h_j @ w = 0 for every other group member j and h_k @ w = 1; the unit
    response at k fixes the otherwise arbitrary scale.

    Raises DegenerateChannel when h_k lies in the span of the other
    members' rows, in which case no such vector exists.
    """
    h_rows = field.convert(h_rows)
    group = sorted(set(int(u) for u in group))
    if k not in group:
        raise DimensionMismatch(f"user {k} not in served group {group}")
    n_antennas = h_rows.shape[1]
    if len(group) > n_antennas:
        raise DimensionMismatch(
            f"group of {len(group)} users exceeds {n_antennas} antennas"
        )
    others = [u for u in group if u != k]
    m = h_rows[others + [k], :]
    rhs = field.zeros(len(group))
    rhs[-1] = field.coeff(1)
    try:
        w = solve(field, m, rhs)
    except DegenerateChannel:
        raise DegenerateChannel(
            f"channel row {k} lies in the span of rows {others}"
        ) from None
    # The exact mode guarantees the contract by construction; in complex
    # mode re-check the residuals so near-degenerate draws surface here.
    if field.mode == "complex":
        resp = field.matmul(h_rows[group, :], w)
        target = field.zeros(len(group))
        target[group.index(k)] = 1.0
        if float(np.max(np.abs(resp - target))) > field.zero_atol:
            raise DegenerateChannel("zero-forcing residual above tolerance")
    return w
