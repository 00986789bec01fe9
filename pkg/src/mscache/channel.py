"""Linear network simulation and per-user decoding.

Every user k observes y_k = h_k^H x for each transmitted column x, with
h_k a fixed row of the channel matrix H. Channels are drawn seeded and
rejection-sampled until every set of L distinct rows is invertible, so
the zero-forcing synthesis downstream can never degenerate.

Decoding assumes the standard genie model: receivers know H, the demand
vector, and the schedule's plan metadata, and recompute the beamformer
scalings rather than estimating them.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import (
    DimensionMismatch,
    InconsistentInputs,
    ResamplingExhausted,
)
from .field import FieldContext
from .linalg import rank, solve, zero_forcing_vector

# Channel draws before giving up; exceeding this signals a pathological
# field size or dimensions, not bad luck.
DRAW_BUDGET = 64


@dataclass(frozen=True)
class ChannelMatrix:
    """K x L channel; row k is user k's receive functional h_k^H."""

    field: FieldContext
    H: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "H", self.field.convert(self.H))
        if self.H.ndim != 2:
            raise DimensionMismatch(f"channel needs a K x L matrix, got {self.H.shape}")

    @property
    def K(self) -> int:
        return self.H.shape[0]

    @property
    def L(self) -> int:
        return self.H.shape[1]


@dataclass(frozen=True)
class ReceptionLog:
    """Per-block K x tau reception matrices, one row per user."""

    field: FieldContext
    per_block: tuple

    def for_user(self, k: int) -> list:
        return [(b, y[k]) for b, y in enumerate(self.per_block)]


@dataclass(frozen=True)
class DecodeResult:
    """One user's reconstructed file and its verification flag."""

    user: int
    data: np.ndarray
    success: bool


def _generic(field: FieldContext, H: np.ndarray, L: int) -> bool:
    # Vacuously true when K < L; no block ever stacks more than K rows.
    K = H.shape[0]
    for rows in combinations(range(K), min(L, K)):
        if rank(field, H[list(rows), :]) < len(rows):
            return False
    return True


def draw_channel(
    K: int, L: int, seed: int, field: FieldContext, budget: int = DRAW_BUDGET
) -> ChannelMatrix:
    """Seeded channel draw, rejected until all L-row subsets are invertible."""
    if K < 1 or L < 1:
        raise InconsistentInputs(f"need K, L >= 1, got K={K}, L={L}")
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        H = field.sample_channel(rng, (K, L))
        if _generic(field, H, L):
            return ChannelMatrix(field, H)
    raise ResamplingExhausted(
        f"no generic {K}x{L} channel found in {budget} draws over {field!r}"
    )


def receive(H: ChannelMatrix, schedule) -> ReceptionLog:
    """Apply the channel to every block: per block, y = H @ signal."""
    field = H.field
    logs = []
    for block in schedule.blocks:
        sig = block.signal
        if sig.shape[0] != H.L:
            raise DimensionMismatch(
                f"block has {sig.shape[0]} antenna rows, channel expects {H.L}"
            )
        logs.append(field.matmul(H.H, sig))
    return ReceptionLog(field, tuple(logs))


def _check_consistent(k, d, Z_k, log, H: ChannelMatrix, schedule) -> None:
    cfg = schedule.cfg
    if tuple(d) != tuple(schedule.demand):
        raise InconsistentInputs("demand vector differs from the one scheduled")
    if H.field != schedule.channel.field or not H.field.equal(H.H, schedule.channel.H):
        raise InconsistentInputs("channel differs from the one scheduled")
    if not 0 <= k < cfg.K:
        raise InconsistentInputs(f"user {k} out of range for K={cfg.K}")
    if len(log.per_block) != len(schedule.blocks):
        raise InconsistentInputs("reception log does not cover the schedule")
    if Z_k.payload.shape[0] != cfg.subfile_symbols:
        raise InconsistentInputs(
            f"cache of {Z_k.payload.shape[0]} symbols, expected {cfg.subfile_symbols}"
        )


def _owner_scale(field, H: ChannelMatrix, owner: int, k: int, group) -> object:
    """The scalar h_owner^H w for user k's beam in the given served group."""
    w = zero_forcing_vector(field, H.H, k, group)
    return field.matmul(H.H[owner], w)


def _decode_full_row(field, k, i, y, Z_k, H):
    if k == i:
        # Own row: the reception is the plain sum of the other users'
        # subfiles, so the cache closes the last gap.
        return field.sub(Z_k.payload, y)
    s = _owner_scale(field, H, i, k, [u for u in range(H.K) if u != i])
    return field.mul(y, s)


def _decode_reduced_row(field, k, i, plan, row_logs, Z_k, H):
    L = H.L
    if k == i:
        # Combine the row's receptions per the plan's A matrix, then
        # subtract the resulting subfile sum from the cache.
        tau = row_logs[0].shape[0]
        parts = []
        for j in range(L):
            q = field.zeros(tau)
            for t, y in enumerate(row_logs):
                a = int(plan.A[j, t])
                if a == 1:
                    q = field.add(q, y)
                elif a == -1:
                    q = field.sub(q, y)
                elif a != 0:
                    q = field.add(q, field.mul(field.coeff(a), y))
            parts.append(q)
        return field.sub(Z_k.payload, np.concatenate(parts))
    serving = plan.serving[k]
    combos = []
    coeff_rows = []
    for t in serving:
        tx = plan.transmissions[t]
        s = _owner_scale(field, H, i, k, tx.served)
        combos.append(field.mul(row_logs[t], s))
        coeff_rows.append(tx.coeffs[k])
    C = field.convert(np.array(coeff_rows, dtype=np.int64))
    V = np.stack(combos)
    mini = solve(field, C, V)
    return np.concatenate([mini[j] for j in range(L)])


def decode_user(k: int, d, Z_k, log: ReceptionLog, H: ChannelMatrix, schedule) -> DecodeResult:
    """Reconstruct user k's requested file from receptions plus cache.

    Non-owner rows yield subfiles by descaling (full-antenna rows) or by
    inverting the user's planned coefficient system (reduced rows); the
    user's own row comes from subtracting the received sum from Z_k.
    """
    _check_consistent(k, d, Z_k, log, H, schedule)
    field = H.field
    cfg = schedule.cfg
    N = cfg.N
    subfiles = []
    for i in range(N):
        row_blocks = schedule.rows[i]
        if cfg.L == N - 1:
            y = log.per_block[row_blocks[0]][k]
            subfiles.append(_decode_full_row(field, k, i, y, Z_k, H))
        else:
            plan = schedule.plans[i]
            row_logs = [log.per_block[b][k] for b in row_blocks]
            subfiles.append(_decode_reduced_row(field, k, i, plan, row_logs, Z_k, H))
    data = np.concatenate(subfiles)
    want = schedule.library.data[d[k]]
    return DecodeResult(user=k, data=data, success=field.close(data, want))


def decode_all(d, caches, log: ReceptionLog, H: ChannelMatrix, schedule) -> list[DecodeResult]:
    return [
        decode_user(k, d, caches[k], log, H, schedule)
        for k in range(schedule.cfg.K)
    ]
