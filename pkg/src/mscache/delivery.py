"""Transmit-schedule construction for both antenna regimes.

With L = N-1 antennas, one block per table row i beamforms, for every
other user k, the subfile of its requested file with index i. Beams are
nulled at co-served users and rescaled so the row owner receives the
plain sum of the payloads, which its cache then completes.

With fewer antennas (L < N-1), each row is carried by N-1 shorter
transmissions over minifiles. The N-1 non-owner users are tiled into
segments of size L and L+1. A size-L segment is served jointly in L
transmissions, one minifile index per transmission. A size-(L+1)
segment uses a telescoping pattern: transmission t serves all segment
users but one, with coefficient vectors chosen as the inverse of a
column-deleted bidiagonal matrix, so that consecutive receptions
combine (telescope) into the per-index minifile sums the owner needs.
Every generated plan is re-verified by exact integer linear algebra
before use; a verification failure is a hard error, never a fallback.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .channel import ChannelMatrix
from .content import DemandVector, Library, LibraryConfig, split_file, split_subfile
from .errors import (
    DegenerateChannel,
    DimensionMismatch,
    InconsistentInputs,
    PlanVerificationError,
    WrongRegime,
)
from .linalg import zero_forcing_vector

_LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


# ---------------------------------------------------------------------------
# Regime arithmetic


def regime(N: int, L: int) -> str:
    """Classify (N, L) as "full" or "reduced"; WrongRegime if neither."""
    if N < 2:
        raise WrongRegime(f"need at least N=2 files/users, got N={N}")
    if L < 1 or L > N - 1:
        raise WrongRegime(f"antenna count L={L} outside [1, N-1={N - 1}]")
    if L == N - 1:
        return "full"
    q, r = divmod(N - 1, L)
    if q < r:
        raise WrongRegime(
            f"no delivery plan for N={N}, L={L}: {N - 1} users cannot be "
            f"tiled by segments of sizes {L} and {L + 1}"
        )
    return "reduced"


def is_supported(N: int, L: int) -> bool:
    try:
        regime(N, L)
    except WrongRegime:
        return False
    return True


def segment_sizes(N: int, L: int) -> list[int]:
    """Sizes tiling the N-1 non-owner users: a segments of L, then r of L+1."""
    if regime(N, L) != "reduced":
        raise WrongRegime(f"segment tiling applies only when L < N-1, got N={N}, L={L}")
    q, r = divmod(N - 1, L)
    return [L] * (q - r) + [L + 1] * r


# ---------------------------------------------------------------------------
# Exact integer helpers (plan-time only; L <= 8 here)


def _exact_int_det(rows) -> int:
    n = len(rows)
    m = [[Fraction(int(x)) for x in row] for row in rows]
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            if f:
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return int(det)


def _exact_int_inverse(rows) -> list[list[int]]:
    n = len(rows)
    aug = [
        [Fraction(int(x)) for x in row] + [Fraction(int(r == c)) for c in range(n)]
        for r, row in enumerate(rows)
    ]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if piv is None:
            raise PlanVerificationError("segment coefficient matrix is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        scale = aug[c][c]
        aug[c] = [x / scale for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[c])]
    out = []
    for r in range(n):
        row = aug[r][n:]
        if any(x.denominator != 1 for x in row):
            raise PlanVerificationError("segment inverse is not integral")
        out.append([int(x) for x in row])
    return out


# ---------------------------------------------------------------------------
# Row plans for the reduced regime


@dataclass(frozen=True, eq=False)
class Transmission:
    """One reduced-regime transmission: served users and their combinations."""

    served: tuple
    coeffs: dict


@dataclass(frozen=True, eq=False)
class RowCodePlan:
    """Complete minifile coding plan for one table row.

    transmissions: the N-1 transmissions in order; coeffs[u] is the
    length-L integer vector applied to user u's minifiles.
    A: L x (N-1) matrix with entries in {-1, 0, 1}; row j of A applied
    to the row's receptions yields the sum over users of minifile j.
    serving: per user, the L transmission indices that serve it.
    """

    owner: int
    users: tuple
    transmissions: tuple
    A: np.ndarray
    serving: dict


def _telescoping_pattern(L: int):
    """Bidiagonal combination block B and the served/missed bijection.

    B has unit diagonal and a +/-1 superdiagonal; any column-deleted
    square submatrix is unimodular, so its inverse provides integer
    coefficient vectors. miss[u] is the one transmission (of L+1) that
    skips segment position u. The sign and miss layouts for even and
    odd L are the two orientations that make the telescoping sums come
    out with all-positive totals.
    """
    if L % 2 == 0:
        signs = [1 if j % 2 else -1 for j in range(L)]
        miss = [(u + 1) % (L + 1) for u in range(L + 1)]
    else:
        signs = [1] * L
        miss = [L - u for u in range(L + 1)]
    B = [[0] * (L + 1) for _ in range(L)]
    for j in range(L):
        B[j][j] = 1
        B[j][j + 1] = signs[j]
    return B, miss


@lru_cache(maxsize=None)
def build_row_plan_reduced(i: int, N: int, L: int) -> RowCodePlan:
    """Deterministic verified coding plan for row i at (N, L), L < N-1."""
    if regime(N, L) != "reduced":
        raise WrongRegime(f"row plans exist only for L < N-1, got N={N}, L={L}")
    if not 0 <= i < N:
        raise InconsistentInputs(f"row index {i} out of range for N={N}")
    users = [u for u in range(N) if u != i]
    transmissions = []
    A = np.zeros((L, N - 1), dtype=np.int64)
    serving = {u: [] for u in users}
    pos = 0
    col = 0
    for size in segment_sizes(N, L):
        seg = users[pos : pos + size]
        if size == L:
            # Jointly served group: transmission t of the segment sends
            # minifile t of every member, so each member's coefficient
            # system is the identity.
            for t_local in range(L):
                t = col + t_local
                unit = tuple(int(j == t_local) for j in range(L))
                coeffs = {u: unit for u in seg}
                for u in seg:
                    serving[u].append(t)
                transmissions.append(Transmission(tuple(seg), coeffs))
                A[t_local, t] = 1
        else:
            B, miss = _telescoping_pattern(L)
            rows_of = {}
            kept_of = {}
            for idx in range(size):
                kept = [c for c in range(size) if c != miss[idx]]
                Bu = [[B[r][c] for c in kept] for r in range(L)]
                rows_of[idx] = _exact_int_inverse(Bu)
                kept_of[idx] = kept
            for t_local in range(size):
                t = col + t_local
                served = []
                coeffs = {}
                for idx, u in enumerate(seg):
                    if miss[idx] == t_local:
                        continue
                    served.append(u)
                    r = kept_of[idx].index(t_local)
                    coeffs[u] = tuple(rows_of[idx][r])
                    serving[u].append(t)
                transmissions.append(Transmission(tuple(served), coeffs))
                for j in range(L):
                    A[j, t] = B[j][t_local]
        pos += size
        col += size
    plan = RowCodePlan(
        owner=i,
        users=tuple(users),
        transmissions=tuple(transmissions),
        A=A,
        serving={u: tuple(ts) for u, ts in serving.items()},
    )
    verify_row_plan(plan, N, L)
    return plan


def verify_row_plan(plan: RowCodePlan, N: int, L: int) -> None:
    """Certify a RowCodePlan by exact integer linear algebra.

    Checks: N-1 transmissions of exactly L served users; every user
    served exactly L times with an invertible stacked coefficient
    system; A entries in {-1,0,1}; and A times the stacked reception
    functionals equals the per-index minifile-sum functionals.
    """

    def fail(msg: str):
        raise PlanVerificationError(f"row {plan.owner} plan (N={N}, L={L}): {msg}")

    n1 = N - 1
    if len(plan.users) != n1 or plan.owner in plan.users:
        fail("user set must be the N-1 non-owners")
    if len(plan.transmissions) != n1:
        fail(f"{len(plan.transmissions)} transmissions, expected {n1}")
    for t, tx in enumerate(plan.transmissions):
        if len(tx.served) != L:
            fail(f"transmission {t} serves {len(tx.served)} users, expected {L}")
        if len(set(tx.served)) != L or any(u not in plan.users for u in tx.served):
            fail(f"transmission {t} served set invalid: {tx.served}")
        for u in tx.served:
            if len(tx.coeffs[u]) != L:
                fail(f"coefficient vector of user {u} in transmission {t} not length {L}")
    for u in plan.users:
        ts = plan.serving[u]
        if len(ts) != L:
            fail(f"user {u} served in {len(ts)} transmissions, expected {L}")
        stacked = [plan.transmissions[t].coeffs[u] for t in ts]
        if _exact_int_det(stacked) == 0:
            fail(f"user {u} has a singular stacked coefficient system")
    if plan.A.shape != (L, n1):
        fail(f"A has shape {plan.A.shape}, expected {(L, n1)}")
    if not np.all(np.isin(plan.A, (-1, 0, 1))):
        fail("A has entries outside {-1, 0, 1}")
    index = {u: q for q, u in enumerate(plan.users)}
    R = np.zeros((n1, n1 * L), dtype=np.int64)
    for t, tx in enumerate(plan.transmissions):
        for u in tx.served:
            base = index[u] * L
            R[t, base : base + L] = tx.coeffs[u]
    S = np.zeros((L, n1 * L), dtype=np.int64)
    for j in range(L):
        for q in range(n1):
            S[j, q * L + j] = 1
    if not np.array_equal(plan.A @ R, S):
        fail("A-combined receptions do not equal the minifile sums")


# ---------------------------------------------------------------------------
# Payload descriptions (1-based, for delivery tables)


def _file_letter(n: int) -> str:
    return _LETTERS[n] if n < len(_LETTERS) else f"F{n + 1}"


def _subfile_desc(n: int, i: int) -> str:
    return f"{_file_letter(n)}{i + 1}"


def _mini_term(n: int, i: int, j: int) -> str:
    return f"{_file_letter(n)}{i + 1}^{j + 1}"


def _terms_to_str(terms) -> str:
    out = []
    for c, body in terms:
        if c == 0:
            continue
        frag = body if abs(c) == 1 else f"{abs(c)}*{body}"
        if not out:
            out.append(frag if c > 0 else f"-{frag}")
        else:
            out.append(f"+{frag}" if c > 0 else f"-{frag}")
    return "".join(out) if out else "0"


# ---------------------------------------------------------------------------
# Blocks and schedules


@dataclass(frozen=True, eq=False)
class TransmitBlock:
    """One beamformed transmission: L x tau signal plus table metadata.

    served pairs every participating user (owner last) with the payload
    description it decodes; group lists the beam-served users only.
    """

    signal: np.ndarray
    duration: Fraction
    served: tuple
    owner: int
    row: int
    t: int
    kind: str
    group: tuple


@dataclass(frozen=True, eq=False)
class DeliverySchedule:
    """Ordered blocks plus everything a genie receiver may consult."""

    blocks: tuple
    total_time: Fraction
    cfg: LibraryConfig
    demand: tuple
    channel: ChannelMatrix
    library: Library
    plans: dict
    rows: tuple


def _as_channel(H, field) -> ChannelMatrix:
    if isinstance(H, ChannelMatrix):
        return H
    return ChannelMatrix(field, H)


def _as_demand(d, N: int) -> DemandVector:
    dv = d if isinstance(d, DemandVector) else DemandVector(d)
    if any(x >= N for x in dv):
        raise InconsistentInputs(f"demand {tuple(dv)} requests files beyond N={N}")
    return dv


def _scaled_beam(field, H: ChannelMatrix, owner: int, u: int, group):
    """ZF beam for user u within group, rescaled to unit gain at owner."""
    w = zero_forcing_vector(field, H.H, u, group)
    s = field.matmul(H.H[owner], w)
    try:
        return field.mul(w, field.inv(s))
    except ZeroDivisionError:
        raise DegenerateChannel(
            f"row {owner} channel is orthogonal to user {u}'s beam"
        ) from None


def build_block_full_antennas(i: int, d, H, library: Library) -> TransmitBlock:
    """Row i's single block when L = N-1: one subfile per other user."""
    field = library.field
    N = library.N
    H = _as_channel(H, field)
    if H.K != N:
        raise InconsistentInputs(f"channel has {H.K} users, library has {N} files")
    if H.L != N - 1:
        raise WrongRegime(f"full-antenna block needs L=N-1={N - 1}, channel has L={H.L}")
    d = _as_demand(d, N)
    if len(d) != N:
        raise InconsistentInputs(f"demand length {len(d)} != K={N}")
    if not 0 <= i < N:
        raise InconsistentInputs(f"row index {i} out of range for N={N}")
    others = [k for k in range(N) if k != i]
    tau = library.F // N
    X = field.zeros((H.L, tau))
    pairs = []
    sum_terms = []
    for k in others:
        payload = split_file(library, d[k])[i].data
        w = _scaled_beam(field, H, i, k, others)
        X = field.add(X, field.mul(w[:, None], payload[None, :]))
        pairs.append((k, _subfile_desc(d[k], i)))
        sum_terms.append((1, _subfile_desc(d[k], i)))
    pairs.append((i, _terms_to_str(sum_terms)))
    return TransmitBlock(
        signal=X,
        duration=Fraction(1, N),
        served=tuple(pairs),
        owner=i,
        row=i,
        t=0,
        kind="full",
        group=tuple(others),
    )


def build_block_from_plan(
    plan: RowCodePlan, t: int, i: int, d, H, library: Library
) -> TransmitBlock:
    """One reduced-regime transmission of row i, per the verified plan."""
    field = library.field
    N = library.N
    H = _as_channel(H, field)
    if plan.owner != i:
        raise InconsistentInputs(f"plan owner {plan.owner} does not match row {i}")
    if not 0 <= t < len(plan.transmissions):
        raise InconsistentInputs(f"transmission index {t} out of range")
    d = _as_demand(d, N)
    tx = plan.transmissions[t]
    L = len(next(iter(tx.coeffs.values()))) if tx.coeffs else H.L
    if H.L != L:
        raise DimensionMismatch(f"plan is for L={L} antennas, channel has L={H.L}")
    tau = library.F // (N * L)
    X = field.zeros((L, tau))
    pairs = []
    owner_terms = []
    for u in tx.served:
        minis = split_subfile(split_file(library, d[u])[i], L)
        combo = field.zeros(tau)
        terms = []
        for j, cj in enumerate(tx.coeffs[u]):
            if cj == 0:
                continue
            if cj == 1:
                combo = field.add(combo, minis[j].data)
            elif cj == -1:
                combo = field.sub(combo, minis[j].data)
            else:
                combo = field.add(combo, field.mul(field.coeff(cj), minis[j].data))
            terms.append((cj, _mini_term(d[u], i, j)))
        w = _scaled_beam(field, H, i, u, tx.served)
        X = field.add(X, field.mul(w[:, None], combo[None, :]))
        pairs.append((u, _terms_to_str(terms)))
        owner_terms.extend(terms)
    pairs.append((i, _terms_to_str(owner_terms)))
    return TransmitBlock(
        signal=X,
        duration=Fraction(1, N * L),
        served=tuple(pairs),
        owner=i,
        row=i,
        t=t,
        kind="reduced",
        group=tuple(tx.served),
    )


def build_schedule(d, H, library: Library, cfg: LibraryConfig) -> DeliverySchedule:
    """Full delivery schedule: every row in order, T = 1 or (N-1)/L."""
    field = library.field
    H = _as_channel(H, field)
    if H.field != field:
        raise InconsistentInputs("channel and library use different field contexts")
    if library.N != cfg.N or library.F != cfg.F:
        raise InconsistentInputs(
            f"library shape {library.data.shape} does not match config N={cfg.N}, F={cfg.F}"
        )
    if H.K != cfg.K or H.L != cfg.L:
        raise InconsistentInputs(
            f"channel shape {H.H.shape} does not match config K={cfg.K}, L={cfg.L}"
        )
    d = _as_demand(d, cfg.N)
    if len(d) != cfg.K:
        raise InconsistentInputs(f"demand length {len(d)} != K={cfg.K}")
    kind = regime(cfg.N, cfg.L)
    blocks: list[TransmitBlock] = []
    rows = []
    plans: dict[int, RowCodePlan] = {}
    if kind == "full":
        for i in range(cfg.N):
            rows.append((len(blocks),))
            blocks.append(build_block_full_antennas(i, d, H, library))
    else:
        for i in range(cfg.N):
            plan = build_row_plan_reduced(i, cfg.N, cfg.L)
            plans[i] = plan
            ids = []
            for t in range(cfg.N - 1):
                ids.append(len(blocks))
                blocks.append(build_block_from_plan(plan, t, i, d, H, library))
            rows.append(tuple(ids))
    total = sum((b.duration for b in blocks), Fraction(0))
    expected = Fraction(1) if kind == "full" else Fraction(cfg.N - 1, cfg.L)
    if total != expected:
        raise InconsistentInputs(f"schedule time {total} != expected {expected}")
    return DeliverySchedule(
        blocks=tuple(blocks),
        total_time=total,
        cfg=cfg,
        demand=tuple(d),
        channel=H,
        library=library,
        plans=plans,
        rows=tuple(rows),
    )


def render_delivery_table(cfg: LibraryConfig, demand) -> str:
    """Deterministic text table: per row and transmission, who decodes what.

    Channel-independent: cells show the payload each user decodes, which
    the beamforming guarantees regardless of the drawn coefficients.
    """
    d = _as_demand(demand, cfg.N)
    if len(d) != cfg.K:
        raise InconsistentInputs(f"demand length {len(d)} != K={cfg.K}")
    N, L = cfg.N, cfg.L
    kind = regime(N, L)
    total = Fraction(1) if kind == "full" else Fraction(N - 1, L)
    shown = ",".join(str(x + 1) for x in d)
    lines = [f"N={N} K={cfg.K} L={L} demand=({shown}) T={total}"]
    for i in range(N):
        lines.append(f"row {i + 1} (owner user {i + 1})")
        if kind == "full":
            cells = [f"user {k + 1} <- {_subfile_desc(d[k], i)}" for k in range(N) if k != i]
            sum_desc = _terms_to_str([(1, _subfile_desc(d[k], i)) for k in range(N) if k != i])
            cells.append(f"user {i + 1}* <- {sum_desc}")
            lines.append(f"  t 1 dur 1/{N} :: " + " | ".join(cells))
        else:
            plan = build_row_plan_reduced(i, N, L)
            for t, tx in enumerate(plan.transmissions):
                cells = []
                owner_terms = []
                for u in tx.served:
                    terms = [(c, _mini_term(d[u], i, j)) for j, c in enumerate(tx.coeffs[u])]
                    cells.append(f"user {u + 1} <- {_terms_to_str(terms)}")
                    owner_terms.extend((c, b) for c, b in terms if c != 0)
                cells.append(f"user {i + 1}* <- {_terms_to_str(owner_terms)}")
                lines.append(f"  t {t + 1} dur 1/{N * L} :: " + " | ".join(cells))
    return "\n".join(lines) + "\n"
