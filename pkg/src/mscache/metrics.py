"""Delivery-time metrics: achieved time, converse bound, uncoded baseline.

Every quantity here is an exact rational. The headline property of the
scheme is the equality converse = achieved in both supported regimes;
keeping Fractions end to end turns that claim into `==`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .content import LibraryConfig
from .delivery import regime
from .errors import InconsistentInputs

CSV_HEADER = (
    "K,N,L,M_num,M_den,achieved_num,achieved_den,converse_num,converse_den,"
    "uncoded_num,uncoded_den,decode_ok,seed"
)


def converse_bound(K: int, N: int, M, L: int) -> Fraction:
    """Lower bound on T: max over s in 1..K of (s - sM/floor(N/s)) / min(s, L)."""
    M = Fraction(M)
    best = Fraction(0)
    for s in range(1, K + 1):
        term = Fraction(s - Fraction(s, N // s) * M, min(s, L))
        if term > best:
            best = term
    return best


def uncoded_baseline(K: int, N: int, M, L: int) -> Fraction:
    """Per-user caching plus L parallel zero-forced streams: K(1 - M/N)/L."""
    M = Fraction(M)
    return Fraction(K, L) * (1 - M / N)


def achievable_time(cfg: LibraryConfig) -> Fraction:
    """Scheme delivery time: 1 with L = N-1 antennas, else (N-1)/L."""
    kind = regime(cfg.N, cfg.L)
    return Fraction(1) if kind == "full" else Fraction(cfg.N - 1, cfg.L)


@dataclass(frozen=True)
class MetricsReport:
    """One run's exact delivery-time comparison plus its parameters."""

    K: int
    N: int
    L: int
    M: Fraction
    achieved_T: Fraction
    converse_T: Fraction
    uncoded_T: Fraction
    decode_ok: bool
    mode: str
    seed: int | None

    def to_csv_row(self) -> str:
        seed = "" if self.seed is None else str(self.seed)
        parts = [
            self.K,
            self.N,
            self.L,
            self.M.numerator,
            self.M.denominator,
            self.achieved_T.numerator,
            self.achieved_T.denominator,
            self.converse_T.numerator,
            self.converse_T.denominator,
            self.uncoded_T.numerator,
            self.uncoded_T.denominator,
            "true" if self.decode_ok else "false",
            seed,
        ]
        return ",".join(str(x) for x in parts)

    def to_json_dict(self) -> dict:
        return {
            "K": self.K,
            "N": self.N,
            "L": self.L,
            "M": str(self.M),
            "achieved_T": str(self.achieved_T),
            "converse_T": str(self.converse_T),
            "uncoded_T": str(self.uncoded_T),
            "decode_ok": self.decode_ok,
            "mode": self.mode,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def assemble_report(cfg: LibraryConfig, schedule, results, seed: int | None = None) -> MetricsReport:
    """Combine one run's schedule and decode results into a report.

    Verifies the bound chain converse <= achieved <= uncoded whenever
    all users decoded; a corrupted run still assembles, with decode_ok
    false.
    """
    if schedule.cfg != cfg:
        raise InconsistentInputs("schedule was built for a different configuration")
    if len(results) != cfg.K:
        raise InconsistentInputs(f"{len(results)} decode results for K={cfg.K} users")
    achieved = schedule.total_time
    if achieved != achievable_time(cfg):
        raise InconsistentInputs(
            f"schedule time {achieved} differs from the analytic {achievable_time(cfg)}"
        )
    converse = converse_bound(cfg.K, cfg.N, cfg.M, cfg.L)
    uncoded = uncoded_baseline(cfg.K, cfg.N, cfg.M, cfg.L)
    ok = all(r.success for r in results)
    if ok and not converse <= achieved <= uncoded:
        raise InconsistentInputs(
            f"bound chain violated: {converse} <= {achieved} <= {uncoded} is false"
        )
    return MetricsReport(
        K=cfg.K,
        N=cfg.N,
        L=cfg.L,
        M=cfg.M,
        achieved_T=achieved,
        converse_T=converse,
        uncoded_T=uncoded,
        decode_ok=ok,
        mode=schedule.library.field.mode,
        seed=seed,
    )
