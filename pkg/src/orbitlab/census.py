"""Periodic-point censuses, zeta-function truncations, and growth statistics.

``P[n]`` counts isolated fixed points of the n-th iterate (divisor periods
included); ``Q[n]`` counts points whose least period is exactly n, obtained
independently via orbit partitioning so that the divisor-sum identity
P_n = sum_{d|n} Q_d is a genuine cross-check rather than a tautology.

Rows where marginal or nonisolated points were detected are flagged (the
count is then only a lower bound) and poison the zeta truncation, which
needs exact counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .classify import DEFAULT_ETA, HYPERBOLIC, multipliers
from .errors import FlaggedCensusError, OrbitlabError
from .polymap import PolyMap
from .solver import (
    SeedPlan,
    SolverConfig,
    orbit_partition,
    separable_components,
    solve_newton,
    solve_separable,
    solve_univariate,
)


@dataclass(frozen=True)
class CensusConfig:
    solver: SolverConfig = SolverConfig()
    eta: float = DEFAULT_ETA
    method: str = "auto"            # auto | univariate | separable | newton
    seed_plan: SeedPlan | None = None
    rng_seed: int = 0

    def to_dict(self):
        return {
            "solver": self.solver.to_dict(),
            "eta": self.eta,
            "method": self.method,
            "seed_plan": self.seed_plan.to_dict() if self.seed_plan else None,
            "rng_seed": self.rng_seed,
        }


@dataclass(frozen=True)
class CensusRow:
    n: int
    available: bool
    P: int | None = None
    Q: int | None = None
    flagged: bool = False
    flag_reasons: tuple = ()
    bezout_bound: int | None = None
    complex_count: int | None = None
    deficit: int | None = None
    completeness: str | None = None
    error: str | None = None

    def to_dict(self):
        return {
            "n": self.n, "available": self.available, "P": self.P, "Q": self.Q,
            "flagged": self.flagged, "flag_reasons": list(self.flag_reasons),
            "bezout_bound": self.bezout_bound, "complex_count": self.complex_count,
            "deficit": self.deficit, "completeness": self.completeness,
            "error": self.error,
        }


@dataclass
class CensusTable:
    map_hash: str
    map_n: int
    map_degree: int
    map_field: str
    n_max: int
    rows: list
    config: CensusConfig

    def row(self, n):
        return self.rows[n - 1]

    def P(self, n):
        return self.row(n).P

    def Q(self, n):
        return self.row(n).Q

    @property
    def any_flagged(self):
        return any(r.flagged for r in self.rows)

    def mobius_errors(self):
        """Rows where P_n != sum_{d|n} Q_d (unflagged, available rows only)."""
        bad = []
        for r in self.rows:
            if not r.available or r.flagged:
                continue
            divisors = [d for d in range(1, r.n + 1) if r.n % d == 0]
            if any(not self.row(d).available or self.row(d).flagged
                   for d in divisors):
                continue
            total = sum(self.Q(d) for d in divisors)
            if total != r.P:
                bad.append((r.n, r.P, total))
        return bad

    def to_dict(self):
        return {
            "schema": "orbitlab.census/1",
            "map_hash": self.map_hash,
            "map_n": self.map_n,
            "map_degree": self.map_degree,
            "map_field": self.map_field,
            "n_max": self.n_max,
            "rows": [r.to_dict() for r in self.rows],
            "config": self.config.to_dict(),
        }

    def csv_lines(self):
        lines = ["n,P,Q,log_P_over_n"]
        for r in self.rows:
            if r.available and r.P and r.P >= 1:
                bowen = repr(math.log(r.P) / r.n)
            else:
                bowen = ""
            lines.append(f"{r.n},{'' if r.P is None else r.P},"
                         f"{'' if r.Q is None else r.Q},{bowen}")
        return lines


def _solve_for_period(pmap, n, config):
    method = config.method
    if method == "auto":
        if pmap.n == 1:
            method = "univariate"
        elif separable_components(pmap) is not None \
                and pmap.degree ** n <= config.solver.degree_cap:
            method = "separable"
        elif config.seed_plan is not None:
            method = "newton"
        else:
            raise OrbitlabError(
                "no route: multivariate non-separable map without a seed plan")
        if pmap.n == 1 and pmap.degree ** n > config.solver.degree_cap \
                and config.seed_plan is not None:
            method = "newton"
    if method == "univariate":
        return solve_univariate(pmap, n, config.solver)
    if method == "separable":
        return solve_separable(pmap, n, config.solver)
    if method == "newton":
        if config.seed_plan is None:
            raise OrbitlabError("newton route requires a seed plan")
        return solve_newton(pmap, n, config.seed_plan, config.rng_seed,
                            config.solver)
    raise ValueError(f"unknown method {method!r}")


def build_census(pmap: PolyMap, n_max: int,
                 config: CensusConfig = CensusConfig()) -> CensusTable:
    """Solve periods 1..n_max and aggregate isolated / least-period counts."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    rows = []
    for n in range(1, n_max + 1):
        try:
            report = _solve_for_period(pmap, n, config)
        except OrbitlabError as exc:
            rows.append(CensusRow(n=n, available=False, error=str(exc)))
            continue
        reasons = []
        if any(not p.isolated_certificate for p in report.points):
            reasons.append("nonisolated")
        p_count = sum(1 for p in report.points if p.isolated_certificate)
        q_count = 0
        try:
            orbits = orbit_partition(report.points, pmap, config.solver)
            iso = {tuple(p.location): p.isolated_certificate
                   for p in report.points}
            min_margin = None
            for orbit in orbits:
                record = multipliers(pmap, orbit.points, eta=config.eta)
                if min_margin is None or record.margin < min_margin:
                    min_margin = record.margin
                if record.classification != HYPERBOLIC \
                        and "marginal" not in reasons:
                    reasons.append("marginal")
                if orbit.least_period == n:
                    q_count += sum(1 for pt in orbit.points if iso[tuple(pt)])
        except OrbitlabError as exc:
            reasons.append(f"partition-failed: {exc}")
            q_count = None
        rows.append(CensusRow(
            n=n,
            available=True,
            P=p_count,
            Q=q_count,
            flagged=bool(reasons),
            flag_reasons=tuple(reasons),
            bezout_bound=report.bezout_bound,
            complex_count=report.complex_count,
            deficit=report.deficit,
            completeness=report.completeness,
        ))
    return CensusTable(
        map_hash=pmap.content_hash(),
        map_n=pmap.n,
        map_degree=pmap.degree,
        map_field=pmap.field,
        n_max=n_max,
        rows=rows,
        config=config,
    )


# ---------------------------------------------------------------------------
# zeta truncation


@dataclass
class ZetaTruncation:
    order: int
    coefficients: list             # c_0 .. c_M, exact Fractions
    radius_estimate: float         # Cauchy-Hadamard on the trailing half
    growth_constant: float         # least C with P_n <= exp(C n) on the range

    def coefficient_floats(self):
        return [float(c) for c in self.coefficients]

    def logderiv_error(self, P):
        """Max relative coefficient error in zeta'/zeta = sum P_n z^(n-1).

        Checked through order M-1 against the convolution identity
        (m+1) c_{m+1} = sum_{j<=m} P_{j+1} c_{m-j}.
        """
        worst = 0.0
        for m in range(self.order):
            lhs = (m + 1) * self.coefficients[m + 1]
            rhs = sum(Fraction(P[j]) * self.coefficients[m - j]
                      for j in range(m + 1))
            scale = max(abs(lhs), abs(rhs), Fraction(1))
            worst = max(worst, float(abs(lhs - rhs) / scale))
        return worst

    def to_dict(self):
        return {
            "schema": "orbitlab.zeta/1",
            "order": self.order,
            "coefficients": self.coefficient_floats(),
            "radius_estimate": self.radius_estimate,
            "growth_constant": self.growth_constant,
        }


def zeta_coefficients(P, order):
    """exp(sum_n P_n z^n / n) through z^order, exactly (Fraction arithmetic)."""
    c = [Fraction(1)] + [Fraction(0)] * order
    for m in range(1, order + 1):
        acc = Fraction(0)
        for j in range(1, m + 1):
            acc += Fraction(P[j - 1]) * c[m - j]
        c[m] = acc / m
    return c


def zeta_truncation(table: CensusTable, order: int) -> ZetaTruncation:
    """Taylor truncation of the zeta function from exact isolated counts."""
    if order < 1 or order > table.n_max:
        raise ValueError(f"order must be in 1..{table.n_max}")
    for n in range(1, order + 1):
        row = table.row(n)
        if not row.available:
            raise FlaggedCensusError(f"census row {n} unavailable: {row.error}")
        if row.flagged:
            raise FlaggedCensusError(
                f"census row {n} flagged ({', '.join(row.flag_reasons)}); "
                "zeta needs exact counts")
    P = [table.P(n) for n in range(1, order + 1)]
    coeffs = zeta_coefficients(P, order)

    tail = range(order - math.ceil(order / 2) + 1, order + 1)
    rates = [abs(coeffs[n]) ** (1.0 / n) for n in tail if coeffs[n] != 0]
    radius = (1.0 / max(rates)) if rates else math.inf

    growth = 0.0
    for n, p in enumerate(P, start=1):
        if p >= 1:
            growth = max(growth, math.log(p) / n)
    return ZetaTruncation(order=order, coefficients=coeffs,
                          radius_estimate=radius, growth_constant=growth)


# ---------------------------------------------------------------------------
# growth statistics


@dataclass
class GrowthStats:
    """Finite-range growth data: log P_n / n and a trailing-window max.

    The window max is a finite proxy for the limsup in Bowen's entropy
    formula, not the topological entropy itself.
    """

    bowen_sequence: list           # entry per n, None when P_n is 0/unknown
    bowen_limsup_proxy: float | None
    window: int

    def to_dict(self):
        return {
            "schema": "orbitlab.growth/1",
            "bowen_sequence": self.bowen_sequence,
            "bowen_limsup_proxy": self.bowen_limsup_proxy,
            "window": self.window,
        }


def growth_stats(table: CensusTable, window: int | None = None) -> GrowthStats:
    seq = []
    for r in table.rows:
        if r.available and r.P is not None and r.P >= 1:
            seq.append(math.log(r.P) / r.n)
        else:
            seq.append(None)
    if window is None:
        window = max(1, math.ceil(table.n_max / 2))
    tail = [v for v in seq[-window:] if v is not None]
    proxy = max(tail) if tail else None
    return GrowthStats(bowen_sequence=seq, bowen_limsup_proxy=proxy,
                       window=window)
