"""Monte-Carlo experiments over coefficient space.

Draws random real-coefficient polynomial maps (each scalar coefficient
uniform on [-1, 1]), enumerates and classifies every orbit up to a period
bound, and accumulates two kinds of evidence: how often hyperbolicity
margins dip below an epsilon ladder, and whether any orbit carries a
multiplier within tolerance of a prescribed unit-circle eigenvalue.

Orbits are enumerated over the complex field: the eigenvalue-avoidance
statement concerns solutions of the complexified fixed-point system, and
complex orbits also give the margin statistics a usable event rate.  A
finite period bound probes only finitely many of the countably many
exceptional coefficient sets; that limitation is inherent to a finite
experiment and is documented rather than hidden.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .classify import DEFAULT_ETA, multipliers, power_multipliers
from .errors import OrbitlabError
from .polymap import PolyMap, multi_indices
from .solver import SeedPlan, SolverConfig, orbit_partition, solve_newton, solve_univariate

DEFAULT_EPS_LADDER = (1e-2, 1e-3, 1e-4)
DEFAULT_LAMBDA0_SET = (
    complex(1.0, 0.0),
    complex(-1.0, 0.0),
    complex(0.0, 1.0),
    cmath.exp(2j * cmath.pi / 3),
)


@dataclass(frozen=True)
class SampleConfig:
    trials: int
    rng_seed: int
    dimension: int = 1
    degree: int = 2
    k_max: int = 4
    eps_ladder: tuple = DEFAULT_EPS_LADDER
    lambda0_set: tuple = DEFAULT_LAMBDA0_SET
    lambda0_tol: float = 1e-6
    eta: float = DEFAULT_ETA
    solver: SolverConfig = SolverConfig()
    seed_plan: SeedPlan | None = None      # required when dimension >= 2
    planted: tuple = ()                    # control maps, reported separately

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        ladder = tuple(self.eps_ladder)
        if any(e <= 0 for e in ladder):
            raise ValueError("epsilon ladder entries must be positive")
        if any(a <= b for a, b in zip(ladder, ladder[1:])):
            raise ValueError("epsilon ladder must be strictly decreasing")
        if self.dimension >= 2 and self.seed_plan is None:
            raise ValueError("dimension >= 2 needs a seed plan")
        if self.dimension == 1 \
                and self.degree ** self.k_max > self.solver.degree_cap:
            raise ValueError(
                f"degree**k_max = {self.degree ** self.k_max} exceeds the "
                f"univariate cap {self.solver.degree_cap}")

    def to_dict(self):
        return {
            "trials": self.trials,
            "rng_seed": self.rng_seed,
            "dimension": self.dimension,
            "degree": self.degree,
            "k_max": self.k_max,
            "eps_ladder": list(self.eps_ladder),
            "lambda0_set": [[z.real, z.imag] for z in self.lambda0_set],
            "lambda0_tol": self.lambda0_tol,
            "eta": self.eta,
            "solver": self.solver.to_dict(),
            "seed_plan": self.seed_plan.to_dict() if self.seed_plan else None,
            "planted": [m.content_hash() for m in self.planted],
        }


@dataclass
class TrialOutcome:
    min_margin: float               # inf when the trial had no orbits
    orbit_count: int
    lambda0_hits: tuple             # indices into lambda0_set
    failed: bool = False
    failure: str | None = None


@dataclass
class GenericityReport:
    config: SampleConfig
    valid_trials: int
    failures: int
    eps_counts: list                # hits per ladder rung
    margins: list                   # sorted per-trial min margins (finite only)
    trials_with_orbits: int
    lambda0_trial_hits: list        # per lambda0: number of trials with a hit
    planted_outcomes: list          # dicts, one per planted control map

    def frequencies(self):
        if self.valid_trials == 0:
            return [0.0 for _ in self.eps_counts]
        return [c / self.valid_trials for c in self.eps_counts]

    def margin_summary(self):
        if not self.margins:
            return {"count": 0}
        m = self.margins

        def q(p):
            return m[min(len(m) - 1, int(p * len(m)))]

        return {"count": len(m), "min": m[0], "q25": q(0.25), "median": q(0.5),
                "q75": q(0.75), "max": m[-1]}

    def to_dict(self):
        return {
            "schema": "orbitlab.sample-report/1",
            "config": self.config.to_dict(),
            "valid_trials": self.valid_trials,
            "failures": self.failures,
            "frequencies": [
                {"eps": e, "count": c, "frequency": f}
                for e, c, f in zip(self.config.eps_ladder, self.eps_counts,
                                   self.frequencies())
            ],
            "margin_summary": self.margin_summary(),
            "trials_with_orbits": self.trials_with_orbits,
            "lambda0": [
                {"lambda0": [z.real, z.imag], "trials_hit": h}
                for z, h in zip(self.config.lambda0_set,
                                self.lambda0_trial_hits)
            ],
            "planted": self.planted_outcomes,
        }

    def csv_lines(self):
        lines = ["eps,frequency"]
        for e, f in zip(self.config.eps_ladder, self.frequencies()):
            lines.append(f"{repr(e)},{repr(f)}")
        return lines


def _orbit_records(pmap, config):
    """All orbit records with least period <= k_max.

    Heuristic (N >= 2) solves with a nonzero complex-count deficit abort
    the trial: missing orbits would bias margins optimistically.  On the
    certified univariate route a deficit signals genuine root multiplicity
    (a degenerate orbit), which is precisely an event worth keeping.
    """
    records = []
    for k in range(1, config.k_max + 1):
        if pmap.n == 1:
            report = solve_univariate(pmap, k, config.solver)
        else:
            report = solve_newton(pmap, k, config.seed_plan, config.rng_seed,
                                  config.solver)
            if report.deficit is not None and report.deficit != 0:
                raise OrbitlabError(
                    f"incomplete solve at period {k}: deficit {report.deficit}")
        for orbit in orbit_partition(report.points, pmap, config.solver):
            if orbit.least_period == k:
                records.append(multipliers(pmap, orbit.points, eta=config.eta))
    return records


def _assess_map(pmap, config):
    """Margins and lambda0 hits of one map's orbits up to k_max."""
    records = _orbit_records(pmap, config)
    min_margin = math.inf
    hits = set()
    for rec in records:
        min_margin = min(min_margin, rec.margin)
        for n in range(rec.least_period, config.k_max + 1,
                       rec.least_period):
            powered = power_multipliers(rec, n)
            for idx, lam0 in enumerate(config.lambda0_set):
                if any(abs(lam - lam0) <= config.lambda0_tol
                       for lam in powered):
                    hits.add(idx)
    return TrialOutcome(min_margin=min_margin, orbit_count=len(records),
                        lambda0_hits=tuple(sorted(hits)))


def _random_map(config, trial_index):
    """Real coefficient draw, enumerated over C (field='complex')."""
    rng = np.random.default_rng((config.rng_seed, trial_index))
    indices = multi_indices(config.dimension, config.degree)
    draws = rng.uniform(-1.0, 1.0, size=(len(indices), config.dimension))
    coeffs = {alpha: tuple(draws[i]) for i, alpha in enumerate(indices)}
    return PolyMap(config.dimension, config.degree, "complex", coeffs)


def run_sampler(config: SampleConfig) -> GenericityReport:
    """Run the experiment; fully deterministic for a fixed rng_seed."""
    eps = list(config.eps_ladder)
    eps_counts = [0] * len(eps)
    lambda0_hits = [0] * len(config.lambda0_set)
    margins = []
    failures = 0
    valid = 0
    with_orbits = 0

    for t in range(config.trials):
        pmap = _random_map(config, t)
        try:
            outcome = _assess_map(pmap, config)
        except OrbitlabError:
            failures += 1
            continue
        valid += 1
        if math.isfinite(outcome.min_margin):
            with_orbits += 1
            margins.append(outcome.min_margin)
        for i, e in enumerate(eps):
            if outcome.min_margin < e:
                eps_counts[i] += 1
        for idx in outcome.lambda0_hits:
            lambda0_hits[idx] += 1

    planted_outcomes = []
    for pmap in config.planted:
        entry = {"map_hash": pmap.content_hash()}
        try:
            outcome = _assess_map(pmap, config)
        except OrbitlabError as exc:
            entry.update({"failed": True, "failure": str(exc)})
        else:
            entry.update({
                "failed": False,
                "min_margin": (outcome.min_margin
                               if math.isfinite(outcome.min_margin) else None),
                "orbit_count": outcome.orbit_count,
                "lambda0_hits": [
                    {"lambda0": [config.lambda0_set[i].real,
                                 config.lambda0_set[i].imag]}
                    for i in outcome.lambda0_hits
                ],
                "eps_hits": [e for e in eps if outcome.min_margin < e],
            })
        planted_outcomes.append(entry)

    margins.sort()
    return GenericityReport(
        config=config,
        valid_trials=valid,
        failures=failures,
        eps_counts=eps_counts,
        margins=margins,
        trials_with_orbits=with_orbits,
        lambda0_trial_hits=lambda0_hits,
        planted_outcomes=planted_outcomes,
    )


@dataclass(frozen=True)
class MarginScaling:
    status: str                     # "ok" | "degenerate: all-zero"
    slope: float | None
    points: tuple                   # (log10 eps, log10 freq) pairs used


def margin_scaling(report: GenericityReport) -> MarginScaling:
    """Least-squares slope of log frequency against log epsilon."""
    pairs = [(math.log10(e), math.log10(f))
             for e, f in zip(report.config.eps_ladder, report.frequencies())
             if f > 0]
    if len(pairs) < 3:
        return MarginScaling(status="degenerate: all-zero", slope=None,
                             points=tuple(pairs))
    xs = np.array([p[0] for p in pairs])
    ys = np.array([p[1] for p in pairs])
    slope = float(np.polyfit(xs, ys, 1)[0])
    return MarginScaling(status="ok", slope=slope, points=tuple(pairs))
