"""One-dimensional degenerate fixed points and their hyperbolic splitting.

``detect_degeneracy`` recognizes a unit-multiplier fixed point and reads
off the order of its normal form x -> x + l x^(k+1) + higher order from
the Taylor displacement.  ``split`` replaces such a point by a prescribed
number m of simple hyperbolic fixed points, realized as the map

    x -> x + c * prod_{i=1..m} (x - i*delta)

whose displacement vanishes exactly on an arithmetic grid inside the
study window.  The amplitude c is chosen so every multiplier clears the
hyperbolicity band by a safe factor; the construction is then verified by
the certified univariate solver and the classifier.  ``demand_schedule``
drives the same construction with m = n1 * a(n1) for a demand sequence a,
so the resulting map carries at least n1 * a(n1) period-n1 points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .census import CensusConfig, build_census
from .classify import DEFAULT_ETA, HYPERBOLIC, multipliers
from .errors import (
    FlatDegeneracyError,
    InfeasibleScaleError,
    OrbitlabError,
)
from .polymap import PolyMap
from .solver import SeedPlan, SolverConfig, solve_univariate

SPLIT_CAP = 64
MARGIN_FACTOR = 10.0        # certified margins must exceed MARGIN_FACTOR * eta
TARGET_MIN_STEP = 1e-5      # aimed-for smallest |multiplier - 1| in a split
INITIAL_DELTA = 5e-3        # root spacing start; retries halve it

# Root spacing drives a trade-off: the amplitude needed for a fixed
# multiplier step scales like delta^-(m-1), but evaluation error at the
# roots scales *down* with delta at fixed step, so retries shrink delta.
# Around m ~ 20 the factorial imbalance of the arithmetic grid exhausts
# double precision no matter the spacing and split() fails hard.


@dataclass(frozen=True)
class NormalForm:
    """Degenerate fixed point x -> x + leading * x^(order+1) + o(...)."""

    order: int                  # degeneracy order k >= 1
    leading: float              # l_{k+1}, nonzero
    window: tuple = (-1.0, 1.0)

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("degeneracy order must be >= 1")
        if self.leading == 0:
            raise ValueError("leading displacement coefficient must be nonzero")
        if not self.window[0] < 0 < self.window[1]:
            raise ValueError("window must contain 0 in its interior")

    def as_map(self):
        """The truncated normal form as a PolyMap."""
        return PolyMap(1, self.order + 1, "real",
                       {(1,): (1.0,), (self.order + 1,): (float(self.leading),)})

    def to_dict(self):
        return {"order": self.order, "leading": float(self.leading),
                "window": list(self.window)}


def _taylor_displacement(pmap, x0):
    """Coefficients of f(x0 + t) - x0 - t in t, index 0..degree.

    Exact (Fraction) when both the map and x0 are exact; float otherwise.
    """
    exact = pmap.is_exact and isinstance(x0, (int, Fraction))
    deg = pmap.degree
    if exact:
        dense = pmap.dense_coeffs_1d(exact=True)
        x0 = Fraction(x0)
        out = [Fraction(0)] * (deg + 1)
    else:
        dense = [complex(c).real for c in pmap.dense_coeffs_1d()]
        x0 = float(x0)
        out = [0.0] * (deg + 1)
    for i, c in enumerate(dense):
        if c == 0:
            continue
        # c * (x0 + t)^i expanded by the binomial theorem
        for j in range(i + 1):
            out[j] += c * math.comb(i, j) * x0 ** (i - j)
    out[0] -= x0
    out[1] -= 1
    return out, exact


def detect_degeneracy(pmap: PolyMap, x0, eta: float = DEFAULT_ETA,
                      fixed_tol: float = 1e-8):
    """NormalForm at a unit-multiplier fixed point, else a verdict string.

    Returns "hyperbolic" when the multiplier clears the band, or
    "marginal non-unit" when it is marginal without being 1 (e.g. -1).
    """
    if pmap.n != 1:
        raise ValueError("detect_degeneracy works on interval maps (N=1)")
    if pmap.field != "real":
        raise ValueError("detect_degeneracy expects a real-field map")
    fx = pmap.evaluate((x0,))[0]
    if abs(float(fx - x0)) > fixed_tol:
        raise ValueError(f"{x0} is not a fixed point (|f(x0)-x0| = "
                         f"{abs(float(fx - x0)):.3e})")
    disp, exact = _taylor_displacement(pmap, x0)
    multiplier = disp[1] + 1
    margin = abs(abs(float(multiplier)) - 1.0)
    if margin > eta:
        return "hyperbolic"
    if abs(float(multiplier) - 1.0) > eta:
        return "marginal non-unit"

    zero_tol = 0 if exact else 1e-9 * max(1.0, max(abs(c) for c in disp))
    for j in range(2, pmap.degree + 1):
        if abs(disp[j]) > zero_tol:
            return NormalForm(order=j - 1, leading=float(disp[j]))
    raise FlatDegeneracyError(
        f"displacement vanishes to the map's degree {pmap.degree} at {x0}")


@dataclass
class SplitPlan:
    target_count: int
    delta: float
    amplitude: float            # the c in x + c * prod(x - i*delta)
    constructed_map: PolyMap
    seed: NormalForm
    certification_margin: float
    seed_distance: float        # sup-norm gap to the seed normal-form map
    fixed_points: list
    schedule: dict | None = None
    census_P: int | None = None

    def to_dict(self):
        data = {
            "schema": "orbitlab.split-plan/1",
            "target_count": self.target_count,
            "delta": self.delta,
            "amplitude": self.amplitude,
            "map": self.constructed_map.to_dict(),
            "seed": self.seed.to_dict(),
            "certification_margin": self.certification_margin,
            "seed_distance": self.seed_distance,
            "fixed_points": self.fixed_points,
            "schedule": self.schedule,
            "census_P": self.census_P,
        }
        return data


def _grid_map(m, delta, amplitude):
    """x + amplitude * prod_{i=1..m}(x - i*delta) as a PolyMap."""
    poly = np.array([1.0])
    for i in range(1, m + 1):
        poly = np.convolve(poly, np.array([-i * delta, 1.0]))
    disp = amplitude * poly          # ascending coefficients, degree m
    coeffs = {(j,): (float(c),) for j, c in enumerate(disp) if c != 0}
    lin = coeffs.get((1,), (0.0,))[0] + 1.0
    coeffs[(1,)] = (lin,)
    return PolyMap(1, max(m, 1), "real", coeffs)


def split(seed: NormalForm, m: int, eta: float = DEFAULT_ETA,
          solver: SolverConfig = SolverConfig(), cap: int = SPLIT_CAP,
          retries: int = 5) -> SplitPlan:
    """Split the degenerate point into exactly m hyperbolic fixed points."""
    if m < 1:
        raise ValueError("target count must be >= 1")
    if m > cap:
        raise InfeasibleScaleError(
            f"target count {m} exceeds the split cap {cap}")

    delta = seed.window[1] / (m + 1)
    last_error = None
    for _ in range(retries + 1):
        # multiplier at root j is 1 + c * delta^(m-1) * (-1)^(m-j) (j-1)!(m-j)!
        weights = [math.factorial(j - 1) * math.factorial(m - j)
                   for j in range(1, m + 1)]
        scale = delta ** (m - 1) * min(weights)
        amplitude = math.copysign(TARGET_MIN_STEP / scale, seed.leading)
        constructed = _grid_map(m, delta, amplitude)
        try:
            plan = _verify_split(seed, m, delta, amplitude, constructed,
                                 eta, solver)
        except OrbitlabError as exc:
            last_error = exc
            delta /= 2.0
            continue
        return plan
    raise OrbitlabError(
        f"split verification failed after {retries + 1} attempts: {last_error}")


def _verify_split(seed, m, delta, amplitude, constructed, eta, solver):
    report = solve_univariate(constructed, 1, solver)
    lo, hi = 0.0, seed.window[1]
    inside = [p for p in report.points
              if lo < float(p.location[0].real if isinstance(p.location[0], complex)
                            else p.location[0]) < hi]
    if len(inside) != m or len(report.points) != m:
        raise OrbitlabError(
            f"expected {m} fixed points in the window, found {len(inside)} "
            f"(total {len(report.points)})")
    margins = []
    fixed_points = []
    for p in report.points:
        record = multipliers(constructed, [p.location], eta=eta)
        if record.classification != HYPERBOLIC:
            raise OrbitlabError(
                f"fixed point {p.location[0]} is {record.classification}")
        if record.margin < MARGIN_FACTOR * eta:
            raise OrbitlabError(
                f"margin {record.margin:.3e} below {MARGIN_FACTOR} * eta")
        margins.append(record.margin)
        fixed_points.append({
            "x": float(np.real(p.location[0])),
            "multiplier": record.multipliers[0].real,
            "margin": record.margin,
            "residual": p.residual,
        })

    seed_map = seed.as_map()
    keys = set(seed_map.coeffs) | set(constructed.coeffs)
    seed_distance = max(
        abs(complex(constructed.coeffs.get(key, ((0.0,)))[0])
            - complex(seed_map.coeffs.get(key, ((0.0,)))[0]))
        for key in keys)
    return SplitPlan(
        target_count=m,
        delta=delta,
        amplitude=amplitude,
        constructed_map=constructed,
        seed=seed,
        certification_margin=min(margins),
        seed_distance=seed_distance,
        fixed_points=sorted(fixed_points, key=lambda d: d["x"]),
    )


def demand_schedule(a, n1: int, seed: NormalForm | None = None,
                    eta: float = DEFAULT_ETA,
                    solver: SolverConfig = SolverConfig(),
                    cap: int = SPLIT_CAP) -> SplitPlan:
    """Split so the census carries at least n1 * a(n1) period-n1 points.

    ``a`` maps a positive integer to a positive integer demand.  Fixed
    points are period-n1 points for every n1, so a census of the
    constructed map must show P_{n1} >= n1 * a(n1); the census runs the
    certified route where the iterate degree allows and a window-adapted
    Newton grid beyond it.
    """
    if n1 < 1:
        raise ValueError("n1 must be >= 1")
    demand = a(n1)
    if demand < 1:
        raise ValueError("the demand sequence must be positive")
    m = n1 * demand
    if m > cap:
        feasible = [n for n in range(1, n1 + 1) if n * a(n) <= cap]
        raise InfeasibleScaleError(
            f"n1 * a(n1) = {m} exceeds the split cap {cap}; largest feasible "
            f"n1 is {max(feasible) if feasible else 'none'}")
    if seed is None:
        seed = NormalForm(order=1, leading=1.0)
    plan = split(seed, m, eta=eta, solver=solver, cap=cap)

    pad = plan.delta
    grid = max(64, 24 * m)
    census_cfg = CensusConfig(
        solver=solver,
        eta=eta,
        method="auto",
        seed_plan=SeedPlan(box=((-pad, seed.window[1] + pad),), grid=grid),
        rng_seed=0,
    )
    table = build_census(plan.constructed_map, n1, census_cfg)
    row = table.row(n1)
    if not row.available:
        raise OrbitlabError(f"census row {n1} unavailable: {row.error}")
    if row.P is None or row.P < m:
        raise OrbitlabError(
            f"census found P_{n1} = {row.P}, demanded at least {m}")
    plan.schedule = {"n1": n1, "a_n1": demand, "m": m}
    plan.census_P = row.P
    return plan
