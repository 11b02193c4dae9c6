"""Enumeration of period-k points with residual certification.

Three routes:

* ``solve_univariate`` (N=1): expand the k-th iterate symbolically, take all
  complex roots of P^k(x) - x from the companion matrix, then Newton-polish
  each root against the *compositional* iterate (k Horner passes), which
  stays well-conditioned where the expanded coefficients do not.  Missing
  roots are recovered by deterministic top-up seeding inside the escape
  disk.  Completeness is certified; the deficit field carries the honesty.
* ``solve_separable``: coordinate-wise univariate solves crossed together,
  for maps whose i-th component involves x_i only.
* ``solve_newton`` (any N): damped Newton from a seed grid plus rng seeds,
  deterministic for a fixed rng_seed.  Completeness is heuristic.

Every accepted point records its residual max|P^k(x) - x| and an isolation
certificate (smallest singular value of the Newton Jacobian d(P^k) - Id at
the root above the singularity threshold).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iter_product

import numpy as np

from . import _kernels
from .errors import (
    DegreeCapError,
    DimensionMismatchError,
    InconsistentOrbitError,
    InvariantViolation,
    NonFiniteError,
    NonIsolatedContinuumError,
)
from .polymap import PolyMap

GOLDEN_ANGLE = 2.399963229728653


@dataclass(frozen=True)
class SolverConfig:
    """Tolerance ledger for the solving pipeline (all values overridable)."""

    residual_tol: float = 1e-10     # acceptance: max|P^k(x) - x|
    polish_tol: float = 1e-12       # Newton stopping target
    dedup_tol: float = 1e-7         # distinct-point separation
    singular_tol: float = 1e-8      # isolation: smallest sing. value of d(P^k)-Id
    max_newton_iter: int = 100
    degree_cap: int = 256           # max D**k for the symbolic route
    topup_rounds: int = 8

    def to_dict(self):
        return {
            "residual_tol": self.residual_tol,
            "polish_tol": self.polish_tol,
            "dedup_tol": self.dedup_tol,
            "singular_tol": self.singular_tol,
            "max_newton_iter": self.max_newton_iter,
            "degree_cap": self.degree_cap,
            "topup_rounds": self.topup_rounds,
        }


@dataclass(frozen=True)
class SeedPlan:
    """Seeding recipe for the heuristic Newton route.

    ``box`` is one (lo, hi) interval per coordinate; for complex-field maps
    it is applied to the real and imaginary axes alike.  ``grid`` is the
    resolution per real axis, ``random`` the number of extra rng draws.
    """

    box: tuple
    grid: int = 0
    random: int = 0

    def to_dict(self):
        return {"box": [list(b) for b in self.box],
                "grid": self.grid, "random": self.random}


@dataclass(frozen=True)
class PeriodicPoint:
    location: tuple
    period_n: int
    residual: float
    newton_converged: bool
    isolated_certificate: bool
    min_singular: float

    def to_dict(self):
        return {
            "location": [[complex(v).real, complex(v).imag] for v in self.location],
            "period_n": self.period_n,
            "residual": self.residual,
            "newton_converged": self.newton_converged,
            "isolated_certificate": self.isolated_certificate,
            "min_singular": self.min_singular,
        }


@dataclass
class SolveReport:
    points: list
    k: int
    bezout_bound: int
    completeness: str               # "certified" | "heuristic"
    deficit: int | None
    complex_count: int | None
    map_hash: str
    map_n: int
    map_degree: int
    map_field: str
    config: SolverConfig
    seed_plan: SeedPlan | None = None
    rng_seed: int | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def isolated_points(self):
        return [p for p in self.points if p.isolated_certificate]

    def to_dict(self):
        return {
            "schema": "orbitlab.solve-report/1",
            "k": self.k,
            "bezout_bound": self.bezout_bound,
            "completeness": self.completeness,
            "deficit": self.deficit,
            "complex_count": self.complex_count,
            "map_hash": self.map_hash,
            "map_n": self.map_n,
            "map_degree": self.map_degree,
            "map_field": self.map_field,
            "tolerances": self.config.to_dict(),
            "seed_plan": self.seed_plan.to_dict() if self.seed_plan else None,
            "rng_seed": self.rng_seed,
            "points": [p.to_dict() for p in self.points],
            "diagnostics": self.diagnostics,
        }


# ---------------------------------------------------------------------------
# univariate route


def escape_radius(dense):
    """Radius R such that |x| > R implies |P(x)| >= 2|x| (orbit escapes).

    Computed from the highest nonzero coefficient; 0.0 when the effective
    degree is < 2 (affine maps have no escape bound).
    """
    mags = np.abs(np.asarray(dense, dtype=complex))
    nz = np.nonzero(mags)[0]
    if len(nz) == 0 or nz[-1] < 2:
        return 0.0
    d = nz[-1]
    return max(1.0, (2.0 + mags[:d].sum()) / mags[d])


def _dedup_complex(points, tol):
    """Cluster a complex array at tolerance; keeps the canonical-first point."""
    if len(points) == 0:
        return points
    order = np.lexsort((points.imag, points.real))
    pts = points[order]
    out = [pts[0]]
    for z in pts[1:]:
        distinct = True
        for w in reversed(out):
            if z.real - w.real > tol:
                break
            if abs(z - w) <= tol:
                distinct = False
                break
        if distinct:
            out.append(z)
    return np.array(out)


def fujiwara_bound(coeffs):
    """Upper bound on root moduli of a polynomial, ascending coefficients.

    Computed in log space so astronomically large iterate coefficients do
    not overflow.
    """
    c = np.asarray(coeffs, dtype=complex)
    deg = len(c) - 1
    if deg < 1 or c[deg] == 0:
        return 0.0
    lead = np.log(abs(c[deg]))
    best = -np.inf
    for j in range(deg):
        if c[j] == 0:
            continue
        val = np.log(abs(c[j]) / (2.0 if j == 0 else 1.0)) - lead
        best = max(best, val / (deg - j))
    if best == -np.inf:
        return 0.0
    return 2.0 * float(np.exp(best))


def _topup_seeds(radius, count, round_idx):
    """Deterministic seed batch at several geometric scales.

    Each scale level contributes a golden-angle spiral over its disk and a
    cos-clustered real grid (root clustering near interval endpoints looks
    exactly like this).  Later rounds add deeper scales and more points.
    """
    j = np.arange(count) + 0.5
    batches = []
    for level in range(4 + 2 * round_idx):
        r = radius * 0.5 ** level
        spiral = r * np.sqrt(j / count) * np.exp(
            1j * (j * GOLDEN_ANGLE + 0.1 * round_idx + 0.017 * level))
        reals = r * np.cos(np.pi * (j / count + 0.003 * round_idx
                                    + 0.0013 * level)) + 0j
        batches.extend([spiral, reals])
    return np.concatenate(batches)


MULTIPLE_ROOT_BAND = 1e-3   # |d(P^k) - 1| below this: suspect a multiple root


def _polish_accept(base, k, seeds, config, escape):
    """Polish seeds and return accepted points.

    Points whose iterate derivative sits near 1 are re-polished with a zero
    target: Newton converges only linearly on a multiple root and would
    otherwise strand a cloud of copies wider than the dedup tolerance.
    """
    xs, res, lam, _ = _kernels.polish_periodic(
        base, k, seeds, config.polish_tol, config.max_newton_iter, escape)
    ok = res <= config.residual_tol
    pts, lams = xs[ok], lam[ok]
    suspect = np.abs(lams - 1.0) < MULTIPLE_ROOT_BAND
    if suspect.any():
        deep, dres, _, _ = _kernels.polish_periodic(
            base, k, pts[suspect], 0.0, 3 * config.max_newton_iter, escape)
        pts = np.concatenate([pts[~suspect], deep[dres <= config.residual_tol]])
    return pts


def solve_univariate(pmap: PolyMap, k: int, config: SolverConfig = SolverConfig()):
    """All period-k points of a univariate map, certified via the symbolic route."""
    if pmap.n != 1:
        raise DimensionMismatchError("solve_univariate requires N=1")
    if k < 1:
        raise ValueError("k must be >= 1")
    target = pmap.degree ** k
    if target > config.degree_cap:
        raise DegreeCapError(
            f"iterate degree {pmap.degree}**{k} = {target} exceeds cap "
            f"{config.degree_cap}")

    base = pmap.dense_coeffs_1d()
    expanded = _kernels.compose_self(base, k)
    fixed_eq = expanded.copy()
    fixed_eq[1] -= 1.0

    # exact-zero leading trim; small-but-nonzero leading coefficients are kept
    # (their roots are dynamically bounded even when the expansion is wild).
    eq = np.trim_zeros(fixed_eq, "b")
    if len(eq) == 0:
        raise NonIsolatedContinuumError(
            f"P^{k}(x) - x vanishes identically: continuum of period-{k} points")
    degree_deficiency = target - (len(eq) - 1)
    radius = escape_radius(base)
    escape = 2.0 * radius if radius > 0 else 0.0

    if len(eq) == 1:
        seeds = np.empty(0, dtype=complex)
    elif np.abs(eq.imag).max() == 0.0:
        seeds = np.roots(eq[::-1].real).astype(complex)
    else:
        seeds = np.roots(eq[::-1])

    expected = len(eq) - 1
    seed_radius = fujiwara_bound(eq)
    if radius > 0:
        seed_radius = min(seed_radius, radius) if seed_radius > 0 else radius
    if seed_radius == 0.0:
        seed_radius = 10.0 * (1.0 + float(np.abs(base).max()))
    found = np.empty(0, dtype=complex)
    rounds_used = 0
    for rnd in range(config.topup_rounds + 1):
        if len(seeds):
            accepted = _polish_accept(base, k, seeds, config, escape)
            found = _dedup_complex(np.concatenate([found, accepted]),
                                   config.dedup_tol)
            # settle to quadratic-convergence depth: a point that merely
            # entered the residual shell of a steep root can sit farther
            # from it than the dedup tolerance, so polish and re-dedup
            if len(found):
                settled, sres, _, _ = _kernels.polish_periodic(
                    base, k, found, config.polish_tol, 8, escape)
                found = _dedup_complex(settled[sres <= config.residual_tol],
                                       config.dedup_tol)
        if len(found) >= expected or rnd == config.topup_rounds:
            break
        rounds_used = rnd + 1
        seeds = _topup_seeds(seed_radius, 2 * max(expected, 16) * (rnd + 1), rnd)

    # evaluation pass (0 iterations) for residual + multiplier data
    if len(found):
        _, res, lam, conv = _kernels.polish_periodic(
            base, k, found, config.residual_tol, 0, escape)
    else:
        res = np.empty(0)
        lam = np.empty(0, dtype=complex)
        conv = np.empty(0, dtype=bool)

    bezout = pmap.degree ** k
    complex_count = int(len(found))
    if complex_count > bezout:
        raise InvariantViolation(
            f"{complex_count} period-{k} points exceed the degree bound {bezout}")

    points = []
    for i, z in enumerate(found):
        if pmap.field == "real" and abs(z.imag) > config.dedup_tol:
            continue
        loc = (z.real,) if pmap.field == "real" else (z,)
        min_sing = float(abs(lam[i] - 1.0))
        points.append(PeriodicPoint(
            location=loc,
            period_n=k,
            residual=float(res[i]),
            newton_converged=bool(conv[i]),
            isolated_certificate=min_sing >= config.singular_tol,
            min_singular=min_sing,
        ))

    return SolveReport(
        points=points,
        k=k,
        bezout_bound=bezout,
        completeness="certified",
        deficit=bezout - complex_count,
        complex_count=complex_count,
        map_hash=pmap.content_hash(),
        map_n=pmap.n,
        map_degree=pmap.degree,
        map_field=pmap.field,
        config=config,
        diagnostics={
            "degree_deficiency": int(degree_deficiency),
            "topup_rounds_used": rounds_used,
        },
    )


# ---------------------------------------------------------------------------
# separable route


def separable_components(pmap: PolyMap):
    """Univariate component maps when component i involves x_i only, else None."""
    comps = []
    for i in range(pmap.n):
        coeffs = {}
        for alpha, vec in pmap.coeffs.items():
            if vec[i] == 0:
                continue
            if any(alpha[j] != 0 for j in range(pmap.n) if j != i):
                return None
            coeffs[(alpha[i],)] = (vec[i],)
        comps.append(PolyMap(1, pmap.degree, pmap.field, coeffs))
    return comps


def solve_separable(pmap: PolyMap, k: int, config: SolverConfig = SolverConfig()):
    """Certified product solve for coordinate-separable maps."""
    comps = separable_components(pmap)
    if comps is None:
        raise DimensionMismatchError("map is not coordinate-separable")
    reports = [solve_univariate(c, k, config) for c in comps]
    bezout = pmap.degree ** (k * pmap.n)

    points = []
    for combo in iter_product(*(r.points for r in reports)):
        loc = tuple(p.location[0] for p in combo)
        min_sing = min(p.min_singular for p in combo)
        points.append(PeriodicPoint(
            location=loc,
            period_n=k,
            residual=max(p.residual for p in combo),
            newton_converged=all(p.newton_converged for p in combo),
            isolated_certificate=min_sing >= config.singular_tol,
            min_singular=min_sing,
        ))
    complex_count = 1
    for r in reports:
        complex_count *= (r.complex_count if r.complex_count is not None else 0)
    if complex_count > bezout:
        raise InvariantViolation(
            f"{complex_count} period-{k} points exceed the Bezout bound {bezout}")
    return SolveReport(
        points=points,
        k=k,
        bezout_bound=bezout,
        completeness="certified",
        deficit=bezout - complex_count,
        complex_count=complex_count,
        map_hash=pmap.content_hash(),
        map_n=pmap.n,
        map_degree=pmap.degree,
        map_field=pmap.field,
        config=config,
        diagnostics={"route": "separable"},
    )


# ---------------------------------------------------------------------------
# multivariate heuristic route


def _seed_points(pmap, plan, rng_seed):
    """Deterministic seed list: full grid product plus rng box draws."""
    n = pmap.n
    axes_per_coord = 2 if pmap.field == "complex" else 1
    axes = []
    for (lo, hi) in plan.box:
        axes.append((float(lo), float(hi)))
    if len(axes) != n:
        raise ValueError(f"seed box needs {n} intervals, got {len(axes)}")

    seeds = []
    if plan.grid > 0:
        per_axis = []
        for (lo, hi) in axes:
            ticks = np.linspace(lo, hi, plan.grid)
            per_axis.extend([ticks] * axes_per_coord)
        for combo in iter_product(*per_axis):
            if axes_per_coord == 2:
                pt = tuple(complex(combo[2 * i], combo[2 * i + 1]) for i in range(n))
            else:
                pt = tuple(float(c) for c in combo)
            seeds.append(pt)
    if plan.random > 0:
        rng = np.random.default_rng(rng_seed)
        lo = np.array([a[0] for a in axes])
        hi = np.array([a[1] for a in axes])
        draws = rng.uniform(0.0, 1.0, size=(plan.random, n * axes_per_coord))
        for row in draws:
            if axes_per_coord == 2:
                pt = tuple(complex(lo[i] + (hi[i] - lo[i]) * row[2 * i],
                                   lo[i] + (hi[i] - lo[i]) * row[2 * i + 1])
                           for i in range(n))
            else:
                pt = tuple(float(lo[i] + (hi[i] - lo[i]) * row[i]) for i in range(n))
            seeds.append(pt)
    return seeds


def _iterate_value(pmap, k, x):
    """max-norm of P^k(x) - x, or inf when the orbit blows up."""
    try:
        fx, _ = pmap.iterate(tuple(x), k)
    except (NonFiniteError, OverflowError):
        return np.inf
    return float(np.max(np.abs(np.array(fx) - x)))


def _newton_from_seed(pmap, k, x0, config, divergence_radius):
    """Damped Newton on F(x) = P^k(x) - x; returns (point, residual, J) or None."""
    x = np.array(x0, dtype=complex if pmap.field == "complex" else float)
    eye = np.eye(pmap.n)
    for _ in range(config.max_newton_iter):
        if np.max(np.abs(x)) > divergence_radius:
            return None
        try:
            fx, jac = pmap.iterate(tuple(x), k)
        except (NonFiniteError, OverflowError):
            return None
        fvec = np.array(fx) - x
        fnorm = float(np.max(np.abs(fvec)))
        if not np.isfinite(fnorm):
            return None
        if fnorm <= config.polish_tol:
            break
        try:
            step = np.linalg.solve(jac - eye, -fvec)
        except np.linalg.LinAlgError:
            return None
        # backtracking on the residual norm
        t = 1.0
        while t >= 1.0 / 64.0:
            if _iterate_value(pmap, k, x + t * step) < fnorm:
                x = x + t * step
                break
            t /= 2.0
        else:
            break
    try:
        fx, jac = pmap.iterate(tuple(x), k)
    except (NonFiniteError, OverflowError):
        return None
    residual = float(np.max(np.abs(np.array(fx) - x)))
    if not np.isfinite(residual):
        return None
    return tuple(x), residual, jac - eye


def solve_newton(pmap: PolyMap, k: int, plan: SeedPlan, rng_seed: int,
                 config: SolverConfig = SolverConfig()):
    """Heuristic enumeration by damped Newton from grid plus rng seeds."""
    if k < 1:
        raise ValueError("k must be >= 1")
    seeds = _seed_points(pmap, plan, rng_seed)
    if not seeds:
        raise ValueError("seed plan produced zero seeds")
    span = max(abs(float(hi)) + abs(float(lo)) for lo, hi in plan.box)
    divergence_radius = 10.0 * max(1.0, span)

    candidates = []
    skipped = 0
    for seed in seeds:
        result = _newton_from_seed(pmap, k, seed, config, divergence_radius)
        if result is None:
            skipped += 1
            continue
        loc, residual, jf = result
        if residual <= config.residual_tol:
            candidates.append((loc, residual, jf))
        else:
            skipped += 1

    # canonical order, then greedy max-norm dedup
    def sort_key(item):
        return tuple(v for z in item[0] for v in (complex(z).real, complex(z).imag))

    candidates.sort(key=sort_key)
    accepted = []
    for loc, residual, jf in candidates:
        vec = np.array([complex(v) for v in loc])
        duplicate = False
        for prev in accepted:
            pv = np.array([complex(v) for v in prev[0]])
            if np.max(np.abs(vec - pv)) <= config.dedup_tol:
                duplicate = True
                break
        if duplicate:
            continue
        accepted.append((loc, residual, jf))

    bezout = pmap.degree ** (k * pmap.n)
    points = []
    for loc, residual, jf in accepted:
        min_sing = float(np.linalg.svd(jf.astype(complex), compute_uv=False)[-1])
        points.append(PeriodicPoint(
            location=loc,
            period_n=k,
            residual=residual,
            newton_converged=True,
            isolated_certificate=min_sing >= config.singular_tol,
            min_singular=min_sing,
        ))
    complex_count = len(points) if pmap.field == "complex" else None
    if complex_count is not None and complex_count > bezout:
        raise InvariantViolation(
            f"{complex_count} period-{k} points exceed the Bezout bound {bezout}")
    return SolveReport(
        points=points,
        k=k,
        bezout_bound=bezout,
        completeness="heuristic",
        deficit=(bezout - complex_count) if complex_count is not None else None,
        complex_count=complex_count,
        map_hash=pmap.content_hash(),
        map_n=pmap.n,
        map_degree=pmap.degree,
        map_field=pmap.field,
        config=config,
        seed_plan=plan,
        rng_seed=rng_seed,
        diagnostics={"seeds": len(seeds), "skipped": skipped},
    )


# ---------------------------------------------------------------------------
# orbit grouping


@dataclass(frozen=True)
class OrbitCycle:
    """A periodic cycle in map order; least_period == len(points)."""

    points: tuple
    least_period: int


def orbit_partition(points, pmap: PolyMap, config: SolverConfig = SolverConfig()):
    """Group period-n points into cycles with their least periods.

    Each point's image under the map must match another supplied point
    within the dedup tolerance, and every least period must divide n.
    """
    if not points:
        return []
    period_n = points[0].period_n
    if any(p.period_n != period_n for p in points):
        raise InconsistentOrbitError("points mix different period_n values")

    locs = np.array([[complex(v) for v in p.location] for p in points])
    images = np.array([[complex(v) for v in pmap.evaluate(p.location)]
                       for p in points])
    # pairwise max-norm distances, image i vs point j
    dists = np.max(np.abs(images[:, None, :] - locs[None, :, :]), axis=2)
    successor = np.argmin(dists, axis=1)
    best = dists[np.arange(len(points)), successor]
    worst = int(np.argmax(best))
    if best[worst] > config.dedup_tol:
        raise InconsistentOrbitError(
            f"image of point {worst} matches nothing "
            f"(distance {best[worst]:.3e})")
    successor = [int(s) for s in successor]
    if len(set(successor)) != len(points):
        raise InconsistentOrbitError("map image is not a permutation of the set")

    def canon(idx):
        return tuple(v for z in points[idx].location
                     for v in (complex(z).real, complex(z).imag))

    orbits = []
    visited = set()
    for start in sorted(range(len(points)), key=canon):
        if start in visited:
            continue
        cycle = [start]
        visited.add(start)
        cur = successor[start]
        while cur != start:
            if cur in visited:
                raise InconsistentOrbitError("rho-shaped trajectory in point set")
            visited.add(cur)
            cycle.append(cur)
            cur = successor[cur]
        d = len(cycle)
        if period_n % d != 0:
            raise InconsistentOrbitError(
                f"cycle length {d} does not divide period {period_n}")
        orbits.append(OrbitCycle(
            points=tuple(points[i].location for i in cycle),
            least_period=d,
        ))
    return orbits
