"""Orbit multipliers and hyperbolicity / transversality classification.

The multipliers of a cycle are the eigenvalues of the product of per-point
Jacobians taken around the cycle in map order.  For the period-n view of an
orbit with least period d (d | n) the multipliers are the (n/d)-th powers;
they are never recomputed from the degree-D^n iterate.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import InconsistentOrbitError, NonFiniteError
from .polymap import PolyMap

DEFAULT_ETA = 1e-8          # marginality band around |multiplier| = 1

HYPERBOLIC = "hyperbolic"
MARGINAL = "marginal"
NONHYPERBOLIC = "nonhyperbolic"


@dataclass(frozen=True)
class OrbitRecord:
    points: tuple
    least_period: int
    multipliers: tuple            # N complex eigenvalues, canonical order
    classification: str
    margin: float                 # min over multipliers of ||lambda| - 1|
    char_residual: tuple          # |det(J - lambda Id)| at each multiplier

    def to_dict(self):
        return {
            "points": [[[complex(v).real, complex(v).imag] for v in pt]
                       for pt in self.points],
            "least_period": self.least_period,
            "multipliers": [[m.real, m.imag] for m in self.multipliers],
            "classification": self.classification,
            "margin": self.margin,
            "char_residual": list(self.char_residual),
        }


@dataclass(frozen=True)
class TransversalityVerdict:
    period_n: int
    resonant_roots: tuple
    transversal: bool


def _canonical_eigs(values):
    return tuple(sorted((complex(v) for v in values),
                        key=lambda z: (z.real, z.imag)))


def multipliers(pmap: PolyMap, orbit_points, eta: float = DEFAULT_ETA,
                closure_tol: float = 1e-6) -> OrbitRecord:
    """Classify one cycle; ``orbit_points`` must close under the map."""
    pts = [tuple(p) for p in orbit_points]
    d = len(pts)
    if d < 1:
        raise ValueError("empty orbit")

    jacs = []
    for i, pt in enumerate(pts):
        image = pmap.evaluate(pt)
        target = pts[(i + 1) % d]
        gap = max(abs(complex(a) - complex(b)) for a, b in zip(image, target))
        if gap > closure_tol:
            raise InconsistentOrbitError(
                f"orbit not closed at point {i} (gap {gap:.3e})")
        jacs.append(pmap.jacobian(pt).astype(complex))

    total = np.eye(pmap.n, dtype=complex)
    for jac in jacs:
        total = jac @ total
    if not np.all(np.isfinite(total)):
        raise NonFiniteError("non-finite Jacobian entries around the cycle")

    eigs = _canonical_eigs(np.linalg.eigvals(total))
    margin = min(abs(abs(lam) - 1.0) for lam in eigs)
    if margin > eta:
        classification = HYPERBOLIC
    elif margin == 0.0:
        classification = NONHYPERBOLIC
    else:
        classification = MARGINAL
    char_residual = tuple(
        float(abs(np.linalg.det(total - lam * np.eye(pmap.n)))) for lam in eigs)
    return OrbitRecord(
        points=tuple(pts),
        least_period=d,
        multipliers=eigs,
        classification=classification,
        margin=float(margin),
        char_residual=char_residual,
    )


def power_multipliers(record: OrbitRecord, period_n: int):
    """Multipliers of the orbit viewed as a period-n orbit (n/d-th powers)."""
    if period_n % record.least_period != 0:
        raise ValueError(
            f"period {period_n} is not a multiple of least period "
            f"{record.least_period}")
    e = period_n // record.least_period
    return _canonical_eigs(lam ** e for lam in record.multipliers)


def check_lambda0(record: OrbitRecord, lambda0: complex, tol: float) -> bool:
    """True iff some multiplier lies within tol of the unit-circle value."""
    lambda0 = complex(lambda0)
    if abs(abs(lambda0) - 1.0) > 1e-12:
        raise ValueError(f"lambda0 must lie on the unit circle, |{lambda0}| != 1")
    return any(abs(lam - lambda0) <= tol for lam in record.multipliers)


def check_transversal(record: OrbitRecord, period_n: int,
                      tol: float) -> TransversalityVerdict:
    """Test every multiplier against all period_n-th roots of unity."""
    if period_n < 1:
        raise ValueError("period_n must be >= 1")
    resonant = []
    for j in range(period_n):
        root = cmath.exp(2j * cmath.pi * j / period_n)
        if any(abs(lam - root) <= tol for lam in record.multipliers):
            resonant.append(root)
    return TransversalityVerdict(
        period_n=period_n,
        resonant_roots=tuple(resonant),
        transversal=not resonant,
    )
