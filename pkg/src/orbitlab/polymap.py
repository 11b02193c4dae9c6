"""Polynomial self-maps of N-space: representation, evaluation, iteration.

A map sends x = (x_1, ..., x_N) to (P_1(x), ..., P_N(x)) where each P_i is
a polynomial of total degree <= D.  Coefficients are stored sparsely as a
mapping from multi-index (an exponent tuple) to the N-vector of scalar
coefficients; absent indices mean zero.  Multi-indices are kept in graded
lexicographic order so that serialization and hashing are canonical.

Scalars may be Python ints, floats, Fractions or complex numbers.  A map
whose coefficients are all int/Fraction supports exact arithmetic in
``compose_symbolic``; everything else runs in float.
"""

from __future__ import annotations

import cmath
import hashlib
import json
import math
from fractions import Fraction
from itertools import product

import numpy as np

from . import _kernels
from .errors import DegreeCapError, DimensionMismatchError, NonFiniteError

DEFAULT_DEGREE_CAP = 256


def multi_indices(n, degree):
    """All exponent tuples alpha in Z_+^n with |alpha| <= degree, graded lex."""
    idx = [alpha for alpha in product(range(degree + 1), repeat=n)
           if sum(alpha) <= degree]
    idx.sort(key=lambda a: (sum(a), a))
    return idx


def mu(n, degree):
    """Number of multi-indices with |alpha| <= degree."""
    return math.comb(n + degree, n)


def _is_exact_scalar(v):
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def _is_finite_scalar(v):
    if isinstance(v, complex):
        return cmath.isfinite(v)
    if isinstance(v, (int, Fraction)):
        return True
    return math.isfinite(v)


class PolyMap:
    """Immutable polynomial self-map of R^N or C^N of degree <= D."""

    __slots__ = ("n", "degree", "field", "coeffs", "_hash_cache")

    def __init__(self, n, degree, field, coeffs):
        if n < 1:
            raise ValueError(f"dimension must be >= 1, got {n}")
        if degree < 1:
            raise ValueError(f"degree must be >= 1, got {degree}")
        if field not in ("real", "complex"):
            raise ValueError(f"field must be 'real' or 'complex', got {field!r}")
        clean = {}
        for alpha, vec in coeffs.items():
            alpha = tuple(int(e) for e in alpha)
            if len(alpha) != n:
                raise ValueError(f"multi-index {alpha} has length != {n}")
            if any(e < 0 for e in alpha):
                raise ValueError(f"negative exponent in multi-index {alpha}")
            if sum(alpha) > degree:
                raise ValueError(f"multi-index {alpha} exceeds degree {degree}")
            vec = tuple(vec)
            if len(vec) != n:
                raise ValueError(f"coefficient vector for {alpha} has length != {n}")
            for v in vec:
                if not _is_finite_scalar(v):
                    raise NonFiniteError(f"non-finite coefficient at {alpha}")
                if field == "real" and isinstance(v, complex) and v.imag != 0:
                    raise ValueError(f"complex coefficient {v} on a real-field map")
            vec = tuple(v.real if isinstance(v, complex) else v for v in vec) \
                if field == "real" else vec
            if any(v != 0 for v in vec):
                clean[alpha] = vec
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs",
                           dict(sorted(clean.items(), key=lambda kv: (sum(kv[0]), kv[0]))))
        object.__setattr__(self, "_hash_cache", None)

    def __setattr__(self, name, value):
        raise AttributeError("PolyMap is immutable")

    # -- basic properties -------------------------------------------------

    @property
    def mu(self):
        return mu(self.n, self.degree)

    @property
    def is_exact(self):
        """True when all coefficients are int/Fraction (exact arithmetic)."""
        return all(_is_exact_scalar(v) for vec in self.coeffs.values() for v in vec)

    def __eq__(self, other):
        return (isinstance(other, PolyMap) and self.n == other.n
                and self.degree == other.degree and self.field == other.field
                and self.coeffs == other.coeffs)

    def __repr__(self):
        return (f"PolyMap(n={self.n}, degree={self.degree}, field={self.field!r}, "
                f"{len(self.coeffs)} terms)")

    # -- evaluation -------------------------------------------------------

    def _check_point(self, x):
        x = tuple(x)
        if len(x) != self.n:
            raise DimensionMismatchError(
                f"point has dimension {len(x)}, map has {self.n}")
        for v in x:
            if not _is_finite_scalar(v):
                raise NonFiniteError("non-finite input coordinate")
            if self.field == "real" and isinstance(v, complex) and v.imag != 0:
                raise DimensionMismatchError(
                    "complex point supplied to a real-field map")
        return x

    def evaluate(self, x):
        """P(x) as a tuple of scalars; exact when map and point are exact."""
        x = self._check_point(x)
        out = [0] * self.n
        for alpha, vec in self.coeffs.items():
            mono = 1
            for xi, e in zip(x, alpha):
                if e:
                    mono *= xi ** e
            for i in range(self.n):
                if vec[i] != 0:
                    out[i] = out[i] + vec[i] * mono
        for v in out:
            if not _is_finite_scalar(v):
                raise NonFiniteError("evaluation overflowed to a non-finite value")
        return tuple(out)

    def jacobian(self, x):
        """The N x N matrix of partial derivatives at x, as a numpy array."""
        x = self._check_point(x)
        dtype = complex if (self.field == "complex"
                            or any(isinstance(v, complex) for v in x)) else float
        jac = np.zeros((self.n, self.n), dtype=dtype)
        for alpha, vec in self.coeffs.items():
            for j in range(self.n):
                e = alpha[j]
                if e == 0:
                    continue
                mono = e
                for axis, (xi, ei) in enumerate(zip(x, alpha)):
                    p = ei - 1 if axis == j else ei
                    if p:
                        mono *= xi ** p
                for i in range(self.n):
                    if vec[i] != 0:
                        term = vec[i] * mono
                        jac[i, j] += complex(term) if dtype is complex else float(term)
        if not np.all(np.isfinite(jac)):
            raise NonFiniteError("jacobian overflowed to a non-finite value")
        return jac

    def iterate(self, x, k):
        """(P^k(x), d/dx P^k at x) via repeated evaluation and the chain rule."""
        if k < 1:
            raise ValueError("k must be >= 1")
        x = self._check_point(x)
        jac_total = np.eye(self.n, dtype=complex if self.field == "complex" else float)
        pt = x
        for step in range(k):
            jac_total = self.jacobian(pt) @ jac_total
            try:
                pt = self.evaluate(pt)
            except NonFiniteError:
                raise NonFiniteError(
                    f"iterate overflowed at step {step + 1} of {k}", step=step + 1
                ) from None
        return pt, jac_total

    # -- univariate helpers -------------------------------------------------

    def dense_coeffs_1d(self, exact=False):
        """Ascending coefficient list (N=1 only).

        Float ndarray by default; with exact=True, a list of Fractions
        (requires an exact map).
        """
        if self.n != 1:
            raise DimensionMismatchError("dense coefficients require N=1")
        if exact:
            if not self.is_exact:
                raise ValueError("exact coefficients requested on a float map")
            out = [Fraction(0)] * (self.degree + 1)
            for alpha, vec in self.coeffs.items():
                out[alpha[0]] = Fraction(vec[0])
            return out
        out = np.zeros(self.degree + 1, dtype=complex)
        for alpha, vec in self.coeffs.items():
            out[alpha[0]] = complex(vec[0])
        return out

    def compose_symbolic(self, k, cap=DEFAULT_DEGREE_CAP):
        """The explicit k-th iterate as a new univariate PolyMap (N=1 only)."""
        if self.n != 1:
            raise DimensionMismatchError("compose_symbolic supports N=1 only")
        if k < 1:
            raise ValueError("k must be >= 1")
        target = self.degree ** k
        if target > cap:
            raise DegreeCapError(
                f"iterate degree {self.degree}**{k} = {target} exceeds cap {cap}")
        if self.is_exact:
            coeffs = [Fraction(v) for v in self.dense_coeffs_1d(exact=True)]
            result = [Fraction(0), Fraction(1)]
            for _ in range(k):
                acc = [coeffs[-1]]
                for c in reversed(coeffs[:-1]):
                    acc = _convolve_exact(acc, result)
                    acc[0] += c
                result = acc
            new = {(i,): (c,) for i, c in enumerate(result) if c != 0}
        else:
            dense = _kernels.compose_self(self.dense_coeffs_1d(), k)
            if not np.all(np.isfinite(dense.view(float))):
                raise NonFiniteError("iterate coefficients overflowed")
            if self.field == "real":
                dense = dense.real
            new = {(i,): (c,) for i, c in enumerate(dense.tolist()) if c != 0}
        return PolyMap(1, max(target, 1), self.field, new)

    # -- transforms ---------------------------------------------------------

    def rescaled(self, s):
        """Conjugate by the linear scaling x -> s*x (coefficients a -> s^(1-|alpha|) a)."""
        if s == 0:
            raise ValueError("scaling factor must be nonzero")
        new = {alpha: tuple(v * s ** (1 - sum(alpha)) for v in vec)
               for alpha, vec in self.coeffs.items()}
        return PolyMap(self.n, self.degree, self.field, new)

    # -- serialization ------------------------------------------------------

    def to_dict(self):
        entries = []
        for alpha, vec in self.coeffs.items():
            value = [[float(complex(v).real), float(complex(v).imag)] for v in vec]
            entries.append({"alpha": list(alpha), "value": value})
        return {"n": self.n, "degree": self.degree, "field": self.field,
                "coeffs": entries}

    def canonical_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def content_hash(self):
        """Hex sha256 of the canonical JSON form."""
        if self._hash_cache is None:
            digest = hashlib.sha256(self.canonical_json().encode()).hexdigest()
            object.__setattr__(self, "_hash_cache", digest)
        return self._hash_cache


def _convolve_exact(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def map_from_dict(data):
    """Parse the standard map JSON object; rejects duplicate multi-indices."""
    for key in ("n", "degree", "field", "coeffs"):
        if key not in data:
            raise ValueError(f"map JSON missing key {key!r}")
    n, degree, field = data["n"], data["degree"], data["field"]
    coeffs = {}
    for entry in data["coeffs"]:
        alpha = tuple(int(e) for e in entry["alpha"])
        if alpha in coeffs:
            raise ValueError(f"duplicate multi-index {alpha} in map JSON")
        value = entry["value"]
        if len(value) != n:
            raise ValueError(f"coefficient vector for {alpha} has length != {n}")
        vec = []
        for re, im in value:
            vec.append(complex(re, im) if im != 0 else float(re))
        coeffs[alpha] = tuple(vec)
    return PolyMap(n, degree, field, coeffs)


def load_map(path):
    with open(path, "r", encoding="utf-8") as fh:
        return map_from_dict(json.load(fh))


def save_map(pmap, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(pmap.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def model_map(n, degree):
    """The separable power map (z_1, ..., z_N) -> (z_1^D, ..., z_N^D) over C."""
    coeffs = {}
    for i in range(n):
        alpha = [0] * n
        alpha[i] = degree
        vec = [0.0] * n
        vec[i] = 1.0
        coeffs[tuple(alpha)] = tuple(vec)
    return PolyMap(n, degree, "complex", coeffs)
