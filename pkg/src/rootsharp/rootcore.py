"""Root data for A_n and BC1: positive roots, rho(k), chamber checks, pi(X), d(X)."""
from dataclasses import dataclass
import enum
import math

import numpy as np

from .errors import DomainError

LOG2 = math.log(2.0)


class RootKind(enum.Enum):
    TYPE_A = "A"
    TYPE_BC1 = "BC1"


@dataclass(frozen=True)
class RootSystemSpec:
    """Root system with its multiplicities.

    For type A, ``k1`` is the common multiplicity k and ``k2`` is 0.  For BC1,
    ``k1`` belongs to the root alpha and ``k2`` to 2*alpha.
    """
    kind: RootKind
    n: int
    k1: float
    k2: float = 0.0

    def __post_init__(self):
        if self.kind is RootKind.TYPE_A:
            if int(self.n) != self.n or self.n < 1:
                raise DomainError(f"type A rank must be a positive integer, got {self.n}")
            if not self.k1 > 0:
                raise DomainError(f"multiplicity k must be > 0, got {self.k1}")
            if self.k2 != 0:
                raise DomainError("type A carries no divisible roots (k2 must be 0)")
        else:
            if self.n != 1:
                raise DomainError("BC1 has rank 1")
            if not self.k1 > 0 or not self.k2 >= 0:
                raise DomainError(f"BC1 needs k1 > 0 and k2 >= 0, got ({self.k1}, {self.k2})")

    @classmethod
    def type_a(cls, n, k):
        return cls(RootKind.TYPE_A, int(n), float(k), 0.0)

    @classmethod
    def bc1(cls, k1, k2):
        return cls(RootKind.TYPE_BC1, 1, float(k1), float(k2))

    @property
    def is_type_a(self):
        return self.kind is RootKind.TYPE_A

    @property
    def k(self):
        """Multiplicity entering the envelope exponent: k for A_n, k1+k2 for BC1."""
        return self.k1 + self.k2

    @property
    def dim(self):
        """Length of a chamber point: n+1 for A_n, 1 for BC1."""
        return self.n + 1 if self.is_type_a else 1

    @property
    def label(self):
        return "an" if self.is_type_a else "bc1"


@dataclass(frozen=True)
class RootFunctional:
    coeffs: tuple
    label: tuple
    multiplicity: float
    double_multiplicity: float = 0.0

    def __call__(self, v):
        return float(np.dot(self.coeffs, np.asarray(v, dtype=float)))


def positive_roots(spec):
    if not spec.is_type_a:
        return [RootFunctional((1.0,), ("alpha", "2alpha"), spec.k1, spec.k2)]
    m = spec.n + 1
    out = []
    for i in range(m):
        for j in range(i + 1, m):
            c = np.zeros(m)
            c[i], c[j] = 1.0, -1.0
            out.append(RootFunctional(tuple(c), (i + 1, j + 1), spec.k1, 0.0))
    return out


def rho(spec):
    """rho(k) = sum of k(alpha) alpha over positive roots (array for A_n, float for BC1)."""
    if not spec.is_type_a:
        return spec.k1 + 2.0 * spec.k2
    m = spec.n + 1
    return spec.k1 * (m - 1 - 2.0 * np.arange(m))


def root_values(v):
    """alpha(v) for every e_i - e_j, i < j, in the order of positive_roots."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise DomainError("expected a 1-D coordinate vector")
    if v.size == 1:
        return v.copy()
    iu, ju = np.triu_indices(v.size, 1)
    return v[iu] - v[ju]


def log_sinh(z):
    """log(sinh z) for z >= 0, stable at both ends; -inf at 0."""
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore"):
        return z - LOG2 + np.log(-np.expm1(-2.0 * z))


def is_dominant(v, strict=False, tol=0.0):
    v = np.asarray(v, dtype=float)
    if v.size == 1:
        return bool(v[0] > tol) if strict else bool(v[0] >= -tol)
    g = -np.diff(v)
    return bool(np.all(g > tol)) if strict else bool(np.all(g >= -tol))


def require_dominant(v, name="X", strict=False):
    if not is_dominant(v, strict=strict):
        kind = "strictly dominant" if strict else "dominant"
        raise DomainError(f"{name} must be {kind}, got {np.asarray(v).tolist()}")


def log_products(X):
    """``(log pi(X), log d(X))`` with ``pi = prod alpha(X)`` and ``d = prod sinh alpha(X)``.

    A length-1 input is a BC1 point t.  A point on a wall gives ``-inf`` for both.
    """
    vals = root_values(X)
    if np.any(vals < 0):
        raise DomainError("log_products needs a dominant point")
    with np.errstate(divide="ignore"):
        lp = float(np.sum(np.log(vals)))
    ld = float(np.sum(log_sinh(vals)))
    if np.any(vals == 0):
        return -math.inf, -math.inf
    return lp, ld


def pair(spec, lam, X):
    """Validate and convert (lam, X) to float arrays of the right shape."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    X = np.atleast_1d(np.asarray(X, dtype=float))
    if lam.shape != (spec.dim,) or X.shape != (spec.dim,):
        raise DomainError(f"expected points of length {spec.dim}")
    require_dominant(lam, "lambda")
    require_dominant(X, "X")
    return lam, X
