"""Mellin arc functions on the two-point compactified real line.

``mu(p, lam)`` runs along a circular arc from 0 (at ``lam = -inf``) to 1 (at
``lam = +inf``); ``nu(p, lam)`` is the matching off-diagonal weight, with
``nu**2 == mu * (1 - mu)``.  Points of the compactified line are plain floats;
``-math.inf`` and ``math.inf`` stand for the two added points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Exponent",
    "conjugate_exponent",
    "mu",
    "nu",
    "lambda_grid",
    "lambda_from_unit",
]

# beyond this |Re z| the exponentials are below 1e-39 of the leading term
_GUARD = 45.0


def _check_p(p: float) -> float:
    p = float(p)
    if not math.isfinite(p) or p <= 1.0:
        raise ValueError(f"exponent p must lie in (1, inf), got {p!r}")
    return p


def conjugate_exponent(p: float) -> float:
    """Return q with 1/p + 1/q = 1."""
    p = _check_p(p)
    return p / (p - 1.0)


@dataclass(frozen=True)
class Exponent:
    """A Lebesgue exponent p in (1, inf) together with its conjugate."""

    p: float

    def __post_init__(self):
        object.__setattr__(self, "p", _check_p(self.p))

    @property
    def q(self) -> float:
        return conjugate_exponent(self.p)


def _prepare(p, lam):
    p = _check_p(p)
    lam_arr = np.asarray(lam, dtype=float)
    z = np.pi * (np.where(np.isfinite(lam_arr), lam_arr, 0.0) + 1j / p)
    return lam_arr, z


def mu(p: float, lam):
    """Arc function ``(1 + coth(pi (lam + i/p))) / 2`` with mu(-inf)=0, mu(+inf)=1.

    Accepts a float or an array of floats (``+-inf`` allowed); returns a
    complex scalar or a complex array of the same shape.
    """
    lam_arr, z = _prepare(p, lam)
    x = z.real
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        # (1 + coth z)/2 == 1/(1 - exp(-2z)); the second branch is the same
        # expression rewritten so that no exponential can overflow
        pos = 1.0 / (1.0 - np.exp(-2.0 * np.where(x >= 0, z, 0.0)))
        w = np.exp(2.0 * np.where(x < 0, z, 0.0))
        neg = -w / (1.0 - w)
    out = np.where(x >= 0, pos, neg)
    out = np.where(x > _GUARD, 1.0 + 0j, out)
    out = np.where(x < -_GUARD, 0.0 + 0j, out)
    out = np.where(lam_arr == np.inf, 1.0 + 0j, out)
    out = np.where(lam_arr == -np.inf, 0.0 + 0j, out)
    if out.ndim == 0:
        return complex(out)
    return out


def nu(p: float, lam):
    """Arc weight ``1 / (2i sinh(pi (lam + i/p)))`` with nu(+-inf) = 0."""
    lam_arr, z = _prepare(p, lam)
    x = z.real
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        e_pos = np.exp(-np.where(x >= 0, z, 0.0))
        pos = -1j * e_pos / (1.0 - e_pos * e_pos)
        e_neg = np.exp(np.where(x < 0, z, 0.0))
        neg = 1j * e_neg / (1.0 - e_neg * e_neg)
    out = np.where(x >= 0, pos, neg)
    out = np.where(np.abs(x) > _GUARD, 0.0 + 0j, out)
    out = np.where(np.isinf(lam_arr), 0.0 + 0j, out)
    if out.ndim == 0:
        return complex(out)
    return out


def lambda_from_unit(u):
    """Map u in [0, 1] onto the compactified line; u=0 and u=1 give -inf, +inf."""
    u = np.asarray(u, dtype=float)
    with np.errstate(over="ignore"):
        lam = np.tan(np.pi * (u - 0.5))
    lam = np.where(u <= 0.0, -np.inf, lam)
    lam = np.where(u >= 1.0, np.inf, lam)
    if lam.ndim == 0:
        return float(lam)
    return lam


def lambda_grid(n: int) -> np.ndarray:
    """Return ``[-inf, lam_1, ..., lam_n, +inf]`` with lam_j = tan(pi (j/(n+1) - 1/2))."""
    if n < 2:
        raise ValueError("lambda_grid needs n >= 2")
    u = np.arange(n + 2) / (n + 1)
    lam = lambda_from_unit(u)
    if n % 2 == 1:
        lam[(n + 1) // 2] = 0.0
    return lam
