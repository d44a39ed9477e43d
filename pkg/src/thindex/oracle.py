"""Independent checks built from finite matrices and polynomial roots.

Nothing here uses the symbol calculus.  Toeplitz and Hankel sections are
assembled from exact Fourier coefficients (``T(a)`` has entries ``a_{j-k}``,
``H(a)`` has entries ``a_{j+k+1}``), Laurent polynomial indices come from
counting polynomial roots in the unit disk, and kernel dimensions from
complete-pivoting elimination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .algebra import COMPACT, Generator, OperatorExpr, as_expr
from .multiplier import PCMultiplier

__all__ = [
    "OracleError",
    "BandedSpec",
    "TruncationMatrix",
    "toeplitz_entry",
    "hankel_entry",
    "toeplitz_matrix",
    "hankel_matrix",
    "truncate",
    "laurent_index_oracle",
    "laurent_kernel_oracle",
    "rank_deficiency",
    "product_identity_check",
]

ROOT_SEPARATION = 1e-6
ROOT_RESIDUAL = 1e-10


class OracleError(ValueError):
    """An oracle precondition failed; the oracle refuses to answer."""


@dataclass(frozen=True)
class BandedSpec:
    """Laurent polynomial ``sum_k coeffs[k] t^k`` with finitely many terms."""

    coeffs: dict

    def __post_init__(self):
        clean = {int(k): complex(c) for k, c in self.coeffs.items() if c != 0}
        if not clean:
            raise ValueError("banded symbol must have a nonzero coefficient")
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def from_array(cls, coeffs, kmin: int) -> "BandedSpec":
        """Coefficients for ``k = kmin, kmin + 1, ...``."""
        return cls({kmin + i: c for i, c in enumerate(coeffs)})

    @classmethod
    def from_multiplier(cls, a: PCMultiplier) -> "BandedSpec":
        if not a.is_trig():
            raise OracleError("multiplier is not a trigonometric polynomial")
        return cls(a.trig)

    def to_multiplier(self) -> PCMultiplier:
        return PCMultiplier.trig_poly(self.coeffs)

    @property
    def kmin(self) -> int:
        return min(self.coeffs)

    @property
    def kmax(self) -> int:
        return max(self.coeffs)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return sum(c * z**k for k, c in self.coeffs.items())


def toeplitz_entry(a: PCMultiplier, j: int, k: int) -> complex:
    """Entry ``(j, k)`` of ``T(a)``: the Fourier coefficient ``a_{j-k}``."""
    if j < 0 or k < 0:
        raise ValueError("matrix indices must be nonnegative")
    return a.fourier_coeff(j - k)


def hankel_entry(a: PCMultiplier, j: int, k: int) -> complex:
    """Entry ``(j, k)`` of ``H(a)``: the Fourier coefficient ``a_{j+k+1}``."""
    if j < 0 or k < 0:
        raise ValueError("matrix indices must be nonnegative")
    return a.fourier_coeff(j + k + 1)


def _coeff_table(a: PCMultiplier, kmin: int, kmax: int) -> dict:
    if a.is_trig():
        tr = a.trig
        return {k: complex(tr.get(k, 0)) for k in range(kmin, kmax + 1)}
    return {k: a.fourier_coeff(k) for k in range(kmin, kmax + 1)}


def toeplitz_matrix(a: PCMultiplier, n: int, table: dict | None = None) -> np.ndarray:
    """The n x n section of ``T(a)``."""
    c = table or _coeff_table(a, -(n - 1), n - 1)
    col = np.array([c[j] for j in range(n)])
    row = np.array([c[-k] for k in range(n)])
    return linalg.toeplitz(col, row)


def hankel_matrix(a: PCMultiplier, n: int, table: dict | None = None) -> np.ndarray:
    """The n x n section of ``H(a)``."""
    c = table or _coeff_table(a, 1, 2 * n - 1)
    col = np.array([c[j + 1] for j in range(n)])
    row = np.array([c[n + k] for k in range(n)])
    return linalg.hankel(col, row)


@dataclass
class TruncationMatrix:
    """An N x N finite section with its provenance.

    ``exact`` is true when every generator is banded and the margin covers
    the bandwidths, so that the section equals the corresponding block of
    the infinite matrix.  Otherwise ``tail_bound`` estimates the effect of
    cutting the intermediate products at ``N + margin``.
    """

    matrix: np.ndarray
    expr: OperatorExpr
    n: int
    margin: int
    exact: bool
    tail_bound: float


def _bandwidth(g: Generator):
    if g.a.is_trig() and g.b.is_trig():
        return max(g.a.bandwidth(), g.b.bandwidth())
    return None


def truncate(e, n: int, margin: int = 0) -> TruncationMatrix:
    """N x N section of an expression, products formed at size ``N + margin``."""
    if n < 1:
        raise ValueError("N must be positive")
    e = as_expr(e)
    size = n + margin
    mats, widths, tv = {}, [], 0.0
    for g in e.generators():
        tab_a = _coeff_table(g.a, -(size - 1), 2 * size - 1)
        tab_b = _coeff_table(g.b, -(size - 1), 2 * size - 1)
        mats[id(g)] = toeplitz_matrix(g.a, size, tab_a) + hankel_matrix(g.b, size, tab_b)
        widths.append(_bandwidth(g))
        if widths[-1] is None:
            tv = max(tv, g.a.total_variation_bound() + g.b.total_variation_bound())
    out = np.zeros((size, size), dtype=complex)
    longest = 0
    for w, fs in e.terms:
        if any(f is COMPACT for f in fs):
            raise ValueError("compact markers have no matrix realization")
        prod = np.eye(size, dtype=complex)
        for f in fs:
            prod = prod @ mats[id(f)]
        out += w * prod
        longest = max(longest, len(fs))
    banded = all(wd is not None for wd in widths)
    need = (longest - 1) * max([wd for wd in widths if wd is not None] + [0])
    exact = banded and (longest <= 1 or margin >= need)
    tail = 0.0 if exact else (tv / (math.pi * max(margin, 1)) if tv else float("inf"))
    return TruncationMatrix(out[:n, :n], e, n, margin, exact, tail)


def _as_banded(a) -> BandedSpec:
    if isinstance(a, BandedSpec):
        return a
    if isinstance(a, PCMultiplier):
        return BandedSpec.from_multiplier(a)
    if isinstance(a, dict):
        return BandedSpec(a)
    raise TypeError("expected a BandedSpec, a coefficient dict or a trigonometric multiplier")


def laurent_index_oracle(a) -> int:
    """Index of ``T(a)`` for a Laurent polynomial, by counting roots.

    With ``m = max(0, -kmin)`` the polynomial ``z^m a(z)`` has ``wind(a) + m``
    roots in the open unit disk.  Raises :class:`OracleError` when a root is
    within 1e-6 of the circle or a computed root fails the backward-error test.
    """
    spec = _as_banded(a)
    m, roots = _checked_roots(spec)
    return -(int(np.sum(np.abs(roots) < 1.0)) - m)


def _checked_roots(spec: BandedSpec):
    m = max(0, -spec.kmin)
    deg = spec.kmax + m
    poly = np.zeros(deg + 1, dtype=complex)  # ascending
    for k, c in spec.coeffs.items():
        poly[k + m] = c
    if deg == 0:
        return m, np.zeros(0, dtype=complex)
    roots = np.roots(poly[::-1])
    for r in roots:
        val = np.polyval(poly[::-1], r)
        scale = np.sum(np.abs(poly) * np.abs(r) ** np.arange(deg + 1))
        if abs(val) > ROOT_RESIDUAL * scale:
            raise OracleError(f"root {r} fails the residual check")
        if abs(abs(r) - 1.0) <= ROOT_SEPARATION:
            raise OracleError(f"root {r} too close to the unit circle")
    return m, roots


def laurent_kernel_oracle(a, tol: float = 1e-8, max_size: int = 400) -> tuple:
    """``(dim ker T(a), dim coker T(a))`` from tall finite sections.

    Kernel vectors of a banded Toeplitz operator decay geometrically, so the
    ``(N + w) x N`` section (which acts on vectors supported in ``[0, N)``
    exactly as the operator does) has a numerical null space of the same
    dimension once N exceeds the decay length.  The cokernel is the kernel of
    the adjoint.  N is chosen from the root moduli.  Singular values below
    ``tol`` times the largest are counted; pivoted elimination is not rank
    revealing on these sections.
    """
    spec = _as_banded(a)
    _, roots = _checked_roots(spec)
    w = max(abs(spec.kmin), abs(spec.kmax))
    rho = max([abs(r) if abs(r) < 1 else 1.0 / abs(r) for r in roots if r != 0] + [0.5])
    n = 4 * w + 16 + int(math.ceil(30.0 / -math.log(rho)))
    if n > max_size:
        raise OracleError(f"decay too slow: section size {n} exceeds {max_size}")
    c = spec.coeffs
    col = np.array([c.get(j, 0) for j in range(n + w)])
    row = np.array([c.get(-k, 0) for k in range(n)])
    tall = linalg.toeplitz(col, row)
    col_adj = np.array([np.conj(c.get(-j, 0)) for j in range(n + w)])
    row_adj = np.array([np.conj(c.get(k, 0)) for k in range(n)])
    tall_adj = linalg.toeplitz(col_adj, row_adj)
    return _null_dim(tall, tol), _null_dim(tall_adj, tol)


def _null_dim(mat, tol):
    sv = np.linalg.svd(mat, compute_uv=False)
    return int(mat.shape[1] - np.sum(sv >= tol * sv[0]))


def rank_deficiency(mat, tol: float = 1e-10) -> int:
    """Column count minus numerical rank, under complete pivoting.

    A pivot counts towards the rank when it is at least ``tol`` times the
    largest pivot.  For square matrices this is the number of small pivots.
    """
    a = np.array(getattr(mat, "matrix", mat), dtype=complex)
    if a.ndim != 2:
        raise ValueError("rank_deficiency needs a matrix")
    cols = a.shape[1]
    n = min(a.shape)
    pivots = []
    for k in range(n):
        sub = np.abs(a[k:, k:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        piv = sub[i, j]
        pivots.append(piv)
        if piv == 0.0:
            pivots.extend([0.0] * (n - k - 1))
            break
        a[[k, k + i]] = a[[k + i, k]]
        a[:, [k, k + j]] = a[:, [k + j, k]]
        a[k + 1:, k:] -= np.outer(a[k + 1:, k] / a[k, k], a[k, k:])
    pivots = np.array(pivots)
    top = pivots.max() if n else 0.0
    if top == 0.0:
        return cols
    return cols - int(np.sum(pivots >= tol * top))


def product_identity_check(a: PCMultiplier, b: PCMultiplier, n: int, which: str = "product") -> float:
    """Max residual of a Toeplitz/Hankel product identity on an interior window.

    ``which="product"``: ``T(ab) - T(a) T(b) - H(a) H(b~)``;
    ``which="hankel"``: ``H(ab) - T(a) H(b) - H(a) T(b~)``.  Both vanish for
    the infinite matrices; finite sections agree on ``[0, N - 2w)^2`` where w
    is the total bandwidth.
    """
    if not (a.is_trig() and b.is_trig()):
        raise OracleError("identity check needs trigonometric polynomials")
    w = a.bandwidth() + b.bandwidth()
    if n <= 4 * w:
        raise ValueError(f"N = {n} too small for total bandwidth {w} (need N > {4 * w})")
    ab, bt = a * b, b.reflect_tilde()
    if which == "product":
        res = toeplitz_matrix(ab, n) - toeplitz_matrix(a, n) @ toeplitz_matrix(b, n) \
            - hankel_matrix(a, n) @ hankel_matrix(bt, n)
    elif which == "hankel":
        res = hankel_matrix(ab, n) - toeplitz_matrix(a, n) @ hankel_matrix(b, n) \
            - hankel_matrix(a, n) @ toeplitz_matrix(bt, n)
    else:
        raise ValueError("which must be 'product' or 'hankel'")
    win = n - 2 * w
    return float(np.max(np.abs(res[:win, :win]))) if win > 0 else 0.0
