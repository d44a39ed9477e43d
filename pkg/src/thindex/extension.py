"""Linear extension of sums of products of generators.

For an ``h x r`` array ``beta`` of generators ``b_jl`` the element
``el(beta) = sum_j b_j1 b_j2 ... b_jr`` is a sum of products.  Its linear
extension ``ext(beta)`` is an ``s x s`` block operator, ``s = h(r + 1) + 1``,
whose entries are only 0, +-I and the generators themselves::

    ext = [[Z, X],
           [Y, 0]]

with ``Z`` the identity of size ``h(r+1)`` plus the diagonal blocks
``B_l = diag(b_1l, ..., b_hl)`` on the l-th block superdiagonal, ``X`` the
column ``(0, ..., 0, -I, ..., -I)`` (last h rows) and ``Y`` the row
``(I, ..., I, 0, ..., 0)`` (first h columns).  It factors as::

    ext = [[I, 0], [M, I]] @ diag(I, (-1)^r el) @ [[Z, X], [0, I]]

where the M-row has blocks ``M_l = (-1)^l (b_11...b_1l, ..., b_h1...b_hl)``.
The outer factors are unipotent, so ``el`` and ``ext`` are invertible (and
Fredholm) together and have the same index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import (Generator, MatrixGenerator, OperatorExpr, Resolution, as_expr,
                      full_circle_stations, identity, stations)
from .arcs import conjugate_exponent, lambda_grid, mu
from .index import IndexReport, _check_curve, _full_items, _report, _trace, index_TH
from .multiplier import PCMultiplier, normalize_angle

__all__ = [
    "GeneratorMatrix",
    "BlockOperator",
    "ExtensionMatrix",
    "el",
    "ext",
    "ext_factors",
    "verify_extension_factorization",
    "extension_equivalence_check",
    "EquivalenceReport",
    "ext_matrix_generator",
    "el_matrix_symbol",
    "reduced_toeplitz_index",
    "block_toeplitz_curve",
    "index_el_ext",
]


class GeneratorMatrix:
    """Rectangular ``h x r`` array of generators (or matrix generators)."""

    def __init__(self, entries):
        rows = [list(r) for r in entries]
        if not rows or not rows[0] or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("generator matrix must be rectangular and nonempty")
        kinds = {type(x) for r in rows for x in r}
        if not (kinds <= {Generator} or kinds <= {MatrixGenerator}):
            raise TypeError("entries must all be Generator or all be MatrixGenerator")
        self.entries = rows
        self.h, self.r = len(rows), len(rows[0])
        self.matrix = kinds <= {MatrixGenerator}

    @property
    def size(self) -> int:
        return self.h * (self.r + 1) + 1


def _beta(beta) -> GeneratorMatrix:
    return beta if isinstance(beta, GeneratorMatrix) else GeneratorMatrix(beta)


def el(beta) -> OperatorExpr:
    """Sum over rows of the ordered product of the row's generators."""
    beta = _beta(beta)
    if beta.matrix:
        raise TypeError("el of matrix generators is not an element of the scalar algebra")
    return OperatorExpr([(1.0, tuple(row)) for row in beta.entries])


class BlockOperator:
    """Square block matrix of operator expressions (``None`` is the zero block)."""

    def __init__(self, blocks):
        self.blocks = [list(r) for r in blocks]
        self.k = len(self.blocks)
        if any(len(r) != self.k for r in self.blocks):
            raise ValueError("block operator must be square")
        # multiples of the identity are filled in directly
        self._scalars, self._exprs = [], []
        for i, row in enumerate(self.blocks):
            for j, blk in enumerate(row):
                if blk is None:
                    continue
                c = blk.scalar_value()
                if c is None:
                    self._exprs.append((i, j, blk))
                elif c != 0:
                    self._scalars.append((i, j, c))

    def multipliers(self) -> list:
        seen, out = set(), []
        for row in self.blocks:
            for blk in row:
                if blk is None:
                    continue
                for g in blk.generators():
                    if id(g) not in seen:
                        seen.add(id(g))
                        out.extend(g.multipliers())
        return out

    def interior(self, p, theta, lam, side=None, cache=None) -> np.ndarray:
        theta, lam = np.broadcast_arrays(np.atleast_1d(np.asarray(theta, float)),
                                         np.atleast_1d(np.asarray(lam, float)))
        cache = {} if cache is None else cache
        out = np.zeros(theta.shape + (2 * self.k, 2 * self.k), dtype=complex)
        for i, j, c in self._scalars:
            out[..., 2 * i, 2 * j] = c
            out[..., 2 * i + 1, 2 * j + 1] = c
        for i, j, blk in self._exprs:
            out[..., 2 * i:2 * i + 2, 2 * j:2 * j + 2] = blk.interior(p, theta, lam, side, cache)
        return out

    def endpoint(self, p, sign, lam, cache=None) -> np.ndarray:
        lam = np.atleast_1d(np.asarray(lam, float))
        cache = {} if cache is None else cache
        out = np.zeros(lam.shape + (self.k, self.k), dtype=complex)
        for i, j, c in self._scalars:
            out[..., i, j] = c
        for i, j, blk in self._exprs:
            out[..., i, j] = blk.endpoint(p, sign, lam, cache)[..., 0, 0]
        return out


class ExtensionMatrix(BlockOperator):
    """The linear extension of a generator matrix, as a block operator."""

    def __init__(self, beta: GeneratorMatrix, blocks):
        super().__init__(blocks)
        self.beta = beta
        self.h, self.r = beta.h, beta.r


def _layout(h: int, r: int, entry, one, minus_one):
    """Block layout of the extension with the given constructors for entries."""
    s = h * (r + 1) + 1
    blocks = [[None] * s for _ in range(s)]
    for i in range(h * (r + 1)):
        blocks[i][i] = one
    for l in range(1, r + 1):
        for j in range(h):
            blocks[(l - 1) * h + j][l * h + j] = entry(j, l - 1)
    for j in range(h):
        blocks[r * h + j][s - 1] = minus_one
        blocks[s - 1][j] = one
    return blocks


def ext(beta) -> ExtensionMatrix:
    """Linear extension ``[[Z, X], [Y, 0]]`` of ``el(beta)``."""
    beta = _beta(beta)
    if beta.matrix:
        raise TypeError("use ext_matrix_generator for matrix generators")
    one, minus = identity(), -identity()
    blocks = _layout(beta.h, beta.r, lambda j, l: as_expr(beta.entries[j][l]), one, minus)
    return ExtensionMatrix(beta, blocks)


def ext_factors(beta):
    """The three block factors ``(lower, middle, upper)`` with ``lower @ middle @ upper == ext``."""
    beta = _beta(beta)
    h, r = beta.h, beta.r
    s = beta.size
    n = h * (r + 1)
    one = identity()
    lower = [[None] * s for _ in range(s)]
    middle = [[None] * s for _ in range(s)]
    upper = [[None] * s for _ in range(s)]
    for i in range(s):
        lower[i][i] = one
        upper[i][i] = one
        middle[i][i] = one
    # M-row: M_l[j] = (-1)^l b_j1 ... b_jl
    for l in range(r + 1):
        for j in range(h):
            prod = OperatorExpr([((-1.0) ** l, tuple(beta.entries[j][:l]))])
            lower[s - 1][l * h + j] = prod
    middle[s - 1][s - 1] = (-1.0) ** r * el(beta)
    for l in range(1, r + 1):
        for j in range(h):
            upper[(l - 1) * h + j][l * h + j] = as_expr(beta.entries[j][l - 1])
    for j in range(h):
        upper[r * h + j][n] = -one
    return BlockOperator(lower), BlockOperator(middle), BlockOperator(upper)


def _check_points(src, p, t_points: int, lambda_points: int):
    """(theta, lam) arrays for interior checks, including lambda sweeps at stations."""
    lam = lambda_grid(lambda_points)
    inner = np.linspace(0.0, math.pi, t_points + 2)[1:-1]
    th = np.unique(np.concatenate([inner, stations(src)]))
    tt, ll = np.meshgrid(th, lam, indexing="ij")
    return tt.ravel(), ll.ravel(), lam


def verify_extension_factorization(beta, p: float, t_points: int = 32,
                                   lambda_points: int = 17) -> float:
    """Max entrywise deviation of ``lower @ middle @ upper`` from ``ext`` at symbol level."""
    beta = _beta(beta)
    e = ext(beta)
    lo, mid, up = ext_factors(beta)
    th, lam_i, lam = _check_points(e, p, t_points, lambda_points)
    cache: dict = {}
    resid = np.abs(lo.interior(p, th, lam_i, None, cache) @ mid.interior(p, th, lam_i, None, cache)
                   @ up.interior(p, th, lam_i, None, cache) - e.interior(p, th, lam_i, None, cache))
    worst = float(np.max(resid))
    for sign in (+1, -1):
        cache = {}
        prod = (lo.endpoint(p, sign, lam, cache) @ mid.endpoint(p, sign, lam, cache)
                @ up.endpoint(p, sign, lam, cache))
        worst = max(worst, float(np.max(np.abs(prod - e.endpoint(p, sign, lam, cache)))))
    return worst


@dataclass
class EquivalenceReport:
    """Pointwise comparison of the symbols of ``el`` and ``ext``."""

    points: int
    disagreements: list = field(default_factory=list)
    max_det_ratio_error: float = 0.0
    el_singular: int = 0
    ext_singular: int = 0

    @property
    def agree(self) -> bool:
        return not self.disagreements


def extension_equivalence_check(beta, p: float, t_points: int = 32, lambda_points: int = 17,
                                eps: float = 1e-8) -> EquivalenceReport:
    """Compare symbol invertibility of ``el(beta)`` and ``ext(beta)`` on a grid.

    A point counts as singular when ``|det|`` is below ``eps`` times the
    largest ``|det|`` of the same operator on the grid.
    """
    beta = _beta(beta)
    e_el, e_ext = el(beta), ext(beta)
    th, lam_i, lam = _check_points(e_ext, p, t_points, lambda_points)
    pts = [(float(a), float(b)) for a, b in zip(th, lam_i)]
    d_el = [np.linalg.det(e_el.interior(p, th, lam_i))]
    d_ext = [np.linalg.det(e_ext.interior(p, th, lam_i))]
    for sign, where in ((+1, 0.0), (-1, math.pi)):
        d_el.append(np.linalg.det(e_el.endpoint(p, sign, lam)))
        d_ext.append(np.linalg.det(e_ext.endpoint(p, sign, lam)))
        pts += [(where, float(x)) for x in lam]
    d_el, d_ext = np.concatenate(d_el), np.concatenate(d_ext)
    s_el = np.abs(d_el) < eps * max(float(np.max(np.abs(d_el))), 1e-300)
    s_ext = np.abs(d_ext) < eps * max(float(np.max(np.abs(d_ext))), 1e-300)
    bad = np.nonzero(s_el != s_ext)[0]
    ok = ~s_el & ~s_ext
    ratio_err = float(np.max(np.abs(np.abs(d_ext[ok] / d_el[ok]) - 1.0))) if ok.any() else 0.0
    return EquivalenceReport(len(pts), [pts[i] for i in bad], ratio_err,
                             int(s_el.sum()), int(s_ext.sum()))


# --- matrix generators ----------------------------------------------------------

def ext_matrix_generator(beta) -> MatrixGenerator:
    """Linear extension of a matrix of k x k matrix generators.

    Every entry of the extension is of the form ``L(c) diag P + L(d) diag Q``,
    so the whole extension is again a matrix generator of size ``k s``.
    """
    beta = _beta(beta)
    if not beta.matrix:
        raise TypeError("entries must be MatrixGenerator")
    k = beta.entries[0][0].k
    if any(g.k != k for row in beta.entries for g in row):
        raise ValueError("all matrix generators must have the same size")
    s = beta.size
    zero, one = PCMultiplier.zero(), PCMultiplier.constant(1.0)
    minus = PCMultiplier.constant(-1.0)

    def scalar_block(c):
        return [[c if i == j else zero for j in range(k)] for i in range(k)]

    ident, neg = ("s", one), ("s", minus)
    layout = _layout(beta.h, beta.r, lambda j, l: ("g", beta.entries[j][l]), ident, neg)
    big_a = [[zero] * (k * s) for _ in range(k * s)]
    big_b = [[zero] * (k * s) for _ in range(k * s)]
    for bi, row in enumerate(layout):
        for bj, blk in enumerate(row):
            if blk is None:
                continue
            tag, val = blk
            ablk = scalar_block(val) if tag == "s" else val.a
            bblk = scalar_block(val) if tag == "s" else val.b
            for i in range(k):
                for j in range(k):
                    big_a[bi * k + i][bj * k + j] = ablk[i][j]
                    big_b[bi * k + i][bj * k + j] = bblk[i][j]
    return MatrixGenerator(big_a, big_b)


def el_matrix_symbol(beta, p: float, theta, lam) -> np.ndarray:
    """Full-circle symbol of ``el(beta)`` for matrix generators (product of block symbols)."""
    beta = _beta(beta)
    out = None
    for row in beta.entries:
        prod = None
        for g in row:
            s = g.symbol(p, theta, lam)
            prod = s if prod is None else prod @ s
        out = prod if out is None else out + prod
    return out


def block_toeplitz_curve(e, p: float, resolution: Resolution | None = None):
    """Full-circle curve of ``det(e(t-) (1 - mu_q) + e(t+) mu_q)`` for a k x k multiplier matrix."""
    res = resolution or Resolution()
    q = conjugate_exponent(p)
    k = len(e)
    g = MatrixGenerator(e, [[PCMultiplier.constant(1.0 if i == j else 0.0) for j in range(k)]
                            for i in range(k)])

    def lam_fn(th, lam):
        plus, minus = g._values(e, th, None)
        m = mu(q, lam)[..., None, None]
        return np.linalg.det(minus * (1.0 - m) + plus * m)

    def arc_fn(th, side):
        th = normalize_angle(th)
        plus, _ = g._values(e, th, side)
        return np.linalg.det(plus)

    curve = _trace(_full_items(full_circle_stations(g)), lam_fn, arc_fn, res, full_circle=True)
    _check_curve(curve, normalized=False)
    return curve


def _piecewise_constant_inverse(d):
    """Entrywise inverse matrix of a piecewise constant k x k multiplier matrix."""
    k = len(d)
    breaks = np.unique(np.concatenate([[0.0]] + [m.breaks for row in d for m in row]))
    inv_vals = []
    for j, b in enumerate(breaks):
        end = breaks[j + 1] if j + 1 < len(breaks) else 2 * math.pi
        mid = 0.5 * (b + end)
        mat = np.array([[d[i][l](mid) for l in range(k)] for i in range(k)])
        if abs(np.linalg.det(mat)) < 1e-12:
            return None
        inv_vals.append(np.linalg.inv(mat))
    return [[PCMultiplier.piecewise_constant(breaks, [v[i, l] for v in inv_vals])
             for l in range(k)] for i in range(k)]


def reduced_toeplitz_index(g: MatrixGenerator, p: float,
                           resolution: Resolution | None = None) -> IndexReport | None:
    """Index through ``L(c) P + L(d) Q = L(d) (L(d^-1 c) P + Q)``.

    Only applies when ``d`` is piecewise constant and invertible; returns
    ``None`` otherwise.  ``L(d)`` is then invertible and the index equals that
    of the block Toeplitz operator with symbol ``d^-1 c``.
    """
    d, c = g.b, g.a
    if not all(m.is_piecewise_constant() for row in d for m in row):
        return None
    dinv = _piecewise_constant_inverse(d)
    if dinv is None:
        return None
    k = g.k
    e = [[sum((dinv[i][l] * c[l][j] for l in range(k)), PCMultiplier.zero())
          for j in range(k)] for i in range(k)]
    return _report(lambda: block_toeplitz_curve(e, p, resolution))


def index_el_ext(beta, p: float, resolution: Resolution | None = None):
    """Indices of ``el(beta)`` and ``ext(beta)`` from their own traced curves."""
    beta = _beta(beta)
    return index_TH(el(beta), p, resolution), index_TH(ext(beta), p, resolution)
