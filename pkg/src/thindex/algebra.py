"""Operator expressions over Toeplitz-plus-Hankel generators and their symbols.

An :class:`OperatorExpr` is a weighted sum of ordered products whose factors
are generators ``T(a) + H(b)`` or compact markers.  Its Fredholm symbol lives
on the upper half-circle times the compactified real line: a 2x2 matrix at
interior points ``0 < theta < pi`` and a scalar at ``theta = 0`` and
``theta = pi``.  Symbols of products are products of symbols and compact
factors have zero symbol.

Symbol sources (expressions, extension matrices) share a small protocol used
by the verdict and index code::

    k                                     block size (1 for expressions)
    interior(p, theta, lam, side, cache)  -> (n, 2k, 2k), interleaved blocks
    endpoint(p, sign, lam, cache)         -> (n, k, k), sign=+1 at t=1, -1 at t=-1
    multipliers()                         -> list of PCMultiplier

``side`` is ``None`` for the two-sided symbol or ``+1``/``-1`` for the
one-sided limit used at the ends of arcs of continuity.  Interleaved layout
means entry ``[2i + s, 2j + r]`` holds entry ``(s, r)`` of the symbol of block
``(i, j)``, so that block products are plain matrix products.

:class:`MatrixGenerator` represents ``L(a) diag P + L(b) diag Q`` with k x k
multiplier matrices; its symbol lives on the full circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from numbers import Number

import numpy as np

from .arcs import conjugate_exponent, lambda_from_unit, lambda_grid, mu, nu
from .multiplier import PCMultiplier, TWO_PI, conj_angle, normalize_angle

__all__ = [
    "COMPACT",
    "Generator",
    "OperatorExpr",
    "MatrixGenerator",
    "Resolution",
    "FredholmVerdict",
    "T",
    "H",
    "TH",
    "identity",
    "compact",
    "as_expr",
    "flip",
    "smb_generator",
    "smb",
    "smb_matrix_generator",
    "stations",
    "is_fredholm",
    "essential_spectrum_cloud",
]

# jump points of different factors closer than this are one station
STATION_TOL = 1e-9


def _mult(x) -> PCMultiplier:
    if isinstance(x, PCMultiplier):
        return x
    if isinstance(x, Number):
        return PCMultiplier.constant(x)
    raise TypeError(f"expected a PCMultiplier or a number, got {type(x).__name__}")


class _Compact:
    """Marker for a compact operator factor (zero symbol)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "K"


COMPACT = _Compact()


class Generator:
    """The operator ``T(a) + H(b)``."""

    __slots__ = ("a", "b")

    def __init__(self, a=0.0, b=0.0):
        self.a = _mult(a)
        self.b = _mult(b)

    def __repr__(self):
        return f"Generator(a={self.a!r}, b={self.b!r})"

    def multipliers(self) -> list:
        return [self.a, self.b]

    def flipped(self) -> "Generator":
        """Conjugate by the flip ``x_n -> (-1)^n x_n``: ``T(a^) - H(b^)``."""
        return Generator(self.a.reflect_hat(), -self.b.reflect_hat())

    def __add__(self, other):
        return as_expr(self) + other

    __radd__ = __add__

    def __sub__(self, other):
        return as_expr(self) - other

    def __rsub__(self, other):
        return as_expr(other) - as_expr(self)

    def __mul__(self, other):
        return as_expr(self) * other

    def __rmul__(self, other):
        return as_expr(other) * as_expr(self)

    def __neg__(self):
        return -as_expr(self)


def _side_limits(m: PCMultiplier, theta, side):
    """(m(t+), m(t-), m(conj t +), m(conj t -)) as arrays."""
    if theta.size > 1 and np.all(theta == theta.flat[0]):
        # a lambda sweep: evaluate once and broadcast
        one = _side_limits(m, theta.flat[:1], side)
        return tuple(np.broadcast_to(v, theta.shape) for v in one)
    plus, minus = m.limits(np.concatenate([theta.ravel(), np.ravel(conj_angle(theta))]))
    plus, minus = plus.reshape((2,) + theta.shape), minus.reshape((2,) + theta.shape)
    if side is None:
        return plus[0], minus[0], plus[1], minus[1]
    v = plus[0] if side > 0 else minus[0]
    w = minus[1] if side > 0 else plus[1]
    return v, v, w, w


def _generator_interior(g: Generator, q: float, theta, lam, side, arcs=None):
    theta = np.asarray(theta, dtype=float)
    lam = np.asarray(lam, dtype=float)
    theta, lam = np.broadcast_arrays(theta, lam)
    m, n_ = arcs if arcs is not None else (mu(q, lam), nu(q, lam))
    ap, am, acp, acm = _side_limits(g.a, theta, side)
    bp, bm, bcp, bcm = _side_limits(g.b, theta, side)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = ap * m + am * (1.0 - m)
    out[..., 0, 1] = (bp - bm) * n_
    out[..., 1, 0] = (bcm - bcp) * n_
    out[..., 1, 1] = acm * (1.0 - m) + acp * m
    return out


def _generator_endpoint(g: Generator, q: float, sign: int, lam):
    lam = np.asarray(lam, dtype=float)
    theta = 0.0 if sign > 0 else math.pi
    m, n_ = mu(q, lam), nu(q, lam)
    ap, am = g.a.eval_plus(theta), g.a.eval_minus(theta)
    bp, bm = g.b.eval_plus(theta), g.b.eval_minus(theta)
    return ap * m + am * (1.0 - m) + 1j * sign * (bp - bm) * n_


class OperatorExpr:
    """Weighted sum of ordered products of generators and compact markers.

    The empty product is the identity operator.
    """

    __slots__ = ("terms",)
    k = 1

    def __init__(self, terms=()):
        clean = []
        for w, factors in terms:
            w = complex(w)
            factors = tuple(factors)
            for f in factors:
                if not (isinstance(f, Generator) or f is COMPACT):
                    raise TypeError(f"invalid factor {f!r}")
            if w != 0:
                clean.append((w, factors))
        self.terms = tuple(clean)

    def __repr__(self):
        parts = []
        for w, fs in self.terms:
            body = "*".join("K" if f is COMPACT else f"G{id(f) % 10000}" for f in fs) or "I"
            parts.append(f"({w:g})*{body}")
        return "OperatorExpr(" + " + ".join(parts) + ")" if parts else "OperatorExpr(0)"

    # --- algebra ------------------------------------------------------------

    def __add__(self, other):
        other = as_expr(other)
        return OperatorExpr(self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return OperatorExpr([(-w, fs) for w, fs in self.terms])

    def __sub__(self, other):
        return self + (-as_expr(other))

    def __rsub__(self, other):
        return as_expr(other) - self

    def __mul__(self, other):
        if isinstance(other, Number):
            return OperatorExpr([(w * other, fs) for w, fs in self.terms])
        other = as_expr(other)
        return OperatorExpr([(w1 * w2, f1 + f2)
                             for w1, f1 in self.terms for w2, f2 in other.terms])

    def __rmul__(self, other):
        if isinstance(other, Number):
            return self * other
        return as_expr(other) * self

    def generators(self) -> list:
        seen, out = set(), []
        for _, fs in self.terms:
            for f in fs:
                if isinstance(f, Generator) and id(f) not in seen:
                    seen.add(id(f))
                    out.append(f)
        return out

    def multipliers(self) -> list:
        return [m for g in self.generators() for m in g.multipliers()]

    def single_generator(self):
        """The generator if the expression is exactly ``1 * g``, else None."""
        if len(self.terms) == 1:
            w, fs = self.terms[0]
            if w == 1 and len(fs) == 1 and isinstance(fs[0], Generator):
                return fs[0]
        return None

    # --- symbols ------------------------------------------------------------

    def interior(self, p, theta, lam, side=None, cache=None) -> np.ndarray:
        q = conjugate_exponent(p)
        theta, lam = np.broadcast_arrays(np.atleast_1d(np.asarray(theta, float)),
                                         np.atleast_1d(np.asarray(lam, float)))
        cache = {} if cache is None else cache
        if "arcs" not in cache:
            cache["arcs"] = (mu(q, lam), nu(q, lam))
        out = np.zeros(theta.shape + (2, 2), dtype=complex)
        for w, fs in self.terms:
            if any(f is COMPACT for f in fs):
                continue
            if not fs:
                out[..., 0, 0] += w
                out[..., 1, 1] += w
                continue
            prod = None
            for f in fs:
                key = ("i", id(f), side)
                if key not in cache:
                    cache[key] = _generator_interior(f, q, theta, lam, side, cache["arcs"])
                prod = cache[key] if prod is None else prod @ cache[key]
            out = out + w * prod
        return out

    def scalar_value(self):
        """The number c if the expression is c times the identity, else None."""
        if all(not fs for _, fs in self.terms):
            return sum((w for w, _ in self.terms), 0j)
        return None

    def endpoint(self, p, sign, lam, cache=None) -> np.ndarray:
        q = conjugate_exponent(p)
        lam = np.atleast_1d(np.asarray(lam, float))
        cache = {} if cache is None else cache
        out = np.zeros(lam.shape, dtype=complex)
        for w, fs in self.terms:
            if any(f is COMPACT for f in fs):
                continue
            prod = np.ones(lam.shape, dtype=complex)
            for f in fs:
                key = ("e", id(f), sign)
                if key not in cache:
                    cache[key] = _generator_endpoint(f, q, sign, lam)
                prod = prod * cache[key]
            out = out + w * prod
        return out[..., None, None]


def as_expr(x) -> OperatorExpr:
    """Coerce a generator, number or expression into an :class:`OperatorExpr`."""
    if isinstance(x, OperatorExpr):
        return x
    if isinstance(x, Generator):
        return OperatorExpr([(1.0, (x,))])
    if isinstance(x, Number):
        return OperatorExpr([(x, ())])
    raise TypeError(f"cannot use {type(x).__name__} as an operator expression")


def T(a) -> OperatorExpr:
    """Toeplitz operator ``T(a)``."""
    return as_expr(Generator(a, 0.0))


def H(b) -> OperatorExpr:
    """Hankel operator ``H(b)``."""
    return as_expr(Generator(0.0, b))


def TH(a, b) -> OperatorExpr:
    """The generator ``T(a) + H(b)`` as an expression."""
    return as_expr(Generator(a, b))


def identity() -> OperatorExpr:
    return OperatorExpr([(1.0, ())])


def compact() -> OperatorExpr:
    """An unspecified compact operator."""
    return OperatorExpr([(1.0, (COMPACT,))])


def flip(e: OperatorExpr) -> OperatorExpr:
    """Image of ``e`` under conjugation by the flip (index preserving)."""
    e = as_expr(e)
    mapping = {id(g): g.flipped() for g in e.generators()}
    return OperatorExpr([(w, tuple(f if f is COMPACT else mapping[id(f)] for f in fs))
                         for w, fs in e.terms])


def _point_kind(theta: float) -> int:
    """0 for t=1, 1 for t=-1, 2 for interior upper points; raises below."""
    th = normalize_angle(theta)
    if th == 0.0:
        return 0
    if abs(th - math.pi) < 1e-12:
        return 1
    if th < math.pi:
        return 2
    raise ValueError(f"symbol is defined on the upper half-circle; got angle {theta!r}")


def smb(e, p: float, theta: float, lam: float):
    """Symbol value at one point: complex scalar at t = +-1, 2x2 array inside."""
    e = as_expr(e)
    kind = _point_kind(theta)
    if kind == 2:
        return e.interior(p, normalize_angle(theta), lam)[0]
    return complex(e.endpoint(p, 1 if kind == 0 else -1, lam)[0, 0, 0])


def smb_generator(g: Generator, p: float, theta: float, lam: float):
    """Symbol of a single generator ``T(a) + H(b)`` at one point."""
    return smb(as_expr(g), p, theta, lam)


# --- matrix generators on the full circle -----------------------------------

class MatrixGenerator:
    """``L(a) diag P + L(b) diag Q`` with k x k multiplier matrices a and b."""

    def __init__(self, a, b):
        a = [[_mult(x) for x in row] for row in a]
        b = [[_mult(x) for x in row] for row in b]
        k = len(a)
        if k == 0 or any(len(r) != k for r in a) or len(b) != k or any(len(r) != k for r in b):
            raise ValueError("MatrixGenerator needs square k x k arrays of equal size")
        self.a, self.b, self.k = a, b, k

    def multipliers(self) -> list:
        return [m for row in self.a + self.b for m in row]

    @staticmethod
    def _values(mat, theta, side):
        theta = np.atleast_1d(np.asarray(theta, float))
        k = len(mat)
        plus = np.empty(theta.shape + (k, k), dtype=complex)
        minus = np.empty_like(plus)
        for i in range(k):
            for j in range(k):
                m = mat[i][j]
                if side is None:
                    plus[..., i, j], minus[..., i, j] = m.eval_plus(theta), m.eval_minus(theta)
                else:
                    plus[..., i, j] = minus[..., i, j] = m._eval(theta, side)
        return plus, minus

    def symbol(self, p, theta, lam, side=None) -> np.ndarray:
        """Block symbol ``[[A11, A12], [A21, A22]]`` of shape (n, 2k, 2k)."""
        q = conjugate_exponent(p)
        theta, lam = np.broadcast_arrays(np.atleast_1d(np.asarray(theta, float)),
                                         np.atleast_1d(np.asarray(lam, float)))
        k = self.k
        m = mu(q, lam)[..., None, None]
        n_ = nu(q, lam)[..., None, None]
        ap, am = self._values(self.a, theta, side)
        bp, bm = self._values(self.b, theta, side)
        da, db = ap - am, bp - bm
        out = np.empty(theta.shape + (2 * k, 2 * k), dtype=complex)
        out[..., :k, :k] = am + da * m
        out[..., :k, k:] = db * n_
        out[..., k:, :k] = da * n_
        out[..., k:, k:] = bp - db * m
        return out

    def normalized_det(self, p, theta, lam, side=None) -> np.ndarray:
        """``det smb / (det b(t-) det b(t+))``."""
        theta, lam = np.broadcast_arrays(np.atleast_1d(np.asarray(theta, float)),
                                         np.atleast_1d(np.asarray(lam, float)))
        s = self.symbol(p, theta, lam, side)
        bp, bm = self._values(self.b, theta, side)
        return np.linalg.det(s) / (np.linalg.det(bm) * np.linalg.det(bp))


def smb_matrix_generator(g: MatrixGenerator, p: float, theta: float, lam: float) -> np.ndarray:
    """Full-circle block symbol of a matrix generator at one point."""
    return g.symbol(p, normalize_angle(theta), lam)[0]


# --- sampling support ---------------------------------------------------------

@dataclass(frozen=True)
class Resolution:
    """Sampling density for verdicts and curves."""

    t_points: int = 256
    lambda_points: int = 129
    max_depth: int = 40
    refine_depth: int = 12


def _fold(theta: np.ndarray) -> np.ndarray:
    th = normalize_angle(np.asarray(theta, float))
    return np.where(th > math.pi, TWO_PI - th, th)


def stations(src) -> np.ndarray:
    """Interior jump points of all multipliers, folded onto (0, pi), merged."""
    pts = [_fold(m.jump_set()) for m in src.multipliers()]
    pts = np.sort(np.concatenate([np.zeros(0)] + pts))
    out: list[float] = []
    for x in pts:
        if x < STATION_TOL or x > math.pi - STATION_TOL:
            continue
        if out and x - out[-1] <= STATION_TOL:
            continue
        out.append(float(x))
    return np.array(out)


def full_circle_stations(src) -> np.ndarray:
    """Jump points of all multipliers in (0, 2 pi), merged."""
    pts = [normalize_angle(np.atleast_1d(m.jump_set())) for m in src.multipliers()]
    pts = np.sort(np.concatenate([np.zeros(0)] + pts))
    out: list[float] = []
    for x in pts:
        if x < STATION_TOL or x > TWO_PI - STATION_TOL:
            continue
        if out and x - out[-1] <= STATION_TOL:
            continue
        out.append(float(x))
    return np.array(out)


@dataclass
class FredholmVerdict:
    """Outcome of the symbol invertibility test."""

    fredholm: str
    min_abs_det: float
    witness: tuple
    max_abs_det: float = 0.0
    samples: int = 0
    details: dict = field(default_factory=dict)

    @property
    def is_yes(self) -> bool:
        return self.fredholm == "yes"


EPS_SINGULAR = 1e-8
EPS_SAFE = 1e-5
# local minima above this fraction of the maximum are not refined
REFINE_BELOW = 1e-2


def half_circle_items(src) -> list:
    """Sweeps of the half-circle cylinder in traversal order."""
    knots = np.concatenate([[0.0], stations(src), [math.pi]])
    items = [("lam", 0.0)]
    for j in range(len(knots) - 1):
        items.append(("arc", (float(knots[j]), float(knots[j + 1]))))
        items.append(("lam", float(knots[j + 1])))
    return items


def batch_evaluate(items, params, lam_fn, arc_fn) -> list:
    """Evaluate many sweeps with a few vectorized calls.

    ``items`` are ``("lam", theta)`` or ``("arc", (a, b))``; ``params`` the
    sweep parameters in [0, 1] for each item.  ``lam_fn(theta, lam)`` and
    ``arc_fn(theta, side)`` take arrays; arc ends use one-sided limits.
    """
    out = [np.empty(len(s), dtype=complex) for s in params]
    lam_th, lam_l, lam_ref = [], [], []
    arc = {None: ([], []), 1: ([], []), -1: ([], [])}
    for i, ((kind, where), s) in enumerate(zip(items, params)):
        s = np.asarray(s, float)
        if not len(s):
            continue
        if kind == "lam":
            lam_th.append(np.full(len(s), float(where)))
            lam_l.append(np.atleast_1d(lambda_from_unit(s)))
            lam_ref.append((i, np.arange(len(s))))
            continue
        a, b = where
        th = a + s * (b - a)
        for side, mask in ((+1, s <= 0.0), (-1, s >= 1.0), (None, (s > 0.0) & (s < 1.0))):
            if mask.any():
                arc[side][0].append(th[mask])
                arc[side][1].append((i, np.nonzero(mask)[0]))

    def scatter(vals, refs):
        pos = 0
        for i, idx in refs:
            out[i][idx] = vals[pos:pos + len(idx)]
            pos += len(idx)

    if lam_th:
        scatter(lam_fn(np.concatenate(lam_th), np.concatenate(lam_l)), lam_ref)
    for side, (ths, refs) in arc.items():
        if ths:
            scatter(arc_fn(np.concatenate(ths), side), refs)
    return out


def det_lambda(src, p, theta, lam) -> np.ndarray:
    """Symbol determinants at points (theta, lam) of the half-circle cylinder."""
    theta, lam = np.broadcast_arrays(np.atleast_1d(np.asarray(theta, float)),
                                     np.atleast_1d(np.asarray(lam, float)))
    out = np.empty(theta.shape, dtype=complex)
    for sign, where in ((+1, 0.0), (-1, math.pi)):
        sel = theta == where
        if sel.any():
            out[sel] = np.linalg.det(src.endpoint(p, sign, lam[sel]))
    mid = (theta != 0.0) & (theta != math.pi)
    if mid.any():
        out[mid] = np.linalg.det(src.interior(p, theta[mid], lam[mid]))
    return out


def det_arc(src, p, theta, side=None) -> np.ndarray:
    """Symbol determinants on arcs of continuity (lambda-independent there)."""
    return np.linalg.det(src.interior(p, theta, 0.0, side))


def _half_circle_samples(src, p, res: Resolution):
    """(kind, where, params, |det|) for every sweep of the half-circle cylinder."""
    items = half_circle_items(src)
    u = np.arange(res.lambda_points + 2) / (res.lambda_points + 1)
    s = np.linspace(0.0, 1.0, res.t_points)
    params = [u if kind == "lam" else s for kind, _ in items]
    vals = batch_evaluate(items, params,
                          lambda th, lam: det_lambda(src, p, th, lam),
                          lambda th, side: det_arc(src, p, th, side))
    return [(kind, where, prm, np.abs(v)) for (kind, where), prm, v in zip(items, params, vals)]


def _sample_point(kind, where, s):
    if kind == "lam":
        return (float(where), float(lambda_from_unit(s)))
    a, b = where
    return (float(a + s * (b - a)), 0.0)


def _eval_abs(src, p, kind, where, s):
    s = np.asarray(s, float)
    if kind == "lam":
        return np.abs(det_lambda(src, p, where, lambda_from_unit(s)))
    a, b = where
    return np.abs(det_arc(src, p, a + s * (b - a)))


def _refine_min(src, p, kind, where, s, d, i, depth):
    """Shrink a bracket around sample i to find a smaller |det|."""
    lo = s[max(i - 1, 0)]
    hi = s[min(i + 1, len(s) - 1)]
    best_s, best_d = s[i], d[i]
    for _ in range(depth):
        if hi - lo < 1e-15:
            break
        grid = np.linspace(lo, hi, 9)
        if kind == "arc":
            grid = grid[(grid > 0.0) & (grid < 1.0)]
            if not len(grid):
                break
        vals = _eval_abs(src, p, kind, where, grid)
        j = int(np.argmin(vals))
        if vals[j] < best_d:
            best_s, best_d = grid[j], vals[j]
        step = (hi - lo) / 8
        lo, hi = max(best_s - step, 0.0), min(best_s + step, 1.0)
    return best_s, best_d


def is_fredholm(src, p: float, resolution: Resolution | None = None) -> FredholmVerdict:
    """Decide invertibility of the symbol on the half-circle cylinder.

    Returns ``yes`` when the minimum of |det smb| is at least ``1e-5`` times its
    maximum, ``no`` below ``1e-8`` times the maximum and ``unresolved`` in
    between (after local refinement around the smallest samples).
    """
    src = as_expr(src) if not hasattr(src, "interior") else src
    res = resolution or Resolution()
    segs = _half_circle_samples(src, p, res)
    count = sum(len(d) for *_, d in segs)
    scale = max(float(np.max(d)) for *_, d in segs)
    if scale == 0.0:
        return FredholmVerdict("no", 0.0, (0.0, -math.inf), 0.0, count)
    # candidates: smallest sample of every segment, best three refined
    cands = []
    for kind, where, s, d in segs:
        i = int(np.argmin(d))
        cands.append((float(d[i]), kind, where, s, d, i))
    cands.sort(key=lambda c: c[0])
    best = (cands[0][0], _sample_point(cands[0][1], cands[0][2], cands[0][3][cands[0][5]]))
    for val, kind, where, s, d, i in cands[:3]:
        if val >= REFINE_BELOW * scale:
            continue
        bs, bd = _refine_min(src, p, kind, where, s, d, i, res.refine_depth)
        count += 9 * res.refine_depth
        if bd < best[0]:
            best = (float(bd), _sample_point(kind, where, bs))
    min_det = best[0]
    if min_det < EPS_SINGULAR * scale:
        verdict = "no"
    elif min_det < EPS_SAFE * scale:
        verdict = "unresolved"
    else:
        verdict = "yes"
    return FredholmVerdict(verdict, float(min_det), best[1], scale, count)


# --- essential spectrum --------------------------------------------------------

def _eig2(m: np.ndarray) -> np.ndarray:
    tr = m[..., 0, 0] + m[..., 1, 1]
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    disc = np.sqrt(tr * tr / 4 - det)
    return np.stack([tr / 2 + disc, tr / 2 - disc], axis=-1)


def essential_spectrum_cloud(src, p: float, t_points: int = 64, lambda_points: int = 65):
    """Eigenvalues of the symbol over a (t, lambda) grid.

    Returns a list of ``(value, theta, lam)`` sorted by (theta, lam).  At
    continuity points the symbol does not depend on lambda, so only
    ``lam = 0`` is sampled there.
    """
    src = as_expr(src) if not hasattr(src, "interior") else src
    st = stations(src)
    lam = lambda_grid(lambda_points)
    pts = []
    for sign, th in ((+1, 0.0), (-1, math.pi)):
        vals = src.endpoint(p, sign, lam)
        for j, l in enumerate(lam):
            for v in np.linalg.eigvals(vals[j]) if src.k > 1 else [vals[j, 0, 0]]:
                pts.append((complex(v), th, float(l)))
    inner = np.linspace(0.0, math.pi, t_points + 2)[1:-1]
    inner = inner[np.min(np.abs(inner[:, None] - st[None, :]), axis=1) > 1e-9] if len(st) else inner
    if len(inner):
        m = src.interior(p, inner, 0.0)
        ev = _eig2(m) if src.k == 1 else np.linalg.eigvals(m)
        for i, th in enumerate(inner):
            for v in ev[i]:
                pts.append((complex(v), float(th), 0.0))
    for th in st:
        m = src.interior(p, float(th), lam)
        ev = _eig2(m) if src.k == 1 else np.linalg.eigvals(m)
        for j, l in enumerate(lam):
            for v in ev[j]:
                pts.append((complex(v), float(th), float(l)))
    pts.sort(key=lambda x: (x[1], x[2]))
    return pts
