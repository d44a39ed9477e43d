"""Normalized symbol curves, winding numbers and Fredholm indices.

Half-circle sources (operator expressions, extension matrices) are traced in
the following order:

1. lambda from -inf to +inf at t = 1,
2. t counter-clockwise along each arc of continuity of the upper half-circle,
   with a lambda sweep from -inf to +inf inserted at every jump point,
3. lambda from -inf to +inf at t = -1.

The traced function is ``W = det smb(t, lam) / (det a22(t, +inf) det a22(t, -inf))``
inside and ``smb(t, lam) / smb(t, -+inf)`` at ``t = +-1``; it starts and ends
at 1 and the index is minus its winding number.

Full-circle sources (Toeplitz symbols, matrix generators) are traced from
angle 0 around to 2 pi with a lambda sweep at every jump point; the resulting
closed curve need not pass through 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import (FredholmVerdict, Generator, MatrixGenerator, Resolution, as_expr,
                      batch_evaluate, full_circle_stations, half_circle_items, is_fredholm)
from .arcs import conjugate_exponent, lambda_from_unit, mu
from .multiplier import PCMultiplier, TWO_PI, normalize_angle

__all__ = [
    "CurveSegment",
    "OrientedCurve",
    "IndexReport",
    "JunctionError",
    "NotFredholmError",
    "W_values",
    "build_W",
    "winding",
    "argument_growth",
    "index_TH",
    "index_toeplitz_circle",
    "toeplitz_circle_curve",
    "index_matrix_op",
    "matrix_op_curve",
    "doubled_matrix_of",
    "separate_jumps",
]

JUNCTION_TOL = 1e-6
ENDPOINT_TOL = 1e-8
NEAR_ZERO = 1e-8
INTEGER_TOL = 1e-6
MAX_STEP_ARG = math.pi / 3


class JunctionError(RuntimeError):
    """Neighbouring curve segments do not meet."""


class NotFredholmError(ValueError):
    """The operator is (numerically) not Fredholm."""


@dataclass
class CurveSegment:
    """Samples of W along one sweep.

    ``kind`` is ``"lambda"`` (fixed angle, lambda varies) or ``"t"`` (an arc
    of continuity, lambda irrelevant).  ``params`` are the sweep parameters
    in [0, 1]; ``theta`` and ``lam`` the corresponding points (``lam`` is nan
    on t-sweeps).
    """

    kind: str
    params: np.ndarray
    theta: np.ndarray
    lam: np.ndarray
    values: np.ndarray
    evaluate: Callable | None = field(default=None, repr=False)

    @property
    def start(self) -> complex:
        return complex(self.values[0])

    @property
    def end(self) -> complex:
        return complex(self.values[-1])


@dataclass
class OrientedCurve:
    """Ordered segments of a closed curve."""

    segments: list
    closed: bool = True
    full_circle: bool = False

    @property
    def values(self) -> np.ndarray:
        if not self.segments:
            return np.zeros(0, dtype=complex)
        return np.concatenate([s.values for s in self.segments])

    @property
    def samples(self) -> int:
        return sum(len(s.values) for s in self.segments)

    @property
    def start(self) -> complex:
        return self.segments[0].start

    @property
    def end(self) -> complex:
        return self.segments[-1].end

    def junction_mismatches(self) -> list:
        """``(segment index, |gap|)`` between each segment end and the next start."""
        out = []
        for i in range(len(self.segments) - 1):
            out.append((i, abs(self.segments[i].end - self.segments[i + 1].start)))
        if self.full_circle:
            out.append((len(self.segments) - 1, abs(self.end - self.start)))
        return out

    @classmethod
    def from_values(cls, values, closed: bool = True) -> "OrientedCurve":
        """Wrap a plain sample sequence (e.g. a synthetic or imported curve)."""
        v = np.asarray(values, dtype=complex)
        n = len(v)
        seg = CurveSegment("t", np.linspace(0, 1, n), np.full(n, np.nan), np.full(n, np.nan), v)
        return cls([seg], closed=closed)


@dataclass
class IndexReport:
    """Fredholm flag, winding number and index (``index == -winding``)."""

    fredholm: bool
    winding: int | None
    index: int | None
    min_modulus: float
    samples: int
    verdict: FredholmVerdict | None = None
    curve: OrientedCurve | None = field(default=None, repr=False)
    message: str = ""


# --- evaluation of W --------------------------------------------------------

def _as_source(src):
    return src if hasattr(src, "interior") else as_expr(src)


def _w_interior(src, p, theta, lam, side=None):
    theta, lam = np.broadcast_arrays(np.atleast_1d(np.asarray(theta, float)),
                                     np.atleast_1d(np.asarray(lam, float)))
    # normalizing values at lambda = +-inf, once per distinct angle, same call
    uth, inv = np.unique(theta, return_inverse=True)
    n, k = len(theta), len(uth)
    s = src.interior(p, np.concatenate([theta, uth, uth]),
                     np.concatenate([lam, np.full(k, np.inf), np.full(k, -np.inf)]), side)
    d22 = np.linalg.det(s[n:, 1::2, 1::2])
    return np.linalg.det(s[:n]) / (d22[:k] * d22[k:])[inv]


def _w_continuous(src, p, theta, side=None):
    """W on an arc of continuity, where the symbol does not depend on lambda."""
    s = src.interior(p, theta, 0.0, side)
    d22 = np.linalg.det(s[..., 1::2, 1::2])
    return np.linalg.det(s) / (d22 * d22)


def _w_endpoint(src, p, sign, lam):
    lam = np.atleast_1d(np.asarray(lam, float))
    ref = -np.inf if sign > 0 else np.inf
    num = np.linalg.det(src.endpoint(p, sign, lam))
    den = np.linalg.det(src.endpoint(p, sign, np.array([ref])))[0]
    out = num / den
    # the normalizing point itself is 1 by construction, not up to rounding
    out[lam == ref] = 1.0
    return out


def _w_lambda(src, p, theta, lam):
    out = np.empty(theta.shape, dtype=complex)
    for sign, where in ((+1, 0.0), (-1, math.pi)):
        sel = theta == where
        if sel.any():
            out[sel] = _w_endpoint(src, p, sign, lam[sel])
    inner = (theta != 0.0) & (theta != math.pi)
    if inner.any():
        out[inner] = _w_interior(src, p, theta[inner], lam[inner])
    return out


def W_values(src, p: float, theta, lam) -> np.ndarray:
    """Normalized symbol W at points of the upper half-circle cylinder."""
    src = _as_source(src)
    theta, lam = np.broadcast_arrays(np.atleast_1d(normalize_angle(theta)),
                                     np.atleast_1d(np.asarray(lam, float)))
    if np.any(theta > math.pi + 1e-12):
        raise ValueError("W is defined on the upper half-circle")
    theta = np.where(np.abs(theta - math.pi) < 1e-12, math.pi, theta)
    theta = np.where(theta < 1e-12, 0.0, theta)
    return _w_lambda(src, p, theta, lam)


# --- generic tracing ----------------------------------------------------------

def _bad_steps(s, v):
    """Steps whose argument change or relative size is too large to trust."""
    a, b = v[:-1], v[1:]
    with np.errstate(all="ignore"):
        bad = (np.abs(np.angle(b / a)) >= MAX_STEP_ARG) | (
            np.abs(b - a) > 0.5 * np.minimum(np.abs(a), np.abs(b)))
    ok = (a != 0) & (b != 0) & np.isfinite(a) & np.isfinite(b)
    return bad & ok & ((s[1:] - s[:-1]) > 1e-14)


def _merge(s, v, sm, vm):
    s, v = np.concatenate([s, sm]), np.concatenate([v, vm])
    order = np.argsort(s, kind="stable")
    return s[order], v[order]


def _refine(f, s, v, max_depth):
    """Insert midpoints until consecutive samples are close in argument."""
    for _ in range(max_depth):
        bad = _bad_steps(s, v)
        if not bad.any():
            break
        mids = 0.5 * (s[:-1][bad] + s[1:][bad])
        s, v = _merge(s, v, mids, f(mids))
    return s, v


def _trace(items, lam_fn, arc_fn, res: Resolution, full_circle=False) -> OrientedCurve:
    """Sample W over ``items`` (``("lam", theta)`` or ``("arc", (a, b))``).

    All sweeps are refined together, one batched evaluation per round.
    """
    u0 = np.arange(res.lambda_points + 2) / (res.lambda_points + 1)
    s0 = np.linspace(0.0, 1.0, res.t_points)
    params = [u0 if kind == "lam" else s0 for kind, _ in items]
    values = batch_evaluate(items, params, lam_fn, arc_fn)
    for _ in range(res.max_depth):
        mids = []
        for s, v in zip(params, values):
            bad = _bad_steps(s, v)
            mids.append(0.5 * (s[:-1][bad] + s[1:][bad]))
        if not any(len(m) for m in mids):
            break
        new = batch_evaluate(items, mids, lam_fn, arc_fn)
        for i, (m, vm) in enumerate(zip(mids, new)):
            if len(m):
                params[i], values[i] = _merge(params[i], values[i], m, vm)
    segs = []
    for item, s, v in zip(items, params, values):
        kind, where = item
        f = (lambda x, it=item: batch_evaluate([it], [x], lam_fn, arc_fn)[0])
        if kind == "lam":
            segs.append(CurveSegment("lambda", s, np.full(len(s), float(where)),
                                     np.atleast_1d(lambda_from_unit(s)), v, f))
        else:
            a, b = where
            segs.append(CurveSegment("t", s, a + s * (b - a), np.full(len(s), np.nan), v, f))
    return OrientedCurve(segs, closed=True, full_circle=full_circle)


def _full_items(st):
    knots = np.concatenate([[0.0], st, [TWO_PI]])
    items = [("lam", 0.0)]
    for j in range(len(knots) - 1):
        items.append(("arc", (float(knots[j]), float(knots[j + 1]))))
        if j + 1 < len(knots) - 1:
            items.append(("lam", float(knots[j + 1])))
    return items


def _check_curve(curve: OrientedCurve, normalized: bool):
    for i, gap in curve.junction_mismatches():
        seg = curve.segments[i]
        scale = max(1.0, abs(seg.end))
        if gap > JUNCTION_TOL * scale:
            where = f"angle {seg.theta[-1]:.12g}" if seg.kind == "lambda" else \
                f"arc end at angle {seg.theta[-1]:.12g}"
            raise JunctionError(f"segments {i} and {i + 1} do not meet at {where}: gap {gap:.3e}")
    if normalized:
        for name, val in (("start", curve.start), ("end", curve.end)):
            if abs(val - 1.0) > ENDPOINT_TOL:
                raise JunctionError(f"curve {name} value {val} differs from 1")


def build_W(e, p: float, resolution: Resolution | None = None, check_fredholm: bool = True
            ) -> OrientedCurve:
    """Trace the normalized symbol over the upper half-circle cylinder.

    Raises :class:`NotFredholmError` for non-Fredholm input and
    :class:`JunctionError` when neighbouring segments fail to meet.
    """
    src = _as_source(e)
    res = resolution or Resolution()
    if check_fredholm:
        verdict = is_fredholm(src, p, res)
        if not verdict.is_yes:
            raise NotFredholmError(
                f"symbol not invertible (verdict {verdict.fredholm}, "
                f"min |det| {verdict.min_abs_det:.3e} at {verdict.witness})")

    curve = _trace(half_circle_items(src), lambda th, lam: _w_lambda(src, p, th, lam),
                   lambda th, side: _w_continuous(src, p, th, side), res)
    _check_curve(curve, normalized=True)
    return curve


def _increments(curve: OrientedCurve, max_depth: int = 40) -> np.ndarray:
    pieces = []
    for seg in curve.segments:
        v = seg.values
        if seg.evaluate is not None:
            _, v = _refine(seg.evaluate, seg.params, v, max_depth)
        pieces.append(v)
    v = np.concatenate(pieces)
    if curve.full_circle:
        v = np.append(v, v[0])
    return v


def argument_growth(curve: OrientedCurve) -> float:
    """Total argument increment of the sampled curve, in turns."""
    v = _increments(curve)
    mod = np.abs(v)
    if not len(v):
        return 0.0
    if np.min(mod) == 0.0 or np.min(mod) < NEAR_ZERO * np.max(mod):
        raise NotFredholmError("curve passes through (numerically) zero")
    return float(np.sum(np.angle(v[1:] / v[:-1]))) / TWO_PI


def winding(curve: OrientedCurve) -> int:
    """Winding number about 0 of the sampled curve (argument growth / 2 pi)."""
    total = argument_growth(curve)
    n = round(total)
    if abs(total - n) >= INTEGER_TOL:
        raise ValueError(f"argument growth {total:.9f} turns is not an integer")
    return int(n)


def _report(curve_fn, verdict=None) -> IndexReport:
    try:
        curve = curve_fn()
    except NotFredholmError as exc:
        return IndexReport(False, None, None, 0.0, 0, verdict, None, str(exc))
    v = curve.values
    mod = np.abs(v)
    min_mod = float(np.min(mod))
    if min_mod == 0.0 or min_mod < NEAR_ZERO * float(np.max(mod)):
        return IndexReport(False, None, None, min_mod, curve.samples, verdict, curve,
                           "numerically non-Fredholm: curve passes near 0")
    w = winding(curve)
    return IndexReport(True, w, -w, min_mod, curve.samples, verdict, curve)


def index_TH(e, p: float, resolution: Resolution | None = None) -> IndexReport:
    """Index of an element of the Toeplitz-plus-Hankel algebra: ``-wind W``."""
    src = _as_source(e)
    res = resolution or Resolution()
    verdict = is_fredholm(src, p, res)
    if not verdict.is_yes:
        return IndexReport(False, None, None, verdict.min_abs_det, verdict.samples, verdict,
                           None, f"verdict {verdict.fredholm}")
    return _report(lambda: build_W(src, p, res, check_fredholm=False), verdict)


# --- full-circle sources --------------------------------------------------------

def toeplitz_circle_curve(a: PCMultiplier, p: float, resolution: Resolution | None = None
                          ) -> OrientedCurve:
    """Curve ``a(t-)(1 - mu_q) + a(t+) mu_q`` over the full circle."""
    res = resolution or Resolution()
    q = conjugate_exponent(p)

    class _Src:
        def multipliers(self):
            return [a]

    def lam_fn(th, lam):
        plus, minus = a.limits(th)
        m = mu(q, lam)
        return minus * (1.0 - m) + plus * m

    def arc_fn(th, side):
        plus, minus = a.limits(th)
        return minus if side == -1 else plus

    curve = _trace(_full_items(full_circle_stations(_Src())), lam_fn, arc_fn, res,
                   full_circle=True)
    _check_curve(curve, normalized=False)
    return curve


def index_toeplitz_circle(a: PCMultiplier, p: float, resolution: Resolution | None = None
                          ) -> IndexReport:
    """Index of ``T(a)`` as minus the winding of its full-circle symbol."""
    return _report(lambda: toeplitz_circle_curve(a, p, resolution))


def matrix_op_curve(g: MatrixGenerator, p: float, resolution: Resolution | None = None
                    ) -> OrientedCurve:
    """Full-circle curve of ``det smb / (det b(t-) det b(t+))``."""
    res = resolution or Resolution()
    for th in np.concatenate([[0.0], full_circle_stations(g)]):
        for side in (+1, -1):
            bval, _ = g._values(g.b, np.array([th]), side)
            aval, _ = g._values(g.a, np.array([th]), side)
            if abs(np.linalg.det(bval[0])) < 1e-14 or abs(np.linalg.det(aval[0])) < 1e-14:
                raise NotFredholmError(f"diagonal symbol blocks singular at angle {th:.12g}")

    def lam_fn(th, lam):
        return g.normalized_det(p, th, lam)

    def arc_fn(th, side):
        return g.normalized_det(p, normalize_angle(th), 0.0, side)

    curve = _trace(_full_items(full_circle_stations(g)), lam_fn, arc_fn, res, full_circle=True)
    _check_curve(curve, normalized=False)
    return curve


def index_matrix_op(g: MatrixGenerator, p: float, resolution: Resolution | None = None
                    ) -> IndexReport:
    """Index of ``L(a) diag P + L(b) diag Q`` as minus the full-circle winding."""
    return _report(lambda: matrix_op_curve(g, p, resolution))


def doubled_matrix_of(g) -> MatrixGenerator:
    """2x2 matrix generator whose index is ``ind(T(a)+H(b)) + ind(T(a)-H(b))``.

    The operator ``[[T(a), H(b)], [H(b~), T(a~)]]`` acting on pairs is, up to an
    invertible factor, ``L(alpha) diag P + L(beta) diag Q`` with
    ``alpha = [[a, 0], [b~, 1]]`` and ``beta = [[1, b], [0, a~]]``.  When ``b``
    is continuous at +-1 both indices agree and this is twice the index of
    ``T(a) + H(b)``.
    """
    if not isinstance(g, Generator):
        g = as_expr(g).single_generator()
        if g is None:
            raise ValueError("doubling needs a single generator T(a) + H(b)")
    one, zero = PCMultiplier.constant(1.0), PCMultiplier.zero()
    return MatrixGenerator([[g.a, zero], [g.b.reflect_tilde(), one]],
                           [[one, g.b], [zero, g.a.reflect_tilde()]])


# --- jump separation ------------------------------------------------------------

@dataclass
class Separation:
    """Factors of a jump separation together with the buffer geometry."""

    a0: PCMultiplier
    b0: PCMultiplier
    a1: PCMultiplier
    b1: PCMultiplier
    width: float
    phi0: PCMultiplier | None = None
    c: PCMultiplier | None = None

    def __iter__(self):
        return iter((self.a0, self.b0, self.a1, self.b1))


def _angular_distance(x, y):
    d = np.abs(normalize_angle(np.asarray(x) - y))
    return np.minimum(d, TWO_PI - d)


def _ramp_arcs(start_angle, length, z):
    """Two linear pieces from ``z`` to 1 via a point on the half-angle ray."""
    zm = 0.5 * (abs(z) + 1.0) * np.exp(0.5j * np.angle(z))
    h = length / 2
    return [(start_angle, start_angle + h, [z, (zm - z) / h]),
            (start_angle + h, start_angle + length, [zm, (1.0 - zm) / h])]


def separate_jumps(a: PCMultiplier, b: PCMultiplier, p: float | None = None) -> Separation:
    """Split ``T(a) + H(b)`` into a factor jumping only at +-1 and one jumping elsewhere.

    ``a0 * a1 == a`` and ``b0 + b1 == b``; ``a0, b0`` are continuous away from
    +-1 and ``a1, b1`` are continuous near +-1 (``a1 = 1``, ``b1 = 0`` there).
    ``p`` is accepted for interface symmetry; the construction is p-free.
    """
    jumps = np.concatenate([a.jump_set(), b.jump_set()])
    omega0 = jumps[(_angular_distance(jumps, 0.0) > 1e-9) & (_angular_distance(jumps, math.pi) > 1e-9)]
    one = PCMultiplier.constant(1.0)
    if not len(omega0):
        return Separation(a, b, one, PCMultiplier.zero(), math.pi / 8)
    pts = np.concatenate([omega0, normalize_angle(-omega0)])
    dist = min(float(np.min(_angular_distance(pts, 0.0))),
               float(np.min(_angular_distance(pts, math.pi))))
    w = min(math.pi / 8, dist / 2)
    boundary = np.array([w, math.pi - w, math.pi + w, TWO_PI - w])
    if len(jumps) and np.min(np.abs(_angular_distance(jumps[:, None], boundary[None, :]))) < 1e-6:
        raise ValueError("a jump lies too close to the buffer boundary")

    # buffer U around +-1 and the trapezoid phi0
    chi_u = PCMultiplier(arcs=[(-w, w, [1.0]), (math.pi - w, math.pi + w, [1.0])])
    third = w / 3
    phi0 = PCMultiplier.piecewise_linear(
        [third, 2 * third, math.pi - 2 * third, math.pi - third,
         math.pi + third, math.pi + 2 * third, TWO_PI - 2 * third, TWO_PI - third],
        [1, 0, 0, 1, 1, 0, 0, 1])

    # c: continuous on the complement of U, equal to a on its boundary, 1 far away
    edge = {w: a.eval_plus(w), math.pi - w: a.eval_minus(math.pi - w),
            math.pi + w: a.eval_plus(math.pi + w), TWO_PI - w: a.eval_minus(TWO_PI - w)}
    for ang, z in edge.items():
        if abs(z) < 1e-12:
            raise ValueError(f"interpolant vanishes on the arc starting at angle {ang:.12g}")
    half = w / 2
    arcs = []
    arcs += _ramp_arcs(w, half, edge[w])
    arcs += _ramp_arcs(math.pi + w, half, edge[math.pi + w])
    # ramps ending at the boundary are traversed backwards: reflect the pieces
    for end, z in ((math.pi - w, edge[math.pi - w]), (TWO_PI - w, edge[TWO_PI - w])):
        zm = 0.5 * (abs(z) + 1.0) * np.exp(0.5j * np.angle(z))
        h = half / 2
        start = end - half
        arcs += [(start, start + h, [1.0, (zm - 1.0) / h]),
                 (start + h, end, [zm, (z - zm) / h])]
    arcs += [(w + half, math.pi - w - half, [1.0]),
             (math.pi + w + half, TWO_PI - w - half, [1.0])]
    c_out = PCMultiplier(arcs=arcs)
    c_full = c_out + chi_u

    a0 = a * chi_u + c_out
    a1 = chi_u + a * (one - chi_u) * c_full.reciprocal()
    b0 = b * phi0
    b1 = b - b0
    return Separation(a0, b0, a1, b1, w, phi0, c_full)
