"""Piecewise continuous multipliers with exact one-sided limits.

A :class:`PCMultiplier` is the sum of a trigonometric polynomial and a
piecewise part.  The piecewise part lives on a partition of the circle into
half-open arcs ``[b_j, b_{j+1})`` (angles, counter-clockwise, ``b_0 = 0``); on
each arc it is ``sum_k exp(i k theta) N_k(theta - b_j) / D(theta - b_j)`` with
polynomials ``N_k`` and a common denominator ``D`` (``D = 1`` except for
quotients built by :meth:`PCMultiplier.reciprocal`).

Every such function has bounded variation on each arc, hence is a multiplier
on every l^p by the Stechkin inequality; membership is therefore never
checked.

Points of the circle are given by their angle; :func:`normalize_angle` maps
any real angle into ``[0, 2 pi)``.  The conjugate point of ``theta`` is
``2 pi - theta``.
"""

from __future__ import annotations

import math
from numbers import Number

import numpy as np
from scipy import integrate

__all__ = [
    "TWO_PI",
    "MultiplierOverflowError",
    "PCMultiplier",
    "normalize_angle",
    "conj_angle",
    "merge_angles",
]

TWO_PI = 2.0 * math.pi

MAX_DEGREE = 16
MAX_PIECE_TERMS = 16
MAX_TRIG_TERMS = 256

# angles closer than this are the same point of the circle
SNAP_TOL = 1e-10
# jump detection on representation-derived limits
JUMP_TOL = 1e-12


class MultiplierOverflowError(ValueError):
    """Raised when a product exceeds the configured degree or term caps."""


def normalize_angle(theta):
    """Map angles into [0, 2 pi); values within SNAP_TOL of 2 pi become 0."""
    th = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    th = np.where(TWO_PI - th < SNAP_TOL, 0.0, th)
    if th.ndim == 0:
        return float(th)
    return th


def conj_angle(theta):
    """Angle of the complex conjugate point."""
    return normalize_angle(-np.asarray(theta, dtype=float))


def merge_angles(angles, tol: float = SNAP_TOL) -> np.ndarray:
    """Sort normalized angles and drop near-duplicates (including across 0)."""
    th = np.sort(normalize_angle(np.atleast_1d(np.asarray(angles, dtype=float))))
    out: list[float] = []
    for x in th:
        if not out or x - out[-1] > tol:
            out.append(float(x))
    if len(out) > 1 and TWO_PI - out[-1] + out[0] <= tol:
        out.pop()
    return np.array(out)


# --- polynomial helpers (ascending coefficients, complex) -------------------

def _poly(c) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=complex)).copy()
    nz = np.nonzero(c)[0]
    if len(nz) == 0:
        return np.zeros(1, dtype=complex)
    return c[: nz[-1] + 1]


def _is_zero(c: np.ndarray) -> bool:
    return not np.any(c)


def _padd(c1, c2):
    n = max(len(c1), len(c2))
    out = np.zeros(n, dtype=complex)
    out[: len(c1)] += c1
    out[: len(c2)] += c2
    return _poly(out)


def _pmul(c1, c2):
    return _poly(np.convolve(c1, c2))


def _binom_compose(c, offset, sign):
    """Coefficients of ``p(offset + sign * x)``."""
    n = len(c)
    out = np.zeros(n, dtype=complex)
    for i in range(n):
        if c[i] == 0:
            continue
        for j in range(i + 1):
            out[j] += c[i] * math.comb(i, j) * offset ** (i - j) * sign**j
    return _poly(out)


def _pval(c, x):
    # Horner, vectorized in x
    out = np.zeros(np.shape(x), dtype=complex) + c[-1]
    for coef in c[-2::-1]:
        out = out * x + coef
    return out


# --- pieces -----------------------------------------------------------------

class _Piece:
    """One arc of the piecewise part: terms {k: numerator} over a denominator."""

    __slots__ = ("terms", "den")

    def __init__(self, terms=None, den=None):
        den = np.ones(1, dtype=complex) if den is None else _poly(den)
        if _is_zero(den):
            raise ValueError("zero denominator")
        clean = {}
        for k, c in (terms or {}).items():
            c = _poly(c)
            if not _is_zero(c):
                clean[int(k)] = c
        if len(den) == 1 and den[0] != 1:
            clean = {k: c / den[0] for k, c in clean.items()}
            den = np.ones(1, dtype=complex)
        self.terms = clean
        self.den = den
        if len(self.terms) > MAX_PIECE_TERMS:
            raise MultiplierOverflowError(
                f"piece has {len(self.terms)} frequency terms (cap {MAX_PIECE_TERMS})")
        deg = max([len(c) - 1 for c in self.terms.values()] + [len(den) - 1])
        if deg > MAX_DEGREE:
            raise MultiplierOverflowError(f"piece degree {deg} exceeds cap {MAX_DEGREE}")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def rational(self) -> bool:
        return len(self.den) > 1

    def value(self, theta, x):
        out = np.zeros(np.shape(x), dtype=complex)
        for k, c in self.terms.items():
            term = c[0] if len(c) == 1 else _pval(c, x)
            out = out + (term if k == 0 else np.exp(1j * k * theta) * term)
        if self.rational:
            out = out / _pval(self.den, x)
        return out

    def shifted(self, d: float) -> "_Piece":
        return _Piece({k: _binom_compose(c, d, 1.0) for k, c in self.terms.items()},
                      _binom_compose(self.den, d, 1.0))

    def reflected(self, length: float) -> "_Piece":
        return _Piece({-k: _binom_compose(c, length, -1.0) for k, c in self.terms.items()},
                      _binom_compose(self.den, length, -1.0))

    def scaled(self, s: complex) -> "_Piece":
        return _Piece({k: c * s for k, c in self.terms.items()}, self.den)

    def freq_scaled(self, f) -> "_Piece":
        return _Piece({k: c * f(k) for k, c in self.terms.items()}, self.den)

    def times_trig(self, trig: dict) -> "_Piece":
        out: dict[int, np.ndarray] = {}
        for k1, c in self.terms.items():
            for k2, w in trig.items():
                out[k1 + k2] = _padd(out.get(k1 + k2, np.zeros(1, complex)), c * w)
        return _Piece(out, self.den)

    def __add__(self, other: "_Piece") -> "_Piece":
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        if len(self.den) == len(other.den) and np.array_equal(self.den, other.den):
            out = dict(self.terms)
            for k, c in other.terms.items():
                out[k] = _padd(out.get(k, np.zeros(1, complex)), c)
            return _Piece(out, self.den)
        out = {k: _pmul(c, other.den) for k, c in self.terms.items()}
        for k, c in other.terms.items():
            out[k] = _padd(out.get(k, np.zeros(1, complex)), _pmul(c, self.den))
        return _Piece(out, _pmul(self.den, other.den))

    def __mul__(self, other: "_Piece") -> "_Piece":
        if self.is_zero or other.is_zero:
            return _Piece()
        out: dict[int, np.ndarray] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                out[k1 + k2] = _padd(out.get(k1 + k2, np.zeros(1, complex)), _pmul(c1, c2))
        return _Piece(out, _pmul(self.den, other.den))


def _moment_integral(n: int, m: int, length: float) -> np.ndarray:
    """Exact integrals of x^j exp(-i m x) over [0, length] for j = 0..n."""
    out = np.zeros(n + 1, dtype=complex)
    if m == 0:
        for j in range(n + 1):
            out[j] = length ** (j + 1) / (j + 1)
        return out
    im = 1j * m
    e = np.exp(-im * length)
    out[0] = (1.0 - e) / im
    for j in range(1, n + 1):
        out[j] = (-(length**j) * e + j * out[j - 1]) / im
    return out


def _as_complex(x) -> complex:
    return complex(x)


class PCMultiplier:
    """Trigonometric polynomial plus piecewise (rational-)polynomial part.

    Instances are immutable.  Build them with the class methods
    (:meth:`constant`, :meth:`monomial`, :meth:`trig_poly`,
    :meth:`indicator`, :meth:`piecewise_constant`, :meth:`piecewise_linear`,
    :meth:`from_arcs`) and combine them with ``+``, ``-`` and ``*``.
    """

    __slots__ = ("_trig", "_breaks", "_pieces")

    def __init__(self, trig=None, arcs=None):
        """``trig`` maps frequencies to coefficients; ``arcs`` is a list of
        ``(alpha, beta, coeffs)`` with the arc ``[alpha, beta)`` traversed
        counter-clockwise and ``coeffs`` either a polynomial in
        ``theta - alpha`` or a dict ``{k: polynomial}``.  Arcs must not overlap;
        uncovered parts of the circle carry zero.
        """
        trig = {int(k): _as_complex(c) for k, c in (trig or {}).items()}
        breaks, pieces = _pieces_from_arcs(arcs or [])
        self._set(trig, breaks, pieces)

    def _set(self, trig, breaks, pieces):
        trig = {k: c for k, c in trig.items() if c != 0}
        if len(trig) > MAX_TRIG_TERMS:
            raise MultiplierOverflowError(
                f"trigonometric part has {len(trig)} terms (cap {MAX_TRIG_TERMS})")
        if pieces and all(pc.is_zero for pc in pieces):
            breaks, pieces = np.zeros(0), ()
        self._trig = trig
        self._breaks = np.asarray(breaks, dtype=float)
        self._pieces = tuple(pieces)

    @classmethod
    def _raw(cls, trig, breaks, pieces) -> "PCMultiplier":
        obj = cls.__new__(cls)
        obj._set(trig, breaks, pieces)
        return obj

    # --- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, c) -> "PCMultiplier":
        return cls({0: c})

    @classmethod
    def zero(cls) -> "PCMultiplier":
        return cls()

    @classmethod
    def monomial(cls, k: int, c=1.0) -> "PCMultiplier":
        """The function ``c t^k``."""
        return cls({k: c})

    @classmethod
    def trig_poly(cls, coeffs: dict) -> "PCMultiplier":
        return cls(coeffs)

    @classmethod
    def indicator(cls, alpha: float, beta: float) -> "PCMultiplier":
        """Characteristic function of the counter-clockwise arc [alpha, beta)."""
        return cls(arcs=[(alpha, beta, [1.0])])

    @classmethod
    def from_arcs(cls, arcs, trig=None) -> "PCMultiplier":
        return cls(trig, arcs)

    @classmethod
    def piecewise_constant(cls, breaks, values) -> "PCMultiplier":
        """``values[j]`` on ``[breaks[j], breaks[j+1])``, cyclically."""
        breaks = [float(b) for b in breaks]
        if len(breaks) != len(values) or not breaks:
            raise ValueError("need one value per break")
        if len(breaks) == 1:
            return cls.constant(values[0])
        arcs = []
        for j, v in enumerate(values):
            arcs.append((breaks[j], breaks[(j + 1) % len(breaks)], [v]))
        return cls(arcs=arcs)

    @classmethod
    def piecewise_linear(cls, knots, values) -> "PCMultiplier":
        """Continuous function, linear in the angle between consecutive knots (cyclic)."""
        knots = [float(b) for b in knots]
        if len(knots) < 2 or len(knots) != len(values):
            raise ValueError("need at least two knots and one value per knot")
        arcs = []
        n = len(knots)
        for j in range(n):
            a, b = knots[j], knots[(j + 1) % n]
            length = math.fmod(b - a, TWO_PI)
            if length <= 0:
                length += TWO_PI
            v0, v1 = complex(values[j]), complex(values[(j + 1) % n])
            arcs.append((a, a + length, [v0, (v1 - v0) / length]))
        return cls(arcs=arcs)

    # --- introspection ------------------------------------------------------

    @property
    def trig(self) -> dict:
        return dict(self._trig)

    @property
    def breaks(self) -> np.ndarray:
        return self._breaks.copy()

    @property
    def pieces(self) -> list:
        """List of ``(alpha, beta, {k: coeffs}, den)`` for the piecewise part."""
        out = []
        n = len(self._breaks)
        for j, pc in enumerate(self._pieces):
            end = self._breaks[j + 1] if j + 1 < n else TWO_PI
            out.append((float(self._breaks[j]), float(end),
                        {k: c.copy() for k, c in pc.terms.items()}, pc.den.copy()))
        return out

    @property
    def has_pieces(self) -> bool:
        return bool(self._pieces)

    def is_trig(self) -> bool:
        """True when the multiplier is a trigonometric polynomial (banded)."""
        return not self._pieces

    def bandwidth(self) -> int:
        if not self.is_trig():
            raise ValueError("bandwidth is defined for trigonometric polynomials only")
        return max([abs(k) for k in self._trig] + [0])

    def is_piecewise_constant(self) -> bool:
        if any(k != 0 for k in self._trig):
            return False
        return all(set(pc.terms) <= {0} and not pc.rational
                   and all(len(c) == 1 for c in pc.terms.values())
                   for pc in self._pieces)

    def _length(self, j: int) -> float:
        n = len(self._breaks)
        end = self._breaks[j + 1] if j + 1 < n else TWO_PI
        return float(end - self._breaks[j])

    # --- evaluation ---------------------------------------------------------

    def _snap(self, th: np.ndarray) -> np.ndarray:
        if not len(self._breaks):
            return th
        ext = np.append(self._breaks, TWO_PI)
        idx = np.searchsorted(ext, th)
        hi = ext[np.minimum(idx, len(ext) - 1)]
        lo = ext[np.maximum(idx - 1, 0)]
        th = np.where(hi - th < SNAP_TOL, hi, np.where(th - lo < SNAP_TOL, lo, th))
        th[th >= TWO_PI] = 0.0
        return th

    def _trig_value(self, th):
        out = np.zeros(np.shape(th), dtype=complex)
        for k, c in self._trig.items():
            out = out + (c if k == 0 else c * np.exp(1j * k * th))
        return out

    def _eval(self, theta, side: int):
        th = np.asarray(normalize_angle(theta), dtype=float)
        scalar = th.ndim == 0
        th = np.atleast_1d(th)
        out = self._trig_value(th)
        if self._pieces:
            th = self._snap(th)
            if side > 0:
                idx = np.searchsorted(self._breaks, th, side="right") - 1
                x = th - self._breaks[idx]
            else:
                idx = np.searchsorted(self._breaks, th, side="left") - 1
                wrap = idx < 0
                idx = np.where(wrap, len(self._breaks) - 1, idx)
                x = np.where(wrap, TWO_PI, th) - self._breaks[idx]
            for j in np.unique(idx):
                sel = idx == j
                out[sel] += self._pieces[j].value(th[sel], x[sel])
        if scalar:
            return complex(out[0])
        return out

    def limits(self, theta) -> tuple:
        """Both one-sided limits ``(plus, minus)`` at an array of angles, in one pass."""
        th = np.atleast_1d(np.asarray(normalize_angle(theta), dtype=float))
        plus = self._trig_value(th)
        if not self._pieces:
            return plus, plus.copy()
        th = self._snap(th)
        ip = np.searchsorted(self._breaks, th, side="right") - 1
        im = np.searchsorted(self._breaks, th, side="left") - 1
        x = th - self._breaks[ip]
        minus = plus.copy()
        for j in np.unique(ip):
            sel = ip == j
            plus[sel] += self._pieces[j].value(th[sel], x[sel])
        at = ip != im
        minus[~at] = plus[~at]
        if at.any():
            jm = np.where(im[at] < 0, len(self._breaks) - 1, im[at])
            xm = np.where(im[at] < 0, TWO_PI, th[at]) - self._breaks[jm]
            vals = minus[at]
            for j in np.unique(jm):
                sel = jm == j
                vals[sel] += self._pieces[j].value(th[at][sel], xm[sel])
            minus[at] = vals
        return plus, minus

    def eval_plus(self, theta):
        """Limit from above (counter-clockwise side) at the given angle(s)."""
        return self._eval(theta, +1)

    def eval_minus(self, theta):
        """Limit from below (clockwise side) at the given angle(s)."""
        return self._eval(theta, -1)

    def __call__(self, theta):
        return self._eval(theta, +1)

    def jump_set(self, tol: float = JUMP_TOL) -> np.ndarray:
        """Sorted angles where the one-sided limits differ."""
        if not self._pieces:
            return np.zeros(0)
        plus = self.eval_plus(self._breaks)
        minus = self.eval_minus(self._breaks)
        scale = np.maximum(1.0, np.maximum(np.abs(plus), np.abs(minus)))
        return self._breaks[np.abs(plus - minus) > tol * scale].copy()

    def is_continuous_at(self, theta, tol: float = JUMP_TOL) -> bool:
        p, m = self.eval_plus(theta), self.eval_minus(theta)
        return abs(p - m) <= tol * max(1.0, abs(p), abs(m))

    # --- algebra ------------------------------------------------------------

    def _refined(self, breaks: np.ndarray) -> tuple:
        """Pieces on the finer partition ``breaks`` (must contain our breaks)."""
        if not self._pieces:
            return tuple(_Piece() for _ in breaks)
        out = []
        for b in breaks:
            j = int(np.searchsorted(self._breaks, b + SNAP_TOL, side="right") - 1)
            d = b - self._breaks[j]
            pc = self._pieces[j]
            out.append(pc if abs(d) < SNAP_TOL else pc.shifted(d))
        return tuple(out)

    def _common(self, other: "PCMultiplier") -> np.ndarray:
        return merge_angles(np.concatenate([[0.0], self._breaks, other._breaks]))

    @staticmethod
    def _coerce(x) -> "PCMultiplier":
        if isinstance(x, PCMultiplier):
            return x
        if isinstance(x, Number):
            return PCMultiplier.constant(x)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        trig = dict(self._trig)
        for k, c in other._trig.items():
            trig[k] = trig.get(k, 0) + c
        if not self._pieces and not other._pieces:
            return PCMultiplier._raw(trig, np.zeros(0), ())
        br = self._common(other)
        pieces = [p + q for p, q in zip(self._refined(br), other._refined(br))]
        return PCMultiplier._raw(trig, br, pieces)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, s) -> "PCMultiplier":
        s = complex(s)
        return PCMultiplier._raw({k: c * s for k, c in self._trig.items()}, self._breaks,
                                 [pc.scaled(s) for pc in self._pieces])

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        trig: dict[int, complex] = {}
        for k1, c1 in self._trig.items():
            for k2, c2 in other._trig.items():
                trig[k1 + k2] = trig.get(k1 + k2, 0) + c1 * c2
        if not self._pieces and not other._pieces:
            return PCMultiplier._raw(trig, np.zeros(0), ())
        br = self._common(other)
        pieces = []
        for p, q in zip(self._refined(br), other._refined(br)):
            pieces.append(p.times_trig(other._trig) + q.times_trig(self._trig) + p * q)
        return PCMultiplier._raw(trig, br, pieces)

    __rmul__ = __mul__

    def reciprocal(self) -> "PCMultiplier":
        """Pointwise inverse; only for functions without nonzero frequencies.

        The result is rational on each arc.  Raises ``ValueError`` when the
        function has oscillating terms or (numerically) vanishes.
        """
        if any(k != 0 for k in self._trig) or any(
                set(pc.terms) - {0} for pc in self._pieces):
            raise ValueError("reciprocal needs a non-oscillating multiplier")
        c0 = self._trig.get(0, 0)
        if not self._pieces:
            if c0 == 0:
                raise ValueError("reciprocal of zero")
            return PCMultiplier.constant(1.0 / c0)
        pieces = []
        for j, pc in enumerate(self._pieces):
            num = _padd(pc.terms.get(0, np.zeros(1, complex)), c0 * pc.den)
            x = np.linspace(0.0, self._length(j), 257)
            if np.min(np.abs(_pval(num, x))) < 1e-12 * max(1.0, np.max(np.abs(num))):
                raise ValueError("reciprocal of a multiplier that vanishes on an arc")
            pieces.append(_Piece({0: pc.den}, num))
        return PCMultiplier._raw({}, self._breaks, pieces)

    def reflect_tilde(self) -> "PCMultiplier":
        """The function ``t -> a(1/t)``."""
        trig = {-k: c for k, c in self._trig.items()}
        if not self._pieces:
            return PCMultiplier._raw(trig, np.zeros(0), ())
        starts, pieces = [], []
        for j, pc in enumerate(self._pieces):
            length = self._length(j)
            starts.append(normalize_angle(-(self._breaks[j] + length)))
            pieces.append(pc.reflected(length))
        order = np.argsort(starts)
        return PCMultiplier._raw(trig, np.asarray(starts)[order], [pieces[i] for i in order])

    def reflect_hat(self) -> "PCMultiplier":
        """The function ``t -> a(-t)``."""
        sign = lambda k: -1.0 if k % 2 else 1.0  # noqa: E731
        trig = {k: c * sign(k) for k, c in self._trig.items()}
        if not self._pieces:
            return PCMultiplier._raw(trig, np.zeros(0), ())
        br = merge_angles(np.concatenate([self._breaks, [math.pi]]))
        pieces = [pc.freq_scaled(sign) for pc in self._refined(br)]
        starts = normalize_angle(br - math.pi)
        order = np.argsort(starts)
        return PCMultiplier._raw(trig, starts[order], [pieces[i] for i in order])

    # --- Fourier coefficients -------------------------------------------------

    def fourier_coeff(self, k: int) -> complex:
        """``(1/2pi) int a(e^{i theta}) e^{-i k theta} d theta``."""
        k = int(k)
        total = complex(self._trig.get(k, 0))
        for j, pc in enumerate(self._pieces):
            b, length = float(self._breaks[j]), self._length(j)
            if pc.rational:
                total += self._quad_piece(pc, k, b, length)
                continue
            for k2, c in pc.terms.items():
                m = k - k2
                mom = _moment_integral(len(c) - 1, m, length)
                total += np.exp(-1j * m * b) * np.dot(c, mom) / TWO_PI
        return complex(total)

    @staticmethod
    def _quad_piece(pc: _Piece, k: int, b: float, length: float) -> complex:
        def f(x):
            return pc.value(b + x, x) * np.exp(-1j * k * (b + x))

        re = integrate.quad(lambda x: f(x).real, 0.0, length, limit=200, epsabs=1e-13)[0]
        im = integrate.quad(lambda x: f(x).imag, 0.0, length, limit=200, epsabs=1e-13)[0]
        return complex(re, im) / TWO_PI

    def fourier_coeffs(self, kmin: int, kmax: int) -> np.ndarray:
        return np.array([self.fourier_coeff(k) for k in range(kmin, kmax + 1)])

    def total_variation_bound(self) -> float:
        """Crude upper bound for the total variation (used for tail estimates)."""
        x = np.linspace(0.0, TWO_PI, 4097)[:-1]
        grid = np.unique(np.concatenate([x, self._breaks]))
        plus, minus = self.eval_plus(grid), self.eval_minus(grid)
        var = np.sum(np.abs(np.diff(np.append(plus, plus[0]))))
        return float(var + np.sum(np.abs(plus - minus)))

    def __repr__(self):
        parts = []
        if self._trig:
            parts.append("trig=" + repr({k: complex(c) for k, c in sorted(self._trig.items())}))
        if self._pieces:
            parts.append(f"{len(self._pieces)} pieces")
        return f"PCMultiplier({', '.join(parts) or '0'})"


def _pieces_from_arcs(arcs):
    if not arcs:
        return np.zeros(0), ()
    norm = []
    for item in arcs:
        alpha, beta, coeffs = item[0], item[1], item[2]
        den = item[3] if len(item) > 3 else None
        a = normalize_angle(alpha)
        length = math.fmod(float(beta) - float(alpha), TWO_PI)
        if length < 0:
            length += TWO_PI
        if length < SNAP_TOL or TWO_PI - length < SNAP_TOL:
            length = TWO_PI
        terms = coeffs if isinstance(coeffs, dict) else {0: coeffs}
        norm.append((a, length, _Piece(terms, den)))
    cuts = [0.0]
    for a, length, _ in norm:
        cuts += [a, a + length]
    br = merge_angles(cuts)
    pieces = []
    for j, b in enumerate(br):
        end = br[j + 1] if j + 1 < len(br) else TWO_PI
        mid = 0.5 * (b + end)
        owner = None
        for a, length, pc in norm:
            offset = normalize_angle(mid - a)
            if offset < length:
                if owner is not None:
                    raise ValueError("malformed piece cover: arcs overlap")
                owner = (normalize_angle(b - a), pc)
        if owner is None:
            pieces.append(_Piece())
        else:
            d, pc = owner
            if d > TWO_PI - SNAP_TOL:
                d = 0.0
            pieces.append(pc if d < SNAP_TOL else pc.shifted(d))
    return br, tuple(pieces)
