"""Command-line front end.

Problems are described in a JSON file::

    {
      "p": 2.5,
      "multipliers": {
        "a": {"trig": {"1": 1}},
        "c": {"piecewise_constant": {"breaks": ["pi:0.5", "pi:1.5"], "values": [1, "1j"]}}
      },
      "expression": {"sum": [{"T": "a"}, {"H": "c"}]},
      "grid": {"t": 256, "lambda": 129}
    }

Angles are radians or strings ``"pi:x"`` meaning ``x * pi`` (``x`` may be a
fraction such as ``1/3``).  Complex numbers are numbers, strings accepted by
``complex()`` or ``[re, im]`` pairs.  A multiplier is the sum of the parts
it lists: ``constant``, ``trig`` (frequency -> coefficient), ``pieces`` (list
of ``{"from", "to", "poly"}`` with the polynomial in ``theta - from``, or
``"terms": {k: poly}``), ``indicator`` (``[from, to]``),
``piecewise_constant`` and ``piecewise_linear``.

Expressions are ``"I"``, ``"K"`` (compact), a number, ``{"T": name}``,
``{"H": name}``, ``{"TH": [a, b]}``, ``{"sum": [...]}``, ``{"prod": [...]}``,
``{"scale": [c, expr]}`` or ``{"neg": expr}``.  An optional ``"beta"`` entry,
a nested list of ``[a, b]`` name pairs, describes a matrix of generators for
the extension oracle.

Exit codes: 0 success or Fredholm, 1 not Fredholm or oracle failure,
2 unresolved, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import (Generator, OperatorExpr, Resolution, T, H, TH, compact, identity,
                      essential_spectrum_cloud, is_fredholm)
from .arcs import conjugate_exponent
from .extension import GeneratorMatrix, el, extension_equivalence_check, index_el_ext
from .index import (JunctionError, NotFredholmError, build_W, doubled_matrix_of, index_TH,
                    index_matrix_op, winding)
from .multiplier import MultiplierOverflowError, PCMultiplier
from .oracle import OracleError, product_identity_check, laurent_index_oracle, laurent_kernel_oracle

__all__ = ["ConfigError", "ProblemConfig", "parse_config", "load_config", "main",
           "cmd_check", "cmd_index", "cmd_curve", "cmd_spectrum", "cmd_oracle"]

EXIT_OK, EXIT_NOT_FREDHOLM, EXIT_UNRESOLVED, EXIT_INPUT = 0, 1, 2, 3


class ConfigError(ValueError):
    """Invalid problem description."""


@dataclass
class ProblemConfig:
    p: float
    multipliers: dict
    expression: OperatorExpr
    grid: dict = field(default_factory=dict)
    beta: GeneratorMatrix | None = None
    raw_expression: object = None

    def resolution(self) -> Resolution:
        kw = {}
        if "t" in self.grid:
            kw["t_points"] = int(self.grid["t"])
        if "lambda" in self.grid:
            kw["lambda_points"] = int(self.grid["lambda"])
        return Resolution(**kw)


# --- parsing ----------------------------------------------------------------------

def _angle(x, where: str) -> float:
    if isinstance(x, bool):
        raise ConfigError(f"{where}: expected an angle, got {x!r}")
    if isinstance(x, (int, float)):
        return float(x)
    if isinstance(x, str) and x.startswith("pi:"):
        try:
            return float(Fraction(x[3:].strip())) * math.pi
        except (ValueError, ZeroDivisionError):
            pass
    raise ConfigError(f"{where}: expected an angle (number or 'pi:x'), got {x!r}")


def _complex(x, where: str) -> complex:
    if isinstance(x, bool):
        raise ConfigError(f"{where}: expected a number, got {x!r}")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, str):
        try:
            return complex(x.replace(" ", ""))
        except ValueError:
            pass
    if isinstance(x, list) and len(x) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(x[0], x[1])
    raise ConfigError(f"{where}: expected a complex number, got {x!r}")


def _poly(x, where: str) -> list:
    if not isinstance(x, list):
        x = [x]
    return [_complex(c, f"{where}[{i}]") for i, c in enumerate(x)]


def _parse_multiplier(spec, where: str) -> PCMultiplier:
    if not isinstance(spec, dict):
        return PCMultiplier.constant(_complex(spec, where))
    known = {"constant", "trig", "pieces", "indicator", "piecewise_constant",
             "piecewise_linear"}
    extra = set(spec) - known
    if extra:
        raise ConfigError(f"{where}: unknown keys {sorted(extra)}")
    out = PCMultiplier.zero()
    if "constant" in spec:
        out = out + PCMultiplier.constant(_complex(spec["constant"], f"{where}.constant"))
    if "trig" in spec:
        tr = spec["trig"]
        if not isinstance(tr, dict):
            raise ConfigError(f"{where}.trig: expected an object frequency -> coefficient")
        coeffs = {}
        for k, c in tr.items():
            try:
                kk = int(k)
            except ValueError:
                raise ConfigError(f"{where}.trig: frequency {k!r} is not an integer") from None
            coeffs[kk] = _complex(c, f"{where}.trig[{k}]")
        out = out + PCMultiplier.trig_poly(coeffs)
    if "pieces" in spec:
        arcs = []
        for i, pc in enumerate(spec["pieces"]):
            w = f"{where}.pieces[{i}]"
            if not isinstance(pc, dict) or "from" not in pc or "to" not in pc:
                raise ConfigError(f"{w}: expected an object with 'from' and 'to'")
            lo, hi = _angle(pc["from"], f"{w}.from"), _angle(pc["to"], f"{w}.to")
            if "terms" in pc:
                body = {int(k): np.array(_poly(v, f"{w}.terms[{k}]"))
                        for k, v in pc["terms"].items()}
            else:
                body = _poly(pc.get("poly", 0), f"{w}.poly")
            arcs.append((lo, hi, body))
        out = out + PCMultiplier.from_arcs(arcs)
    if "indicator" in spec:
        lo, hi = spec["indicator"]
        out = out + PCMultiplier.indicator(_angle(lo, f"{where}.indicator[0]"),
                                           _angle(hi, f"{where}.indicator[1]"))
    for key, ctor, pts in (("piecewise_constant", PCMultiplier.piecewise_constant, "breaks"),
                           ("piecewise_linear", PCMultiplier.piecewise_linear, "knots")):
        if key in spec:
            body = spec[key]
            angles = [_angle(x, f"{where}.{key}.{pts}") for x in body.get(pts, [])]
            vals = [_complex(v, f"{where}.{key}.values") for v in body.get("values", [])]
            out = out + ctor(angles, vals)
    return out


def _parse_expr(node, mults: dict, where: str) -> OperatorExpr:
    def get(name, w):
        if not isinstance(name, str):
            raise ConfigError(f"{w}: expected a multiplier name, got {name!r}")
        if name not in mults:
            raise ConfigError(f"{w}: undefined multiplier {name!r}")
        return mults[name]

    if node == "I":
        return identity()
    if node == "K":
        return compact()
    if isinstance(node, (int, float, list)) and not isinstance(node, bool):
        return _complex(node, where) * identity()
    if isinstance(node, dict) and len(node) == 1:
        (op, arg), = node.items()
        w = f"{where}.{op}"
        if op == "T":
            return T(get(arg, w))
        if op == "H":
            return H(get(arg, w))
        if op == "TH":
            if not isinstance(arg, list) or len(arg) != 2:
                raise ConfigError(f"{w}: expected [a, b]")
            return TH(get(arg[0], w), get(arg[1], w))
        if op in ("sum", "prod"):
            if not isinstance(arg, list) or not arg:
                raise ConfigError(f"{w}: expected a nonempty list")
            parts = [_parse_expr(x, mults, f"{w}[{i}]") for i, x in enumerate(arg)]
            acc = parts[0]
            for x in parts[1:]:
                acc = acc + x if op == "sum" else acc * x
            return acc
        if op == "scale":
            if not isinstance(arg, list) or len(arg) != 2:
                raise ConfigError(f"{w}: expected [coefficient, expression]")
            return _complex(arg[0], f"{w}[0]") * _parse_expr(arg[1], mults, f"{w}[1]")
        if op == "neg":
            return -_parse_expr(arg, mults, w)
    raise ConfigError(f"{where}: cannot parse expression {node!r}")


def _parse_beta(node, mults: dict) -> GeneratorMatrix:
    if not isinstance(node, list) or not node:
        raise ConfigError("beta: expected a nonempty list of rows")
    rows = []
    for i, row in enumerate(node):
        if not isinstance(row, list) or not row:
            raise ConfigError(f"beta[{i}]: expected a nonempty list of [a, b] pairs")
        out = []
        for j, pair in enumerate(row):
            w = f"beta[{i}][{j}]"
            if not isinstance(pair, list) or len(pair) != 2:
                raise ConfigError(f"{w}: expected [a, b]")
            for name in pair:
                if name not in mults:
                    raise ConfigError(f"{w}: undefined multiplier {name!r}")
            out.append(Generator(mults[pair[0]], mults[pair[1]]))
        rows.append(out)
    try:
        return GeneratorMatrix(rows)
    except ValueError as exc:
        raise ConfigError(f"beta: {exc}") from None


def parse_config(text: str) -> ProblemConfig:
    """Parse a JSON problem description (raises :class:`ConfigError`)."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError("top level must be an object")
    if "p" not in data:
        raise ConfigError("missing exponent 'p'")
    p = data["p"]
    if isinstance(p, bool) or not isinstance(p, (int, float)) or not 1.0 < p < math.inf:
        raise ConfigError(f"p must be a real number in (1, inf), got {p!r}")
    specs = data.get("multipliers", {})
    if not isinstance(specs, dict):
        raise ConfigError("multipliers: expected an object name -> multiplier")
    try:
        mults = {name: _parse_multiplier(s, f"multipliers.{name}") for name, s in specs.items()}
    except (ValueError, MultiplierOverflowError) as exc:
        raise ConfigError(str(exc)) from None
    beta = _parse_beta(data["beta"], mults) if "beta" in data else None
    if "expression" in data:
        expr = _parse_expr(data["expression"], mults, "expression")
    elif beta is not None:
        expr = el(beta)
    else:
        raise ConfigError("missing 'expression'")
    grid = data.get("grid", {})
    if not isinstance(grid, dict) or set(grid) - {"t", "lambda"}:
        raise ConfigError("grid: expected an object with keys 't' and/or 'lambda'")
    for k, v in grid.items():
        if isinstance(v, bool) or not isinstance(v, int) or v < 2:
            raise ConfigError(f"grid.{k}: expected an integer >= 2")
    return ProblemConfig(float(p), mults, expr, dict(grid), beta, data.get("expression"))


def load_config(path: str) -> ProblemConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)


# --- output helpers ---------------------------------------------------------------

def _fmt(x) -> str:
    x = float(x) + 0.0
    if math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return "%.17g" % x


def _emit(out, pairs):
    for k, v in pairs:
        out.write(f"{k}: {v}\n")


def _verdict_lines(v):
    th, lam = v.witness
    return [("fredholm", v.fredholm), ("min_abs_det", _fmt(v.min_abs_det)),
            ("witness_t_angle", _fmt(th)), ("witness_lambda", _fmt(lam)),
            ("witness_t", f"{math.cos(th):.12g}{math.sin(th):+.12g}j")]


_EXIT = {"yes": EXIT_OK, "no": EXIT_NOT_FREDHOLM, "unresolved": EXIT_UNRESOLVED}


# --- commands ---------------------------------------------------------------------

def cmd_check(cfg: ProblemConfig, out=None) -> int:
    out = out or sys.stdout
    v = is_fredholm(cfg.expression, cfg.p, cfg.resolution())
    _emit(out, _verdict_lines(v))
    return _EXIT[v.fredholm]


def cmd_index(cfg: ProblemConfig, doubled: bool = False, out=None) -> int:
    out = out or sys.stdout
    res = cfg.resolution()
    if doubled:
        g = cfg.expression.single_generator()
        if g is None:
            raise ConfigError("--doubled needs an expression of the form T(a) + H(b)")
        rep = index_matrix_op(doubled_matrix_of(g), cfg.p, res)
        lines = [("fredholm", "yes" if rep.fredholm else "no"), ("doubled", "true")]
        if rep.fredholm:
            lines += [("winding", rep.winding), ("index", rep.index),
                      ("min_modulus", _fmt(rep.min_modulus)), ("samples", rep.samples)]
        else:
            lines.append(("message", rep.message))
        _emit(out, lines)
        return EXIT_OK if rep.fredholm else EXIT_NOT_FREDHOLM
    rep = index_TH(cfg.expression, cfg.p, res)
    lines = _verdict_lines(rep.verdict) if rep.verdict is not None else []
    if rep.fredholm:
        lines += [("winding", rep.winding), ("index", rep.index),
                  ("min_modulus", _fmt(rep.min_modulus)), ("samples", rep.samples)]
        _emit(out, lines)
        return EXIT_OK
    if rep.message:
        lines.append(("message", rep.message))
    _emit(out, lines)
    code = _EXIT[rep.verdict.fredholm] if rep.verdict is not None else EXIT_NOT_FREDHOLM
    return code if code != EXIT_OK else EXIT_NOT_FREDHOLM


def curve_rows(curve) -> list:
    """CSV rows (as strings) of a traced curve, in traversal order."""
    rows = ["segment_index,segment_kind,t_angle,lambda,re_W,im_W"]
    for i, seg in enumerate(curve.segments):
        for th, lam, v in zip(seg.theta, seg.lam, seg.values):
            lam_s = "" if np.isnan(lam) else _fmt(lam)
            rows.append(f"{i},{seg.kind},{_fmt(th)},{lam_s},{_fmt(v.real)},{_fmt(v.imag)}")
    return rows


def winding_from_csv(path: str) -> int:
    """Winding number about 0 recomputed from an exported curve file."""
    data = np.genfromtxt(path, delimiter=",", skip_header=1, usecols=(4, 5), ndmin=2)
    v = data[:, 0] + 1j * data[:, 1]
    return int(round(float(np.sum(np.angle(v[1:] / v[:-1]))) / (2 * math.pi)))


def cmd_curve(cfg: ProblemConfig, path: str, out=None) -> int:
    out = out or sys.stdout
    res = cfg.resolution()
    v = is_fredholm(cfg.expression, cfg.p, res)
    if not v.is_yes:
        _emit(out, _verdict_lines(v))
        return _EXIT[v.fredholm]
    curve = build_W(cfg.expression, cfg.p, res, check_fredholm=False)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(curve_rows(curve)) + "\n")
    _emit(out, [("fredholm", "yes"), ("winding", winding(curve)), ("rows", curve.samples),
                ("out", path)])
    return EXIT_OK


def cmd_spectrum(cfg: ProblemConfig, path: str, out=None) -> int:
    out = out or sys.stdout
    res = cfg.resolution()
    pts = essential_spectrum_cloud(cfg.expression, cfg.p, t_points=res.t_points,
                                   lambda_points=res.lambda_points)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("re,im,t_angle,lambda\n")
        for z, th, lam in pts:
            fh.write(f"{_fmt(z.real)},{_fmt(z.imag)},{_fmt(th)},{_fmt(lam)}\n")
    _emit(out, [("points", len(pts)), ("out", path)])
    return EXIT_OK


def _oracle_suite(cfg: ProblemConfig):
    """Yield ``(name, status, detail)`` with status pass/fail/skip."""
    e, p, res = cfg.expression, cfg.p, cfg.resolution()
    if not e.generators():
        yield "scalar", "pass", "expression is a scalar multiple of the identity"
    g = e.single_generator()
    banded_t = g is not None and g.a.is_trig() and not g.b.trig and not g.b.has_pieces
    if banded_t:
        try:
            want = laurent_index_oracle(g.a)
        except (OracleError, ValueError) as exc:
            yield "laurent_index", "skip", str(exc)
        else:
            rep = index_TH(e, p, res)
            ok = rep.fredholm and rep.index == want
            yield "laurent_index", "pass" if ok else "fail", \
                f"oracle {want}, symbol calculus {rep.index}"
            try:
                ker, coker = laurent_kernel_oracle(g.a)
            except OracleError as exc:
                yield "section_kernel", "skip", str(exc)
            else:
                ok = ker - coker == want and min(ker, coker) == 0
                yield "section_kernel", "pass" if ok else "fail", \
                    f"kernel {ker}, cokernel {coker}, oracle index {want}"
    else:
        yield "laurent_index", "skip", "expression is not T(a) with a Laurent polynomial a"
    mults = [m for m in cfg.multipliers.values() if m.is_trig()]
    if len(mults) >= 1:
        a = mults[0]
        b = mults[1] if len(mults) > 1 else mults[0]
        w = a.bandwidth() + b.bandwidth()
        n = 4 * w + 16
        r1 = product_identity_check(a, b, n)
        r2 = product_identity_check(a, b, n, "hankel")
        tol = 1e-10 * max(1.0, sum(abs(c) for c in a.trig.values())
                          * sum(abs(c) for c in b.trig.values()))
        yield "product_identity", "pass" if r1 <= tol else "fail", f"residual {r1:.3e}"
        yield "hankel_identity", "pass" if r2 <= tol else "fail", f"residual {r2:.3e}"
    else:
        yield "product_identity", "skip", "no trigonometric polynomial multipliers"
    if cfg.beta is not None:
        rep = extension_equivalence_check(cfg.beta, p)
        yield "extension_equivalence", "pass" if rep.agree else "fail", \
            f"{rep.points} points, {len(rep.disagreements)} disagreements"
        i_el, i_ext = index_el_ext(cfg.beta, p, res)
        if i_el.fredholm and i_ext.fredholm:
            ok = i_el.index == i_ext.index
            yield "extension_index", "pass" if ok else "fail", \
                f"el {i_el.index}, ext {i_ext.index}"
        else:
            ok = i_el.fredholm == i_ext.fredholm
            yield "extension_index", "pass" if ok else "fail", \
                f"fredholm el {i_el.fredholm}, ext {i_ext.fredholm}"
    else:
        yield "extension_equivalence", "skip", "no 'beta' matrix in the config"


def cmd_oracle(cfg: ProblemConfig, out=None) -> int:
    out = out or sys.stdout
    failed = False
    for name, status, detail in _oracle_suite(cfg):
        out.write(f"{name}: {status} ({detail})\n")
        failed |= status == "fail"
    return EXIT_NOT_FREDHOLM if failed else EXIT_OK


# --- entry point ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="thindex",
        description="Fredholm property and index of Toeplitz plus Hankel operators on l^p.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, hlp in (("check", "decide the Fredholm property"),
                      ("index", "compute the Fredholm index"),
                      ("curve", "export the index curve as CSV"),
                      ("spectrum", "export the essential spectrum point cloud as CSV"),
                      ("oracle", "run the independent oracle checks")):
        sp = sub.add_parser(name, help=hlp)
        sp.add_argument("config", help="JSON problem description")
        sp.add_argument("--p", type=float, default=None, help="override the exponent p")
        sp.add_argument("--grid-t", type=int, default=None, help="samples per arc")
        sp.add_argument("--grid-lambda", type=int, default=None, help="samples per lambda sweep")
        if name == "index":
            sp.add_argument("--doubled", action="store_true",
                            help="index of the doubled 2x2 matrix operator")
        if name in ("curve", "spectrum"):
            sp.add_argument("--out", required=True, help="CSV output path")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.p is not None:
            if not 1.0 < args.p < math.inf:
                raise ConfigError(f"p must be in (1, inf), got {args.p}")
            cfg.p = args.p
        if args.grid_t is not None:
            cfg.grid["t"] = args.grid_t
        if args.grid_lambda is not None:
            cfg.grid["lambda"] = args.grid_lambda
        conjugate_exponent(cfg.p)
        if args.command == "check":
            return cmd_check(cfg)
        if args.command == "index":
            return cmd_index(cfg, doubled=args.doubled)
        if args.command == "curve":
            return cmd_curve(cfg, args.out)
        if args.command == "spectrum":
            return cmd_spectrum(cfg, args.out)
        return cmd_oracle(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NotFredholmError, JunctionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_FREDHOLM


if __name__ == "__main__":
    sys.exit(main())
