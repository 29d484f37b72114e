"""Command-line sweeps: ``classify``, ``unitarity``, ``endpoints``, ``accept``.

Tables go to ``--out`` (or stdout) as CSV with 17 significant digits, or as
a JSON object ``{config, rows, summary}``. Exit codes: 0 success, 1 failed
check, 2 configuration error.
"""
from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import acceptance, transforms
from .dynamics import (
    DP,
    PiTime,
    Polarization,
    QuadraticHamiltonian,
    classify_polarization,
    holomorphic_coordinate,
    kahler_density,
)
from .errors import KshError
from .gaussians import coherent_state, polarized_inner, schrodinger_inner
from .transforms import fourier_on_gaussian, ksh_conjugated, ksh_transform, segal_bargmann
from .verify import Divergent, quad_norm_polarized

__all__ = ["ConfigError", "RunConfig", "main", "cmd_classify", "cmd_unitarity", "cmd_endpoints", "cmd_accept"]


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name
        self.message = message


Time = Union[float, PiTime]
Row = Dict[str, Any]

_CONFIG_KEYS = {"hamiltonian", "t_grid", "y_grid", "tolerances", "output", "seed"}


@dataclass
class RunConfig:
    hamiltonian: Tuple[float, float, float] = (1.0, 0.0, -1.0)
    t_grid: Optional[Dict[str, Any]] = None
    y_grid: Dict[str, List[float]] = field(default_factory=lambda: {"p": [-2.0, 2.0, 5], "q": [-2.0, 2.0, 5]})
    tolerances: Dict[str, float] = field(default_factory=dict)
    output: Dict[str, Optional[str]] = field(default_factory=lambda: {"path": None, "format": "csv"})
    seed: int = 0

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config", "must be a JSON object")
        unknown = set(d) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown key")
        cfg = cls()
        if "hamiltonian" in d:
            cfg.hamiltonian = tuple(float(v) for v in d["hamiltonian"])
        if "t_grid" in d:
            cfg.t_grid = d["t_grid"]
        if "y_grid" in d:
            cfg.y_grid = d["y_grid"]
        if "tolerances" in d:
            cfg.tolerances = {k: float(v) for k, v in d["tolerances"].items()}
        if "output" in d:
            cfg.output = {"path": None, "format": "csv", **d["output"]}
        if "seed" in d:
            cfg.seed = int(d["seed"])
        cfg.validate()
        return cfg

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["hamiltonian"] = list(self.hamiltonian)
        return d

    def validate(self) -> None:
        if len(self.hamiltonian) != 3:
            raise ConfigError("hamiltonian", "expected (h11, h12, h22)")
        H = self.H
        if not H.disc() < 0:
            raise ConfigError("hamiltonian", f"{H} is not hyperbolic")
        if self.t_grid is not None:
            self.times()
        _check_axis("y_grid.p", self.y_grid.get("p"))
        _check_axis("y_grid.q", self.y_grid.get("q"))
        if set(self.y_grid) - {"p", "q"}:
            raise ConfigError("y_grid", "only 'p' and 'q' axes are allowed")
        for k in self.tolerances:
            if k not in acceptance.DEFAULT_TOLERANCES:
                raise ConfigError(f"tolerances.{k}", "unknown tolerance")
        if set(self.output) - {"path", "format"}:
            raise ConfigError("output", "only 'path' and 'format' are allowed")
        if self.output.get("format") not in ("csv", "json"):
            raise ConfigError("output.format", "must be csv or json")

    @property
    def H(self) -> QuadraticHamiltonian:
        return QuadraticHamiltonian(*self.hamiltonian)

    def times(self, default: Optional[Dict[str, Any]] = None) -> List[Time]:
        g = self.t_grid if self.t_grid is not None else default
        if g is None:
            raise ConfigError("t_grid", "no times given")
        keys = set(g)
        if keys == {"start", "stop", "count"}:
            n = int(g["count"])
            if n < 1:
                raise ConfigError("t_grid.count", "must be at least 1")
            if n > 1 and g["start"] == g["stop"]:
                raise ConfigError("t_grid", "degenerate range")
            return [float(t) for t in np.linspace(float(g["start"]), float(g["stop"]), n)]
        if keys == {"values"}:
            if not g["values"]:
                raise ConfigError("t_grid.values", "empty")
            return [float(t) for t in g["values"]]
        if keys == {"pi"}:
            if not g["pi"]:
                raise ConfigError("t_grid.pi", "empty")
            try:
                return [PiTime(int(k), int(d)) for k, d in g["pi"]]
            except (TypeError, ValueError) as e:
                raise ConfigError("t_grid.pi", str(e)) from None
        raise ConfigError("t_grid", "expected {start, stop, count}, {values} or {pi}")

    def ys(self) -> List[Tuple[float, float]]:
        ps = np.linspace(*self.y_grid["p"][:2], int(self.y_grid["p"][2]))
        qs = np.linspace(*self.y_grid["q"][:2], int(self.y_grid["q"][2]))
        return [(float(p), float(q)) for p in ps for q in qs]

    def tol(self) -> Dict[str, float]:
        return {**acceptance.DEFAULT_TOLERANCES, **self.tolerances}


def _check_axis(name: str, axis) -> None:
    if axis is None or len(axis) != 3:
        raise ConfigError(name, "expected [min, max, n]")
    lo, hi, n = axis
    if int(n) < 1:
        raise ConfigError(name, "n must be at least 1")
    if int(n) > 1 and not hi > lo:
        raise ConfigError(name, "degenerate range")


# ---------------------------------------------------------------- parsing


def _parse_range(name: str, text: str) -> List[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(name, f"expected min:max:n, got {text!r}")
    try:
        return [float(parts[0]), float(parts[1]), int(parts[2])]
    except ValueError:
        raise ConfigError(name, f"not numeric: {text!r}") from None


def _parse_pi(text: str) -> List[List[int]]:
    out = []
    for item in text.split(","):
        try:
            r = Fraction(item.strip())
        except (ValueError, ZeroDivisionError):
            raise ConfigError("t_pi", f"expected k/d, got {item!r}") from None
        out.append([r.numerator, r.denominator])
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    base: Dict[str, Any] = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                base = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError("config", str(e)) from None
    cfg = RunConfig.from_dict(base)

    hs = [args.h11, args.h12, args.h22]
    if args.alpha is not None:
        if not args.alpha > 0:
            raise ConfigError("alpha", "must be positive")
        canon = (1.0, 0.0, -args.alpha**2)
        given = [v for v in hs if v is not None]
        if given and any(v is not None and not math.isclose(v, c) for v, c in zip(hs, canon)):
            raise ConfigError("alpha", "inconsistent with --h11/--h12/--h22")
        cfg.hamiltonian = canon
    elif any(v is not None for v in hs):
        cfg.hamiltonian = tuple(v if v is not None else c for v, c in zip(hs, cfg.hamiltonian))

    time_flags = [f for f in ("t", "t_grid", "t_pi") if getattr(args, f) is not None]
    if len(time_flags) > 1:
        raise ConfigError(time_flags[1], "--t, --t-grid and --t-pi are exclusive")
    if args.t is not None:
        cfg.t_grid = {"values": [args.t]}
    elif args.t_grid is not None:
        s, e, n = _parse_range("t_grid", args.t_grid)
        cfg.t_grid = {"start": s, "stop": e, "count": n}
    elif args.t_pi is not None:
        cfg.t_grid = {"pi": _parse_pi(args.t_pi)}

    if args.y_grid is not None:
        axes = args.y_grid.split(",")
        if len(axes) != 2:
            raise ConfigError("y_grid", 'expected "pmin:pmax:n,qmin:qmax:n"')
        cfg.y_grid = {"p": _parse_range("y_grid.p", axes[0]), "q": _parse_range("y_grid.q", axes[1])}
    for item in args.tol or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise ConfigError("tol", f"expected NAME=VALUE, got {item!r}")
        try:
            cfg.tolerances[name] = float(value)
        except ValueError:
            raise ConfigError(f"tolerances.{name}", f"not a number: {value!r}") from None
    if args.out is not None:
        cfg.output["path"] = args.out
    if args.format is not None:
        cfg.output["format"] = args.format
    if args.seed is not None:
        cfg.seed = args.seed
    cfg.validate()
    return cfg


# ---------------------------------------------------------------- output


def _fmt(v: Any) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(v: Any) -> Any:
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    return v


def emit(cfg: RunConfig, rows: List[Row], summary: Dict[str, Any], stream=None) -> None:
    fmt = cfg.output.get("format", "csv")
    if fmt == "json":
        text = json.dumps(
            {
                "config": cfg.to_dict(),
                "rows": [{k: _jsonable(v) for k, v in r.items()} for r in rows],
                "summary": {k: _jsonable(v) for k, v in summary.items()},
            },
            indent=2,
        ) + "\n"
    else:
        buf = io.StringIO()
        if rows:
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(list(rows[0]))
            for r in rows:
                w.writerow([_fmt(v) for v in r.values()])
        text = buf.getvalue()
    path = cfg.output.get("path")
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        (stream or sys.stdout).write(text)


def _time_fields(t: Time, alpha: float) -> Dict[str, Any]:
    if isinstance(t, PiTime):
        return {"t": t.value(alpha), "t_pi": f"{t.k}/{t.d}"}
    return {"t": float(t), "t_pi": ""}


# ---------------------------------------------------------------- commands


def cmd_classify(cfg: RunConfig) -> Tuple[List[Row], Dict[str, Any], int]:
    """Polarization type, density and holomorphic coordinate along the t-grid."""
    H = cfg.H
    alpha = H.alpha()
    rows = []
    for t in cfg.times({"start": 0.0, "stop": math.pi / alpha, "count": 9}):
        c = classify_polarization(H, t)
        w = holomorphic_coordinate(H, t)
        a, b = complex(w.a), complex(w.b)
        direction = "" if c.direction is None else f"{_fmt(float(c.direction[0]))};{_fmt(float(c.direction[1]))}"
        rows.append(
            {
                **_time_fields(t, alpha),
                "class": c.tag.value,
                "direction": direction,
                "kahler_density": kahler_density(H, t),
                "w_a_re": a.real,
                "w_a_im": a.imag,
                "w_b_re": b.real,
                "w_b_im": b.imag,
            }
        )
    counts: Dict[str, int] = {}
    for r in rows:
        counts[r["class"]] = counts.get(r["class"], 0) + 1
    return rows, {"rows": len(rows), "counts": json.dumps(counts, sort_keys=True)}, 0


def _is_canonical(H: QuadraticHamiltonian) -> bool:
    return H.h11 == 1 and H.h12 == 0


def _image(H: QuadraticHamiltonian, t: Time, Y):
    if _is_canonical(H):
        return ksh_transform(H.alpha(), t, Y)
    return ksh_conjugated(H, t, Y)


def cmd_unitarity(cfg: RunConfig) -> Tuple[List[Row], Dict[str, Any], int]:
    """Closed-form and quadrature norms of KSH images, plus the Gram defect per time."""
    H = cfg.H
    alpha = H.alpha()
    tol = cfg.tol()
    Ys = cfg.ys()
    psis = [coherent_state(*Y) for Y in Ys]
    S = np.array([[schrodinger_inner(a, b) for b in psis] for a in psis])
    rows: List[Row] = []
    failures = 0
    for t in cfg.times({"values": [math.pi / (4 * alpha)]}):
        cls = classify_polarization(H, t).tag
        if cls == Polarization.ANTI_KAHLER:
            for Y in Ys:
                rows.append({**_time_fields(t, alpha), "P": Y[0], "Q": Y[1], "closed_form_norm": math.nan,
                             "quadrature_norm": math.nan, "gram_defect": math.nan, "status": "divergent"})
            continue
        try:
            imgs = [_image(H, t, Y) for Y in Ys]
        except KshError:
            for Y in Ys:
                rows.append({**_time_fields(t, alpha), "P": Y[0], "Q": Y[1], "closed_form_norm": math.nan,
                             "quadrature_norm": math.nan, "gram_defect": math.nan, "status": "singular"})
            continue
        U = np.array([[polarized_inner(a, b) for b in imgs] for a in imgs])
        gram = float(np.max(np.abs(S - U)))
        for Y, F in zip(Ys, imgs):
            closed = polarized_inner(F, F).real
            qn = quad_norm_polarized(F)
            quad = math.nan if isinstance(qn, Divergent) else qn
            ok = (
                abs(closed - 1) <= tol["closed_norm"]
                and abs(quad - 1) <= tol["quad_norm"]
                and gram <= tol["gram"]
            )
            failures += not ok
            rows.append({**_time_fields(t, alpha), "P": Y[0], "Q": Y[1], "closed_form_norm": closed,
                         "quadrature_norm": quad, "gram_defect": gram, "status": "ok" if ok else "fail"})
    summary = {"rows": len(rows), "failures": failures,
               "divergent": sum(r["status"] == "divergent" for r in rows)}
    return rows, summary, 1 if failures else 0


def cmd_endpoints(cfg: RunConfig) -> Tuple[List[Row], Dict[str, Any], int]:
    """Fourier endpoint at ``t = pi / (2 alpha)`` and SB equivalence at the configured times.

    SB times map to ``t_tilde = tan(alpha t) / alpha``. Only the canonical ``H = 1/2 (p^2 - alpha^2 x^2)`` is supported.
    """
    H = cfg.H
    if not _is_canonical(H):
        raise ConfigError("hamiltonian", "endpoints needs h11 = 1, h12 = 0 (use --alpha)")
    alpha = H.alpha()
    tol = cfg.tol()
    grid = np.linspace(-3.0, 3.0, 11)
    x, p = np.meshgrid(grid, grid, indexing="ij")
    rows: List[Row] = []
    for Y in cfg.ys():
        U = ksh_transform(alpha, PiTime(1, 2), Y).in_frame(DP)
        Fpsi = fourier_on_gaussian(coherent_state(*Y))
        dev = float(np.max(np.abs(U(p, x) - cmath.sqrt(1j) * np.exp(-1j * p * x) * Fpsi(p))))
        rows.append({"check": "fourier", **_time_fields(PiTime(1, 2), alpha), "t_tilde": math.inf,
                     "P": Y[0], "Q": Y[1], "deviation": dev, "constant": math.nan,
                     "constant_dev": math.nan, "status": _status(dev, tol["fourier"])})

    sb_default = {"pi": [[1, 8], [1, 6], [1, 4], [1, 3]]}
    for t in cfg.times(sb_default):
        tf = t.value(alpha) if isinstance(t, PiTime) else float(t)
        t_tilde = math.tan(alpha * tf) / alpha
        for Y in cfg.ys():
            S = segal_bargmann(t_tilde, Y)
            U = ksh_transform(alpha, t, Y)
            dev = float(np.max(np.abs(S(p, x) - U.in_frame(S.frame)(p, x))))
            const = complex(np.mean(S(p, x) / U(p, x)))
            cdev = abs(const - math.sqrt(math.cos(alpha * tf)))
            rows.append({"check": "sb", **_time_fields(t, alpha), "t_tilde": t_tilde, "P": Y[0], "Q": Y[1],
                         "deviation": dev, "constant": const.real, "constant_dev": cdev,
                         "status": _status(max(dev, cdev), tol["sb"])})
    failures = sum(r["status"] == "fail" for r in rows)
    summary = {
        "fourier_max_dev": max((r["deviation"] for r in rows if r["check"] == "fourier"), default=math.nan),
        "sb_max_dev": max((r["deviation"] for r in rows if r["check"] == "sb"), default=math.nan),
        "sb_constant_max_dev": max((r["constant_dev"] for r in rows if r["check"] == "sb"), default=math.nan),
        "failures": failures,
    }
    return rows, summary, 1 if failures else 0


def _status(dev: float, tol: float) -> str:
    if math.isnan(dev):
        return "skipped"
    return "ok" if dev <= tol else "fail"


def _flipped_width(alpha: float, sin_tp: float, cos_tp: float) -> float:
    return -alpha * cos_tp / sin_tp


def cmd_accept(cfg: RunConfig, mutate: bool = False, stream=None) -> Tuple[List[Row], Dict[str, Any], int]:
    """Run every acceptance criterion; ``mutate`` flips the sign of the closed-form width."""
    stream = stream or sys.stdout
    original = transforms._closed_form_width
    if mutate:
        transforms._closed_form_width = _flipped_width
    try:
        results = []
        for name in acceptance.CRITERIA:
            r = acceptance.run_one(name, cfg.seed, cfg.tolerances)
            print(r.line(), file=stream, flush=True)
            results.append(r)
    finally:
        transforms._closed_form_width = original
    rows = [{"criterion": r.id, "passed": r.passed, **{f"{k}": v for k, v in r.measured.items()}} for r in results]
    passed = sum(r.passed for r in results)
    summary = {"passed": passed, "failed": len(results) - passed}
    return rows, summary, 0 if passed == len(results) else 1


# ---------------------------------------------------------------- entry point


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--h11", type=float)
    common.add_argument("--h12", type=float)
    common.add_argument("--h22", type=float)
    common.add_argument("--alpha", type=float, help="shorthand for H = (p^2 - alpha^2 x^2)/2")
    common.add_argument("--t", type=float)
    common.add_argument("--t-grid", dest="t_grid", help="start:stop:count")
    common.add_argument("--t-pi", dest="t_pi", help="comma list of k/d, meaning alpha t = k pi / d")
    common.add_argument("--y-grid", dest="y_grid", help="pmin:pmax:n,qmin:qmax:n")
    common.add_argument("--out")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--tol", action="append", metavar="NAME=VALUE")
    common.add_argument("--seed", type=int)

    ap = argparse.ArgumentParser(prog="kshflow", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="polarization phase diagram")
    sub.add_parser("unitarity", parents=[common], help="norms and Gram defects of KSH images")
    sub.add_parser("endpoints", parents=[common], help="Fourier endpoint and Segal-Bargmann checks")
    acc = sub.add_parser("accept", parents=[common], help="run the acceptance suite")
    acc.add_argument("--list", action="store_true", help="print criterion ids and exit")
    acc.add_argument("--mutate", action="store_true", help="inject a sign error in the closed-form width")
    return ap


def _attach_values(argv: Sequence[str]) -> List[str]:
    """Glue range flags to their value so ``--y-grid -2:2:5,...`` parses."""
    out: List[str] = []
    it = iter(argv)
    for a in it:
        if a in ("--y-grid", "--t-grid", "--t-pi"):
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = _parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = ap.parse_args(_attach_values(argv))
    except SystemExit as e:
        return int(e.code or 0) and 2
    if args.command == "accept" and args.list:
        for name in acceptance.CRITERIA:
            print(name)
        return 0
    try:
        cfg = build_config(args)
        if args.command == "classify":
            rows, summary, code = cmd_classify(cfg)
        elif args.command == "unitarity":
            rows, summary, code = cmd_unitarity(cfg)
        elif args.command == "endpoints":
            rows, summary, code = cmd_endpoints(cfg)
        else:
            # Criterion lines go to stdout unless stdout carries the JSON table.
            to_stdout = cfg.output.get("path") or cfg.output.get("format") == "csv"
            rows, summary, code = cmd_accept(cfg, args.mutate, sys.stdout if to_stdout else sys.stderr)
            if not cfg.output.get("path") and cfg.output.get("format") == "csv":
                return code
    except ConfigError as e:
        print(f"kshflow: configuration error in {e.field}: {e.message}", file=sys.stderr)
        return 2
    emit(cfg, rows, summary)
    return code


if __name__ == "__main__":
    sys.exit(main())
