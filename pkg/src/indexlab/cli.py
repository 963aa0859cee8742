"""Command-line harness: kernels, transforms, round trips and identity suites.

Every subcommand prints a table (CSV with a header row, or JSON) to stdout
or to ``--out``. Exit codes: 0 success, 1 a check did not pass, 2 the
configuration does not resolve, 3 a numerical engine failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels as K
from . import transforms as T
from .complexfn import bessel_k, log_gamma
from .errors import IndexLabError, RegionError
from .mellin import catalog, catalog_entry
from .quad import DEFAULT_CONTROL, QuadratureControl

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

_KEYS = ("family", "function", "c0", "gamma", "grid", "abs_tol", "rel_tol", "format", "out")


def _message(exc):
    # KeyError's str() adds quotes around the message
    return str(exc.args[0]) if exc.args else str(exc)


class ConfigError(ValueError):
    """Configuration that does not resolve (exit code 2)."""


@dataclass
class RunConfig:
    family: str = "exp-kl"
    function: str = "bessel-k0"
    c0: float = 0.5
    gamma: float | None = None
    grid: tuple = (0.2, 0.5, 1.0, 2.0, 5.0)
    control: QuadratureControl = field(default_factory=lambda: DEFAULT_CONTROL)
    output_format: str = "csv"
    output_path: str | None = None

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g.size == 0:
            raise ConfigError("grid is empty")
        if np.any(g <= 0) or np.any(np.diff(g) <= 0):
            raise ConfigError("grid must be strictly positive and strictly increasing")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.output_format!r}")

    def resolve_family(self):
        try:
            return K.family_from_name(self.family)
        except (KeyError, ValueError) as exc:
            raise ConfigError(_message(exc)) from exc

    def resolve_function(self):
        try:
            return catalog_entry(self.function, self.c0)
        except (KeyError, ValueError) as exc:
            raise ConfigError(_message(exc)) from exc


def read_config_file(path):
    """key = value lines; '#' starts a comment; keys may use - or _."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _KEYS:
            raise ConfigError(f"{path}:{num}: expected one of {', '.join(_KEYS)} = value")
        out[key] = val.strip()
    return out


def _parse_grid(text):
    try:
        return tuple(float(v) for v in str(text).split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}") from exc


def _parse_complex(text):
    try:
        return complex(str(text).replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"bad complex number {text!r}") from exc


def build_config(args) -> RunConfig:
    """Merge the optional config file with the flags (flags win)."""
    merged = read_config_file(args.config) if args.config else {}
    for key in _KEYS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    try:
        control = DEFAULT_CONTROL
        if "abs_tol" in merged:
            control = replace(control, abs_tol=float(merged["abs_tol"]))
        if "rel_tol" in merged:
            control = replace(control, rel_tol=float(merged["rel_tol"]))
        kwargs = dict(control=control)
        for key in ("family", "function"):
            if key in merged:
                kwargs[key] = str(merged[key])
        if "c0" in merged:
            kwargs["c0"] = float(merged["c0"])
        if merged.get("gamma") not in (None, ""):
            kwargs["gamma"] = float(merged["gamma"])
        if "grid" in merged:
            kwargs["grid"] = _parse_grid(merged["grid"])
        if "format" in merged:
            kwargs["output_format"] = str(merged["format"])
        if "out" in merged:
            kwargs["output_path"] = str(merged["out"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(**kwargs)


# ---------------------------------------------------------------------------
# concurrency and output
# ---------------------------------------------------------------------------

def thread_cap():
    raw = os.environ.get("INDEXLAB_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def map_grid(fn, points):
    """fn over each point, concurrently up to INDEXLAB_THREADS; results in grid order."""
    points = list(points)
    workers = min(thread_cap(), len(points))
    if workers <= 1:
        return [fn(p) for p in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, points))


def _num(v):
    return repr(float(v))


def render(rows, extra, fmt, payload=None):
    """CSV (x, re, im, error, *extra) or JSON text."""
    if fmt == "json":
        body = payload if payload is not None else [
            dict(zip(("x", "re", "im", "error") + tuple(extra), r)) for r in rows
        ]
        return json.dumps(body, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(("x", "re", "im", "error") + tuple(extra))
    for r in rows:
        w.writerow([_num(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def emit(text, path):
    """Write to ``path`` through a temporary file and a rename, or to stdout."""
    if not path:
        sys.stdout.write(text)
        return
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".indexlab-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _rel(a, b):
    return abs(a - b) / abs(b) if b != 0 else abs(a - b)


def cmd_kernel(cfg: RunConfig, z, representation="integral"):
    fam = cfg.resolve_family()

    def row(x):
        if representation == "inverse":
            val = complex(K.inverse_kernel(fam, z, x, "series"))
            try:
                other = complex(K.inverse_kernel(fam, z, x, "closed"))
                err = _rel(val, other)
            except ValueError:
                err = math.nan
            return (x, val.real, val.imag, err)
        integral = complex(K.forward_kernel(fam, z, x, cfg.control))
        err = math.nan
        val = integral
        if K.has_closed_form(fam):
            closed = complex(K.forward_kernel_closed(fam, z, x, cfg.control))
            err = _rel(integral, closed)
            if representation == "closed":
                val = closed
        return (x, val.real, val.imag, err)

    return map_grid(row, cfg.grid), ()


def cmd_forward(cfg: RunConfig, taus):
    fam = cfg.resolve_family()
    f = cfg.resolve_function().image
    gamma = cfg.gamma if cfg.gamma is not None else T.default_gamma(fam, cfg.c0)

    def row(t):
        z = complex(gamma, t)
        b = complex(T.forward_barnes(fam, f, z, cfg.control))
        d = complex(T.forward_direct(fam, f, z, cfg.control))
        return (t, b.real, b.imag, _rel(d, b), d.real, d.imag)

    return map_grid(row, taus), ("direct_re", "direct_im")


def cmd_inverse(cfg: RunConfig):
    fam = cfg.resolve_family()
    entry = cfg.resolve_function()
    gamma = cfg.gamma if cfg.gamma is not None else T.default_gamma(fam, cfg.c0)
    Ff = T.forward_line(fam, entry.image, gamma, "barnes",
                        replace(cfg.control, abs_tol=1e-300, rel_tol=0.01 * cfg.control.rel_tol))
    xs = np.asarray(cfg.grid)
    chunks = np.array_split(xs, min(thread_cap(), len(xs)))
    parts = map_grid(lambda c: np.atleast_1d(T.invert(fam, Ff, c, cfg.control)), chunks)
    rec = np.concatenate(parts)
    ref = np.asarray(entry.point_function(xs), dtype=complex)
    return [(float(x), r.real, r.imag, _rel(r, w)) for x, r, w in zip(xs, rec, ref)], ()


def cmd_roundtrip(cfg: RunConfig):
    fam = cfg.resolve_family()
    entry = cfg.resolve_function()
    rep = T.round_trip(fam, entry, cfg.gamma, cfg.grid, cfg.control)
    rows = [(x, complex(r).real, complex(r).imag, e)
            for (x, e), r in zip(rep.per_point, rep.reconstructed)]
    return rows, rep


# identity suites -----------------------------------------------------------

def _equal(case, lhs, rhs, tol):
    lhs, rhs = complex(lhs), complex(rhs)
    err = _rel(lhs, rhs)
    return case, lhs, rhs, err, err <= tol


def _suite_gamma():
    for m, s in ((2, 0.3 + 1.7j), (3, 0.3 + 1.7j), (4, 1.1 - 0.6j), (2, 4.2 + 9.0j)):
        lhs = np.exp(log_gamma(m * s))
        logr = ((m * s - 0.5) * math.log(m) + 0.5 * (1 - m) * math.log(2 * math.pi)
                + sum(complex(log_gamma(s + k / m)) for k in range(m)))
        yield _equal(f"m={m} s={s}", lhs, np.exp(logr), 1e-10)


def _suite_bessel_bound():
    # worst point of |K_{i tau}(x)| <= e^{-delta|tau|} K_0(x cos delta) over tau in [-10, 10];
    # the error column is the excess over the bound (0 when it holds)
    tau = np.linspace(-10.0, 10.0, 41)
    for delta in (0.0, math.pi / 6, math.pi / 3, 1.4):
        for x in (0.5, 1.0, 2.0):
            k = np.abs(bessel_k(1j * tau, x))
            bound = np.exp(-delta * np.abs(tau)) * bessel_k(0.0, x * math.cos(delta)).real
            i = int(np.argmax(k / bound))
            excess = max(0.0, float(k[i] - bound[i]))
            yield (f"delta={delta:.4g} x={x:g}", complex(k[i]), complex(bound[i]), excess,
                   bool(np.all(k <= bound + 1e-12)))


def _suite_index_integral():
    for x in (1.0, 2.0):
        for y in (0.5, 1.0, 2.0):
            lhs, rhs = T.index_identity(x, y)
            yield _equal(f"x={x:g} y={y:g}", lhs, rhs, 1e-6)


def _suite_rho():
    for fam in (K.exp_kl(), K.power_exp(2), K.power_exp(3), K.one_plus_t(2), K.inc_gamma(),
                K.one_plus_t2(1)):
        lo, hi = K.rho_strip(fam)
        mid = 0.5 * (lo + min(hi, 3.0))
        for s in (1.0 if lo < 1.0 < hi else mid, mid + 1.3j):
            yield _equal(f"{fam.name} s={s}", K.rho_quadrature(fam, s), K.rho(fam, s), 1e-9)


def _suite_parseval():
    f = catalog_entry("bessel-k0", 0.5).image
    tau = np.array([0.0, 0.5, 1.5, 3.0])
    contour = np.asarray(T.mkl_forward(f, tau, "contour"))
    direct = np.asarray(T.mkl_forward(f, tau, "direct"))
    paired = np.asarray(T.mkl_h_pairing(f, tau))
    for t, c, d, p in zip(tau, contour, direct, paired):
        yield _equal(f"contour-vs-direct tau={t:g}", c, d, 1e-7)
        yield _equal(f"contour-vs-pairing tau={t:g}", c, p, 1e-7)


SUITES = {
    "gamma": _suite_gamma,
    "bessel-bound": _suite_bessel_bound,
    "index-integral": _suite_index_integral,
    "rho": _suite_rho,
    "parseval-431": _suite_parseval,
}


def cmd_identity(suite):
    """Rows (case, Re lhs, Im lhs, error, Re rhs, Im rhs, pass/fail) and the overall verdict."""
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; known: {', '.join(SUITES)}")
    rows, ok = [], True
    for case, lhs, rhs, err, passed in SUITES[suite]():
        ok = ok and passed
        rows.append((case, lhs.real, lhs.imag, err, rhs.real, rhs.imag,
                     "pass" if passed else "fail"))
    return rows, ("rhs_re", "rhs_im", "status"), ok


def cmd_catalog(cfg: RunConfig):
    rows = []
    for e in catalog(cfg.c0, verify=False):
        err = e.verify()
        lo, hi = e.valid_abscissa_range
        rows.append((e.name, cfg.c0, 0.0, err, lo, hi, str(e.image.decay_class)))
    return rows, ("c0_lo", "c0_hi", "decay_class")


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _common(p):
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--family")
    p.add_argument("--function")
    p.add_argument("--c0", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--grid", help="comma-separated, strictly increasing, positive")
    p.add_argument("--abs-tol", dest="abs_tol", type=float)
    p.add_argument("--rel-tol", dest="rel_tol", type=float)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out")


def build_parser():
    parser = argparse.ArgumentParser(prog="indexlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="forward or inverse kernel on the grid")
    _common(p)
    p.add_argument("--z", required=True)
    p.add_argument("--representation", choices=("integral", "closed", "inverse"),
                   default="integral")

    p = sub.add_parser("forward", help="(Ff)(gamma + i tau), both evaluation paths")
    _common(p)
    p.add_argument("--tau", default="0,1,2")

    p = sub.add_parser("inverse", help="inversion formula applied to the forward image")
    _common(p)

    p = sub.add_parser("roundtrip", help="forward, invert, compare with the closed form")
    _common(p)
    p.add_argument("--threshold", type=float, default=1e-6)

    p = sub.add_parser("identity", help="identity and inequality suites")
    _common(p)
    p.add_argument("suite", choices=sorted(SUITES))

    p = sub.add_parser("catalog", help="catalog functions with their self-check error")
    _common(p)
    return parser


def run(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        status = EXIT_OK
        payload = None
        if args.command == "kernel":
            rows, extra = cmd_kernel(cfg, _parse_complex(args.z), args.representation)
        elif args.command == "forward":
            rows, extra = cmd_forward(cfg, [float(v) for v in args.tau.split(",")])
        elif args.command == "inverse":
            rows, extra = cmd_inverse(cfg)
        elif args.command == "roundtrip":
            rows, rep = cmd_roundtrip(cfg)
            extra, payload = (), rep.as_dict()
            if not rep.max_rel_error < args.threshold:
                status = EXIT_FAIL
        elif args.command == "identity":
            rows, extra, ok = cmd_identity(args.suite)
            status = EXIT_OK if ok else EXIT_FAIL
        else:
            rows, extra = cmd_catalog(cfg)
        emit(render(rows, extra, cfg.output_format, payload), cfg.output_path)
        return status
    except (ConfigError, RegionError) as exc:
        print(f"indexlab: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IndexLabError as exc:
        diag = getattr(exc, "diagnostic", "")
        print(f"indexlab: {exc}" + (f"\n  {diag}" if diag else ""), file=sys.stderr)
        return EXIT_NUMERIC


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
