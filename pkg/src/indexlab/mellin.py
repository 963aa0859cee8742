"""Functions on (0, inf) carried by their Mellin images on a vertical line.

A ``MellinImage`` holds f*(s) on Re s = c0. Point values, weighted L1
norms and membership in the weighted classes are all derived from the
image; nothing here ever needs f itself.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .complexfn import _gamma, _lgamma, _log_abs_sinpi, bessel_k, log_abs_gamma
from .errors import DivergenceWarning, MembershipError, StripError
from .quad import (
    DEFAULT_CONTROL,
    QuadratureControl,
    VerticalLine,
    integrate_interval,
    integrate_vertical_line,
)

__all__ = [
    "MellinImage",
    "CatalogEntry",
    "MembershipReport",
    "zero_image",
    "eval_function",
    "weighted_norm",
    "membership_estimate",
    "require_membership",
    "catalog",
    "catalog_entry",
]

_SAMPLE_T = (0.0, 1.0, -1.0, 5.0, -5.0)


def _sign(v):
    return (v > 0) - (v < 0)


def admissible(c1, c2):
    """Whether the decay class (c1, c2) is admissible: 2 sgn c1 + sgn c2 >= 0."""
    return 2 * _sign(c1) + _sign(c2) >= 0


@dataclass(frozen=True)
class MellinImage:
    """Mellin image f*(s) represented on the line Re s = abscissa.

    ``image`` must accept an array of complex s and return an array of the
    same shape. ``log_abs`` optionally gives log|f*(s)| directly; the
    membership probes use it so that the tail is not lost to underflow.
    ``strip`` is an open interval of Re s on which f* is known to be
    analytic and to decay along vertical lines; point evaluation may move
    its contour anywhere inside it.
    """

    image: Callable
    abscissa: float
    decay_class: tuple = (0.0, 0.0)
    label: str = ""
    log_abs: Callable | None = field(default=None, compare=False)
    strip: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        c1, c2 = self.decay_class
        if not admissible(c1, c2):
            raise MembershipError(f"decay class {self.decay_class} is not admissible")
        s = self.abscissa + 1j * np.array(_SAMPLE_T)
        if not np.all(np.isfinite(self(s))):
            raise ValueError(f"image {self.label!r} is not finite on Re s = {self.abscissa}")

    def __call__(self, s):
        s = np.asarray(s, dtype=complex)
        with np.errstate(all="ignore"):
            out = np.asarray(self.image(s), dtype=complex)
        return np.broadcast_to(out, s.shape)

    def log_modulus(self, s):
        s = np.asarray(s, dtype=complex)
        if self.log_abs is not None:
            return np.broadcast_to(np.asarray(self.log_abs(s), dtype=float), s.shape)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self(s)))

    @property
    def line(self):
        return VerticalLine(self.abscissa)

    def scaled(self, alpha):
        """The image of alpha * f."""
        alpha = complex(alpha)
        la = self.log_abs
        return MellinImage(
            lambda s: alpha * self.image(s),
            self.abscissa,
            self.decay_class,
            f"{alpha}*{self.label}",
            None if la is None or alpha == 0 else (lambda s: la(s) + math.log(abs(alpha))),
            self.strip,
        )

    def plus(self, other: "MellinImage"):
        """The image of f + g (both must live on the same line)."""
        if other.abscissa != self.abscissa:
            raise StripError("images on different lines cannot be added")
        return MellinImage(
            lambda s: self.image(s) + other.image(s),
            self.abscissa,
            (min(self.decay_class[0], other.decay_class[0]),
             min(self.decay_class[1], other.decay_class[1])),
            f"{self.label}+{other.label}",
            strip=_meet(self.strip, other.strip),
        )

    def is_zero(self):
        return self.label == "zero"


def _meet(a, b):
    if a is None or b is None:
        return None
    return (max(a[0], b[0]), min(a[1], b[1]))


def zero_image(abscissa=0.5):
    """Image of the function f = 0."""
    return MellinImage(
        lambda s: np.zeros(np.shape(s), dtype=complex),
        abscissa,
        (0.0, 0.0),
        "zero",
        lambda s: np.full(np.shape(s), -np.inf),
    )


def _contour_for(f: MellinImage, logx):
    """Abscissa and pole clearance for evaluating f at log x.

    Inside the analytic strip the line is moved towards the saddle of
    x^{-s} f*(s) on the real axis, which keeps the integrand at the size
    of f(x) instead of x^{-c0} times the size of f*.
    """
    c0 = f.abscissa
    if f.strip is None or abs(logx) <= 1.0:
        return c0, None
    lo, hi = f.strip
    a = max(lo + _EDGE, c0 - _MAX_SHIFT)
    b = min(hi - _EDGE, c0 + _MAX_SHIFT)
    if not a < b:
        return c0, None
    sig = np.unique(np.concatenate([np.arange(a, b, _SHIFT_STEP), [c0]]))
    with np.errstate(all="ignore"):
        phi = -sig * logx + f.log_modulus(sig.astype(complex))
    phi = np.where(np.isfinite(phi), phi, np.inf)
    best = float(sig[int(np.argmin(phi))])
    if best == c0:
        return c0, None
    return best, min(best - lo, hi - best)


_EDGE = 0.25
_MAX_SHIFT = 40.0
_SHIFT_STEP = 0.25


def eval_function(f: MellinImage, x, control: QuadratureControl = DEFAULT_CONTROL):
    """f(x) from the inverse Mellin integral along Re s = c0.

    ``x`` may be a scalar or an array; arrays are integrated together as
    one batch. For |log x| large the integrand x^{-s} f*(s) is both large
    (x^{-c0}) and fast-turning, so such points are integrated separately
    with a roundoff floor that grows with |log x|. When the image carries
    an analytic strip those points also move to a better line.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise ValueError("x must be positive")
    logx = np.log(xa).ravel()
    out = np.empty(logx.shape, dtype=complex)
    lines = [_contour_for(f, lx) for lx in logx]
    groups = {}
    for i, (c, clr) in enumerate(lines):
        groups.setdefault((c, clr), []).append(i)
    far = np.abs(logx) > _FAR_LOG
    for (c, clr), idx in groups.items():
        idx = np.array(idx)
        line = f.line if clr is None else VerticalLine(c, clr)
        for sel in (idx[~far[idx]], idx[far[idx]]):
            if not len(sel):
                continue
            lx = logx[sel]
            ctl = control
            if far[sel[0]]:
                ctl = replace(control, noise_factor=control.noise_factor
                              * (1.0 + float(np.max(np.abs(lx)))))

            def integrand(s, lx=lx):
                return f(s)[:, None] * np.exp(-s[:, None] * lx[None, :])

            out[sel] = np.asarray(integrate_vertical_line(integrand, line, ctl)).ravel()
    out = out.reshape(xa.shape)
    return out if out.ndim else complex(out)


_FAR_LOG = 10.0


def _log_weight(f, t, c1, c2):
    s = f.abscissa + 1j * np.asarray(t, dtype=float)
    r = np.abs(s)
    with np.errstate(divide="ignore"):
        return np.pi * c1 * r + c2 * np.log(r) + f.log_modulus(s)


def weighted_norm(f: MellinImage, c1, c2, truncation, control: QuadratureControl = DEFAULT_CONTROL):
    """(1/2pi) int_{-T}^{T} e^{pi c1 |s|} |s|^{c2} |f*(s)| dt with s = c0 + i t."""
    if not truncation > 0:
        raise ValueError("truncation must be positive")
    if not admissible(c1, c2):
        raise MembershipError(f"decay class ({c1}, {c2}) is not admissible")
    if f.is_zero():
        return 0.0
    T = float(truncation)

    def integrand(t):
        with np.errstate(over="ignore"):
            return np.exp(_log_weight(f, t, c1, c2))

    edge = integrand(np.array([-T, -T / 2, T / 2, T]))
    if edge[0] > edge[1] or edge[3] > edge[2]:
        warnings.warn(
            f"weighted integrand of {f.label!r} grows towards |t| = {T:g}; "
            f"class ({c1}, {c2}) membership fails",
            DivergenceWarning,
            stacklevel=2,
        )
    val = integrate_interval(integrand, -T, T, control)
    return float(val.real) / (2.0 * np.pi)


@dataclass(frozen=True)
class MembershipReport:
    member: bool
    decay_ratio: float
    tail_fraction: float
    inconclusive: bool
    note: str

    def __bool__(self):
        return self.member


_DECADES = (1.0, 10.0, 100.0, 1000.0, 10000.0)
_RATIO_LIMIT = 0.9
_TAIL_LIMIT = 1e-3
_DECADE_NODES = np.polynomial.legendre.leggauss(64)


def _decade_masses(f, c1, c2):
    """Weighted mass of both tails over each decade, as logs (stable)."""
    x, w = _DECADE_NODES
    out = []
    for a, b in zip(_DECADES[:-1], _DECADES[1:]):
        # t = 10^u on [log10 a, log10 b]; dt = t ln10 du
        ua, ub = math.log10(a), math.log10(b)
        u = ua + 0.5 * (ub - ua) * (x + 1.0)
        t = 10.0 ** u
        lw = np.logaddexp(_log_weight(f, t, c1, c2), _log_weight(f, -t, c1, c2))
        terms = lw + np.log(t * math.log(10.0) * 0.5 * (ub - ua) * w)
        out.append(np.logaddexp.reduce(terms))
    return np.array(out)


def membership_estimate(f: MellinImage, c1, c2) -> MembershipReport:
    """Probe whether e^{pi c1|s|}|s|^{c2} f*(s) is integrable on the line.

    The weighted mass over successive decades |t| in [1,10], [10,100], ...
    must shrink by a factor below 0.9 at the last decade that still
    carries mass, and the last decade must hold a negligible share of the
    total. The returned report is truthy iff both hold.
    """
    if not admissible(c1, c2):
        return MembershipReport(False, math.nan, math.nan, True, "class not admissible")
    if f.is_zero():
        return MembershipReport(True, 0.0, 0.0, False, "zero image")
    with np.errstate(all="ignore"):
        logs = _decade_masses(f, c1, c2)
        core = _log_weight(f, np.linspace(-1.0, 1.0, 41), c1, c2)
    if np.any(np.isnan(logs)) or np.any(np.isposinf(logs)) or np.any(np.isnan(core)):
        return MembershipReport(False, math.nan, math.nan, True, "weighted integrand not finite")
    live = np.flatnonzero(np.isfinite(logs))
    if live.size == 0:
        return MembershipReport(True, 0.0, 0.0, False, "no mass beyond |t| = 1")
    last = live[-1]
    if last == 0:
        ratio = 0.0
    else:
        ratio = float(np.exp(min(logs[last] - logs[last - 1], 700.0)))
    total = np.logaddexp.reduce(np.concatenate([logs[np.isfinite(logs)], [np.log(2.0)
                                + np.max(core)]]))
    last_share = float(np.exp(logs[-1] - total)) if np.isfinite(logs[-1]) else 0.0
    member = ratio < _RATIO_LIMIT and last_share < _TAIL_LIMIT
    inconclusive = ratio < _RATIO_LIMIT and not last_share < _TAIL_LIMIT
    note = (f"decade ratio {ratio:.3g} (limit {_RATIO_LIMIT}), "
            f"last-decade share {last_share:.3g}")
    return MembershipReport(member, ratio, last_share, inconclusive, note)


def require_membership(f: MellinImage, c1, c2):
    """Raise MembershipError unless membership_estimate passes."""
    rep = membership_estimate(f, c1, c2)
    if not rep:
        raise MembershipError(f"{f.label!r} not in class ({c1}, {c2}): {rep.note}")
    return rep


# ---------------------------------------------------------------------------
# catalog of known pairs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    name: str
    image: MellinImage
    point_function: Callable
    valid_abscissa_range: tuple

    def verify(self, grid=None, rel_tol=1e-8):
        """Max relative gap between the inverse Mellin integral and the closed form.

        Raises MembershipError when it exceeds ``rel_tol``.
        """
        x = VERIFY_GRID if grid is None else np.asarray(grid, dtype=float)
        got = eval_function(self.image, x)
        want = self.point_function(x)
        scale = np.maximum(np.abs(want), 1e-300)
        err = float(np.max(np.abs(got - want) / np.where(want == 0, 1.0, scale)))
        if not err <= rel_tol:
            raise MembershipError(f"catalog entry {self.name!r} failed self-check ({err:.3g})")
        return err


VERIFY_GRID = np.logspace(-1.0, 0.5, 10)


def _exp_entry(a=1.0, c0=0.5):
    a = float(a)
    if not a > 0:
        raise ValueError("a must be positive")
    la = math.log(a)
    img = MellinImage(
        lambda s: _gamma(s) * np.exp(-la * s),
        c0, (0.0, 0.0), "exp" if a == 1.0 else f"exp:a={a:g}",
        lambda s: log_abs_gamma(s) - la * s.real,
        (0.0, math.inf),
    )
    return CatalogEntry(img.label, img, lambda x: np.exp(-a * np.asarray(x, dtype=float)),
                        (0.0, math.inf))


def _bessel_entry(c0=0.5):
    img = MellinImage(
        lambda s: np.exp(2.0 * _lgamma(s)),
        c0, (0.5, 0.0), "bessel-k0",
        lambda s: 2.0 * log_abs_gamma(s),
        (0.0, math.inf),
    )

    def point(x):
        x = np.asarray(x, dtype=float)
        return 2.0 * bessel_k(0.0, 2.0 * np.sqrt(x))

    return CatalogEntry("bessel-k0", img, point, (0.0, math.inf))


def _rational_entry(c0=0.5):
    img = MellinImage(
        lambda s: np.pi / np.sin(np.pi * s),
        c0, (0.0, 0.0), "rational",
        lambda s: math.log(np.pi) - _log_abs_sinpi(s),
        (0.0, 1.0),
    )
    return CatalogEntry("rational", img, lambda x: 1.0 / (1.0 + np.asarray(x, dtype=float)),
                        (0.0, 1.0))


def _gaussian_entry(c0=0.5):
    img = MellinImage(
        lambda s: 0.5 * _gamma(0.5 * s),
        c0, (0.0, 0.0), "gaussian",
        lambda s: log_abs_gamma(0.5 * s) - math.log(2.0),
        (0.0, math.inf),
    )
    return CatalogEntry("gaussian", img, lambda x: np.exp(-np.asarray(x, dtype=float) ** 2),
                        (0.0, math.inf))


def _zero_entry(c0=0.5):
    img = zero_image(c0)
    return CatalogEntry("zero", img, lambda x: np.zeros(np.shape(x)), (-math.inf, math.inf))


_BUILDERS = {
    "exp": _exp_entry,
    "bessel-k0": _bessel_entry,
    "rational": _rational_entry,
    "gaussian": _gaussian_entry,
    "zero": _zero_entry,
}


def catalog(c0=0.5, verify=True):
    """The known Mellin pairs, all represented on Re s = c0.

    With ``verify`` each entry is checked against its closed form first.
    """
    entries = tuple(catalog_entry(name, c0) for name in _BUILDERS)
    if verify:
        for e in entries:
            e.verify()
    return entries


def catalog_entry(name, c0=0.5):
    """Look up an entry by name; ``exp:a=2`` selects the rate of e^{-ax}."""
    base, _, arg = name.partition(":")
    if base not in _BUILDERS:
        raise KeyError(f"unknown catalog function {name!r}; known: {', '.join(_BUILDERS)}")
    kwargs = {}
    if arg:
        if base != "exp":
            raise KeyError(f"{base!r} takes no parameters")
        key, _, val = arg.partition("=")
        if key != "a" or not val:
            raise KeyError(f"expected exp:a=<rate>, got {name!r}")
        kwargs["a"] = float(val)
    entry = _BUILDERS[base](c0=c0, **kwargs)
    lo, hi = entry.valid_abscissa_range
    if not lo < c0 < hi:
        raise StripError(f"{name}: abscissa {c0} outside ({lo}, {hi})")
    return entry
