"""Integral engines: semi-axis, vertical line (Mellin-Barnes) and even real line.

All three engines take a vectorised integrand. It is called with a 1-D
array of nodes and must return an array of shape ``(len(nodes),)`` or
``(len(nodes), *batch)``; the engine then integrates every batch column at
once and returns an array of shape ``batch`` (a Python complex when there
is no batch). Convergence is judged on the worst column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import (
    AsymmetryError,
    EndpointSingularityError,
    NonConvergenceError,
    SlowDecayError,
)

__all__ = [
    "QuadratureControl",
    "VerticalLine",
    "QuadratureResult",
    "DEFAULT_CONTROL",
    "integrate_semi_axis",
    "integrate_vertical_line",
    "integrate_symmetric_real_line",
    "integrate_interval",
]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureControl:
    """Tolerance, truncation and refinement budget shared by the engines."""

    abs_tol: float = 1e-11
    rel_tol: float = 1e-10
    initial_truncation: float = 20.0
    truncation_growth: float = 1.5
    max_truncation_steps: int = 12
    max_refinements: int = 8
    noise_factor: float = 64.0  # roundoff floor, in units of eps * sum |w f|

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("abs_tol and rel_tol must be positive")
        if not self.initial_truncation > 0:
            raise ValueError("initial_truncation must be positive")
        if not 1.0 < self.truncation_growth <= 4.0:
            raise ValueError("truncation_growth must lie in (1, 4]")
        if self.max_truncation_steps < 1 or self.max_refinements < 1:
            raise ValueError("step budgets must be positive")
        if not self.noise_factor >= 1.0:
            raise ValueError("noise_factor must be at least 1")

    def scaled(self, factor: float) -> "QuadratureControl":
        """Copy with both tolerances multiplied by ``factor``."""
        return replace(self, abs_tol=self.abs_tol * factor, rel_tol=self.rel_tol * factor)


DEFAULT_CONTROL = QuadratureControl()


@dataclass(frozen=True)
class VerticalLine:
    """The line Re s = abscissa, with the caller's distance to the nearest pole."""

    abscissa: float
    pole_clearance: float = math.inf

    def __post_init__(self):
        if self.pole_clearance < 0:
            raise ValueError("pole_clearance must be non-negative")


@dataclass
class QuadratureResult:
    value: object
    error: float
    tail: float
    truncation: float
    nodes: int


def _finish(value, full_output, **info):
    value = value if np.ndim(value) else complex(value)
    if full_output:
        return QuadratureResult(value=value, **info)
    return value


def _evaluate(integrand, nodes):
    vals = np.asarray(integrand(nodes), dtype=complex)
    if vals.shape[0] != nodes.shape[0]:
        raise ValueError("integrand must return one row per node")
    return vals


def _weighted_sum(w, vals):
    return np.tensordot(w, vals, axes=(0, 0))


def _converged(diff, value, l1, control):
    bound = np.maximum(np.maximum(control.abs_tol, control.rel_tol * np.abs(value)), control.noise_factor * _EPS * l1)
    return bool(np.all(diff <= bound))


# ---------------------------------------------------------------------------
# semi-axis: exp-sinh double exponential rule
# ---------------------------------------------------------------------------

_U_START = 3.0
_U_MAX = 6.5
_U_STEP = 0.5


def integrate_semi_axis(
    integrand: Callable,
    control: QuadratureControl = DEFAULT_CONTROL,
    *,
    scale: float = 1.0,
    full_output: bool = False,
):
    """Integrate over (0, inf) with the substitution t = scale * exp(pi/2 sinh u).

    The double-exponential map absorbs algebraic endpoint behaviour at 0
    and both algebraic and exponential decay at infinity. The u-range grows
    until the outermost weighted samples are negligible, then the step is
    halved until two successive trapezoidal sums agree.
    """
    u_left, u_right = _U_START, _U_START
    h = 0.5
    prev = None
    refinements = 0
    while True:
        k_lo = -int(math.ceil(u_left / h))
        k_hi = int(math.ceil(u_right / h))
        u = np.arange(k_lo, k_hi + 1) * h
        t = scale * np.exp(0.5 * np.pi * np.sinh(u))
        w = h * 0.5 * np.pi * np.cosh(u) * t
        with np.errstate(all="ignore"):
            vals = _evaluate(integrand, t)
        bad = ~np.isfinite(vals)
        if np.any(bad):
            rows = bad.reshape(len(u), -1).any(axis=1)
            if np.any(rows & (np.abs(u) < 1.5)):
                raise NonConvergenceError("integrand not finite inside the semi-axis")
            vals = np.where(bad, 0.0, vals)
        contrib = np.abs(vals) * w.reshape((-1,) + (1,) * (vals.ndim - 1))
        value = _weighted_sum(w, vals)
        l1 = contrib.sum(axis=0)
        thresh = np.maximum(
            np.maximum(control.abs_tol, control.rel_tol * np.abs(value)), control.noise_factor * _EPS * l1
        ) / 4.0
        left_tail = contrib[:2].sum(axis=0)
        right_tail = contrib[-2:].sum(axis=0)
        grow_left = bool(np.any(left_tail > thresh))
        grow_right = bool(np.any(right_tail > thresh))
        if grow_left or grow_right:
            if grow_left and u_left >= _U_MAX:
                raise EndpointSingularityError(
                    "semi-axis integrand does not settle near t = 0",
                )
            if grow_right and u_right >= _U_MAX:
                raise NonConvergenceError("semi-axis integrand does not decay at infinity")
            if grow_left:
                u_left += _U_STEP
            if grow_right:
                u_right += _U_STEP
            prev = None
            continue
        if prev is not None:
            diff = np.abs(value - prev)
            if _converged(diff, value, l1, control):
                tail = float(np.max(left_tail + right_tail))
                return _finish(value, full_output, error=float(np.max(diff)), tail=tail,
                               truncation=max(u_left, u_right), nodes=len(u))
            refinements += 1
            if refinements > control.max_refinements:
                raise NonConvergenceError(
                    f"semi-axis refinement budget exhausted (last change {np.max(diff):.3g})"
                )
        prev = value
        h /= 2.0


# ---------------------------------------------------------------------------
# vertical line and even real line: composite Gauss-Legendre panels
# ---------------------------------------------------------------------------

_PANEL_WIDTH = 2.0
_BASE_NODES = 16
_MAX_NODES = 1024

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gauss(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _panel_rule(lo, hi, n):
    """Nodes, weights and panel index for panels of width 2 covering [lo, hi]."""
    npan = int(round((hi - lo) / _PANEL_WIDTH))
    x, wt = _gauss(n)
    left = lo + _PANEL_WIDTH * np.arange(npan)
    nodes = (left[:, None] + 0.5 * _PANEL_WIDTH * (x[None, :] + 1.0)).ravel()
    weights = np.tile(0.5 * _PANEL_WIDTH * wt, npan)
    return nodes, weights, npan


def _panel_sums(func, lo, hi, n):
    nodes, weights, npan = _panel_rule(lo, hi, n)
    vals = func(nodes)
    shape = (npan, n) + vals.shape[1:]
    wv = (weights.reshape((-1,) + (1,) * (vals.ndim - 1)) * vals).reshape(shape)
    abs_w = np.abs(wv).sum(axis=1)
    return wv.sum(axis=1), abs_w


def _tail_estimate(abs_panels, side, edge):
    """Tail beyond the outermost panel on one side (per column).

    Geometric when successive outer panels shrink by a ratio below 0.95,
    otherwise a power law a(t) ~ t^-p fitted to the two outer panels
    (infinite when p <= 1.05).
    """
    if side == "right":
        last, before = abs_panels[-1], abs_panels[-2]
    else:
        last, before = abs_panels[0], abs_panels[1]
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(before > 0, last / before, 0.0)
        geometric = last * r / (1.0 - np.minimum(r, 0.95))
        c_last = abs(edge) - 0.5 * _PANEL_WIDTH
        c_before = abs(edge) - 1.5 * _PANEL_WIDTH
        p = np.where((r > 0) & (c_before > 0), -np.log(r) / math.log(c_last / max(c_before, 1e-300)), 0.0)
        power = np.where(p > 1.05, last / _PANEL_WIDTH * abs(edge) / (p - 1.0), np.inf)
    tail = np.where(r < 0.95, geometric, power)
    return np.where(last == 0, 0.0, tail), r


def _cached_sums(func, lo, hi, n, cache):
    """Panel sums on [lo, hi], evaluating only panels absent from cache."""
    npan = int(round((hi - lo) / _PANEL_WIDTH))
    lefts = [round(lo + _PANEL_WIDTH * k, 9) for k in range(npan)]
    missing = [a for a in lefts if (a, n) not in cache]
    # contiguous runs keep the batched integrand calls large
    runs = []
    for a in missing:
        if runs and abs(runs[-1][1] - a) < 1e-9:
            runs[-1][1] = a + _PANEL_WIDTH
        else:
            runs.append([a, a + _PANEL_WIDTH])
    if runs:
        nodes = np.concatenate([_panel_rule(a, b, n)[0] for a, b in runs])
        vals = func(nodes)
        w = 0.5 * _PANEL_WIDTH * _gauss(n)[1]
        wv = vals.reshape((len(missing), n) + vals.shape[1:])
        wv = w.reshape((1, n) + (1,) * (vals.ndim - 1)) * wv
        sums, abs_sums = wv.sum(axis=1), np.abs(wv).sum(axis=1)
        for k, a in enumerate(missing):
            cache[(a, n)] = (sums[k], abs_sums[k])
    pairs = [cache[(a, n)] for a in lefts]
    return np.stack([p[0] for p in pairs]), np.stack([p[1] for p in pairs])


def _panel_engine(func, lo_of, hi_of, control, what):
    """Shared refine-then-extend loop for the panel engines."""
    cache = {}
    T = control.initial_truncation
    n = _BASE_NODES
    diag = ""
    for _step in range(control.max_truncation_steps):
        T = _PANEL_WIDTH * math.ceil(T / _PANEL_WIDTH)
        lo, hi = lo_of(T), hi_of(T)
        panels, abs_panels = _cached_sums(func, lo, hi, n, cache)
        value = panels.sum(axis=0)
        for _ in range(control.max_refinements):
            if 2 * n > _MAX_NODES:
                raise NonConvergenceError(f"{what}: more than {_MAX_NODES} nodes per panel needed")
            fine, abs_fine = _cached_sums(func, lo, hi, 2 * n, cache)
            fine_value = fine.sum(axis=0)
            diff = np.abs(fine_value - value)
            l1 = abs_fine.sum(axis=0)
            if _converged(diff, fine_value, l1, control):
                abs_panels, value = abs_fine, fine_value
                break
            n *= 2
            abs_panels, value = abs_fine, fine_value
        else:
            raise NonConvergenceError(f"{what}: refinement budget exhausted")
        tails = []
        ratios = []
        for side in (("left", "right") if lo < 0 else ("right",)):
            tl, r = _tail_estimate(abs_panels, side, hi if side == "right" else lo)
            tails.append(tl)
            ratios.append(r)
        tail = sum(tails)
        limit = np.maximum(control.abs_tol / 2.0, control.noise_factor * _EPS * l1)
        if np.all(tail < limit):
            return value, float(np.max(diff)), float(np.max(tail)), T, 2 * n
        worst = float(np.max(np.max(np.stack(ratios), axis=0)))
        diag = (f"tail estimate {float(np.max(tail)):.3g} at half-height {T:g}; "
                f"outer panel decay ratio {worst:.4f}")
        T *= control.truncation_growth
    raise SlowDecayError(f"{what}: integrand tail does not decay fast enough ({diag})", diag)


def integrate_vertical_line(
    integrand: Callable,
    line: VerticalLine,
    control: QuadratureControl = DEFAULT_CONTROL,
    *,
    full_output: bool = False,
):
    """(1/2 pi i) times the integral of integrand(s) over Re s = line.abscissa.

    The integrand receives complex nodes s = c + i t. The half-height T
    grows geometrically until the geometric tail estimate from the outer
    panels drops below abs_tol/2.
    """
    if not line.pole_clearance > 1e-6:
        raise ValueError("vertical line passes within 1e-6 of a pole")
    c = float(line.abscissa)

    def func(t):
        return _evaluate(integrand, c + 1j * t)

    value, err, tail, T, n = _panel_engine(func, lambda T: -T, lambda T: T, control,
                                           "vertical line")
    value = value / (2.0 * np.pi)
    return _finish(value, full_output, error=err / (2 * np.pi), tail=tail / (2 * np.pi),
                   truncation=T, nodes=n)


_EVEN_PROBES = (0.37, 1.3, 2.9)


def integrate_symmetric_real_line(
    integrand: Callable,
    control: QuadratureControl = DEFAULT_CONTROL,
    *,
    full_output: bool = False,
):
    """Integral over the whole real line of an even integrand, as 2 int_0^T."""
    probe = np.array(_EVEN_PROBES)
    fp = _evaluate(integrand, probe)
    fm = _evaluate(integrand, -probe)
    if np.any(np.abs(fp - fm) > 1e-9 * np.maximum(np.abs(fp), np.abs(fm)) + 1e-300):
        raise AsymmetryError("integrand failed the evenness spot-check")

    def func(t):
        return _evaluate(integrand, t)

    value, err, tail, T, n = _panel_engine(func, lambda T: 0.0, lambda T: T, control,
                                           "symmetric real line")
    return _finish(2.0 * value, full_output, error=2 * err, tail=2 * tail, truncation=T, nodes=n)


def integrate_interval(
    integrand: Callable,
    lo: float,
    hi: float,
    control: QuadratureControl = DEFAULT_CONTROL,
    *,
    full_output: bool = False,
):
    """Integral over the finite interval [lo, hi] with composite Gauss-Legendre.

    The panel count is fixed by the length (width at most 2); the per-panel
    order doubles until two successive sums agree.
    """
    lo, hi = float(lo), float(hi)
    if not hi > lo:
        raise ValueError("need lo < hi")
    npan = max(1, int(math.ceil((hi - lo) / _PANEL_WIDTH)))
    width = (hi - lo) / npan
    left = lo + width * np.arange(npan)

    def rule(n):
        x, wt = _gauss(n)
        nodes = (left[:, None] + 0.5 * width * (x[None, :] + 1.0)).ravel()
        w = np.tile(0.5 * width * wt, npan)
        vals = _evaluate(integrand, nodes)
        wv = w.reshape((-1,) + (1,) * (vals.ndim - 1)) * vals
        return wv.sum(axis=0), np.abs(wv).sum(axis=0)

    n = _BASE_NODES
    value, _ = rule(n)
    for _ in range(control.max_refinements):
        if 2 * n > _MAX_NODES:
            break
        fine, l1 = rule(2 * n)
        diff = np.abs(fine - value)
        if _converged(diff, fine, l1, control):
            return _finish(fine, full_output, error=float(np.max(diff)), tail=0.0,
                           truncation=hi - lo, nodes=2 * n)
        value = fine
        n *= 2
    raise NonConvergenceError("finite interval: refinement budget exhausted")
