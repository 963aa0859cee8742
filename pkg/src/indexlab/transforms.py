"""Forward index transforms, their Mellin-Barnes forms, inversion and norm bounds.

Every forward transform has two independent evaluation paths:

* ``forward_direct`` integrates kernel(z, x) f(x) over x in (0, inf), with
  f obtained from its Mellin image;
* ``forward_barnes`` integrates the family's gamma-ratio representand
  against f*(s) on the line Re s = c0.

The modified Kontorovich-Lebedev pair (kernel e^{-x/2} K_{i tau}(x/2)) lives
at the end of the module.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import kernels as K
from .complexfn import _gamma, _lgamma, _log_abs_sinpi, _log_sinpi, _rgamma, _sinpi, bessel_k
from .errors import (
    PoleError,
    RegionError,
    SlowDecayError,
    StripError,
    UnderflowNote,
)
from .mellin import MellinImage, eval_function, require_membership, weighted_norm
from .quad import (
    DEFAULT_CONTROL,
    QuadratureControl,
    VerticalLine,
    integrate_semi_axis,
    integrate_symmetric_real_line,
    integrate_vertical_line,
)

__all__ = [
    "LineFunction",
    "RoundTripReport",
    "default_gamma",
    "forward_direct",
    "forward_barnes",
    "barnes_integrand",
    "forward_line",
    "invert",
    "round_trip",
    "operator_norm_bound",
    "line_norm",
    "function_norm",
    "mkl_forward",
    "mkl_h",
    "mkl_h_pairing",
    "mkl_expand",
    "index_identity",
    "index_identity_rhs",
]


# ---------------------------------------------------------------------------
# result types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LineFunction:
    """A transform image (Ff)(z) on the line Re z = gamma.

    ``values`` is vectorised over complex z. ``source_abscissa`` is the c0
    of the image it came from (needed to validate inversion strips).
    """

    values: Callable
    gamma: float
    provenance: str = ""
    source_abscissa: float = 0.5
    real_source: bool = True
    zero: bool = False

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.zero:
            return np.zeros(z.shape, dtype=complex)
        out = np.asarray(self.values(z), dtype=complex)
        return out if out.ndim else complex(out)

    def conjugate_defect(self, taus=(0.5, 2.0, 7.0)):
        """max |F(conj z) - conj F(z)| / |F(z)| over a few points of the line."""
        z = self.gamma + 1j * np.asarray(taus, dtype=float)
        a = np.asarray(self(np.conj(z)))
        b = np.conj(np.asarray(self(z)))
        scale = np.maximum(np.abs(b), 1e-300)
        return float(np.max(np.abs(a - b) / scale))


@dataclass
class RoundTripReport:
    family: str
    function: str
    gamma: float
    grid: list
    reconstructed: list
    reference: list
    per_point: list
    max_rel_error: float
    tail_diagnostics: str = ""
    meta: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "family": self.family,
            "function": self.function,
            "gamma": self.gamma,
            "grid": list(self.grid),
            "reconstructed": [[complex(v).real, complex(v).imag] for v in self.reconstructed],
            "reference": [[complex(v).real, complex(v).imag] for v in self.reference],
            "per_point": [[x, e] for x, e in self.per_point],
            "max_rel_error": self.max_rel_error,
            "tail_diagnostics": self.tail_diagnostics,
        }


# ---------------------------------------------------------------------------
# strips
# ---------------------------------------------------------------------------

def default_gamma(family, c0):
    """Mid-strip gamma for inversion; (1 - c0)/2 for the half-infinite strip."""
    lo, hi = family.inversion_strip(c0)
    if math.isinf(lo):
        return 0.5 * hi
    return 0.5 * (lo + hi)


def _check_source(f: MellinImage):
    if not f.abscissa < 1.0:
        raise StripError(f"abscissa c0 = {f.abscissa} must be below 1")


def _check_forward(family, f, z):
    _check_source(f)
    lo, hi = family.forward_strip(f.abscissa)
    re = np.asarray(z).real
    if np.any(re <= lo) or np.any(re >= hi):
        raise RegionError(f"{family.name}: forward transform needs {lo:g} < Re z < {hi:g} "
                          f"for c0 = {f.abscissa:g}")


# ---------------------------------------------------------------------------
# forward transform: direct x-integral
# ---------------------------------------------------------------------------

def _direct_kernel(family, z, x, control):
    """Kernel used by the x-integral: closed forms where they are stable."""
    if family.kind == K.EXP_KL or (family.kind in (K.INC_GAMMA, K.ONE_PLUS_T)
                                   and family.n == 1):
        return K.forward_kernel_closed(family, z, x, control)
    return K.forward_kernel(family, z, x, control)


def forward_direct(family, f: MellinImage, z, control: QuadratureControl = DEFAULT_CONTROL):
    """(Ff)(z) as the integral of kernel(z, x) f(x) over x in (0, inf).

    ``z`` may be an array; all entries are integrated as one batch.
    """
    z = np.asarray(z, dtype=complex)
    _check_forward(family, f, z)
    if f.is_zero():
        return np.zeros(z.shape, dtype=complex) if z.ndim else 0j
    require_membership(f, 0.0, 0.0)
    zf = z.ravel()
    inner = control.scaled(0.1)

    def integrand(x):
        fx = np.asarray(eval_function(f, x, inner))
        kern = _direct_kernel(family, zf[None, :], x[:, None], inner)
        return np.asarray(kern) * fx[:, None]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnderflowNote)
        val = integrate_semi_axis(integrand, control)
    val = np.asarray(val).reshape(z.shape)
    return val if val.ndim else complex(val)


# ---------------------------------------------------------------------------
# forward transform: Mellin-Barnes representation
# ---------------------------------------------------------------------------

def barnes_integrand(family, s, z):
    """Gamma-ratio representand of the forward transform (without f*).

    Includes every constant prefactor beyond the common 1/(2 pi i), so that
    (Ff)(z) = (1/2 pi i) int barnes_integrand(s, z) f*(s) ds, plus the
    residues of ``_crossed_residues`` when the line runs left of s = 1 - z.
    ``s`` and ``z`` broadcast.

    For the families whose kernel carries t^{z-1} the Beta integral in t
    produces rho(s + z - 1), not rho(s + z).
    """
    s = np.asarray(s, dtype=complex)
    z = np.asarray(z, dtype=complex)
    kind = family.kind
    with np.errstate(all="ignore"):
        if kind == K.TRUNCATED:
            return _gamma(1.0 - s - z) * np.exp((z + s - 1.0) * math.log(family.a))
        if kind == K.EXP_KL:
            return np.exp(_lgamma(1.0 - s + z) + _lgamma(1.0 - s))
        if kind == K.POWER_EXP:
            m = family.m
            return np.exp(_lgamma((1.0 - s + z) / m) + _lgamma(1.0 - s)) / m
        if kind == K.INC_GAMMA:
            near = -np.pi * _gamma(1.0 - s) / _sinpi(s + z)
            # 0/inf once Gamma(1-s) underflows against sin(pi(s+z))
            far = -np.exp(math.log(np.pi) + _lgamma(1.0 - s) - _log_sinpi(s + z))
            return np.where(np.abs((s + z).imag) > 10.0, far, near)
        if kind == K.ONE_PLUS_T:
            n = family.n
            w = s + z - 1.0
            return (_gamma(w) * _gamma(n - w) * _gamma(1.0 - s)
                    / math.factorial(n - 1))
        if kind == K.ONE_PLUS_T2:
            n = family.n
            w = 0.5 * (s + z - 1.0)
            return (_gamma(w) * _gamma(n - w) * _gamma(1.0 - s)
                    / (2.0 * math.factorial(n - 1)))
        if kind == K.GENERAL:
            s_b, z_b = np.broadcast_arrays(s, z)
            return _gamma(1.0 - s_b) * K.rho_quadrature(family, 1.0 + z_b - s_b)
    raise RegionError(f"no Mellin-Barnes form for {family.name}")


def _left_pole_step(family):
    """Spacing of the poles s = 1 - z - k*step coming from rho(s + z - 1)."""
    if family.kind in (K.ONE_PLUS_T, K.INC_GAMMA):
        return 1
    if family.kind == K.ONE_PLUS_T2:
        return 2
    return 0


def _crossed_residues(family, f: MellinImage, z, c):
    """Residues of left-family poles that sit to the right of Re s = c.

    The pole at s = 1 - z - step*k has residue
    (-1)^k/k! Gamma(n+k)/(n-1)! Gamma(z + step*k) f*(1 - z - step*k)
    for both polynomial families; f* is continued analytically off its line.
    """
    step = _left_pole_step(family)
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape, dtype=complex)
    if not step:
        return out
    n = 1 if family.kind == K.INC_GAMMA else family.n
    k = 0
    while True:
        pole = 1.0 - z - step * k
        live = pole.real > c
        if not np.any(live):
            return out
        coef = (-1) ** k / math.factorial(k) * math.factorial(n + k - 1) / math.factorial(n - 1)
        with np.errstate(all="ignore"):
            term = coef * _gamma(z + step * k) * f(pole)
        out = out + np.where(live, term, 0.0)
        k += 1


def _barnes_clearance(family, c0, z):
    """Horizontal distance from Re s = c0 to the nearest pole of the representand."""
    re = np.asarray(z).real
    d = [1.0 - c0]  # Gamma(1 - s)
    kind = family.kind
    if kind == K.TRUNCATED:
        d.append(np.min(1.0 - c0 - re))
    elif kind in (K.EXP_KL, K.GENERAL):
        d.append(np.min(1.0 + re - c0))
    elif kind == K.POWER_EXP:
        d.append(np.min(1.0 + re - c0) / family.m)
    elif kind in (K.INC_GAMMA, K.ONE_PLUS_T, K.ONE_PLUS_T2):
        step = _left_pole_step(family)
        n = 1 if kind == K.INC_GAMMA else family.n
        # left poles 1 - z - step*k, right poles (step*n + 1) - z + step*k
        u = (1.0 - re - c0) / step
        d.append(np.min(step * np.abs(u - np.round(u))))
        d.append(np.min(step * n + 1.0 - re - c0))
    return float(min(d))


_CLEAR = 0.05
_NUDGES = (0.125, -0.125, 0.25, -0.25)


def _barnes_abscissa(family, f: MellinImage, z):
    """Contour abscissa and its pole clearance.

    Re s = c0 unless a pole of the representand sits within 0.05 of it; then
    the line moves by up to 0.25 inside the analytic strip of f*, if known.
    """
    c0 = f.abscissa
    best = (c0, _barnes_clearance(family, c0, z))
    if best[1] >= _CLEAR or f.strip is None:
        return best
    lo, hi = f.strip
    for dc in _NUDGES:
        c = c0 + dc
        if lo + _CLEAR < c < min(hi, 1.0) - _CLEAR:
            cand = (c, _barnes_clearance(family, c, z))
            if cand[1] > best[1]:
                best = cand
    return best


def forward_barnes(family, f: MellinImage, z, control: QuadratureControl = DEFAULT_CONTROL):
    """(Ff)(z) from its Mellin-Barnes integral along Re s = c0 (batched over z).

    The line moves off c0 (see ``_barnes_abscissa``) when z puts a pole on it.
    """
    z = np.asarray(z, dtype=complex)
    _check_forward(family, f, z)
    if f.is_zero():
        return np.zeros(z.shape, dtype=complex) if z.ndim else 0j
    c, clearance = _barnes_abscissa(family, f, z)
    if not clearance > 1e-6:
        raise PoleError(f"{family.name}: z puts a pole of the representand on Re s = {c}")
    zf = z.ravel()
    # gamma phases of size |z| log|z| carry roundoff of that many ulps
    control = replace(control, noise_factor=control.noise_factor * (1.0 + float(np.max(np.abs(zf)))))

    def integrand(s):
        return barnes_integrand(family, s[:, None], zf[None, :]) * f(s)[:, None]

    val = integrate_vertical_line(integrand, VerticalLine(c, clearance), control)
    val = np.asarray(val).reshape(z.shape) + _crossed_residues(family, f, z, c)
    return val if val.ndim else complex(val)


def forward_line(family, f: MellinImage, gamma=None, path="barnes",
                 control: QuadratureControl = DEFAULT_CONTROL):
    """(Ff) restricted to Re z = gamma, as a LineFunction."""
    if gamma is None:
        gamma = default_gamma(family, f.abscissa)
    fwd = {"barnes": forward_barnes, "direct": forward_direct}[path]
    _check_forward(family, f, gamma)
    return LineFunction(
        values=lambda z: fwd(family, f, z, control),
        gamma=float(gamma),
        provenance=f"{path}:{family.name}:{f.label}",
        source_abscissa=f.abscissa,
        zero=f.is_zero(),
    )


# ---------------------------------------------------------------------------
# inversion
# ---------------------------------------------------------------------------

_PROBE_T = (16.0, 32.0, 64.0, 128.0)


def _probe_side_condition(integrand, gamma):
    """Local power-law exponent of |integrand| along the line; fail if <= 1.

    The inversion integral converges absolutely only when the product of
    the inversion kernel and (Ff) decays faster than 1/|tau|.
    """
    t = np.array(_PROBE_T)
    nodes = np.concatenate([gamma + 1j * t, gamma - 1j * t])
    with np.errstate(all="ignore"):
        mags = np.abs(integrand(nodes))
    mags = mags.reshape(len(nodes), -1).max(axis=1)
    m = np.maximum(mags[: len(t)], mags[len(t):])
    if not np.all(np.isfinite(m)):
        return  # let the engine report it
    if m[-1] == 0 or m[-2] == 0:
        return
    p = -math.log(m[-1] / m[-2]) / math.log(t[-1] / t[-2])
    if p <= 1.0:
        diag = (f"|kernel * Ff| on Re z = {gamma:g} behaves like |tau|^({-p:.3g}) between "
                f"|tau| = {t[-2]:g} and {t[-1]:g}; the absolute-integrability side "
                "condition of the inversion formula fails")
        raise SlowDecayError("inversion integrand is not absolutely integrable", diag)


def invert(family, Ff: LineFunction, x, control: QuadratureControl = DEFAULT_CONTROL,
           representation="series"):
    """f(x) from the inversion integral of ``family`` along Re z = Ff.gamma.

    ``x`` may be an array (one batch). ``representation`` selects the form
    of the inversion kernel (see :func:`kernels.inverse_kernel`).
    """
    lo, hi = family.inversion_strip(Ff.source_abscissa)
    if not lo < Ff.gamma < hi:
        raise StripError(f"{family.name}: gamma = {Ff.gamma} outside ({lo:g}, {hi:g})")
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise ValueError("x must be positive")
    if Ff.zero:
        out = np.zeros(xa.shape, dtype=complex)
        return out if out.ndim else 0j
    xf = xa.ravel()
    shift = 1.0 if family.is_polynomial else 0.0

    def integrand(z):
        kern = K.inverse_kernel(family, z[:, None] - shift, xf[None, :], representation)
        return np.asarray(kern) * np.asarray(Ff(z))[:, None]

    _probe_side_condition(integrand, Ff.gamma)
    clearance = Ff.gamma - 1.0 if family.kind == K.INC_GAMMA else math.inf
    val = integrate_vertical_line(integrand, VerticalLine(Ff.gamma, clearance), control)
    val = np.asarray(val).reshape(xa.shape)
    return val if val.ndim else complex(val)


def round_trip(family, entry, gamma=None, grid=(0.2, 0.5, 1.0, 2.0, 5.0),
               control: QuadratureControl = DEFAULT_CONTROL, forward_path="barnes"):
    """Forward then inverse transform of a catalog entry, compared with its closed form."""
    f = entry.image
    if gamma is None:
        gamma = default_gamma(family, f.abscissa)
    grid = [float(v) for v in grid]
    # Ff is needed to relative accuracy far out on the line, where it is tiny
    fwd_control = replace(control, abs_tol=1e-300, rel_tol=0.01 * control.rel_tol)
    Ff = forward_line(family, f, gamma, forward_path, fwd_control)
    rec = np.atleast_1d(invert(family, Ff, np.array(grid), control))
    ref = np.atleast_1d(np.asarray(entry.point_function(np.array(grid)), dtype=complex))
    errs = []
    for r, w in zip(rec, ref):
        d = abs(r - w)
        errs.append(float(d / abs(w)) if w != 0 else float(d))
    return RoundTripReport(
        family=family.name,
        function=entry.name,
        gamma=float(gamma),
        grid=grid,
        reconstructed=list(rec),
        reference=list(ref),
        per_point=list(zip(grid, errs)),
        max_rel_error=max(errs),
    )


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def _abs_line_integral(func, c, control):
    """int |func(c + i t)| dt over the whole line."""
    def integrand(s):
        return np.abs(func(s))

    return 2.0 * np.pi * float(np.real(integrate_vertical_line(integrand, VerticalLine(c),
                                                                control)))


def operator_norm_bound(family, c0, gamma, control: QuadratureControl = DEFAULT_CONTROL):
    """Upper bound for ||F|| from the image class into L1 on Re z = gamma."""
    if not c0 < 1.0:
        raise StripError("c0 must be below 1")
    lo, hi = family.forward_strip(c0)
    if not lo < gamma < hi:
        raise StripError(f"{family.name}: gamma = {gamma} outside ({lo:g}, {hi:g})")
    g1 = math.gamma(1.0 - c0)
    kind = family.kind
    if kind == K.TRUNCATED:
        a = family.a
        integral = _abs_line_integral(lambda s: _gamma(s), 1.0 - c0 - gamma, control)
        return a ** (gamma + c0 - 1.0) * integral
    if family.is_polynomial and not gamma > 1.0 - c0:
        # below 1 - c0 the residue Gamma(z) f*(1 - z) is not controlled by ||f||
        raise StripError(f"{family.name}: the bound needs gamma > 1 - c0 = {1.0 - c0:g}")
    if kind == K.INC_GAMMA:
        sigma = c0 + gamma - 1.0
        integral = _abs_line_integral(lambda s: np.exp(-_log_abs_sinpi(s)), sigma, control)
        return np.pi * g1 * integral
    if family.is_series:
        sigma = 1.0 - c0 + gamma
        rho = (lambda s: K.rho(family, s)) if kind != K.GENERAL else (
            lambda s: K.rho_quadrature(family, s))
        return g1 * _abs_line_integral(rho, sigma, control)
    sigma = c0 + gamma - 1.0
    return g1 * _abs_line_integral(lambda s: K.rho(family, s), sigma, control)


def line_norm(Ff: LineFunction, control: QuadratureControl = DEFAULT_CONTROL):
    """int |(Ff)(gamma + i tau)| d tau."""
    if Ff.zero:
        return 0.0
    return _abs_line_integral(Ff, Ff.gamma, control)


def function_norm(f: MellinImage, truncation=60.0, control: QuadratureControl = DEFAULT_CONTROL):
    """(1/2 pi) int |f*(c0 + i t)| dt, the plain L1 norm of the image."""
    return weighted_norm(f, 0.0, 0.0, truncation, control)


# ---------------------------------------------------------------------------
# modified Kontorovich-Lebedev transform
# ---------------------------------------------------------------------------

_MKL_CONTROL = QuadratureControl(abs_tol=1e-300, rel_tol=1e-12)


def _mkl_hypothesis(f: MellinImage, nu):
    if not 0.0 < f.abscissa < 1.0:
        raise StripError("the modified KL expansion needs 0 < c0 < 1")
    if not nu > f.abscissa - 1.0:
        raise StripError(f"need nu > c0 - 1 = {f.abscissa - 1.0:g}")
    require_membership(f, 0.5, nu)


def _mkl_contour(f, tau, control):
    tf = np.asarray(tau, dtype=float).ravel()

    def integrand(s):
        sc = s[:, None]
        it = 1j * tf[None, :]
        with np.errstate(all="ignore"):
            g = np.exp(_lgamma(1.0 - sc - it) + _lgamma(1.0 - sc + it)) * _rgamma(1.5 - sc)
        return g * f(s)[:, None]

    val = integrate_vertical_line(integrand, VerticalLine(f.abscissa, 1.0 - f.abscissa), control)
    return math.sqrt(math.pi) * np.asarray(val)


def _mkl_direct(f, tau, control):
    tf = np.asarray(tau, dtype=float).ravel()
    inner = control.scaled(0.1)

    def integrand(x):
        fx = np.asarray(eval_function(f, x, inner))
        kx = bessel_k(1j * tf[None, :], 0.5 * x[:, None]).real
        return np.exp(-0.5 * x)[:, None] * kx * fx[:, None]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnderflowNote)
        return np.asarray(integrate_semi_axis(integrand, control))


def mkl_forward(f: MellinImage, tau, path="contour", nu=0.0,
                control: QuadratureControl = _MKL_CONTROL):
    """g(tau) = int e^{-x/2} K_{i tau}(x/2) f(x) dx.

    ``path="contour"`` uses the gamma-ratio contour integral in s,
    ``path="direct"`` the x-integral itself. Broadcasts over ``tau``.
    """
    tau_a = np.asarray(tau, dtype=float)
    if f.is_zero():
        out = np.zeros(tau_a.shape)
        return out if out.ndim else 0.0
    _mkl_hypothesis(f, nu)
    if path == "contour":
        val = _mkl_contour(f, tau_a, control)
    elif path == "direct":
        val = _mkl_direct(f, tau_a, replace(control, abs_tol=DEFAULT_CONTROL.abs_tol * 1e-3))
    else:
        raise ValueError(f"unknown path {path!r}")
    val = val.reshape(tau_a.shape)
    return val if val.ndim else complex(val)


def mkl_h(f: MellinImage, y, control: QuadratureControl = DEFAULT_CONTROL):
    """h(y) = (1/2 pi i) int f*(s) / Gamma(3/2 - s) y^{-s} ds (batched over y)."""
    ya = np.asarray(y, dtype=float)
    if np.any(ya <= 0):
        raise ValueError("y must be positive")
    if f.is_zero():
        out = np.zeros(ya.shape, dtype=complex)
        return out if out.ndim else 0j
    logy = np.log(ya).ravel()

    def integrand(s):
        return (_rgamma(1.5 - s) * f(s))[:, None] * np.exp(-s[:, None] * logy[None, :])

    val = np.asarray(integrate_vertical_line(integrand, f.line, control)).reshape(ya.shape)
    return val if val.ndim else complex(val)


def mkl_h_pairing(f: MellinImage, tau, control: QuadratureControl = DEFAULT_CONTROL):
    """2 sqrt(pi) int_0^inf K_{2 i tau}(2 sqrt y) h(y) dy (batched over tau)."""
    tf = np.atleast_1d(np.asarray(tau, dtype=float))
    inner = control.scaled(0.1)

    def integrand(y):
        hy = np.asarray(mkl_h(f, y, inner))
        ky = bessel_k(2j * tf[None, :], 2.0 * np.sqrt(y)[:, None]).real
        return ky * hy[:, None]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UnderflowNote)
        val = 2.0 * math.sqrt(math.pi) * np.asarray(integrate_semi_axis(integrand, control))
    val = val.reshape(np.shape(tau))
    return val if val.ndim else complex(val)


_EXPAND_CONTROL = QuadratureControl(abs_tol=1e-300, rel_tol=1e-9, initial_truncation=24.0,
                                    truncation_growth=1.5, max_truncation_steps=3)


def mkl_expand(f: MellinImage, x, nu=0.0, control: QuadratureControl = _EXPAND_CONTROL):
    """f(x) rebuilt from its modified KL image by the iterated index integral.

    The inner transform uses the contour path (smooth in tau); the outer
    integral over tau is even and runs on the symmetric real-line engine.
    """
    x = float(x)
    if not x > 0:
        raise ValueError("x must be positive")
    if f.is_zero():
        return 0j
    _mkl_hypothesis(f, nu)
    inner = _MKL_CONTROL

    def integrand(tau):
        g = _mkl_contour(f, np.abs(tau), inner).reshape(tau.shape)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UnderflowNote)
            kx = bessel_k(1j * tau, 0.5 * x).real
        return tau * np.sinh(np.pi * tau) * kx * g

    val = integrate_symmetric_real_line(integrand, control)
    return complex(math.exp(0.5 * x) / (math.pi ** 2 * x) * val)


def index_identity_rhs(x, y):
    """(1/2) sqrt(pi^3 y / x) e^{-x/2 - y/x}."""
    return 0.5 * math.sqrt(math.pi ** 3 * y / x) * math.exp(-0.5 * x - y / x)


_INDEX_CONTROL = QuadratureControl(abs_tol=1e-300, rel_tol=1e-12, initial_truncation=24.0,
                                   max_truncation_steps=1)


def index_identity(x, y, control: QuadratureControl = _INDEX_CONTROL):
    """Both sides of int tau sinh(pi tau) K_{i tau}(x/2) K_{2 i tau}(2 sqrt y) d tau.

    Returns (lhs by quadrature, rhs closed form). The truncation stays at
    |tau| <= 24 so that both Bessel orders remain inside |Im| <= 50.
    """
    x, y = float(x), float(y)
    if not (x > 0 and y > 0):
        raise ValueError("x and y must be positive")

    def integrand(tau):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", UnderflowNote)
            k1 = bessel_k(1j * tau, 0.5 * x).real
            k2 = bessel_k(2j * tau, 2.0 * math.sqrt(y)).real
        return tau * np.sinh(np.pi * tau) * k1 * k2

    lhs = integrate_symmetric_real_line(integrand, control)
    return complex(lhs), complex(index_identity_rhs(x, y))
