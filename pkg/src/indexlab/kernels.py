"""Kernel families of the index transforms.

Each family carries a defining integral for its forward kernel, a closed
special-function form where one exists, the inversion kernel in two
algebraically different shapes, and the Mellin multiplier rho of 1/r.

Families are addressed by short names, see :func:`family_from_name`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .complexfn import (
    _gamma,
    _lgamma,
    _pole_distance,
    _rgamma,
    bessel_i,
    bessel_k,
    generalized_hyp,
    upper_incomplete_gamma,
)
from .errors import PoleError, RegionError, SeriesDivergenceError, StripError
from .quad import (
    DEFAULT_CONTROL,
    QuadratureControl,
    VerticalLine,
    integrate_semi_axis,
    integrate_vertical_line,
)

__all__ = [
    "TransformFamily",
    "truncated_mellin",
    "exp_kl",
    "power_exp",
    "general_laplace_mellin",
    "one_plus_t",
    "inc_gamma",
    "one_plus_t2",
    "family_from_name",
    "all_families",
    "forward_kernel",
    "forward_kernel_closed",
    "has_closed_form",
    "inverse_kernel",
    "rho",
    "rho_quadrature",
    "laguerre",
]

POLE_MARGIN = 1e-6

TRUNCATED = "truncated-mellin"
GENERAL = "general"
EXP_KL = "exp-kl"
POWER_EXP = "power-exp"
ONE_PLUS_T = "one-plus-t"
INC_GAMMA = "inc-gamma"
ONE_PLUS_T2 = "one-plus-t2"


@dataclass(frozen=True)
class TransformFamily:
    """One kernel family with its parameters.

    ``kind`` is one of the module-level tags. ``coeffs`` holds a_k of
    r(t) = sum a_k t^k for finite general families; the series instances
    (ExpKL, PowerExp) carry a_k = 1/j! at k = m j implicitly.
    """

    kind: str
    a: float = 1.0
    m: int = 1
    n: int = 1
    coeffs: tuple = ()

    def __post_init__(self):
        if self.kind == TRUNCATED and not self.a > 0:
            raise RegionError("truncated Mellin rate a must be positive")
        if self.m < 1 or self.n < 1:
            raise RegionError("m and n must be positive integers")
        if self.kind == GENERAL:
            if not self.coeffs:
                raise RegionError("general family needs coefficients")
            t = np.logspace(-4, 4, 801)
            r = np.polyval(np.asarray(self.coeffs, dtype=complex)[::-1], t)
            # a zero on the grid, or a sign change of a real r between grid points
            crossing = np.all(r.imag == 0) and np.any(np.sign(r.real[1:]) != np.sign(r.real[:-1]))
            if np.any(r == 0) or crossing:
                raise RegionError("r(t) vanishes on (0, inf)")

    @property
    def name(self):
        if self.kind == TRUNCATED:
            return TRUNCATED if self.a == 1.0 else f"{TRUNCATED}:a={self.a:g}"
        if self.kind == POWER_EXP:
            return f"{POWER_EXP}:{self.m}"
        if self.kind in (ONE_PLUS_T, ONE_PLUS_T2):
            return f"{self.kind}:{self.n}"
        if self.kind == GENERAL:
            return f"{GENERAL}:" + ",".join(f"{c:g}" for c in self.coeffs)
        return self.kind

    @property
    def is_series(self):
        """Families with r(t) an entire series (kernel uses e^{-x/t})."""
        return self.kind in (EXP_KL, POWER_EXP, GENERAL)

    @property
    def is_polynomial(self):
        """Families with kernel e^{-xt}/P_n(t)."""
        return self.kind in (ONE_PLUS_T, INC_GAMMA, ONE_PLUS_T2)

    @property
    def degree(self):
        if self.kind in (ONE_PLUS_T, INC_GAMMA):
            return self.n
        if self.kind == ONE_PLUS_T2:
            return 2 * self.n
        if self.kind == GENERAL:
            return len(self.coeffs) - 1
        return math.inf

    @property
    def analyticity_halfplane(self):
        """Bound on Re z for the forward transform: (side, value) with c0 = 0."""
        return self.forward_strip(0.0)

    def forward_strip(self, c0):
        """Open interval of Re z where the forward transform is analytic."""
        if self.kind == TRUNCATED:
            return (-math.inf, 1.0 - c0)
        if self.kind in (EXP_KL, POWER_EXP):
            return (c0 - 1.0, math.inf)
        if self.kind == GENERAL:
            return (c0 - 1.0, self.degree - c0)
        # k(z, x) ~ Gamma(z - deg) x^{deg - z} as x -> 0, against f = O(x^{-c0})
        return (0.0, self.degree + 1.0 - c0)

    def inversion_strip(self, c0):
        """Open interval of admissible gamma for the inversion integral."""
        if self.kind == TRUNCATED:
            return (-math.inf, 1.0 - c0)
        if self.is_series:
            return (c0 - 1.0, 0.0)
        # the inverse Laplace step needs Re z > deg, the inverse Mellin
        # step of L[f](t)/P(t) needs Re z < deg + 1 - c0
        return (float(self.degree), self.degree + 1.0 - c0)

    def kernel_region(self):
        """Open interval of Re z where the forward kernel integral converges."""
        if self.is_polynomial:
            return (0.0, math.inf)
        if self.kind == GENERAL:
            return (-math.inf, float(self.degree))
        return (-math.inf, math.inf)

    def r_inverse(self, t):
        """1/r(t) (or 1/P_n(t)) on t > 0."""
        t = np.asarray(t, dtype=float)
        if self.kind == EXP_KL:
            return np.exp(-t)
        if self.kind == POWER_EXP:
            return np.exp(-t ** self.m)
        if self.kind in (ONE_PLUS_T, INC_GAMMA):
            return (1.0 + t) ** (-self.n)
        if self.kind == ONE_PLUS_T2:
            return (1.0 + t * t) ** (-self.n)
        if self.kind == GENERAL:
            return 1.0 / np.polyval(np.asarray(self.coeffs, dtype=complex)[::-1], t)
        raise RegionError("the truncated Mellin family has no multiplier 1/r")

    def poly_coefficients(self):
        """a_k of P_n(t) for the polynomial families."""
        if self.kind in (ONE_PLUS_T, INC_GAMMA):
            return tuple(math.comb(self.n, k) for k in range(self.n + 1))
        if self.kind == ONE_PLUS_T2:
            out = [0] * (2 * self.n + 1)
            for k in range(self.n + 1):
                out[2 * k] = math.comb(self.n, k)
            return tuple(out)
        if self.kind == GENERAL:
            return self.coeffs
        raise RegionError(f"{self.name} is not a polynomial family")


def truncated_mellin(a=1.0):
    return TransformFamily(TRUNCATED, a=float(a))


def exp_kl():
    return TransformFamily(EXP_KL)


def power_exp(m):
    return TransformFamily(POWER_EXP, m=int(m))


def general_laplace_mellin(coeffs):
    """Family with r(t) = sum_k coeffs[k] t^k (finite, no zeros on t > 0)."""
    return TransformFamily(GENERAL, coeffs=tuple(complex(c) if np.iscomplexobj(c) else float(c)
                                                 for c in coeffs))


def one_plus_t(n):
    return TransformFamily(ONE_PLUS_T, n=int(n))


def inc_gamma():
    return TransformFamily(INC_GAMMA, n=1)


def one_plus_t2(n):
    return TransformFamily(ONE_PLUS_T2, n=int(n))


def all_families():
    """One representative of each of the six named families."""
    return (truncated_mellin(1.0), exp_kl(), power_exp(2), one_plus_t(2), inc_gamma(),
            one_plus_t2(1))


def _int_arg(name, arg, key):
    k, sep, v = arg.partition("=")
    if sep:
        if k != key:
            raise KeyError(f"{name}: expected parameter {key!r}, got {k!r}")
        arg = v
    try:
        val = int(arg)
    except ValueError:
        raise KeyError(f"{name}: {key} must be a positive integer") from None
    if val < 1:
        raise KeyError(f"{name}: {key} must be a positive integer")
    return val


def family_from_name(name: str) -> TransformFamily:
    """Parse names like ``exp-kl``, ``power-exp:3``, ``truncated-mellin:a=2``."""
    base, _, arg = name.strip().partition(":")
    if base == TRUNCATED:
        if not arg:
            return truncated_mellin()
        k, sep, v = arg.partition("=")
        try:
            a = float(v if sep else k)
        except ValueError:
            raise KeyError(f"{name}: bad rate") from None
        if sep and k != "a" or not a > 0:
            raise KeyError(f"{name}: expected a=<positive rate>")
        return truncated_mellin(a)
    if base in (EXP_KL, INC_GAMMA):
        if arg:
            raise KeyError(f"{base} takes no parameters")
        return exp_kl() if base == EXP_KL else inc_gamma()
    if base == POWER_EXP:
        return power_exp(_int_arg(name, arg or "", "m"))
    if base in (ONE_PLUS_T, ONE_PLUS_T2):
        n = _int_arg(name, arg or "", "n")
        return one_plus_t(n) if base == ONE_PLUS_T else one_plus_t2(n)
    if base == GENERAL:
        try:
            return general_laplace_mellin([float(c) for c in arg.split(",")])
        except ValueError:
            raise KeyError(f"{name}: bad coefficient list") from None
    raise KeyError(f"unknown family {name!r}")


# ---------------------------------------------------------------------------
# forward kernels
# ---------------------------------------------------------------------------

def _grid(z, x):
    z = np.asarray(z, dtype=complex)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("x must be positive")
    return np.broadcast_arrays(z, x)


def _out(v):
    v = np.asarray(v)
    return v if v.ndim else complex(v)


def _check_kernel_region(family, z):
    lo, hi = family.kernel_region()
    re = np.asarray(z).real
    if np.any(re <= lo) or np.any(re >= hi):
        raise RegionError(f"{family.name}: kernel integral needs {lo} < Re z < {hi}")


def forward_kernel(family, z, x, control: QuadratureControl = DEFAULT_CONTROL):
    """Forward kernel from its defining integral over t in (0, inf).

    Series families use e^{-x/t}/r(t) t^{z-1}, polynomial families
    e^{-xt}/P(t) t^{z-1}; the truncated Mellin kernel is the pointwise
    x^{-z} e^{-ax}. ``z`` and ``x`` broadcast.
    """
    zz, xx = _grid(z, x)
    if family.kind == TRUNCATED:
        return _out(np.exp(-zz * np.log(xx) - family.a * xx))
    _check_kernel_region(family, zz)
    zf, xf = zz.ravel(), xx.ravel()

    if family.is_series:
        def integrand(t):
            lt = np.log(t)[:, None]
            with np.errstate(over="ignore", under="ignore"):
                r_inv = family.r_inverse(t)[:, None]
                return r_inv * np.exp(-xf[None, :] / t[:, None] + (zf[None, :] - 1.0) * lt)
    else:
        # t = u / (1 + x) keeps the mass near u ~ 1 when x is large
        c = 1.0 + xf

        def integrand(u):
            t = u[:, None] / c[None, :]
            with np.errstate(over="ignore", under="ignore"):
                p_inv = family.r_inverse(t)
                return p_inv * np.exp(-xf[None, :] * t + zf[None, :] * np.log(t)) / u[:, None]

    val = integrate_semi_axis(integrand, control)
    return _out(np.asarray(val).reshape(zz.shape))


def has_closed_form(family):
    """Whether forward_kernel_closed uses an independent closed form."""
    if family.kind in (EXP_KL, INC_GAMMA, ONE_PLUS_T2, POWER_EXP):
        return True
    return family.kind == ONE_PLUS_T and family.n == 1


def _check_pole(arg, what):
    if np.any(_pole_distance(arg) <= POLE_MARGIN):
        raise PoleError(f"{what} within {POLE_MARGIN:g} of a gamma pole")


def _h_terms(z, x, n):
    """The three-term 1F2 combination for int e^{-xt}(1+t^2)^{-n} t^{z-1} dt."""
    _check_pole(z - 2 * n, "Gamma(z-2n)")
    _check_pole(n - z / 2, "Gamma(n-z/2)")
    _check_pole(n - (z + 1) / 2, "Gamma(n-(z+1)/2)")
    w = -x * x / 4.0
    fact = math.factorial(n - 1)
    t1 = (np.exp((2 * n - z) * np.log(x)) * _gamma(z - 2 * n)
          * generalized_hyp([n], [1 + n - z / 2, n + (1 - z) / 2], w))
    t2 = (_gamma(n - z / 2) * _gamma(z / 2) / (2 * fact)
          * generalized_hyp([z / 2], [0.5, 1 - n + z / 2], w))
    t3 = (x * _gamma(n - (z + 1) / 2) * _gamma((z + 1) / 2) / (2 * fact)
          * generalized_hyp([(z + 1) / 2], [1.5, (3 + z) / 2 - n], w))
    return t1 + t2 - t3


_CIRCLE_POINTS = 16


def _h_closed(z, x, n, strict):
    """Closed form; at the removable points the value is a circle mean."""
    try:
        return _h_terms(z, x, n)
    except PoleError:
        if strict:
            raise
    radius = min(0.1, 0.5 * z.real)
    ring = z + radius * np.exp(2j * np.pi * (np.arange(_CIRCLE_POINTS) + 0.5) / _CIRCLE_POINTS)
    return np.mean([_h_terms(complex(p), x, n) for p in ring], axis=0)


def _power_exp_barnes(z, x, m, control):
    """S_m(x, z) from (1/2 pi i m) int Gamma((s+z)/m) Gamma(s) x^{-s} ds."""
    nu = max(0.0, -z.real) + 0.5
    logx = np.log(x)

    def integrand(s):
        g = np.exp(_lgamma((s + z) / m) + _lgamma(s))
        return g[:, None] * np.exp(-s[:, None] * logx[None, :])

    line = VerticalLine(nu, pole_clearance=0.5)
    return np.asarray(integrate_vertical_line(integrand, line, control)) / m


def forward_kernel_closed(family, z, x, control: QuadratureControl = DEFAULT_CONTROL,
                          *, strict=False):
    """Forward kernel from its closed special-function form.

    ExpKL: 2 x^{z/2} K_z(2 sqrt x). n = 1 polynomial: Gamma(z) e^x Gamma(1-z, x).
    (1+t^2)^n: three-term 1F2 combination, evaluated near its removable
    points as a mean over a small circle unless ``strict`` (then PoleError).
    PowerExp: Mellin-Barnes integral. Other families fall back to
    :func:`forward_kernel`; see :func:`has_closed_form`.
    """
    zz, xx = _grid(z, x)
    if not has_closed_form(family):
        return forward_kernel(family, z, x, control)
    _check_kernel_region(family, zz)
    out = np.empty(zz.shape, dtype=complex)
    for zi in np.unique(zz.ravel()):
        sel = zz == zi
        xs = xx[sel]
        if family.kind == EXP_KL:
            v = 2.0 * np.exp(0.5 * zi * np.log(xs)) * bessel_k(zi, 2.0 * np.sqrt(xs))
        elif family.kind in (INC_GAMMA, ONE_PLUS_T):
            v = _gamma(zi) * np.exp(xs) * upper_incomplete_gamma(1.0 - zi, xs)
        elif family.kind == ONE_PLUS_T2:
            v = _h_closed(zi, xs, family.n, strict)
        else:
            v = _power_exp_barnes(zi, xs, family.m, control)
        out[sel] = v
    return _out(out)


# ---------------------------------------------------------------------------
# inversion kernels
# ---------------------------------------------------------------------------

def laguerre(n, alpha, y):
    """Generalized Laguerre polynomial L_n^alpha(y), complex alpha.

    Uses L_n^alpha(y) = sum_j (alpha+j+1)_{n-j}/(n-j)! (-y)^j / j!.
    """
    alpha = np.asarray(alpha, dtype=complex)
    y = np.asarray(y, dtype=complex)
    total = np.zeros(np.broadcast(alpha, y).shape, dtype=complex)
    for j in range(n + 1):
        poch = np.ones(alpha.shape, dtype=complex)
        for i in range(n - j):
            poch = poch * (alpha + j + 1 + i)
        total = total + poch / math.factorial(n - j) * (-y) ** j / math.factorial(j)
    return _out(total)


def _coefficient_series(z, x, m, max_terms=600, rel=1e-16):
    """sum_j x^{mj-z-1} / (j! Gamma(mj-z)), broadcast over z and x."""
    logx = np.log(x)
    total = np.zeros(z.shape, dtype=complex)
    small = np.zeros(z.shape, dtype=int)
    prev_mag = np.full(z.shape, np.inf)
    kmin = np.ceil((np.abs(z) + 1.0) / m) + 2
    for j in range(max_terms):
        with np.errstate(under="ignore", over="ignore"):
            term = np.exp((m * j - z - 1.0) * logx - math.lgamma(j + 1.0)) * _rgamma(m * j - z)
        total = total + term
        mag = np.abs(term)
        # past the peak and negligible three times running
        tiny = (mag <= rel * np.abs(total)) & (mag <= prev_mag) & (j >= kmin)
        small = np.where(tiny, small + 1, 0)
        prev_mag = mag
        if np.all(small >= 3):
            return total
    raise SeriesDivergenceError("inverse-kernel coefficient series did not converge")


def _general_series(z, x, coeffs):
    out = np.zeros(z.shape, dtype=complex)
    logx = np.log(x)
    for k, a in enumerate(coeffs):
        if a:
            out = out + a * np.exp((k - z - 1.0) * logx) * _rgamma(k - z)
    return out


def _poly_sum(z, x, coeffs):
    """sum_k a_k x^{z-k} / Gamma(1+z-k)."""
    out = np.zeros(z.shape, dtype=complex)
    logx = np.log(x)
    for k, a in enumerate(coeffs):
        if a:
            out = out + a * np.exp((z - k) * logx) * _rgamma(1.0 + z - k)
    return out


def _each(z, x, fn):
    out = np.empty(z.shape, dtype=complex)
    for idx in np.ndindex(z.shape):
        out[idx] = fn(complex(z[idx]), float(x[idx]))
    return out


def _hyper_bessel(z, x, m):
    pref = (2 * np.pi) ** ((m - 1) / 2) * math.sqrt(m) / x
    params = [(k - z) / m for k in range(m)]
    rg = np.prod([_rgamma(p) for p in params])
    arg = (x / m) ** m
    return pref * np.exp(-z * math.log(x / m)) * rg * generalized_hyp([], params, arg)


def inverse_kernel(family, z, x, representation="series"):
    """Inversion kernel of ``family`` at index z and point x (broadcast).

    ``representation``:
      * ``"series"`` the coefficient sum: sum a_k x^{k-z-1}/Gamma(k-z) for
        series families, sum a_k x^{z-k}/Gamma(1+z-k) for polynomial ones;
      * ``"closed"`` the special-function form: I-Bessel for ExpKL, 0Fm
        hyper-Bessel for PowerExp, Laguerre for (1+t)^n, 3F0 for (1+t^2)^n,
        x^z/Gamma(z) (1/z + 1/x) for the incomplete-gamma pair;
      * ``"hypergeometric"`` (polynomial (1+t)^n only) the 2F0 form.

    The truncated Mellin kernel e^{ax} x^{z-1} already includes the
    e^{ax} prefactor of its inversion formula.

    The polynomial forms are written for the index shifted by one: the
    forward kernels carry t^{z-1}, so the inversion integral pairs
    inverse_kernel(z - 1, x) with (Ff)(z). :func:`transforms.invert` applies
    the shift.
    """
    zz, xx = _grid(z, x)
    kind = family.kind
    if kind == TRUNCATED:
        return _out(np.exp((zz - 1.0) * np.log(xx) + family.a * xx))
    if representation not in ("series", "closed", "hypergeometric"):
        raise ValueError(f"unknown representation {representation!r}")
    if representation == "hypergeometric" and kind not in (ONE_PLUS_T, INC_GAMMA):
        raise ValueError("the 2F0 form exists only for the (1+t)^n family")

    if representation == "series":
        if kind in (EXP_KL, POWER_EXP):
            return _out(_coefficient_series(zz, xx, family.m))
        if kind == GENERAL:
            return _out(_general_series(zz, xx, family.coeffs))
        return _out(_poly_sum(zz, xx, family.poly_coefficients()))

    if kind == EXP_KL:
        nu = -(1.0 + zz)
        return _out(bessel_i(nu, 2.0 * np.sqrt(xx)) * np.exp(0.5 * nu * np.log(xx)))
    if kind == POWER_EXP:
        return _out(_each(zz, xx, lambda zi, xi: _hyper_bessel(zi, xi, family.m)))
    if kind == INC_GAMMA and representation == "closed":
        if np.any(np.abs(zz) <= 1e-12):
            raise PoleError("x^z/Gamma(z) (1/z + 1/x) is undefined at z = 0")
        return _out(np.exp(zz * np.log(xx)) * _rgamma(zz) * (1.0 / zz + 1.0 / xx))
    if kind in (ONE_PLUS_T, INC_GAMMA):
        n = family.n
        if representation == "hypergeometric":
            f = _each(zz, xx, lambda zi, xi: generalized_hyp([-n, -zi], [], 1.0 / xi))
            return _out(np.exp(zz * np.log(xx)) * _rgamma(1.0 + zz) * f)
        lag = laguerre(n, zz - n, -xx)
        return _out(np.exp((zz - n) * np.log(xx)) * math.factorial(n) * _rgamma(1.0 + zz) * lag)
    if kind == ONE_PLUS_T2:
        n = family.n
        f = _each(zz, xx, lambda zi, xi: generalized_hyp([-n, -zi / 2, (1 - zi) / 2], [],
                                                         -4.0 / (xi * xi)))
        return _out(np.exp(zz * np.log(xx)) * _rgamma(1.0 + zz) * f)
    raise ValueError(f"{family.name} has no closed inversion kernel")


# ---------------------------------------------------------------------------
# Mellin multiplier rho
# ---------------------------------------------------------------------------

def rho_strip(family):
    """Open strip of Re s where rho converges."""
    if family.kind == TRUNCATED:
        raise RegionError("the truncated Mellin family has no multiplier rho")
    if family.kind in (EXP_KL, POWER_EXP):
        return (0.0, math.inf)
    return (0.0, float(family.degree))


def _check_strip(family, s):
    lo, hi = rho_strip(family)
    re = np.asarray(s).real
    if np.any(re <= lo) or np.any(re >= hi):
        raise StripError(f"{family.name}: rho needs {lo} < Re s < {hi}")


def rho(family, s):
    """Mellin transform of 1/r(t), closed form."""
    s = np.asarray(s, dtype=complex)
    _check_strip(family, s)
    kind = family.kind
    if kind == EXP_KL:
        return _out(_gamma(s))
    if kind == POWER_EXP:
        return _out(_gamma(s / family.m) / family.m)
    if kind in (ONE_PLUS_T, INC_GAMMA):
        n = family.n
        return _out(_gamma(s) * _gamma(n - s) / math.factorial(n - 1))
    if kind == ONE_PLUS_T2:
        n = family.n
        return _out(_gamma(s / 2) * _gamma(n - s / 2) / (2 * math.factorial(n - 1)))
    raise RegionError(f"{family.name}: no closed form for rho, use rho_quadrature")


def rho_quadrature(family, s, control: QuadratureControl = DEFAULT_CONTROL):
    """Mellin transform of 1/r(t) by direct quadrature of its defining integral."""
    s = np.asarray(s, dtype=complex)
    _check_strip(family, s)
    sf = s.ravel()

    def integrand(t):
        with np.errstate(over="ignore", under="ignore"):
            return family.r_inverse(t)[:, None] * np.exp((sf[None, :] - 1.0) * np.log(t)[:, None])

    val = integrate_semi_axis(integrand, control)
    return _out(np.asarray(val).reshape(s.shape))


def coefficient(family, k):
    """a_k of r(t); for ExpKL and PowerExp the nonzero ones sit at k = m j."""
    if family.kind in (EXP_KL, POWER_EXP):
        j, rem = divmod(k, family.m)
        return 0.0 if rem else 1.0 / math.factorial(j)
    return family.poly_coefficients()[k] if k < len(family.poly_coefficients()) else 0.0

