"""Complex special functions used by the kernels.

Everything here is vectorised over numpy arrays and pure (no module state).
The gamma family is built on a shifted Stirling series; the modified Bessel
function of the second kind comes from its cosh-integral representation
taken along a steepest-descent style contour, which is what keeps the
relative accuracy of K_{iτ}(x) intact when the value is of size e^{-πτ/2}.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DivergentSeriesError,
    EnvelopeError,
    PoleError,
    SeriesDivergenceError,
    UnderflowNote,
)

__all__ = [
    "PrecisionBudget",
    "log_gamma",
    "gamma",
    "reciprocal_gamma",
    "upper_incomplete_gamma",
    "bessel_k",
    "bessel_i",
    "generalized_hyp",
    "pochhammer",
    "log_abs_gamma",
]

POLE_EPS = 1e-12
LOG_2PI_HALF = 0.5 * math.log(2.0 * math.pi)
EULER_GAMMA = 0.57721566490153286061

# B_{2k} / (2k (2k-1)), k = 1..10
_STIRLING = np.array([
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
])

_STIRLING_SHIFT = 9.0

# zeta(2..10) for the small-argument expansion of log Gamma(1 + eps)
_ZETA = {
    2: 1.6449340668482264,
    3: 1.2020569031595943,
    4: 1.0823232337111382,
    5: 1.0369277551433699,
    6: 1.0173430619844491,
    7: 1.0083492773819228,
    8: 1.0040773561979443,
    9: 1.0020083928260822,
    10: 1.0009945751278181,
}


@dataclass(frozen=True)
class PrecisionBudget:
    """Tolerances and budgets for series and quadratures in this module."""

    target_abs_tol: float = 0.0
    target_rel_tol: float = 1e-16
    max_terms: int = 600
    max_refinements: int = 8

    def __post_init__(self):
        if self.target_abs_tol < 0 or self.target_rel_tol < 0:
            raise ValueError("tolerances must be non-negative")
        if not (self.target_abs_tol > 0 or self.target_rel_tol > 0):
            raise ValueError("at least one tolerance must be positive")
        if self.max_terms < 16:
            raise ValueError("max_terms must be >= 16")
        if self.max_refinements < 4:
            raise ValueError("max_refinements must be >= 4")


DEFAULT_BUDGET = PrecisionBudget()


# ---------------------------------------------------------------------------
# gamma family
# ---------------------------------------------------------------------------

def _as_complex(z):
    return np.asarray(z, dtype=complex)


def _pole_distance(z):
    """Distance from z to the nearest non-positive integer."""
    z = _as_complex(z)
    re = np.minimum(np.round(z.real), 0.0)
    return np.abs(z - re)


def _check_poles(z, what="gamma"):
    if np.any(_pole_distance(z) <= POLE_EPS):
        raise PoleError(f"{what} evaluated at (or within {POLE_EPS:g} of) a pole")


_BLOCK = 6


def _lgamma(z, principal=False):
    """log Gamma without pole checks (vectorised).

    The imaginary part is exact only modulo 2 pi unless ``principal``;
    callers that exponentiate or take the real part do not need the branch,
    and skipping it lets the recurrence take one log per block of factors.
    """
    z = _as_complex(z)
    # shift right until |w| >= _STIRLING_SHIFT with Re w >= 1
    need = np.sqrt(np.maximum(_STIRLING_SHIFT ** 2 - z.imag ** 2, 1.0))
    shift = np.maximum(np.ceil(need - z.real), 0.0).astype(int)
    nmax = int(shift.max(initial=0))
    acc = np.zeros(z.shape, dtype=complex)
    block = 1 if principal else _BLOCK
    for k0 in range(0, nmax, block):
        sel = shift > k0
        zs, ss = z[sel], shift[sel]
        prod = np.ones(zs.shape, dtype=complex)
        for k in range(k0, min(k0 + block, nmax)):
            prod = np.where(ss > k, prod * (zs + k), prod)
        acc[sel] -= np.log(prod)
    w = z + shift
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros(z.shape, dtype=complex)
    for c in _STIRLING[::-1]:
        series = series * inv2 + c
    series *= inv
    return acc + (w - 0.5) * np.log(w) - w + LOG_2PI_HALF + series


def log_gamma(z):
    """Principal branch of log Gamma(z).

    Raises PoleError within 1e-12 of a non-positive integer.
    """
    _check_poles(z, "log_gamma")
    out = _lgamma(z, principal=True)
    return out if np.ndim(out) else complex(out)


def _sinpi(z):
    """sin(pi z) with exact argument reduction (zeros land exactly)."""
    z = _as_complex(z)
    k = np.round(z.real)
    sign = np.where(np.mod(k, 2) == 0, 1.0, -1.0)
    return sign * np.sin(np.pi * (z - k))


def _log_sinpi(z):
    """log sin(pi z) (some branch), finite where sin(pi z) overflows."""
    z = _as_complex(z)
    k = np.round(z.real)
    u = z - k
    y = np.pi * u.imag
    big = np.abs(y) > 30.0
    with np.errstate(all="ignore"):
        near = np.log(np.sin(np.pi * np.where(big, 0.0, u)))
    # sin(pi u) ~ (i/2) e^{-i pi u} for Im u > 0, (-i/2) e^{i pi u} below
    far = np.where(y > 0, 0.5j * np.pi - 1j * np.pi * u, -0.5j * np.pi + 1j * np.pi * u) - math.log(2.0)
    odd = np.mod(k, 2) != 0
    return np.where(big, far, near) + np.where(odd, 1j * np.pi, 0.0)


def _gamma(z):
    z = _as_complex(z)
    left = z.real < 0.5
    zr = np.where(left, 1.0 - z, z)
    lg = _lgamma(zr)
    g = np.exp(lg)
    with np.errstate(all="ignore"):
        near = np.pi / (_sinpi(z) * g)
        far = np.exp(math.log(np.pi) - _log_sinpi(z) - lg)
        reflected = np.where(np.abs(z.imag) > 10.0, far, near)
        return np.where(left, reflected, g)


def _log_abs_sinpi(z):
    """log|sin(pi z)|, safe for large |Im z|."""
    z = _as_complex(z)
    y = np.pi * np.abs(z.imag)
    sx = np.sin(np.pi * (z.real - np.round(z.real)))
    with np.errstate(divide="ignore", over="ignore"):
        small = 0.5 * np.log(sx * sx + np.sinh(np.minimum(y, 30.0)) ** 2)
    return np.where(y > 30.0, y - math.log(2.0), small)


def log_abs_gamma(z):
    """log|Gamma(z)| without overflow or underflow for large |Im z|.

    Returns +inf at the poles.
    """
    z = _as_complex(z)
    left = z.real < 0.5
    zr = np.where(left, 1.0 - z, z)
    lg = _lgamma(zr).real
    with np.errstate(divide="ignore"):
        out = np.where(left, math.log(np.pi) - _log_abs_sinpi(z) - lg, lg)
    return out if np.ndim(out) else float(out)


def gamma(z):
    """Gamma(z); PoleError near the poles."""
    _check_poles(z, "gamma")
    out = _gamma(z)
    return out if np.ndim(out) else complex(out)


def _rgamma(z):
    z = _as_complex(z)
    left = z.real < 0.5
    zr = np.where(left, 1.0 - z, z)
    lg = _lgamma(zr)
    with np.errstate(over="ignore", invalid="ignore"):
        near = _sinpi(z) / np.pi * np.exp(lg)
        far = np.exp(_log_sinpi(z) - math.log(np.pi) + lg)
        out = np.where(left, np.where(np.abs(z.imag) > 10.0, far, near), np.exp(-lg))
    at_pole = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    return np.where(at_pole, 0.0, out)


def reciprocal_gamma(z):
    """1/Gamma(z), entire; exactly 0 at the non-positive integers."""
    out = _rgamma(z)
    return out if np.ndim(out) else complex(out)


def pochhammer(a, k):
    """Rising factorial (a)_k for integer k >= 0 (vectorised over a)."""
    a = _as_complex(a)
    out = np.ones(a.shape, dtype=complex)
    for j in range(int(k)):
        out = out * (a + j)
    return out if np.ndim(out) else complex(out)


# ---------------------------------------------------------------------------
# incomplete gamma
# ---------------------------------------------------------------------------

def _gammainc_cf(w, a, tol, max_terms):
    tiny = 1e-300
    b = a + 1.0 - w
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, max_terms):
        an = -i * (i - w)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol:
            return np.exp(-a + w * np.log(a)) * h
    return None


def _gammainc_kummer(w, a, tol, max_terms):
    # lower gamma: e^{-a} a^w sum_k a^k / (w)_{k+1}
    term = 1.0 / w
    total = term
    for k in range(1, max_terms):
        term = term * a / (w + k)
        total += term
        if abs(term) < tol * abs(total):
            lower = np.exp(-a + w * np.log(a)) * total
            return complex(_gamma(w)) - lower
    return None


def _merged_pole_term(w, n, a):
    """Gamma(w) - a^w (-a)^n / (n! (w+n)) for w near -n, without cancellation."""
    eps = w + n
    ln_a = math.log(a)
    # log Gamma(1+eps)/eps
    lg = -EULER_GAMMA
    for k in range(2, 11):
        lg += (-1) ** k * _ZETA[k] * eps ** (k - 1) / k
    # sum_m log1p(-eps/m)/eps
    s = 0.0
    for m in range(1, n + 1):
        u = 1.0 / m
        s += -sum(u ** j * eps ** (j - 1) / j for j in range(1, 8))
    q = lg - s - ln_a
    x = eps * q
    if abs(x) < 1e-3:
        em1 = q * (1 + x / 2 + x * x / 6 + x ** 3 / 24 + x ** 4 / 120)
    else:
        em1 = (np.exp(x) - 1.0) / eps
    c = (-1) ** n / math.factorial(n)
    return c * np.exp(eps * ln_a) * em1


def _gammainc_alternating(w, a, tol, max_terms):
    dist = _pole_distance(w)
    n = int(-np.round(w.real)) if w.real <= 0.5 else -1
    merged = n >= 0 and dist < 1e-3
    total = 0.0 + 0.0j
    term_pow = 1.0  # (-a)^k / k!
    small = 0
    for k in range(max_terms):
        if k > 0:
            term_pow = term_pow * (-a) / k
        if merged and k == n:
            continue
        t = term_pow / (w + k)
        total += t
        if k > n and abs(t) < tol * abs(total):
            small += 1
            if small >= 3:
                break
        else:
            small = 0
    else:
        return None
    aw = np.exp(w * np.log(a))
    head = _merged_pole_term(w, n, a) if merged else complex(_gamma(w))
    return head - aw * total


def _upper_gamma_scalar(w, a, budget):
    w = complex(w)
    if not a > 0:
        raise ValueError("upper_incomplete_gamma requires a > 0")
    if abs(w) > 50:
        raise EnvelopeError("upper_incomplete_gamma supports |w| <= 50")
    tol = max(budget.target_rel_tol, 1e-16)
    nmax = max(budget.max_terms, 5000)
    if a >= max(1.0, w.real + 1.0):
        val = _gammainc_cf(w, a, tol, nmax)
        if val is not None:
            return complex(val)
    if w.real > 0.5:
        val = _gammainc_kummer(w, a, tol, nmax)
    else:
        val = _gammainc_alternating(w, a, tol, nmax)
    if val is None:
        raise SeriesDivergenceError("incomplete gamma series did not converge")
    return complex(val)


def upper_incomplete_gamma(w, a, budget: PrecisionBudget = DEFAULT_BUDGET):
    """Upper incomplete gamma Gamma(w, a) = int_a^inf e^{-t} t^{w-1} dt.

    ``w`` complex with |w| <= 50, ``a`` > 0; both broadcast.
    """
    w_arr, a_arr = np.broadcast_arrays(_as_complex(w), np.asarray(a, dtype=float))
    out = np.empty(w_arr.shape, dtype=complex)
    for idx in np.ndindex(w_arr.shape):
        out[idx] = _upper_gamma_scalar(w_arr[idx], float(a_arr[idx]), budget)
    return out if out.ndim else complex(out)


# ---------------------------------------------------------------------------
# modified Bessel functions
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_GL_P = 0.5 * (_GL_NODES + 1.0)
_GL_W = 0.5 * _GL_WEIGHTS

_K_TAIL = 45.0  # e^{-45} ~ 3e-20 relative truncation
_IM_ORDER_MAX = 50.0


def _arm_length(x, sigma, phi_ref, c):
    """Smallest L with x c cosh L - sigma L - phi_ref >= _K_TAIL."""
    L = 1.0
    for _ in range(30):
        L_new = math.acosh(max(1.0, (phi_ref + _K_TAIL + sigma * L) / (x * c)))
        if abs(L_new - L) < 1e-9:
            break
        L = L_new
    return L_new


def _panel_nodes(starts, ends, rows_phase, npan):
    """GL nodes on ``npan`` equal panels of each row's segment [start, end]."""
    edges = np.linspace(0.0, 1.0, npan + 1)
    p = (edges[:-1, None] + (edges[1:] - edges[:-1])[:, None] * _GL_P[None, :]).ravel()
    wp = ((edges[1:] - edges[:-1])[:, None] * _GL_W[None, :]).ravel()
    seg = (ends - starts)[:, None]
    t = starts[:, None] + seg * p[None, :]
    return t, seg * wp[None, :]


def _segments(x, sigma, tau):
    """Contour vertices and reference log-magnitude for one (x, sigma, tau)."""
    ratio = tau / x
    if ratio < 0.95:
        th = math.asin(ratio)
        phi_ref = x * math.cos(th) + tau * th
        L = _arm_length(x, sigma, phi_ref, math.cos(th))
        verts = [complex(-L, -th), complex(0.0, -th), complex(L, -th)]
    else:
        phi_ref = tau * math.pi / 2.0
        mu2 = math.acosh(max(1.0, math.pi * tau / (2.0 * x)))
        L = max(_arm_length(x, sigma, phi_ref, 1.0), mu2 + math.pi / 2.0 + 0.5)
        h = math.pi / 2.0
        verts = [complex(-L, 0.0), complex(-mu2 - h, 0.0), complex(-mu2, -h),
                 complex(mu2, -h), complex(mu2 + h, 0.0), complex(L, 0.0)]
    return verts, phi_ref


def _bessel_k_group(x, nu, verts, phi_ref):
    """Integrate 1/2 e^{-x cosh t - nu t} over rows sharing a vertex count."""
    nseg = verts.shape[1] - 1
    total = np.zeros(x.shape[0], dtype=complex)
    for s in range(nseg):
        a, b = verts[:, s], verts[:, s + 1]
        probe = np.linspace(0.0, 1.0, 65)
        tp = a[:, None] + (b - a)[:, None] * probe[None, :]
        ex = -x[:, None] * np.cosh(tp) - nu[:, None] * tp
        var = np.abs(np.diff(ex.imag, axis=1)).sum(axis=1)
        mag = np.abs(np.diff(ex.real, axis=1)).sum(axis=1)
        length = np.abs(b - a)
        npan = int(np.max(np.ceil(np.maximum(var / 1.5, np.maximum(length / 0.5, mag / 6.0))))) + 1
        t, w = _panel_nodes(a, b, None, npan)
        vals = np.exp(-x[:, None] * np.cosh(t) - nu[:, None] * t + phi_ref[:, None])
        total += (vals * w).sum(axis=1)
    return 0.5 * total


def bessel_k(order, x):
    """Modified Bessel function K_order(x) for complex order and real x > 0.

    Evaluates 1/2 int_R exp(-x cosh t - order t) dt on a contour pushed
    through the saddle points, so that the integrand never exceeds the size
    of the result by more than a modest factor.  Raises EnvelopeError for
    |Im order| > 50; returns 0 with an UnderflowNote warning when the value
    is below the double range.
    """
    nu_in, x_in = np.broadcast_arrays(_as_complex(order), np.asarray(x, dtype=float))
    if np.any(~(x_in > 0)):
        raise ValueError("bessel_k requires x > 0")
    if np.any(np.abs(nu_in.imag) > _IM_ORDER_MAX):
        raise EnvelopeError("bessel_k supports |Im order| <= 50")
    flat_nu = nu_in.ravel()
    flat_x = x_in.ravel().astype(float)
    sigma = np.abs(flat_nu.real)
    tau = np.abs(flat_nu.imag)
    flip = (flat_nu.real * flat_nu.imag) < 0
    out = np.zeros(flat_nu.shape, dtype=complex)

    groups = {}
    refs = np.empty(flat_nu.shape)
    for i in range(flat_nu.size):
        verts, phi_ref = _segments(flat_x[i], sigma[i], tau[i])
        refs[i] = phi_ref
        groups.setdefault(len(verts), []).append((i, verts))
    for _, members in groups.items():
        idx = np.array([m[0] for m in members])
        verts = np.array([m[1] for m in members])
        nu = sigma[idx] + 1j * tau[idx]
        out[idx] = _bessel_k_group(flat_x[idx], nu, verts, refs[idx])

    scale = -refs
    under = scale < -745.0
    if np.any(under):
        warnings.warn("bessel_k underflow; returning 0", UnderflowNote, stacklevel=2)
    with np.errstate(under="ignore"):
        out = np.where(under, 0.0, out * np.exp(np.maximum(scale, -745.0)))
    out = np.where(flip, np.conj(out), out)
    # purely real or purely imaginary order with real x gives a real value
    real_valued = (flat_nu.real == 0) | (flat_nu.imag == 0)
    out = np.where(real_valued, out.real + 0j, out)
    out = out.reshape(nu_in.shape)
    return out if out.ndim else complex(out)


def bessel_i(order, w, budget: PrecisionBudget = DEFAULT_BUDGET):
    """Modified Bessel function I_order(w) by its ascending series.

    Principal branch for (w/2)^order; |w| <= 100.
    """
    nu_in, w_in = np.broadcast_arrays(_as_complex(order), _as_complex(w))
    if np.any(np.abs(w_in) > 100):
        raise EnvelopeError("bessel_i supports |w| <= 100")
    nu = nu_in.ravel()
    ww = w_in.ravel()
    out = np.empty(nu.shape, dtype=complex)
    zero = ww == 0
    if np.any(zero):
        out[zero] = np.where(nu[zero] == 0, 1.0, np.where(nu[zero].real > 0, 0.0, np.nan))
    nz = ~zero
    if np.any(nz):
        out[nz] = _bessel_i_series(nu[nz], ww[nz], budget)
    out = out.reshape(nu_in.shape)
    return out if out.ndim else complex(out)


def _terminate(terms, rel, abs_tol, kmin):
    """Index of the last term kept under the 3-consecutive-small rule, or -1."""
    partial = np.cumsum(terms, axis=0)
    small = np.abs(terms) <= np.maximum(rel * np.abs(partial), abs_tol)
    k = np.arange(terms.shape[0])[:, None]
    small &= k >= kmin[None, :]
    run = small[:-2] & small[1:-1] & small[2:]
    hit = run.any(axis=0)
    first = np.where(hit, run.argmax(axis=0) + 2, -1)
    return first, partial


def _bessel_i_series(nu, w, budget):
    half = w / 2.0
    logq = 2.0 * np.log(half)
    base = np.exp(nu * np.log(half))
    kmin = np.ceil(np.abs(w) / 2.0 + np.maximum(0.0, -nu.real)).astype(int) + 1
    nterms = 64
    while True:
        k = np.arange(nterms)[:, None]
        from math import lgamma
        lfact = np.array([lgamma(j + 1.0) for j in range(nterms)])[:, None]
        terms = np.exp(k * logq[None, :] - lfact) * _rgamma(nu[None, :] + k + 1.0)
        first, partial = _terminate(terms, budget.target_rel_tol, budget.target_abs_tol, kmin)
        if np.all(first >= 0):
            vals = partial[first, np.arange(nu.size)]
            return base * vals
        if nterms >= budget.max_terms:
            raise SeriesDivergenceError("bessel_i series did not converge within max_terms")
        nterms = min(2 * nterms, budget.max_terms)


# ---------------------------------------------------------------------------
# generalized hypergeometric series
# ---------------------------------------------------------------------------

def _nonpositive_int(a):
    a = complex(a)
    return a.imag == 0 and a.real <= 0 and abs(a.real - round(a.real)) < 1e-14


def generalized_hyp(numerators, denominators, arg, budget: PrecisionBudget = DEFAULT_BUDGET):
    """Generalized hypergeometric series pFq(numerators; denominators; arg).

    A non-positive integer numerator makes the series a finite sum, which is
    evaluated term by term. Otherwise p <= q is required.
    """
    num = [complex(a) for a in numerators]
    den = [complex(b) for b in denominators]
    z = _as_complex(arg)
    p, q = len(num), len(den)
    terminating = [int(round(-a.real)) for a in num if _nonpositive_int(a)]
    nstop = min(terminating) if terminating else None
    if nstop is None and p > q:
        raise DivergentSeriesError(f"{p}F{q} with p > q diverges unless a numerator terminates")
    limit = nstop + 1 if nstop is not None else budget.max_terms
    for b in den:
        if _nonpositive_int(b) and int(round(-b.real)) < limit - 1:
            raise PoleError("denominator parameter hits a non-positive integer")

    term = np.ones(z.shape, dtype=complex)
    total = term.copy()
    small = np.zeros(z.shape, dtype=int)
    done = np.zeros(z.shape, dtype=bool)
    for k in range(limit - 1):
        ratio = np.ones((), dtype=complex)
        for a in num:
            ratio = ratio * (a + k)
        for b in den:
            ratio = ratio / (b + k)
        ratio = ratio * z / (k + 1)
        term = term * ratio
        total = np.where(done, total, total + term)
        if nstop is not None:
            continue
        tiny = np.abs(term) <= np.maximum(budget.target_rel_tol * np.abs(total), budget.target_abs_tol)
        decreasing = np.abs(ratio) < 1.0
        small = np.where(tiny & decreasing, small + 1, 0)
        done |= small >= 3
        if np.all(done):
            break
    else:
        if nstop is None and not np.all(done):
            raise SeriesDivergenceError("pFq series did not converge within max_terms")
    return total if total.ndim else complex(total)
