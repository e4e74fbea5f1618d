"""Fundamental tones of clamped geodesic balls and the two-ball problem.

For kappa > 0 the work happens in the scaled radius s = kappa r / 2, with
t = sinh(s)^2.  The function actually root-solved is

    Khat(lam, s) = d/ds ln G_-(s) - d/ds ln G_+(s) = sinh(2s) K(lam, t),

which has the same zeros and poles as K but stays O(lam) for huge balls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, NamedTuple

from scipy import optimize

from . import specfun
from .errors import DomainError, EvaluationError, PoleError, SolverError
from .geometry import SpaceForm, TwoBallConfig, ball_volume, half_volume_radius
from .specfun import (
    CANCEL_LIMIT,
    LN2,
    POLE_GUARD,
    T_LARGE,
    coth_branch,
    ln_cosh,
    ln_sinh,
)

ROOT_RTOL = 1e-12   # width below which two poles count as one
POLE_RTOL = 1e-15
EDGE_FRACTION = 1e-9


class Method(Enum):
    ClosedForm3D = "ClosedForm3D"
    Series2D = "Series2D"
    Euclidean = "Euclidean"
    AsymptoticSmallL = "AsymptoticSmallL"
    AsymptoticLargeL = "AsymptoticLargeL"


@dataclass(frozen=True)
class ToneResult:
    """Root of the tone equation together with its bracket and diagnostics.

    ``residual`` is measured on the scaled function that was solved.
    """

    lam: float
    gamma: float
    bracket_lo: float
    bracket_hi: float
    residual: float
    iterations: int
    method: Method

    @property
    def gamma_fourth_root(self) -> float:
        return self.lam


class SharpnessGap(NamedTuple):
    g1: float
    lam: float
    holds: bool


class Threshold(NamedTuple):
    radius: float
    volume_cap: float


def _require_curved(sf: SpaceForm, dims=(2, 3)) -> None:
    if not sf.kappa > 0:
        raise DomainError("this operation needs kappa > 0")
    if dims is not None and sf.n not in dims:
        raise DomainError(f"dimension {sf.n} is not supported here (need one of {dims})")


def _q_pair(sf: SpaceForm, lam: float):
    half = (sf.n - 1) / 2.0
    r = lam / sf.kappa
    return (half - r) * (half + r), half * half + r * r


def _ln_sinh2(s: float) -> float:
    return LN2 + ln_sinh(s) + ln_cosh(s)


# ----------------------------------------------------------------------------
# the K function


def _ratio_2d(q: float, z: float) -> float:
    """F(b, b+1; 2; z) / F(b, b; 1; z) with b = 1/2 + sqrt(q), real part."""
    if q >= 0:
        b = 0.5 + math.sqrt(q)
    else:
        b = complex(0.5, math.sqrt(-q))
    den = specfun._series(b, b, 1.0, z)
    if abs(den) < POLE_GUARD:
        raise ZeroDivisionError("solution vanishes")
    num = specfun._series(b, b + 1.0, 2.0, z)
    return (num / den).real


def _k_hat_raw(sf: SpaceForm, lam: float, s: float) -> float:
    qm, qp = _q_pair(sf, lam)
    if sf.n == 3:
        return coth_branch(qm, s) - coth_branch(qp, s)
    if sf.n == 2:
        t = math.sinh(s) ** 2 if s < 350 else math.inf
        if t <= T_LARGE and (qm >= 0 or 2.0 * math.sqrt(-qm) * math.tanh(s) <= CANCEL_LIMIT):
            z = math.tanh(s) ** 2
            r = lam / sf.kappa
            return -2.0 * r * r * math.tanh(s) * (_ratio_2d(qp, z) + _ratio_2d(qm, z))
    c = sf.n / 2.0
    return specfun.log_derivative_s(0.5, qm, c, s) - specfun.log_derivative_s(0.5, qp, c, s)


def _nearest_pole(sf: SpaceForm, lam: float, s: float) -> float:
    best = math.inf
    for k in range(1, 10_000):
        g = _pole_s(sf, k, s)
        if abs(g - lam) < abs(best - lam):
            best = g
        if g > lam:
            break
    return best


def k_hat(sf: SpaceForm, lam: float, s: float) -> float:
    """Scaled K at s = kappa r / 2 for kappa > 0; raises PoleError at a zero of G_-."""
    _require_curved(sf, dims=None)
    if not (lam > 0 and s > 0):
        raise DomainError("need lambda > 0 and s > 0")
    try:
        return _k_hat_raw(sf, lam, s)
    except ZeroDivisionError:
        raise PoleError(f"lambda={lam} is a pole of K", nearest_pole=_nearest_pole(sf, lam, s)) from None


def _k_euclidean(nu: float, lam: float, r: float) -> float:
    x = lam * r
    jn, i_n = specfun.bessel_pair(nu, x)
    if abs(jn) < POLE_GUARD:
        raise PoleError(f"lambda={lam} is a pole of K", nearest_pole=lam)
    return -lam * (specfun.bessel_j(nu + 1, x) / jn + specfun.bessel_i(nu + 1, x) / i_n)


def K_nu(sf: SpaceForm, lam: float, t: float) -> float:
    """G_-'/G_- - G_+'/G_+ at argument t.

    For kappa = 0 the tilde coordinate does not exist and t is read as the
    Euclidean radius; the result is then the log-derivative difference of
    r^(-nu) J_nu(lam r) and r^(-nu) I_nu(lam r).
    """
    if not (lam > 0 and t > 0):
        raise DomainError("need lambda > 0 and t > 0")
    if sf.kappa == 0:
        return _k_euclidean(sf.nu, lam, t)
    s = specfun.s_of_t(t)
    return k_hat(sf, lam, s) * math.exp(-_ln_sinh2(s))


def K_nu_at_radius(sf: SpaceForm, lam: float, r: float, scaled: bool = False) -> float:
    """K expressed through the geodesic radius; ``scaled`` returns sinh(kappa r) K instead."""
    if sf.kappa == 0:
        return _k_euclidean(sf.nu, lam, r)
    s = 0.5 * sf.kappa * r
    val = k_hat(sf, lam, s)
    return val if scaled else val * math.exp(-_ln_sinh2(s))


# ----------------------------------------------------------------------------
# poles


@lru_cache(maxsize=4096)
def _pole_s(sf: SpaceForm, k: int, s: float) -> float:
    kappa = sf.kappa
    if sf.n == 3:
        return kappa * math.sqrt(1.0 + (k * math.pi / (2.0 * s)) ** 2)
    half = (sf.n - 1) / 2.0
    c = sf.n / 2.0

    def g_minus(gam):
        return specfun._hyp(0.5, -gam * gam, c, s)[0]

    # zeros in gamma are roughly pi/(2s) apart; eight samples per spacing
    step = math.pi / (16.0 * s)
    lo, f_lo = 0.0, 1.0
    found = 0
    for i in range(1, 64 * k + 1000):
        hi = i * step
        f_hi = g_minus(hi)
        if f_hi == 0.0 or (f_hi > 0) != (f_lo > 0):
            found += 1
            if found == k:
                # G_- is smooth in gamma, so a bracketing secant method is safe here
                gam = hi if f_hi == 0.0 else optimize.brentq(
                    g_minus, lo, hi, xtol=1e-300, rtol=POLE_RTOL, maxiter=200)
                return kappa * math.sqrt(half * half + gam * gam)
        lo, f_lo = hi, f_hi
    raise SolverError(f"pole {k} not found within the scan window")


def pole_g(sf: SpaceForm, k: int, t: float) -> float:
    """k-th zero in lambda of G_-(nu, lambda, t)."""
    _require_curved(sf, dims=None)
    if k < 1 or not t > 0:
        raise DomainError("need k >= 1 and t > 0")
    return _pole_s(sf, k, specfun.s_of_t(t))


def pole_at_radius(sf: SpaceForm, k: int, r: float) -> float:
    if sf.kappa == 0:
        return specfun.bessel_zero(sf.nu, k) / r
    return _pole_s(sf, k, 0.5 * sf.kappa * r)


# ----------------------------------------------------------------------------
# bracketed root solver


def _solve_between(f: Callable[[float], float], lo: float, hi: float):
    """Root of a function decreasing from +inf at lo to -inf at hi.

    Returns (root, residual, iterations).
    """
    width = hi - lo
    iterations = 0

    def inward(x0, direction):
        nonlocal iterations
        eps = EDGE_FRACTION * width
        for _ in range(60):
            x = x0 + direction * eps
            iterations += 1
            try:
                v = f(x)
            except (PoleError, ZeroDivisionError, EvaluationError):
                v = math.nan
            if math.isfinite(v) and x != x0:
                return x, v
            eps *= 2.0
        raise SolverError(f"could not step inside the bracket at {x0}")

    a, fa = inward(lo, 1.0)
    b, fb = inward(hi, -1.0)
    if fa == 0.0:
        return a, 0.0, iterations
    if fb == 0.0:
        return b, 0.0, iterations
    if (fa > 0) == (fb > 0):
        raise SolverError(f"no sign change in [{lo}, {hi}] (f={fa}, {fb})")
    # bisect past the nominal width down to floating resolution; it is cheap
    # and keeps the tiny deltas of large balls accurate
    while iterations < 400:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = f(m)
        iterations += 1
        if fm == 0.0:
            return m, 0.0, iterations
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    x = a - fa * (b - a) / (fb - fa)
    if not a < x < b:
        x = 0.5 * (a + b)
    fx = f(x)
    iterations += 1
    best = min(((abs(fx), x), (abs(fa), a), (abs(fb), b)))
    return best[1], best[0], iterations


def _method(sf: SpaceForm) -> Method:
    if sf.kappa == 0:
        return Method.Euclidean
    return Method.ClosedForm3D if sf.n == 3 else Method.Series2D


# ----------------------------------------------------------------------------
# tones


def fundamental_tone(sf: SpaceForm, L: float) -> ToneResult:
    """Clamped-plate fundamental tone of the geodesic ball of radius L."""
    if not L > 0:
        raise DomainError("radius must be positive")
    if sf.kappa == 0:
        h = specfun.cross_product_root(sf.nu)
        lam = h / L
        return ToneResult(
            lam=lam, gamma=lam ** 4,
            bracket_lo=specfun.bessel_zero(sf.nu, 1) / L,
            bracket_hi=specfun.bessel_zero(sf.nu, 2) / L,
            residual=abs(specfun.cross_product(sf.nu, h)), iterations=0,
            method=Method.Euclidean,
        )
    _require_curved(sf)
    s = 0.5 * sf.kappa * L
    lo, hi = _pole_s(sf, 1, s), _pole_s(sf, 2, s)
    lam, res, its = _solve_between(lambda x: k_hat(sf, x, s), lo, hi)
    return ToneResult(lam, lam ** 4, lo, hi, res, its, _method(sf))


def two_ball_tone(sf: SpaceForm, cfg: TwoBallConfig) -> ToneResult:
    """Smallest root of the two-ball determinant function."""
    _require_curved(sf)
    cfg = cfg.ordered()
    if cfg.beta <= 0:
        raise DomainError("degenerate configuration alpha = beta = 0")
    s_a = specfun.s_of_t(cfg.alpha)
    s_b = specfun.s_of_t(cfg.beta)
    lo = _pole_s(sf, 1, s_b)
    g1a = _pole_s(sf, 1, s_a) if cfg.alpha > 0 else math.inf
    hi = min(g1a, _pole_s(sf, 2, s_b))
    if hi - lo <= ROOT_RTOL * hi:
        # equal balls: the root sits on the common pole
        return ToneResult(lo, lo ** 4, lo, hi, 0.0, 0, _method(sf))
    if cfg.alpha > 0:
        w = math.exp((2 * sf.nu + 1) * (_ln_sinh2(s_a) - _ln_sinh2(s_b)))

        def f(x):
            return k_hat(sf, x, s_b) + w * k_hat(sf, x, s_a)
    else:
        def f(x):
            return k_hat(sf, x, s_b)

    lam, res, its = _solve_between(f, lo, hi)
    return ToneResult(lam, lam ** 4, lo, hi, res, its, _method(sf))


def mckean_floor(sf: SpaceForm) -> float:
    return (sf.n - 1) ** 4 * sf.kappa ** 4 / 16.0


def tone_asymptotic_small(sf: SpaceForm, L: float) -> float:
    """((n-1)^2 kappa^2 / 4 + h_nu^2 / L^2)^2."""
    if not L > 0:
        raise DomainError("radius must be positive")
    h = specfun.cross_product_root(sf.nu)
    return ((sf.n - 1) ** 2 * sf.kappa ** 2 / 4.0 + (h / L) ** 2) ** 2


def tone_asymptotic_large_3d(kappa: float, L: float) -> float:
    """kappa^4 (1 + pi^2 / (kappa L)^2)^2."""
    if not (kappa > 0 and L > 0):
        raise DomainError("need kappa > 0 and L > 0")
    return kappa ** 4 * (1.0 + (math.pi / (kappa * L)) ** 2) ** 2


def sharpness_gap(sf: SpaceForm, L: float) -> SharpnessGap:
    """First pole on the half-volume ball against the tone of the full ball."""
    _require_curved(sf)
    L0 = half_volume_radius(sf, L)
    g1 = _pole_s(sf, 1, 0.5 * sf.kappa * L0)
    lam = fundamental_tone(sf, L).lam
    return SharpnessGap(g1, lam, g1 >= lam)


def threshold_radius(sf: SpaceForm, step: float = 0.01, window: float = 10.0) -> Threshold:
    """First radius where the sharpness gap changes sign, with the volume of that ball."""
    _require_curved(sf)

    def gap(L):
        g = sharpness_gap(sf, L)
        return g.g1 - g.lam

    h = step / sf.kappa
    prev = h
    if gap(prev) <= 0:
        raise SolverError("sharpness gap is already negative at the first scan point")
    for i in range(2, int(round(window / step)) + 1):
        L = i * h
        if gap(L) <= 0:
            root = optimize.bisect(gap, prev, L, xtol=1e-12 / sf.kappa, maxiter=200)
            return Threshold(root, ball_volume(sf, root))
        prev = L
    raise SolverError(f"no sign change of the sharpness gap on (0, {window / sf.kappa}]")


def cheng_yang_upper(sf: SpaceForm, l: int, gamma1: float) -> float:
    """Upper bound for the (l+1)-st clamped eigenvalue from the first one."""
    floor = mckean_floor(sf)
    if l < 1:
        raise DomainError("l must be at least 1")
    if gamma1 < floor * (1 - 1e-12):
        raise DomainError("gamma1 lies below the McKean floor")
    return floor + 25.0 * l ** 12 * (gamma1 - floor)


def ashbaugh_laugesen_Dn(n: int) -> float:
    """2^(4/n) (j_(nu,1) / h_nu)^4."""
    if n < 4:
        raise DomainError("defined for n >= 4")
    nu = n / 2 - 1
    return 2.0 ** (4.0 / n) * (specfun.bessel_first_zero(nu) / specfun.cross_product_root(nu)) ** 4


# ----------------------------------------------------------------------------
# eigenfunction


@dataclass(frozen=True)
class EigenProfile:
    """Radial eigenfunction v = (1 - r^2)^nu (A G_+ + B G_-) in the Poincare radius r."""

    A: float
    B: float
    lam: float
    ball_tilde: float
    sf: SpaceForm

    def __call__(self, r: float) -> float:
        if not 0 <= r < 1:
            raise DomainError("Poincare radius must lie in [0, 1)")
        s = math.atanh(r)
        p = specfun.HyperParams(self.sf.nu, self.lam, self.sf.kappa)
        gp = specfun.unscale(*specfun.hyper_scaled("+", p, s))
        gm = specfun.unscale(*specfun.hyper_scaled("-", p, s))
        return (1.0 - r * r) ** self.sf.nu * (self.A * gp + self.B * gm)

    def at_radius(self, rho: float) -> float:
        """Value at geodesic distance rho from the centre."""
        return self(math.tanh(0.5 * self.sf.kappa * rho))


def eigenfunction_profile(sf: SpaceForm, L: float) -> EigenProfile:
    _require_curved(sf)
    tone = fundamental_tone(sf, L)
    s = 0.5 * sf.kappa * L
    p = specfun.HyperParams(sf.nu, tone.lam, sf.kappa)
    mp, ep = specfun.hyper_scaled("+", p, s)
    mm, em = specfun.hyper_scaled("-", p, s)
    ratio = (mp / mm) * math.exp(ep - em)
    A = 1.0 / (1.0 - ratio)
    B = -ratio / (1.0 - ratio)
    return EigenProfile(A, B, tone.lam, math.sinh(s) ** 2 if s < 350 else math.inf, sf)
