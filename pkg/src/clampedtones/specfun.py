"""Gauss hypergeometric solutions of the radial plate equation and Bessel helpers.

Hypergeometric values are addressed internally through s = asinh(sqrt(t)),
so t = sinh(s)**2 never has to be formed for very large balls, and they are
returned as ``(mantissa, log_scale)`` pairs meaning ``mantissa * exp(log_scale)``.

Every function here evaluates F(p - L/2, p + L/2; c; -t) for a discriminant L
that is real or purely imaginary.  Only the real number q = L**2 / 4 is
stored, and the Pochhammer products (a + k)(b + k) = (p + k)**2 - q are real
in both cases.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Union

from scipy import optimize, special
from scipy.integrate import solve_ivp

from .errors import DomainError, EvaluationError

TERM_CAP = 100_000
REL_TOL = 1e-15
EPS = 2.220446049250313e-16
LN2 = math.log(2.0)

T_DIRECT = 0.5          # plain series in -t up to here
T_LARGE = 3.0           # 1/t connection formula beyond here
CANCEL_LIMIT = 8.0      # tolerated exponent of cancellation in oscillatory series
DEGENERATE_TOL = 1e-5   # distance of L from an integer that counts as degenerate
POLE_GUARD = 1e-300

Sign = Union[str, int]


# ----------------------------------------------------------------------------
# parameters


def _sign_value(sign: Sign) -> int:
    if sign in ("+", 1, "plus"):
        return 1
    if sign in ("-", "−", -1, "minus"):
        return -1
    raise DomainError(f"sign must be '+' or '-', got {sign!r}")


def _check_half_integer(nu: float, upper: float = math.inf) -> None:
    if not (nu >= 0 and abs(2 * nu - round(2 * nu)) < 1e-12 and nu <= upper):
        raise DomainError(f"order nu={nu} must be a half-integer in [0, {upper}]")


@dataclass(frozen=True)
class HyperParams:
    """Index, trial eigenvalue and curvature defining the pair of solutions."""

    nu: float
    lam: float
    kappa: float

    def __post_init__(self):
        _check_half_integer(self.nu)
        if not self.kappa > 0:
            raise DomainError("kappa must be positive")
        if not self.lam >= 0:
            raise DomainError("lambda must be non-negative")

    @classmethod
    def from_dimension(cls, n: int, lam: float, kappa: float = 1.0) -> "HyperParams":
        if n < 2:
            raise DomainError("dimension must be at least 2")
        return cls(nu=n / 2 - 1, lam=lam, kappa=kappa)

    @property
    def n(self) -> int:
        return int(round(2 * self.nu + 2))

    @property
    def c(self) -> float:
        return self.nu + 1.0

    @property
    def lambda_plus(self) -> float:
        return math.sqrt(4.0 * self.q("+"))

    @property
    def lambda_minus_sq(self) -> float:
        return 4.0 * self.q("-")

    def q(self, sign: Sign) -> float:
        """Quarter of the squared discriminant for the chosen solution."""
        half = (self.n - 1) / 2.0
        r = self.lam / self.kappa
        if _sign_value(sign) > 0:
            return half * half + r * r
        return (half - r) * (half + r)


# ----------------------------------------------------------------------------
# log-safe elementary helpers


def ln_sinh(s: float) -> float:
    if s > 20.0:
        return s - LN2 + math.log1p(-math.exp(-2.0 * s))
    return math.log(math.sinh(s))


def ln_cosh(s: float) -> float:
    if s > 20.0:
        return s - LN2 + math.log1p(math.exp(-2.0 * s))
    return math.log(math.cosh(s))


def unscale(mantissa: float, log_scale: float) -> float:
    """mantissa * exp(log_scale) with overflow mapped to +-inf."""
    if mantissa == 0.0:
        return 0.0
    total = math.log(abs(mantissa)) + log_scale
    if total > 709.0:
        return math.copysign(math.inf, mantissa)
    return mantissa * math.exp(log_scale)


def s_of_t(t: float) -> float:
    if t < 0:
        raise DomainError("t must be non-negative")
    return math.asinh(math.sqrt(t))


def _t_of_s(s: float) -> float:
    return math.sinh(s) ** 2 if s < 350.0 else math.inf


# ----------------------------------------------------------------------------
# series kernels


def _not_converged(total, k, term):
    return EvaluationError(
        f"hypergeometric series did not converge within {k} terms "
        f"(partial sum {total!r}, last term {term!r})",
        partial_sum=total, terms=k, last_term=term,
    )


def _series_pq(p: float, q: float, c: float, x: float) -> float:
    """Plain series of F(p - L/2, p + L/2; c; x) in real arithmetic."""
    total = 1.0
    term = 1.0
    big = 1.0
    ax = abs(x)
    for k in range(TERM_CAP):
        pk = p + k
        ratio = (pk * pk - q) * x / ((c + k) * (k + 1.0))
        term *= ratio
        total += term
        mag = abs(term)
        if mag > big:
            big = mag
        if mag == 0.0:
            return total
        r = abs(ratio)
        if r < ax:
            r = ax
        if r < 1.0 and mag * r / (1.0 - r) <= max(REL_TOL * abs(total), EPS * big):
            return total
    raise _not_converged(total, TERM_CAP, term)


def _series(a, b, c, x):
    """Plain series of F(a, b; c; x); parameters may be complex."""
    total = 1.0
    term = 1.0
    big = 1.0
    ax = abs(x)
    for k in range(TERM_CAP):
        ratio = (a + k) * (b + k) * x / ((c + k) * (k + 1.0))
        term = term * ratio
        total = total + term
        mag = abs(term)
        if mag > big:
            big = mag
        if mag == 0.0:
            return total
        r = abs(ratio)
        if r < ax:
            r = ax
        if r < 1.0 and mag * r / (1.0 - r) <= max(REL_TOL * abs(total), EPS * big):
            return total
    raise _not_converged(total, TERM_CAP, term)


def _mapped(p: float, q: float, c: float, s: float):
    """Pfaff-transformed series (1+t)^(-b) F(c-a, b; c; t/(1+t))."""
    z = math.tanh(s) ** 2
    lc = ln_cosh(s)
    if q >= 0:
        h = math.sqrt(q)
        a, b = p - h, p + h
        return _series(c - a, b, c, z), -2.0 * b * lc
    g = math.sqrt(-q)
    a, b = complex(p, -g), complex(p, g)
    total = _series(c - a, b, c, z)
    return (total * cmath.exp(complex(0.0, -2.0 * g * lc))).real, -2.0 * p * lc


@lru_cache(maxsize=8192)
def _connection_coeffs(p: float, q: float, c: float):
    if q >= 0:
        h = math.sqrt(q)
        a, b = p - h, p + h
        ln1 = (special.gammaln(c) + special.gammaln(2 * h)
               - special.gammaln(b) - special.gammaln(c - a))
        if special.rgamma(a) == 0.0 or special.rgamma(c - b) == 0.0:
            return float(ln1), -math.inf, 0.0
        ln2 = (special.gammaln(c) + special.gammaln(-2 * h)
               - special.gammaln(a) - special.gammaln(c - b))
        sg2 = special.gammasgn(-2 * h) * special.gammasgn(a) * special.gammasgn(c - b)
        return float(ln1), float(ln2), float(sg2)
    g = math.sqrt(-q)
    a, b = complex(p, -g), complex(p, g)
    ln1 = (special.loggamma(c) + special.loggamma(complex(0.0, 2 * g))
           - special.loggamma(b) - special.loggamma(c - a))
    return complex(ln1), None, None


def _connection(p: float, q: float, c: float, s: float):
    """Large-t evaluation through the 1/t connection formula."""
    lt = 2.0 * ln_sinh(s)
    x = -math.exp(-lt)
    ln1, ln2, sg2 = _connection_coeffs(p, q, c)
    if q >= 0:
        h = math.sqrt(q)
        a, b = p - h, p + h
        l1 = ln1 - a * lt
        f1 = _series(a, a - c + 1.0, 1.0 - 2 * h, x)
        if sg2 == 0.0:
            return f1, l1
        l2 = ln2 - b * lt
        f2 = _series(b, b - c + 1.0, 1.0 + 2 * h, x)
        top = max(l1, l2)
        return f1 * math.exp(l1 - top) + sg2 * f2 * math.exp(l2 - top), top
    g = math.sqrt(-q)
    a = complex(p, -g)
    f1 = _series(a, a - c + 1.0, complex(1.0, -2 * g), x)
    lterm = ln1 - a * lt
    mant = 2.0 * (cmath.exp(complex(0.0, lterm.imag)) * f1).real
    return mant, lterm.real


def _ode(p: float, q: float, c: float, s: float, s0: float):
    """Integrate the hypergeometric equation in x = ln t from s0 to s."""
    m0, e0 = _hyp(p, q, c, s0)
    md, ed = _hyp(p + 1.0, q, c + 1.0, s0)
    ab = p * p - q
    t0 = math.sinh(s0) ** 2
    x0 = math.log(t0)
    x1 = 2.0 * ln_sinh(s)
    phi0 = -(ab / c) * t0 * (md / m0) * math.exp(ed - e0)

    if q >= 0:
        # Positive solution: Riccati equation for phi = w_x / w plus ln w.
        def rhs(x, y):
            u = math.exp(-x) if x < 700 else 0.0
            phi = y[1]
            dphi = -(((c - 1.0) * u + 2 * p) * phi + ab) / (1.0 + u) - phi * phi
            return [phi, dphi]

        y0 = [math.log(abs(m0)) + e0, phi0]
        sol = solve_ivp(rhs, (x0, x1), y0, method="DOP853", rtol=1e-12, atol=1e-14)
        if not sol.success:
            raise EvaluationError(f"ODE continuation failed: {sol.message}")
        return math.copysign(1.0, m0), float(sol.y[0, -1])

    # Oscillatory solution: linear equation for w * t^p.
    def rhs_lin(x, y):
        u = math.exp(-x) if x < 700 else 0.0
        w, wx = y
        acc = (2 * p * wx - p * p * w
               - (((c - 1.0) * u + 2 * p) * (wx - p * w) + ab * w) / (1.0 + u))
        return [wx, acc]

    w0 = m0 * math.exp(e0 + p * x0)
    y0 = [w0, w0 * (phi0 + p)]
    sol = solve_ivp(rhs_lin, (x0, x1), y0, method="DOP853", rtol=1e-12, atol=1e-14)
    if not sol.success:
        raise EvaluationError(f"ODE continuation failed: {sol.message}")
    return float(sol.y[0, -1]), -p * x1


def _hyp(p: float, q: float, c: float, s: float):
    """F(p - L/2, p + L/2; c; -sinh(s)^2) as (mantissa, log_scale), q = L^2/4."""
    if s == 0.0:
        return 1.0, 0.0
    t = _t_of_s(s)
    if q < 0:
        g = math.sqrt(-q)
        if t <= T_DIRECT:
            if 2 * g * math.sqrt(t) <= CANCEL_LIMIT:
                return _series_pq(p, q, c, -t), 0.0
        elif t <= T_LARGE and 2 * g * math.tanh(s) <= CANCEL_LIMIT:
            return _mapped(p, q, c, s)
        if t > 1.5 and 2 * g > DEGENERATE_TOL:
            return _connection(p, q, c, s)
        if t > T_LARGE:
            return _ode(p, q, c, s, math.asinh(math.sqrt(0.99 * T_LARGE)))
        t0 = (0.9 * CANCEL_LIMIT / (2 * g)) ** 2
        return _ode(p, q, c, s, math.asinh(math.sqrt(t0)))
    if t <= T_LARGE:
        return _mapped(p, q, c, s)
    h = math.sqrt(q)
    if abs(2 * h - round(2 * h)) > DEGENERATE_TOL:
        return _connection(p, q, c, s)
    return _ode(p, q, c, s, math.asinh(math.sqrt(0.99 * T_LARGE)))


# ----------------------------------------------------------------------------
# closed forms for n = 3 (c = 3/2, p = 1/2)


def _sinhc_scaled(q: float, s: float):
    """sinh(L s) / L as (mantissa, log_scale); entire in q = L^2/4."""
    x2 = 4.0 * q * s * s
    if abs(x2) < 1.0:
        total, term, k = 1.0, 1.0, 0
        while True:
            k += 1
            term *= x2 / ((2 * k) * (2 * k + 1))
            total += term
            if abs(term) < 1e-17 * abs(total):
                break
        return s * total, 0.0
    if q > 0:
        lam = 2.0 * math.sqrt(q)
        x = lam * s
        return 1.0, x - LN2 + math.log1p(-math.exp(-2.0 * x)) - math.log(lam)
    g = 2.0 * math.sqrt(-q)
    return math.sin(g * s) / g, 0.0


def _closed_G3(q: float, s: float):
    if s == 0.0:
        return 1.0, 0.0
    m, e = _sinhc_scaled(q, s)
    return m, e - ln_sinh(s)


def coth_branch(q: float, s: float) -> float:
    """L coth(L s), entire in q = L^2/4; cot form for q < 0."""
    x2 = 4.0 * q * s * s
    if abs(x2) < 1e-3:
        return (1.0 + x2 / 3.0 - x2 * x2 / 45.0 + 2.0 * x2 ** 3 / 945.0) / s
    if q > 0:
        lam = 2.0 * math.sqrt(q)
        return lam / math.tanh(lam * s)
    g = 2.0 * math.sqrt(-q)
    return g * math.cos(g * s) / math.sin(g * s)


# ----------------------------------------------------------------------------
# public hypergeometric interface


def hyper_scaled(sign: Sign, p: HyperParams, s: float, closed_form: Optional[bool] = None):
    """Scaled value of the solution at s = asinh(sqrt(t))."""
    q = p.q(sign)
    use_closed = p.n == 3 if closed_form is None else closed_form
    if use_closed:
        if p.n != 3:
            raise DomainError("closed forms exist only for n = 3")
        return _closed_G3(q, s)
    return _hyp(0.5, q, p.c, s)


def hyper_prime_scaled(sign: Sign, p: HyperParams, s: float):
    """Scaled d/dt of the solution at s = asinh(sqrt(t))."""
    q = p.q(sign)
    ab = 0.25 - q
    m, e = _hyp(1.5, q, p.c + 1.0, s)
    return -(ab / p.c) * m, e


def hyper_G(sign: Sign, p: HyperParams, t: float, closed_form: Optional[bool] = None) -> float:
    """F((1 - L)/2, (1 + L)/2; n/2; -t) for the '+' or '-' discriminant.

    For n = 3 the sinh/sin reduction is used unless ``closed_form=False``.
    """
    return unscale(*hyper_scaled(sign, p, s_of_t(t), closed_form))


def hyper_G_prime(sign: Sign, p: HyperParams, t: float) -> float:
    """d/dt of :func:`hyper_G`, via the contiguous function with shifted parameters."""
    return unscale(*hyper_prime_scaled(sign, p, s_of_t(t)))


def log_derivative_s(p_shift: float, q: float, c: float, s: float) -> float:
    """d/ds ln F(p - L/2, p + L/2; c; -sinh(s)^2) with p = p_shift."""
    m, e = _hyp(p_shift, q, c, s)
    if abs(m) < POLE_GUARD:
        raise ZeroDivisionError("solution vanishes")
    md, ed = _hyp(p_shift + 1.0, q, c + 1.0, s)
    ab = p_shift * p_shift - q
    return -(ab / c) * (md / m) * math.exp(ed - e + LN2 + ln_sinh(s) + ln_cosh(s))


# ----------------------------------------------------------------------------
# oscillation classifier


class OscillationKind(Enum):
    PositiveEverywhere = "PositiveEverywhere"
    Oscillatory = "Oscillatory"


@dataclass(frozen=True)
class OscillationVerdict:
    kind: OscillationKind
    first_sign_change: Optional[float] = None


def classify_w_minus(K: float, n: int, t_max: float, points: int = 10_000) -> OscillationVerdict:
    """Sample w_-^K on a geometric grid over (0, t_max] and look for a sign change.

    A PositiveEverywhere verdict only means no zero was found below t_max.
    """
    if not (K > 0 and t_max > 0):
        raise DomainError("K and t_max must be positive")
    if n < 2:
        raise DomainError("dimension must be at least 2")
    q = (n - 1) ** 2 / 4.0 - math.sqrt(K)
    c = n / 2.0
    s_max = s_of_t(t_max) if math.isfinite(t_max) else math.inf
    ln_lo = math.log(min(1e-2 / (1.0 + abs(q)), t_max))
    ln_hi = math.log(t_max)

    def s_of_ln(lt):
        # asinh(sqrt(e^lt)) without forming e^lt for huge lt
        if lt > 60:
            return 0.5 * lt + LN2 + math.log1p(math.exp(-lt) / 4.0) if lt < 700 else 0.5 * lt + LN2
        return math.asinh(math.exp(0.5 * lt))

    def value(lt):
        return _hyp(0.5, q, c, min(s_of_ln(lt), s_max))[0]

    prev = ln_lo
    for i in range(1, points + 1):
        lt = ln_lo + (ln_hi - ln_lo) * i / points
        if value(lt) <= 0.0:
            root = optimize.bisect(value, prev, lt, xtol=1e-13, maxiter=200)
            return OscillationVerdict(OscillationKind.Oscillatory, math.exp(root))
        prev = lt
    return OscillationVerdict(OscillationKind.PositiveEverywhere, None)


# ----------------------------------------------------------------------------
# Bessel functions of half-integer order


BESSEL_MAX_ORDER = 12.0


def _j_series(nu: float, x: float) -> float:
    y = -0.25 * x * x
    total, term, k = 1.0, 1.0, 0
    while True:
        k += 1
        term *= y / (k * (nu + k))
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return total * math.exp(nu * math.log(0.5 * x) - math.lgamma(nu + 1.0))


def _i_series(nu: float, x: float) -> float:
    y = 0.25 * x * x
    total, term, k = 1.0, 1.0, 0
    while True:
        k += 1
        term *= y / (k * (nu + k))
        total += term
        if term < 1e-17 * total:
            break
    return total * math.exp(nu * math.log(0.5 * x) - math.lgamma(nu + 1.0))


def _j_miller(nu: float, x: float) -> float:
    """Backward recurrence normalised by J_0 + 2 sum J_2k = 1 or by the order -1/2, 1/2 pair."""
    half = abs(nu - round(nu)) > 0.25
    base = -0.5 if half else 0.0
    top = int(max(x, nu) + 20 + 3 * math.sqrt(max(x, nu))) + 2
    vals = [0.0] * (top + 2)
    vals[top] = 1e-30
    for k in range(top, 0, -1):
        mu = base + k
        vals[k - 1] = (2.0 * mu / x) * vals[k] - vals[k + 1]
        if abs(vals[k - 1]) > 1e250:
            for j in range(k - 1, top + 1):
                vals[j] *= 1e-250
    if half:
        pref = math.sqrt(2.0 / (math.pi * x))
        exact_m, exact_p = pref * math.cos(x), pref * math.sin(x)
        scale = (vals[0] * exact_m + vals[1] * exact_p) / (vals[0] ** 2 + vals[1] ** 2)
    else:
        scale = 1.0 / (vals[0] + 2.0 * sum(vals[2::2]))
    return scale * vals[int(round(nu - base))]


def _j_hankel(nu: float, x: float) -> float:
    mu = 4.0 * nu * nu
    P, Q = 1.0, 0.0
    term = 1.0
    k = 0
    prev = math.inf
    while True:
        k += 1
        term *= (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(term) > prev or abs(term) < 1e-17:
            break
        prev = abs(term)
        if k % 2:
            Q += term if (k // 2) % 2 == 0 else -term
        else:
            P += term if (k // 2) % 2 == 0 else -term
    w = x - (0.5 * nu + 0.25) * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (P * math.cos(w) - Q * math.sin(w))


def bessel_j(nu: float, x: float) -> float:
    _check_half_integer(nu, BESSEL_MAX_ORDER)
    if x <= 0:
        raise DomainError("x must be positive")
    if x >= 0.5 and nu == 0.5:
        return math.sqrt(2.0 / (math.pi * x)) * math.sin(x)
    if x >= 0.5 and nu == 1.5:
        return math.sqrt(2.0 / (math.pi * x)) * (math.sin(x) / x - math.cos(x))
    if x < 2.0:
        return _j_series(nu, x)
    if x > 60.0 + nu * nu:
        return _j_hankel(nu, x)
    return _j_miller(nu, x)


def bessel_i(nu: float, x: float) -> float:
    _check_half_integer(nu, BESSEL_MAX_ORDER)
    if x <= 0:
        raise DomainError("x must be positive")
    if x >= 0.5 and nu == 0.5:
        return math.sqrt(2.0 / (math.pi * x)) * math.sinh(x)
    if x >= 0.5 and nu == 1.5:
        return math.sqrt(2.0 / (math.pi * x)) * (math.cosh(x) - math.sinh(x) / x)
    return _i_series(nu, x)


def bessel_pair(nu: float, x: float):
    """(J_nu(x), I_nu(x)) for half-integer nu up to 12."""
    return bessel_j(nu, x), bessel_i(nu, x)


def _first_sign_change(f, step: float, start: float):
    x0, f0 = start, f(start)
    for _ in range(100_000):
        x1 = x0 + step
        f1 = f(x1)
        if f0 * f1 <= 0.0:
            return x0, x1
        x0, f0 = x1, f1
    raise EvaluationError("no sign change found")


def bessel_zero(nu: float, k: int = 1) -> float:
    """k-th positive zero of J_nu by sign scan and bisection."""
    _check_half_integer(nu, BESSEL_MAX_ORDER)
    if k < 1:
        raise DomainError("k must be at least 1")
    x = 0.05
    root = x
    for _ in range(k):
        lo, hi = _first_sign_change(lambda y: bessel_j(nu, y), 0.05, x)
        root = optimize.bisect(lambda y: bessel_j(nu, y), lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
        x = root + 0.05
    return root


def bessel_first_zero(nu: float) -> float:
    return bessel_zero(nu, 1)


def cross_product(nu: float, x: float) -> float:
    """J_nu I_(nu+1) + I_nu J_(nu+1)."""
    return bessel_j(nu, x) * bessel_i(nu + 1, x) + bessel_i(nu, x) * bessel_j(nu + 1, x)


@lru_cache(maxsize=64)
def cross_product_root(nu: float) -> float:
    """First positive zero of J_nu I_(nu+1) + I_nu J_(nu+1)."""
    _check_half_integer(nu, BESSEL_MAX_ORDER - 1)
    f = lambda y: cross_product(nu, y)  # noqa: E731
    lo, hi = _first_sign_change(f, 0.05, 0.05)
    return optimize.bisect(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
