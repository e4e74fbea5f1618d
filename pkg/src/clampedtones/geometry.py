"""Volumes of geodesic balls in space forms of curvature -kappa^2 and the two-ball split."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate, optimize

from .errors import DomainError
from .specfun import LN2, ln_sinh

BISECT_XTOL = 1e-300  # run to floating resolution, well past 1e-13 absolute
BISECT_RTOL = 4 * 2.3e-16
BISECT_MAXITER = 200


@dataclass(frozen=True)
class SpaceForm:
    """Simply connected space form of dimension n and sectional curvature -kappa^2."""

    n: int
    kappa: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.n}")
        if not (self.kappa >= 0 and math.isfinite(self.kappa)):
            raise DomainError(f"kappa must be finite and >= 0, got {self.kappa}")

    @property
    def nu(self) -> float:
        return self.n / 2 - 1

    @property
    def euclidean(self) -> bool:
        return self.kappa == 0


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def _sinh_power_integral_log(n: int, x: float) -> float:
    """log of int_0^x sinh(u)^(n-1) du, evaluated with the factor e^((n-1)x) pulled out."""
    if x == 0:
        return -math.inf
    m = n - 1
    if x < 1.0:
        val, _ = integrate.quad(lambda u: math.sinh(u) ** m, 0.0, x, epsabs=0, epsrel=1e-13)
        return math.log(val)

    def scaled(u):
        # (sinh(u) e^(-x))^m without overflow
        return math.exp(m * (ln_sinh(u) - x)) if u > 0 else 0.0

    val, _ = integrate.quad(scaled, 0.0, x, epsabs=0, epsrel=1e-13, limit=200)
    return m * x + math.log(val)


def _log_kernel3(x: float) -> float:
    """log of (sinh 2x - 2x)/4 = int_0^x sinh(u)^2 du, for 0 < x < 20."""
    if x >= 0.5:
        return math.log((math.sinh(2.0 * x) - 2.0 * x) / 4.0)
    # sum_k y^(2k+1)/(2k+1)! with the leading y^3/6 factored out, so tiny x
    # neither underflows nor loses the log
    y = 2.0 * x
    total, term, k = 1.0, 1.0, 2
    while True:
        term *= y * y / ((2 * k) * (2 * k + 1))
        total += term
        if term <= 1e-17 * total:
            break
        k += 1
    return 3.0 * math.log(y) - math.log(24.0) + math.log(total)


def log_ball_volume(sf: SpaceForm, r: float) -> float:
    """Natural log of the ball volume; finite for radii whose volume overflows."""
    if r < 0:
        raise DomainError("radius must be non-negative")
    if r == 0:
        return -math.inf
    n, k = sf.n, sf.kappa
    if k == 0:
        return math.log(unit_ball_volume(n)) + n * math.log(r)
    x = k * r
    area = math.log(n * unit_ball_volume(n)) - n * math.log(k)
    if n == 2:
        # 2 pi (cosh x - 1) / k^2 = 4 pi sinh^2(x/2) / k^2
        return math.log(4.0 * math.pi) - 2 * math.log(k) + 2.0 * ln_sinh(0.5 * x)
    if n == 3:
        if x < 20.0:
            return area + _log_kernel3(x)
        # sinh 2x - 2x = e^(2x)/2 (1 - e^(-4x) - 4x e^(-2x))
        return area + 2.0 * x - LN2 - math.log(4.0) + math.log1p(-math.exp(-4.0 * x) - 4.0 * x * math.exp(-2.0 * x))
    return area + _sinh_power_integral_log(n, x)


def ball_volume(sf: SpaceForm, r: float) -> float:
    """Volume of the geodesic ball of radius r (may be inf when it overflows)."""
    lv = log_ball_volume(sf, r)
    return math.exp(lv) if lv < 709.0 else math.inf


def tilde_of_radius(kappa: float, r: float) -> float:
    """sinh^2(kappa r / 2)."""
    if not kappa > 0:
        raise DomainError("tilde coordinate needs kappa > 0")
    if r < 0:
        raise DomainError("radius must be non-negative")
    return math.sinh(0.5 * kappa * r) ** 2


def radius_of_tilde(kappa: float, t: float) -> float:
    if not kappa > 0:
        raise DomainError("tilde coordinate needs kappa > 0")
    if t < 0:
        raise DomainError("tilde coordinate must be non-negative")
    return 2.0 * math.asinh(math.sqrt(t)) / kappa


def volume_of_tilde(sf: SpaceForm, t: float) -> float:
    """Ball volume expressed through the tilde coordinate; exact for n = 2."""
    if sf.n == 2:
        if not sf.kappa > 0:
            raise DomainError("tilde coordinate needs kappa > 0")
        return 4.0 * math.pi * t / sf.kappa ** 2
    return ball_volume(sf, radius_of_tilde(sf.kappa, t))


def _bisect(f, lo: float, hi: float) -> float:
    if f(lo) == 0.0:
        return lo
    if f(hi) == 0.0:
        return hi
    # disp=False: roots near 0 may stop on the iteration cap at ~2^-200 width
    return optimize.bisect(f, lo, hi, xtol=BISECT_XTOL, rtol=BISECT_RTOL, maxiter=BISECT_MAXITER, disp=False)


def beta_from_alpha(sf: SpaceForm, alpha: float, total_tilde: float) -> float:
    """beta >= 0 such that the two balls with tilde radii alpha, beta fill the ball of total_tilde."""
    if alpha < 0 or total_tilde <= 0:
        raise DomainError("need alpha >= 0 and total_tilde > 0")
    if alpha > total_tilde * (1 + 1e-15):
        raise DomainError("alpha exceeds the total volume")
    if sf.n == 2:
        return max(total_tilde - alpha, 0.0)
    if alpha == 0:
        return total_tilde
    target = volume_of_tilde(sf, total_tilde) - volume_of_tilde(sf, alpha)
    if target <= 0:
        return 0.0
    return _bisect(lambda b: volume_of_tilde(sf, b) - target, 0.0, total_tilde)


def half_volume_radius(sf: SpaceForm, L: float) -> float:
    """Radius L0 with 2 V(L0) = V(L)."""
    if not L > 0:
        raise DomainError("radius must be positive")
    if sf.kappa == 0:
        return 2.0 ** (-1.0 / sf.n) * L
    target = log_ball_volume(sf, L) - LN2
    return _bisect(lambda r: log_ball_volume(sf, r) - target if r > 0 else -math.inf, 0.0, L)


@dataclass(frozen=True)
class TwoBallConfig:
    """Tilde radii of two balls whose volumes add up to that of the ball with total_tilde."""

    alpha: float
    beta: float
    total_tilde: float

    @classmethod
    def from_alpha(cls, sf: SpaceForm, alpha: float, total_tilde: float) -> "TwoBallConfig":
        return cls(alpha, beta_from_alpha(sf, alpha, total_tilde), total_tilde)

    def residual(self, sf: SpaceForm) -> float:
        """Relative mismatch of the volume constraint."""
        whole = volume_of_tilde(sf, self.total_tilde)
        parts = volume_of_tilde(sf, self.alpha) + volume_of_tilde(sf, self.beta)
        return abs(parts - whole) / whole

    def ordered(self) -> "TwoBallConfig":
        if self.alpha <= self.beta:
            return self
        return TwoBallConfig(self.beta, self.alpha, self.total_tilde)
