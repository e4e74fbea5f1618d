import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from clampedtones import specfun, tones
from clampedtones.errors import DomainError, PoleError
from clampedtones.geometry import SpaceForm, TwoBallConfig, half_volume_radius
from clampedtones.specfun import HyperParams
from clampedtones.tones import (
    K_nu,
    fundamental_tone,
    pole_g,
    sharpness_gap,
    threshold_radius,
    two_ball_tone,
)

import reference_values as ref

S2, S3 = SpaceForm(2), SpaceForm(3)


def tilde(L):
    return math.sinh(L / 2) ** 2


# ----------------------------------------------------------------------------
# K


def test_K_middle_branch_n3():
    t = 0.6
    u = math.log(math.sqrt(t) + math.sqrt(1 + t))
    want = (1 / (2 * math.sqrt(t * (1 + t)))) * (1 / u - 2 * math.sqrt(2) / math.tanh(2 * math.sqrt(2) * u))
    assert_allclose(K_nu(S3, 1.0, t), want, rtol=1e-12)


@pytest.mark.parametrize("sf", [S2, S3])
def test_K_vanishes_as_lambda_to_zero(sf):
    assert abs(K_nu(sf, 1e-4, 0.7)) < 1e-6


@pytest.mark.parametrize("lam,t", [(2.0, 0.5), (0.3, 0.5), (1.2, 9.0), (5.0, 0.02)])
def test_K_n2_against_generic(lam, t):
    p = HyperParams.from_dimension(2, lam)
    generic = (specfun.hyper_G_prime("-", p, t) / specfun.hyper_G("-", p, t)
               - specfun.hyper_G_prime("+", p, t) / specfun.hyper_G("+", p, t))
    assert_allclose(K_nu(S2, lam, t), generic, rtol=1e-9)


def test_K_changes_sign_across_pole():
    t = 0.5
    g1 = pole_g(S2, 1, t)
    below, above = K_nu(S2, g1 * (1 - 1e-9), t), K_nu(S2, g1 * (1 + 1e-9), t)
    assert below < -1e6 and above > 1e6


def test_K_pole_error(monkeypatch):
    # a float pole never makes G_- vanish exactly, so force the guard
    def vanish(*args):
        raise ZeroDivisionError

    t = 0.5
    g1 = pole_g(S2, 1, t)
    monkeypatch.setattr(tones, "_k_hat_raw", vanish)
    with pytest.raises(PoleError) as info:
        K_nu(S2, g1 * (1 + 1e-12), t)
    assert info.value.nearest_pole == pytest.approx(g1, rel=1e-9)


def test_K_rejects_bad_input():
    with pytest.raises(DomainError):
        K_nu(S3, -1.0, 0.5)


# ----------------------------------------------------------------------------
# poles


@pytest.mark.parametrize("k,t", list(ref.POLES_N2))
def test_poles_n2(k, t):
    assert_allclose(pole_g(S2, k, float(t)), float(ref.POLES_N2[(k, t)]), rtol=1e-11)


def test_pole_n2_residual():
    t = 0.5
    g2 = pole_g(S2, 2, t)
    assert abs(specfun.hyper_G("-", HyperParams.from_dimension(2, g2), t)) < 1e-10


def test_pole_n3_closed():
    L = 1.3
    assert_allclose(pole_g(S3, 1, tilde(L)), math.sqrt(1 + (math.pi / L) ** 2), rtol=1e-14)


def test_pole_n2_small_ball_limit():
    L0 = 0.01
    want = math.sqrt(1 / 3 + (specfun.bessel_first_zero(0.0) / L0) ** 2)
    assert abs(pole_g(S2, 1, tilde(L0)) / want - 1) < 1e-2


@pytest.mark.parametrize("sf", [S2, S3])
@pytest.mark.parametrize("t", [0.05, 2.0])
def test_K_decreasing_between_poles(sf, t):
    poles = [pole_g(sf, k, t) for k in (1, 2, 3)]
    for lo, hi in zip(poles, poles[1:]):
        w = hi - lo
        grid = np.linspace(lo + 1e-6 * w, hi - 1e-6 * w, 1000)
        vals = np.array([K_nu(sf, float(x), t) for x in grid])
        assert np.all(np.diff(vals) < 0)
        assert vals[0] > 0 > vals[-1]


# ----------------------------------------------------------------------------
# fundamental tone


@pytest.mark.parametrize("n,L", list(ref.TABLE1))
def test_table1_algebraic(n, L):
    res = fundamental_tone(SpaceForm(n), float(L))
    assert_allclose(res.lam, float(ref.TABLE1[(n, L)]), rtol=1e-11)
    assert res.bracket_lo < res.lam < res.bracket_hi
    assert res.residual < 1e-9
    assert res.gamma == res.lam ** 4


@pytest.mark.parametrize("L", list(ref.TABLE2_DELTA))
def test_table2_delta(L):
    delta = fundamental_tone(S3, float(L)).lam - 1
    assert_allclose(delta, float(ref.TABLE2_DELTA[L]), rtol=1e-6)


@pytest.mark.parametrize("L", list(ref.N2_TONE_LARGE))
def test_n2_large(L):
    assert_allclose(fundamental_tone(S2, float(L)).lam, float(ref.N2_TONE_LARGE[L]), rtol=1e-10)


def test_methods():
    assert fundamental_tone(S3, 1.0).method is tones.Method.ClosedForm3D
    assert fundamental_tone(S2, 1.0).method is tones.Method.Series2D
    assert fundamental_tone(SpaceForm(4, 0.0), 1.0).method is tones.Method.Euclidean


def test_euclidean_exact():
    res = fundamental_tone(SpaceForm(3, 0.0), 2.0)
    assert_allclose(res.gamma, (float(ref.CROSS_ROOT["0.5"]) / 2) ** 4, rtol=1e-13)


@pytest.mark.parametrize("n", [2, 3])
def test_euclidean_continuity(n):
    L = 0.01
    h = specfun.cross_product_root(n / 2 - 1)
    assert_allclose(fundamental_tone(SpaceForm(n, 1e-6), L).gamma, h ** 4 / L ** 4, rtol=1e-3)


def test_higher_dim_curved_rejected():
    with pytest.raises(DomainError):
        fundamental_tone(SpaceForm(4), 1.0)


@pytest.mark.parametrize("L", [0.003, 0.05, 0.7, 3.0, 10.0, 40.0, 500.0])
def test_concordance_bracket(L):
    lam = fundamental_tone(S3, L).lam
    assert math.sqrt(1 + (math.pi / L) ** 2) <= lam <= math.sqrt(1 + (2 * math.pi / L) ** 2)


@pytest.mark.parametrize("sf", [S2, S3])
def test_above_mckean(sf):
    for L in (0.1, 1.0, 10.0, 100.0):
        assert fundamental_tone(sf, L).lam > (sf.n - 1) / 2


@pytest.mark.parametrize("sf", [S2, S3])
def test_asymptotic_small_converges(sf):
    gaps = [abs(tones.tone_asymptotic_small(sf, L) ** 0.25 - fundamental_tone(sf, L).lam) / fundamental_tone(sf, L).lam
            for L in (0.7, 0.1, 0.05, 0.003)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))


def test_asymptotic_small_euclidean():
    sf = SpaceForm(2, 0.0)
    h = specfun.cross_product_root(0.0)
    assert_allclose(tones.tone_asymptotic_small(sf, 0.5), h ** 4 / 0.5 ** 4, rtol=1e-14)


def test_asymptotic_large_3d():
    assert_allclose(tones.tone_asymptotic_large_3d(1.0, 5000.0) ** 0.25 - 1, 1.9739e-7, atol=1e-11)
    assert tones.tone_asymptotic_large_3d(2.0, 1e12) == pytest.approx(16.0, rel=1e-12)


def test_floor_and_bounds():
    assert tones.mckean_floor(S2) == 1 / 16
    assert tones.mckean_floor(SpaceForm(3, 2.0)) == 16
    floor = tones.mckean_floor(S3)
    assert tones.cheng_yang_upper(S3, 4, floor) == floor
    g = fundamental_tone(S3, 50.0).gamma
    assert_allclose(tones.cheng_yang_upper(S3, 1, g), floor + 25 * (g - floor), rtol=1e-15)
    vals = [tones.cheng_yang_upper(S3, l, g) for l in range(1, 6)]
    assert vals == sorted(vals)
    with pytest.raises(DomainError):
        tones.cheng_yang_upper(S3, 1, floor / 2)


def test_dn_constants():
    vals = [tones.ashbaugh_laugesen_Dn(n) for n in range(4, 13)]
    assert_allclose(vals, [float(ref.D_N[n]) for n in range(4, 13)], rtol=1e-11)
    assert 0.89 < vals[0] < 1
    assert all(v < 1 for v in vals)
    with pytest.raises(DomainError):
        tones.ashbaugh_laugesen_Dn(3)


# ----------------------------------------------------------------------------
# two balls


@pytest.mark.parametrize("sf,L", [(S2, 0.8), (S3, 0.8), (S3, 6.0), (S2, 3.0)])
def test_two_ball_one_ball_limit(sf, L):
    cfg = TwoBallConfig(0.0, tilde(L), tilde(L))
    assert abs(two_ball_tone(sf, cfg).lam - fundamental_tone(sf, L).lam) < 1e-9


@pytest.mark.parametrize("sf", [S2, S3])
def test_two_ball_equal_limit(sf):
    L = 1.5
    t0 = tilde(half_volume_radius(sf, L))
    res = two_ball_tone(sf, TwoBallConfig(t0, t0, tilde(L)))
    assert_allclose(res.lam, pole_g(sf, 1, t0), rtol=1e-12)


def test_two_ball_symmetric():
    sf, total = S3, tilde(1.2)
    a = TwoBallConfig.from_alpha(sf, 0.05, total)
    b = TwoBallConfig(a.beta, a.alpha, total)
    assert two_ball_tone(sf, a).lam == two_ball_tone(sf, b).lam


def test_two_ball_comparison_and_floor():
    rng = np.random.default_rng(5)
    for sf, lmax in ((S2, 2.1492), (S3, 0.719)):
        for _ in range(20):
            L = float(rng.uniform(0.05, lmax))
            total = tilde(L)
            cfg = TwoBallConfig.from_alpha(sf, float(rng.uniform(0, total)), total)
            lam = two_ball_tone(sf, cfg).lam
            assert lam ** 4 >= tones.mckean_floor(sf)
            assert lam >= fundamental_tone(sf, L).lam - 1e-9


def test_two_ball_degenerate():
    with pytest.raises(DomainError):
        two_ball_tone(S3, TwoBallConfig(0.0, 0.0, 0.0))


# ----------------------------------------------------------------------------
# sharpness and thresholds


@pytest.mark.parametrize("n", [2, 3])
def test_small_ratio(n):
    g = sharpness_gap(SpaceForm(n), 1e-3)
    assert_allclose(g.g1 / g.lam, float(getattr(ref, f"SMALL_RATIO_{n}")), rtol=1e-9)


def test_sharpness_examples():
    assert sharpness_gap(S2, 2.0).holds
    assert not sharpness_gap(S3, 100.0).holds


def test_large_ball_scaled_constant():
    L = 1000.0
    L0 = half_volume_radius(S3, L)
    assert_allclose(L - L0, float(ref.LARGE_BALL_L_MINUS_L0), rtol=1e-9)
    g1 = math.sqrt(1 + (math.pi / L0) ** 2)
    assert_allclose(tones.K_nu_at_radius(S3, g1, L, scaled=True), float(ref.LARGE_BALL_SCALED_K), rtol=1e-8)


def test_threshold_n3_and_scaling():
    thr = threshold_radius(S3)
    assert 0.7186 < thr.radius < 0.7187
    assert ref.GAP_N3_0_7186 > 0 > ref.GAP_N3_0_7187
    thr2 = threshold_radius(SpaceForm(3, 2.0))
    assert abs(thr2.radius - thr.radius / 2) < 1e-6


def test_threshold_n2():
    thr = threshold_radius(S2)
    assert 2.3515 < thr.radius < 2.3516
    assert ref.GAP_N2_2_3515 > 0 > ref.GAP_N2_2_3516


# ----------------------------------------------------------------------------
# eigenfunction


@pytest.mark.parametrize("sf,L", [(S3, 0.7), (S2, 1.0), (S3, 4.0)])
def test_eigenprofile(sf, L):
    prof = tones.eigenfunction_profile(sf, L)
    assert prof.A + prof.B == pytest.approx(1.0, abs=1e-14)
    assert prof(0.0) == pytest.approx(1.0, abs=1e-14)
    assert abs(prof(math.tanh(L / 2))) < 1e-9

    # radial Laplacian applied twice by central differences; h balances
    # truncation h^2 against roundoff eps / h^4
    m = 300
    h = L / m
    rho = np.arange(m + 1) * h
    v = np.array([prof.at_radius(float(r)) for r in rho])

    def lap(f, r):
        return (f[2:] - 2 * f[1:-1] + f[:-2]) / h ** 2 + (sf.n - 1) / np.tanh(r[1:-1]) * (f[2:] - f[:-2]) / (2 * h)

    lap2 = lap(lap(v[1:], rho[1:]), rho[2:-1])
    inner = v[3:-2]
    idx = np.linspace(10, len(lap2) - 10, 50).astype(int)
    resid = lap2[idx] - prof.lam ** 4 * inner[idx]
    assert np.max(np.abs(resid)) < 1e-3 * np.max(np.abs(prof.lam ** 4 * v))
