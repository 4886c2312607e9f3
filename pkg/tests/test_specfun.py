import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from ballfield.errors import DegenerateParameterError, DomainError
from ballfield.specfun import (OMEGA4, EulerAngles, QuadratureRule, RuleKind, SpinHarmonicIndex,
                               bessel_i, bessel_ik_scaled, bessel_j, bessel_k, bessel_y,
                               cancellation_dps, chebyshev_u, chebyshev_u_table, gauss_chebyshev2,
                               gauss_legendre, gegenbauer_c, hyp1f2, hyp1f2_mp, index_to_lm,
                               integrate, integrate_interval, integrate_semi_infinite, jacobi_p,
                               legendre_p, legendre_series, legendre_table, mode_list,
                               relative_euler, rotation_matrix, semi_infinite, sphere3_harmonic,
                               sphere3_harmonic_matrix, spin_harmonic, spin_harmonic_matrix,
                               spin_sph_harm, wigner_D, wigner_d, wigner_d_entries)
from ballfield.specfun.quadrature import bessel_product_integral

unit = st.floats(-1.0, 1.0)
angle = st.floats(0.0, math.pi)


# ---------------------------------------------------------------- polynomials

def test_legendre_low_degrees():
    assert legendre_p(0, 0.3) == 1.0
    assert legendre_p(1, 0.3) == 0.3


def test_legendre_p5_explicit_polynomial():
    x = 0.7
    assert legendre_p(5, x) == pytest.approx((63 * x ** 5 - 70 * x ** 3 + 15 * x) / 8, rel=1e-14)


@given(st.integers(0, 60), unit)
def test_legendre_matches_scipy_and_is_bounded(ell, x):
    v = legendre_p(ell, x)
    assert v == pytest.approx(special.eval_legendre(ell, x), abs=1e-12)
    assert abs(v) <= 1 + 1e-12


def test_legendre_table_and_clenshaw_series():
    x = np.linspace(-1, 1, 11)
    table = legendre_table(12, x)
    for ell in (0, 1, 7, 12):
        np.testing.assert_allclose(table[ell], legendre_p(ell, x), atol=1e-14)
    coeffs = np.random.default_rng(0).normal(size=13)
    np.testing.assert_allclose(legendre_series(coeffs, x), coeffs @ table, atol=1e-12)


def test_jacobi_first_degree_and_oracle(oracle):
    assert jacobi_p(0, 0.3, 1.2, 0.1) == 1.0
    assert jacobi_p(1, 0.0, 1.5, 0.0) == pytest.approx(-0.75)
    for e in oracle["jacobi"]:
        assert jacobi_p(e["k"], e["alpha"], e["beta"], e["x"]) == pytest.approx(e["value"], rel=1e-13)


@given(st.integers(0, 25), st.floats(-0.9, 4.0), st.floats(-0.9, 4.0), unit)
def test_jacobi_matches_scipy(k, a, b, x):
    assert jacobi_p(k, a, b, x) == pytest.approx(special.eval_jacobi(k, a, b, x), rel=1e-9, abs=1e-9)


def test_chebyshev_u_values():
    assert chebyshev_u(0, 0.2) == 1.0
    assert chebyshev_u(1, 0.5) == 1.0
    g = math.acos(0.9)
    assert chebyshev_u(4, 0.9) == pytest.approx(math.sin(5 * g) / math.sin(g), rel=1e-14)


@given(st.integers(0, 80), st.floats(-0.999, 0.999))
def test_chebyshev_u_trig_identity(ell, t):
    g = math.acos(t)
    assert chebyshev_u(ell, t) == pytest.approx(math.sin((ell + 1) * g) / math.sin(g), abs=1e-9 * (ell + 1))
    assert chebyshev_u_table(ell, t)[ell] == pytest.approx(chebyshev_u(ell, t), abs=1e-12)


@given(st.integers(0, 20), st.floats(0.1, 5.0), unit)
def test_gegenbauer_matches_scipy(n, lam, x):
    assert gegenbauer_c(n, lam, x) == pytest.approx(special.eval_gegenbauer(n, lam, x), rel=1e-10, abs=1e-10)


def test_polynomial_domain_errors():
    with pytest.raises(DomainError):
        legendre_p(2, 1.5)
    with pytest.raises(DomainError):
        legendre_p(-1, 0.0)
    with pytest.raises(DomainError):
        jacobi_p(2, -1.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        chebyshev_u(1.5, 0.0)


# ---------------------------------------------------------------- bessel

def test_bessel_closed_forms():
    assert bessel_j(0.5, math.pi) == pytest.approx(0.0, abs=1e-15)
    assert bessel_j(1.5, 1.0) == pytest.approx(math.sqrt(2 / math.pi) * (math.sin(1) - math.cos(1)), rel=1e-14)
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_k(0.5, 2.0) == pytest.approx(math.sqrt(math.pi / 4) * math.exp(-2), rel=1e-14)
    assert bessel_i(0.5, 1.0) == pytest.approx(math.sqrt(2 / math.pi) * math.sinh(1), rel=1e-14)


def test_bessel_wronskian():
    nu, x = 2.5, 7.0
    w = bessel_i(nu, x) * bessel_k(nu + 1, x) + bessel_i(nu + 1, x) * bessel_k(nu, x)
    assert w == pytest.approx(1 / x, rel=1e-12)
    i, k = bessel_ik_scaled(nu, x)
    i1, k1 = bessel_ik_scaled(nu + 1, x)
    assert i * k1 + i1 * k == pytest.approx(1 / x, rel=1e-12)
    assert bessel_j(nu + 1, x) * bessel_y(nu, x) - bessel_j(nu, x) * bessel_y(nu + 1, x) == pytest.approx(
        2 / (math.pi * x), rel=1e-12)


def test_bessel_errors():
    with pytest.raises(DomainError):
        bessel_k(1.0, 0.0)
    with pytest.raises(DomainError):
        bessel_j(-1.0, 1.0)
    with pytest.raises(OverflowError):
        bessel_i(0.0, 1000.0)


# ---------------------------------------------------------------- 1F2

def test_hyp1f2_trivial_values():
    assert hyp1f2(0.3, 1.2, 2.5, 0.0) == 1.0
    # 1F2(a; a, 1; z) = 0F1(; 1; z) = I_0(2 sqrt z)
    assert hyp1f2(1, 1, 1, 0.5) == pytest.approx(special.iv(0, 2 * math.sqrt(0.5)), rel=1e-14)


def test_hyp1f2_against_extended_precision(oracle):
    for e in oracle["hyp1f2"]:
        assert hyp1f2(*e["args"]) == pytest.approx(e["value"], rel=1e-13)
    ps = oracle["hyp1f2_partial_sum"]
    assert hyp1f2(*ps["args"]) == pytest.approx(ps["value"], rel=1e-14)


def test_hyp1f2_mp_precision_path():
    import mpmath
    with mpmath.workdps(40):
        v = hyp1f2_mp(mpmath.mpf(1.5), mpmath.mpf(-2.5), mpmath.mpf(4), mpmath.mpf(100))
        ref = mpmath.hyp1f2(1.5, -2.5, 4, 100)
        assert abs(v / ref - 1) < mpmath.mpf(10) ** -30


def test_cancellation_dps_grows_with_cancellation():
    assert cancellation_dps([1.0, 1.0], base=20) == 20
    assert cancellation_dps([1e12, -1e12 + 1], base=20) >= 32


def test_hyp1f2_nonpositive_integer_denominator():
    with pytest.raises(DegenerateParameterError):
        hyp1f2(1.0, -2.0, 1.0, 0.5)


# ---------------------------------------------------------------- Wigner d

def test_wigner_identity_and_entries():
    for ell in range(6):
        np.testing.assert_allclose(wigner_d(ell, 0.0), np.eye(2 * ell + 1), atol=1e-15)
    assert wigner_d(1, math.pi / 2)[1, 1] == pytest.approx(0.0, abs=1e-15)
    d = wigner_d(2, 0.7)
    np.testing.assert_allclose(np.sum(d ** 2, axis=1), 1.0, atol=1e-14)


def test_wigner_against_factorial_sum(oracle):
    for e in oracle["wigner_d"]:
        v = wigner_d_entries(e["ell"], e["m_row"], e["m_col"], e["beta"])
        assert v == pytest.approx(e["value"], abs=1e-14)


@given(st.integers(0, 30), angle)
def test_wigner_unitary_and_symmetries(ell, beta):
    d = wigner_d(ell, beta)
    np.testing.assert_allclose(d @ d.T, np.eye(2 * ell + 1), atol=1e-11)
    m = np.arange(-ell, ell + 1)
    # d_{m'm} = (-1)^(m - m') d_{mm'} and d_{m'm} = d_{-m,-m'}
    np.testing.assert_allclose(d, ((-1.0) ** (m[None, :] - m[:, None])) * d.T, atol=1e-12)
    np.testing.assert_allclose(d, d[::-1, ::-1].T, atol=1e-12)


@given(st.integers(0, 8), st.floats(0, 2 * math.pi), angle, st.floats(0, 2 * math.pi),
       st.floats(0, 2 * math.pi), angle, st.floats(0, 2 * math.pi))
def test_wigner_D_is_a_representation(ell, a1, b1, c1, a2, b2, c2):
    g = rotation_matrix(a1, b1, c1) @ rotation_matrix(a2, b2, c2)
    e = EulerAngles.from_matrix(g)
    lhs = wigner_D(ell, e.alpha, e.beta, e.gamma)
    rhs = wigner_D(ell, a1, b1, c1) @ wigner_D(ell, a2, b2, c2)
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)


def test_euler_round_trip_and_gimbal():
    for a, b, c in [(0.3, 1.1, 2.0), (5.0, 0.0, 0.0), (1.0, math.pi, 0.0), (0.2, 1e-9, 0.4)]:
        e = EulerAngles.from_matrix(rotation_matrix(a, b, c))
        np.testing.assert_allclose(e.matrix(), rotation_matrix(a, b, c), atol=1e-12)
    with pytest.raises(DomainError):
        EulerAngles(0.0, 4.0, 0.0)


def test_relative_euler_near_identity_keeps_small_beta():
    # nearly coincident directions must not collapse beta to the gimbal branch
    e = relative_euler(1.0, 0.5, 1.0 + 1e-9, 0.5)
    assert e.beta == pytest.approx(1e-9, rel=1e-6)


# ---------------------------------------------------------------- spin harmonics

def test_spin_harmonic_low_order():
    assert spin_sph_harm(0, 0, 0, 0.4, 1.0) == pytest.approx(1 / math.sqrt(4 * math.pi))
    th = 0.8
    assert spin_sph_harm(0, 1, 0, th, 2.0) == pytest.approx(math.sqrt(3 / (4 * math.pi)) * math.cos(th))
    # d^2_{0,-2}(b) = sqrt(3/8) sin^2 b
    th = math.pi / 3
    expected = math.sqrt(5 / (4 * math.pi)) * math.sqrt(3 / 8) * math.sin(th) ** 2
    assert spin_harmonic(SpinHarmonicIndex(2, 2, 0), th, 0.0) == pytest.approx(expected, rel=1e-14)


@given(st.integers(0, 12), st.data(), angle, st.floats(0, 2 * math.pi))
def test_spin0_matches_scipy(ell, data, theta, phi):
    m = data.draw(st.integers(-ell, ell))
    ref = special.sph_harm_y(ell, m, theta, phi)
    assert spin_sph_harm(0, ell, m, theta, phi) == pytest.approx(ref, abs=1e-12)


@given(st.integers(0, 3), st.integers(0, 10), st.data(), angle, st.floats(0, 2 * math.pi))
def test_spin_conjugation_symmetry(s, extra, data, theta, phi):
    ell = s + extra
    m = data.draw(st.integers(-ell, ell))
    lhs = np.conj(spin_sph_harm(s, ell, m, theta, phi))
    rhs = (-1) ** (s + m) * spin_sph_harm(-s, ell, -m, theta, phi)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def _sphere_grid(lmax):
    x, w = np.polynomial.legendre.leggauss(lmax + 2)
    nph = 2 * lmax + 3
    T, P = np.meshgrid(np.arccos(x), 2 * np.pi * np.arange(nph) / nph, indexing="ij")
    W = np.outer(w, np.full(nph, 2 * np.pi / nph)).ravel()
    return T.ravel(), P.ravel(), W


@pytest.mark.parametrize("s", [0, 1, 2, 3])
def test_spin_harmonics_orthonormal(s):
    theta, phi, w = _sphere_grid(10)
    y = spin_harmonic_matrix(s, 10, theta, phi)
    gram = (np.conj(y).T * w) @ y
    np.testing.assert_allclose(gram, np.eye(len(mode_list(s, 10))), atol=1e-10)


def test_spin_addition_theorem():
    rng = np.random.default_rng(1)
    for s in (0, 1, 2, 3):
        for ell in range(s, 11):
            t1, t2 = rng.uniform(0, np.pi, 2)
            p1, p2 = rng.uniform(0, 2 * np.pi, 2)
            rel = relative_euler(t1, p1, t2, p2)
            ms = np.arange(-ell, ell + 1)
            for m in (-ell, 0, ell):
                if abs(m) > ell:
                    continue
                lhs = np.sum(spin_sph_harm(s, ell, ms, t2, p2) * np.conj(spin_sph_harm(-m, ell, ms, t1, p1)))
                rhs = (math.sqrt((2 * ell + 1) / (4 * math.pi)) * spin_sph_harm(s, ell, m, rel.beta, rel.alpha)
                       * np.exp(-1j * s * rel.gamma))
                assert abs(lhs - rhs) < 1e-9


def test_spin_harmonic_index_validation():
    with pytest.raises(DomainError):
        SpinHarmonicIndex(2, 1, 0)
    with pytest.raises(DomainError):
        SpinHarmonicIndex(0, 2, 3)
    with pytest.raises(DomainError):
        spin_sph_harm(0, 1, 0, 4.0, 0.0)


# ---------------------------------------------------------------- 3-sphere harmonics

def test_sphere3_constant_and_linear_members():
    s = np.array([0.1, -0.2, 0.3, math.sqrt(1 - 0.14)])
    assert sphere3_harmonic(0, 1, s) == pytest.approx(1 / math.sqrt(OMEGA4))
    # degree-1 member with l = 0 is the s4 coordinate, normalized by int s4^2 = OMEGA4 / 4
    assert sphere3_harmonic(1, 1, s) == pytest.approx(2 / math.sqrt(OMEGA4) * s[3], rel=1e-13)


def test_sphere3_index_and_errors():
    assert [index_to_lm(j) for j in range(1, 6)] == [(0, 0), (1, -1), (1, 0), (1, 1), (2, -2)]
    with pytest.raises(DomainError):
        sphere3_harmonic(1, 5, np.array([0, 0, 0, 1.0]))
    with pytest.raises(DomainError):
        sphere3_harmonic(1, 1, np.array([0, 0, 0.5, 0.5]))


def test_sphere3_orthonormal_under_product_rule():
    lmax = 4
    nchi = lmax + 2
    chi = np.arange(1, nchi + 1) * np.pi / (nchi + 1)
    wchi = np.pi / (nchi + 1) * np.sin(chi) ** 2
    theta, phi, w2 = _sphere_grid(lmax)
    C = np.repeat(chi, theta.size)
    T, P = np.tile(theta, nchi), np.tile(phi, nchi)
    W = np.repeat(wchi, theta.size) * np.tile(w2, nchi)
    pts = np.stack([np.sin(C) * np.sin(T) * np.cos(P), np.sin(C) * np.sin(T) * np.sin(P),
                    np.sin(C) * np.cos(T), np.cos(C)], axis=1)
    harm, degree = sphere3_harmonic_matrix(lmax, pts)
    assert harm.shape[1] == sum((L + 1) ** 2 for L in range(lmax + 1))
    np.testing.assert_allclose((harm.T * W) @ harm, np.eye(harm.shape[1]), atol=1e-12)


def test_sphere3_addition_theorem():
    # sum_j S_Lj(s) S_Lj(t) = (L + 1) U_L(s.t) / OMEGA4
    rng = np.random.default_rng(4)
    s, t = rng.normal(size=(2, 4))
    s, t = s / np.linalg.norm(s), t / np.linalg.norm(t)
    harm, degree = sphere3_harmonic_matrix(6, np.stack([s, t]))
    for L in range(7):
        cols = degree == L
        lhs = harm[0, cols] @ harm[1, cols]
        assert lhs == pytest.approx((L + 1) * chebyshev_u(L, float(s @ t)) / OMEGA4, abs=1e-12)


# ---------------------------------------------------------------- quadrature

def test_quadrature_elementary_integrals():
    assert integrate(lambda r: r ** 2, gauss_legendre(8, 0.0, 1.0)) == pytest.approx(1 / 3, rel=1e-15)
    assert integrate(lambda t: np.ones_like(t), gauss_chebyshev2(5)) == pytest.approx(math.pi / 2, rel=1e-15)
    val = integrate_semi_infinite(lambda lam: lam ** 2 / (100 + lam ** 2) ** 2, scale=10.0, rtol=1e-12)
    assert val == pytest.approx(math.pi / 40, rel=1e-11)
    assert integrate_interval(np.cos, 0.0, math.pi / 2) == pytest.approx(1.0, rel=1e-14)


@given(st.integers(1, 30))
def test_gauss_legendre_exact_for_polynomials(n):
    rule = gauss_legendre(n, -1.0, 1.0)
    deg = 2 * n - 1
    exact = 2 / (deg + 1) if deg % 2 == 0 else 0.0
    assert integrate(lambda x: x ** deg, rule) == pytest.approx(exact, abs=1e-13)
    assert integrate(lambda x: x ** (deg - 1), rule) == pytest.approx(2 / deg, rel=1e-12)


def test_gauss_chebyshev2_exact_on_u_products():
    rule = gauss_chebyshev2(20)
    for a in range(10):
        for b in range(10):
            v = integrate(lambda t: chebyshev_u(a, t) * chebyshev_u(b, t), rule)
            assert v == pytest.approx(math.pi / 2 if a == b else 0.0, abs=1e-13)


def test_quadrature_rule_validation():
    with pytest.raises(ValueError):
        QuadratureRule(np.array([0.0, 0.0]), np.array([1.0, 1.0]), RuleKind.GAUSS_LEGENDRE)
    with pytest.raises(ValueError):
        QuadratureRule(np.array([0.0, 1.0]), np.array([1.0, -1.0]), "gauss_legendre")
    rule = semi_infinite(8, 2.0, panels=4)
    assert rule.kind is RuleKind.SEMI_INFINITE
    with pytest.raises(ValueError):
        rule.nodes[0] = 1.0
    with pytest.raises(FloatingPointError):
        integrate(lambda x: np.full_like(x, np.nan), gauss_legendre(3))


def test_bessel_product_integral_known_transform():
    # int_0^inf J_mu(l a) J_mu(l b) l / (l^2 + c^2) dl = I_mu(c b) K_mu(c a) for b < a
    mu, a, b, c = 2.5, 1.0, 0.6, 3.0
    v = bessel_product_integral(mu, a, b, lambda lam: lam / (lam ** 2 + c ** 2))
    assert v == pytest.approx(special.iv(mu, c * b) * special.kv(mu, c * a), rel=1e-10)
    v = bessel_product_integral(mu, a, a, lambda lam: lam / (lam ** 2 + c ** 2))
    assert v == pytest.approx(special.iv(mu, c * a) * special.kv(mu, c * a), rel=1e-10)
