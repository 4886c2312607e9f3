"""Invariant checks grouped into suites, shared by the CLI and the test suite.

Every check returns a CheckResult; a check passes when its worst observed
error is within tolerance.
"""
import math
import time
import warnings
from dataclasses import asdict, dataclass

import mpmath
import numpy as np
from scipy.special import ive, kve

from . import matern_sphere as ms
from . import rho_field as rf
from . import sampler as sm
from . import spin_field as sf
from .specfun import (hyp1f2, legendre_p, relative_euler, rotation_matrix,
                      sphere3_harmonic_matrix, spin_harmonic_matrix, spin_sph_harm, wigner_d)


@dataclass
class CheckResult:
    check: str
    status: str
    worst_error: float
    tolerance: float
    seconds: float = 0.0
    detail: str = ""

    @property
    def passed(self):
        return self.status == "pass"

    def as_dict(self):
        return asdict(self)


def _check(name, tol, fn):
    t0 = time.perf_counter()
    try:
        out = fn()
        worst, detail = out if isinstance(out, tuple) else (out, "")
        worst = float(worst)
        status = "pass" if worst <= tol else "fail"
    except Exception as exc:  # a crash is a failed check, not a crashed suite
        worst, detail, status = float("inf"), f"{type(exc).__name__}: {exc}", "fail"
    return CheckResult(name, status, worst, tol, time.perf_counter() - t0, detail)


def _random_directions(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


# ---------------------------------------------------------------- specfun

def wigner_unitarity(lmax=32, nbeta=20):
    worst = 0.0
    for beta in np.linspace(0, np.pi, nbeta):
        for ell in range(lmax + 1):
            d = wigner_d(ell, beta)
            worst = max(worst, np.abs(d @ d.T - np.eye(2 * ell + 1)).max())
    return worst


def spin_orthonormality(smax=3, lmax=10):
    nt, nph = lmax + 2, 2 * lmax + 3
    x, w = np.polynomial.legendre.leggauss(nt)
    theta = np.arccos(x)
    phi = 2 * np.pi * np.arange(nph) / nph
    T, P = np.meshgrid(theta, phi, indexing="ij")
    W = np.outer(w, np.full(nph, 2 * np.pi / nph)).ravel()
    worst = 0.0
    for s in range(smax + 1):
        y = spin_harmonic_matrix(s, lmax, T.ravel(), P.ravel())
        gram = (np.conj(y).T * W) @ y
        worst = max(worst, np.abs(gram - np.eye(gram.shape[0])).max())
    return worst


def spin_addition_theorem(smax=3, lmax=10, npairs=20, seed=11):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(npairs):
        t1, t2 = rng.uniform(0, np.pi, 2)
        p1, p2 = rng.uniform(0, 2 * np.pi, 2)
        e = relative_euler(t1, p1, t2, p2)
        for s in range(smax + 1):
            for ell in range(s, lmax + 1):
                mp = np.arange(-ell, ell + 1)
                y2 = spin_sph_harm(s, ell, mp, t2, p2)
                for m in range(-ell, ell + 1):
                    lhs = np.sum(y2 * np.conj(spin_sph_harm(-m, ell, mp, t1, p1)))
                    rhs = (math.sqrt((2 * ell + 1) / (4 * np.pi))
                           * spin_sph_harm(s, ell, m, e.beta, e.alpha) * np.exp(-1j * s * e.gamma))
                    worst = max(worst, abs(lhs - rhs))
    return worst


def legendre_bounds():
    x = np.linspace(-1, 1, 201)
    worst = 0.0
    for ell in range(101):
        p = legendre_p(ell, x)
        worst = max(worst, np.max(np.abs(p)) - 1, abs(legendre_p(ell, 1.0) - 1))
    return max(worst, 0.0)


def bessel_wronskian():
    worst = 0.0
    x = np.linspace(0.1, 50, 200)
    for nu in np.arange(0.5, 21, 1.0):
        i0, i1 = ive(nu, x), ive(nu + 1, x)
        k0, k1 = kve(nu, x), kve(nu + 1, x)
        worst = max(worst, np.max(np.abs(x * (i0 * k1 + i1 * k0) - 1)))
    return worst


def hyp1f2_vs_mpmath():
    worst = 0.0
    cases = []
    for nu in (0.4, 1.3, 2.6):
        for ell in (0, 3, 7, 12):
            for z in (1.0, 25.0, 100.0, 400.0):
                cases.append((nu + 1, nu - ell + 1, nu + ell + 2, z))
                cases.append((ell + 1, ell - nu + 1, 2 * ell + 2, z))
    for a1, b1, b2, z in cases:
        ref = float(mpmath.hyp1f2(a1, b1, b2, z))
        worst = max(worst, abs(hyp1f2(a1, b1, b2, z) - ref) / abs(ref))
    return worst


def sphere3_orthonormality(lmax=3):
    # chi: Gauss-Chebyshev(2nd kind) in cos chi carries the sin^2 chi dchi measure
    # theta: Gauss-Legendre in cos theta; phi: uniform
    nchi = lmax + 2
    k = np.arange(1, nchi + 1)
    chi = k * np.pi / (nchi + 1)
    wchi = np.pi / (nchi + 1) * np.sin(chi) ** 2
    x, wt = np.polynomial.legendre.leggauss(lmax + 2)
    theta = np.arccos(x)
    nph = 2 * lmax + 3
    phi = 2 * np.pi * np.arange(nph) / nph
    C, T, P = np.meshgrid(chi, theta, phi, indexing="ij")
    W = (wchi[:, None, None] * wt[None, :, None] * np.full(nph, 2 * np.pi / nph)[None, None, :]).ravel()
    sc, st = np.sin(C.ravel()), np.sin(T.ravel())
    pts = np.stack([sc * st * np.cos(P.ravel()), sc * st * np.sin(P.ravel()),
                    sc * np.cos(T.ravel()), np.cos(C.ravel())], axis=1)
    harm, _ = sphere3_harmonic_matrix(lmax, pts)
    gram = (harm.T * W) @ harm
    return np.abs(gram - np.eye(gram.shape[0])).max()


# ---------------------------------------------------------------- matern

ROUTE_GRID = dict(sigma2=(1.0, 2.0), a=(1.0, 10.0), nu=(0.4, 1.3, 2.6), radii=(0.25, 0.5, 1.0), lmax=12)


def matern_route_equivalence(grid=ROUTE_GRID):
    worst = 0.0
    for s2 in grid["sigma2"]:
        for a in grid["a"]:
            for nu in grid["nu"]:
                p = ms.MaternParams(s2, a, nu)
                dens = ms.SpectralDensity3D.matern(p)
                for r in grid["radii"]:
                    for ell in range(grid["lmax"] + 1):
                        c = ms.angular_spectrum_matern(ell, r, p)
                        q = ms.angular_spectrum_numeric(ell, r, r, dens)
                        worst = max(worst, abs(c - q) / q)
    return worst


def matern_halfnu_route(lmax=12, radii=(0.1, 0.25, 0.5, 0.8, 1.0)):
    p = ms.MaternParams(1, 10, 0.5)
    dens = ms.SpectralDensity3D.matern(p)
    worst = 0.0
    for r in radii:
        for ell in range(lmax + 1):
            h = ms.matern_spectrum_halfnu(ell, r)
            worst = max(worst, abs(h - ms.angular_spectrum_numeric(ell, r, r, dens)) / h,
                        abs(h - ms.angular_spectrum_matern(ell, r, p)) / h)
    return worst


def matern_reconstruction(lmax=200, ngamma=50):
    p = ms.MaternParams(1, 10, 0.5)
    spec = ms.matern_angular_spectrum(p, [1.0], lmax, method="closed")
    gamma = np.linspace(0, np.pi, ngamma)
    est = ms.covariance_from_spectrum(spec, 1.0, 1.0, gamma)
    target = np.exp(-20 * np.sin(gamma / 2))
    return np.max(np.abs(est.value - target)), f"lmax={lmax}, raw tail mass {est.tail_bound:.3e}"


def matern_general_reconstruction(lmax=150, ngamma=50):
    p = ms.MaternParams(1.5, 4.0, 1.3)
    spec = ms.matern_angular_spectrum(p, [1.0], lmax, method="closed")
    gamma = np.linspace(0, np.pi, ngamma)
    est = ms.covariance_from_spectrum(spec, 1.0, 1.0, gamma)
    return np.max(np.abs(est.value - ms.matern_covariance(ms.chordal_distance(1.0, gamma), p)))


def matern_mass_identity():
    worst = 0.0
    for s2, a, nu in [(1, 10, 0.5), (2.5, 7, 1.2), (1, 1, 1), (2, 3, 2.6), (1, 10, 0.4)]:
        p = ms.MaternParams(s2, a, nu)
        worst = max(worst, abs(ms.SpectralDensity3D.matern(p).total_mass() - s2) / s2)
    return worst


def matern_degenerate_continuity():
    worst = 0.0
    for ell, r, a in [(1, 0.5, 10.0), (2, 1.0, 10.0), (3, 0.8, 1.0)]:
        lim = ms.angular_spectrum_matern(ell, r, ms.MaternParams(1, a, float(ell)))
        lo = ms.angular_spectrum_matern(ell, r, ms.MaternParams(1, a, ell - 1e-4))
        hi = ms.angular_spectrum_matern(ell, r, ms.MaternParams(1, a, ell + 1e-4))
        if not min(lo, hi) <= lim <= max(lo, hi):
            return float("inf"), f"limit {lim} not bracketed by {lo}, {hi} at l={ell}"
        worst = max(worst, abs(hi - lo) / lim)
    return worst


def matern_collinear():
    p = ms.MaternParams(1, 10, 0.5)
    lmax = 60
    coeffs = {(0.6, 1.0): [ms.matern_spectrum_halfnu(ell, 0.6, 1.0) for ell in range(lmax + 1)]}
    spec = ms.AngularSpectrum(coeffs, lmax, variance=1.0)
    est = ms.covariance_from_spectrum(spec, 0.6, 1.0, 0.0, extrapolate=False)
    quad = ms.angular_spectrum_numeric(3, 0.6, 1.0, ms.SpectralDensity3D.matern(p))
    cross = abs(quad - coeffs[0.6, 1.0][3]) / coeffs[0.6, 1.0][3]
    return max(abs(est.value - ms.matern_covariance(0.4, p)), cross)


# ---------------------------------------------------------------- spin

def zernike_dual_route(nmax=16):
    r = np.linspace(0, 1, 41)
    worst = 0.0
    for n in range(nmax + 1):
        for ell in range(n % 2, n + 1, 2):
            idx = sf.ZernikeIndex(n, ell)
            worst = max(worst, np.max(np.abs(sf.zernike_radial(idx, r) - sf.zernike_radial_sum(idx, r))))
    return worst


def zernike_orthonormality(lmax=8, nmax=14, radii=(1.0, 2.0)):
    worst = 0.0
    for r0 in radii:
        x, w = np.polynomial.legendre.leggauss(40)
        r = r0 * (x + 1) / 2
        w = w * r0 / 2 * r ** 2
        for ell in range(lmax + 1):
            ns = sf.zernike_degrees(ell, nmax)
            basis = np.array([sf.zernike_radial_scaled(sf.ZernikeIndex(n, ell), r, r0) for n in ns])
            gram = (basis * w) @ basis.T
            worst = max(worst, np.abs(gram - np.eye(len(ns))).max())
    return worst


def _random_spin_spectrum(s, lmax, nmax, seed, r0=1.0):
    rng = np.random.default_rng(seed)
    A = {(ell, n): rng.uniform(0, 1) / (1 + n) ** 2
         for ell in range(s, lmax + 1) for n in sf.zernike_degrees(ell, nmax)}
    return sf.SpinSpectrumBall(s, A, r0)


def _random_ball_points(rng, n, r0=1.0):
    return _random_directions(rng, n) * r0 * rng.uniform(0.05, 1.0, size=(n, 1))


def spin_two_point_routes(spins=(0, 1, 2), lmax=16, npairs=50, seed=5):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for s in spins:
        spec = _random_spin_spectrum(s, lmax, lmax + 4, seed + s)
        for _ in range(npairs):
            x1, x2 = _random_ball_points(rng, 2)
            a = sf.two_point_correlation(spec, x1, x2)
            b = sf.brute_force_two_point(spec, x1, x2)
            worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    return worst


def spin_hermitian_and_rotation(seed=9):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for s in (0, 1, 2):
        spec = _random_spin_spectrum(s, 10, 14, seed + s)
        for _ in range(10):
            x1, x2 = _random_ball_points(rng, 2)
            a = sf.two_point_correlation(spec, x1, x2)
            worst = max(worst, abs(a - np.conj(sf.two_point_correlation(spec, x2, x1))) / max(1, abs(a)))
            if s == 0:
                g = rotation_matrix(*rng.uniform(0, np.pi, 3))
                worst = max(worst, abs(a - sf.two_point_correlation(spec, g @ x1, g @ x2)) / max(1, abs(a)))
            else:
                # the modulus is frame independent
                g = rotation_matrix(*rng.uniform(0, np.pi, 3))
                b = sf.two_point_correlation(spec, g @ x1, g @ x2)
                worst = max(worst, abs(abs(a) - abs(b)) / max(1, abs(a)))
    return worst


def spin_s0_matches_sphere():
    lmax = 40
    spec = ms.AngularSpectrum({(1.0, 1.0): [ms.matern_spectrum_halfnu(ell, 1.0) for ell in range(lmax + 1)]},
                              lmax, variance=1.0)
    rng = np.random.default_rng(2)
    worst = 0.0
    for x1, x2 in zip(_random_directions(rng, 10), _random_directions(rng, 10)):
        gamma = math.acos(np.clip(x1 @ x2, -1, 1))
        a = sf.two_point_correlation(spec, x1, x2)
        b = ms.covariance_from_spectrum(spec, 1.0, 1.0, gamma, extrapolate=False).value
        worst = max(worst, abs(a - b))
    return worst


def spin_mercer_psd(seed=4):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for s in (0, 2):
        spec = _random_spin_spectrum(s, 8, 14, seed + s)
        for ell in range(s, 9):
            r = rng.uniform(0, 1, 6)
            K = np.array([[sf.spin_spectrum_to_radial_cov(spec, ell, a, b) for b in r] for a in r])
            worst = max(worst, -np.min(np.linalg.eigvalsh(K)))
    return max(worst, 0.0)


# ---------------------------------------------------------------- rho

def rho_metric_axioms(seed=3, ntriples=500):
    rng = np.random.default_rng(seed)
    params = rf.RhoMetricParams(1.0, 1.0)
    pts = _random_ball_points(rng, 3 * ntriples) * 0.999
    x, y, z = pts[:ntriples], pts[ntriples:2 * ntriples], pts[2 * ntriples:]
    dxy, dyz, dxz = rf.rho_distance(x, y, params), rf.rho_distance(y, z, params), rf.rho_distance(x, z, params)
    sym = np.max(np.abs(dxy - rf.rho_distance(y, x, params)))
    ident = np.max(np.abs(rf.rho_distance(x, x, params)))
    tri = max(0.0, np.max(dxz - dxy - dyz))
    m = rf.BallSphereMap(1.0)
    inner = np.sum(m.psi(x) * m.psi(y), axis=1)
    # arccos is ill-conditioned near +-1, so compare angles only away from there
    ok = np.abs(inner) < 0.99
    iso = max(np.max(np.abs(np.cos(dxy) - inner)),
              np.max(np.abs(dxy[ok] - np.arccos(inner[ok]))))
    roundtrip = np.max(np.abs(m.psi_inv(m.psi(x)) - x))
    unit = np.max(np.abs(np.linalg.norm(m.psi(x), axis=1) - 1))
    return max(sym, ident, tri, iso, roundtrip, unit)


def rho_b_routes(lmax=12, nus=(0.6, 1.0, 1.8)):
    worst = 0.0
    for nu in nus:
        p = ms.MaternParams(1, 10, nu)
        for ell in range(lmax + 1):
            c = rf.b_ell_matern_closed(ell, p)
            q = rf.b_ell_numeric_bessel(ell, lambda lam: rf.matern_density_4d(lam, p))
            worst = max(worst, abs(c - q) / q)
    return worst


def rho_nu1_bessel_form(lmax=10):
    p = ms.MaternParams(1, 10, 1)
    worst = 0.0
    for ell in range(lmax + 1):
        d = rf.b_ell_matern_nu1(ell)
        worst = max(worst, abs(rf.b_ell_matern_closed(ell, p) - d) / d)
    return worst


def rho_geodesic_roundtrip(lmax=1000, ngrid=60):
    p = ms.MaternParams(1, 10, 1)
    spec = rf.geodesic_matern_spectrum(p, lmax)
    rho = np.linspace(0, np.pi, ngrid)
    rec = rf.covariance_from_b_angle(spec, rho)
    return np.max(np.abs(rec - rf.geodesic_matern_covariance(rho, p))), f"lmax={lmax}"


def rho_normalization_constant(lmax=10):
    """Ratio of closed-form b_l to b_l of the chordal covariance; expected to be pi^2 for every l."""
    p = ms.MaternParams(1, 10, 1)
    ells = np.arange(lmax + 1)
    quad = rf.b_ell_from_covariance(ells, lambda u: ms.matern_covariance(u, p))
    closed = np.array([rf.b_ell_matern_closed(ell, p) for ell in ells])
    ratio = closed / quad
    const = float(np.mean(ratio))
    return np.max(np.abs(ratio / const - 1)), f"fitted constant {const:.12g} (pi^2 = {np.pi ** 2:.12g})"


def rho_constant_spectrum():
    b = rf.b_ell_from_covariance(np.arange(0, 20), lambda u: np.full_like(u, 2.0))
    expected0 = np.pi * rf.OMEGA3 * 2.0 / 2
    return max(abs(b[0] - expected0) / expected0, np.max(np.abs(b[1:])))


def rho_stationarity(seed=8):
    rng = np.random.default_rng(seed)
    spec = rf.rho_matern_spectrum(ms.MaternParams(1, 10, 1.5), 20)
    m = rf.BallSphereMap(1.0)
    worst = 0.0
    for _ in range(20):
        x, y = _random_ball_points(rng, 2, 0.95)
        s1, s2 = m.psi(x), m.psi(y)
        # one random rotation of S^3 applied to both images; pairs pushed near the north pole are skipped
        q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
        s1r, s2r = q @ s1, q @ s2
        if max(s1r[3], s2r[3]) > 0.9:
            continue
        xr, yr = m.psi_inv(s1r), m.psi_inv(s2r)
        if max(np.linalg.norm(xr), np.linalg.norm(yr)) >= 1:
            continue
        a = rf.covariance_from_b(spec, x, y)
        b = rf.covariance_from_b(spec, xr, yr)
        worst = max(worst, abs(a - b))
    return worst


def rho_small_distance_deviation(n=81):
    p = ms.MaternParams(1, 10, 1)
    g = np.linspace(-0.95, 0.95, n)
    y1, y2 = np.meshgrid(g, g, indexing="ij")
    inside = y1 ** 2 + y2 ** 2 < 0.95 ** 2
    _, _, diff = rf.plane_difference(y1[inside], y2[inside], p)
    dist = np.hypot(y1[inside], y2[inside])
    at = dist[np.argmax(np.abs(diff))]
    origin = abs(rf.plane_difference(0.0, 0.0, p)[2])
    # "small" = within the first quarter of the radius
    return (0.0 if at < 0.25 and origin == 0 else 1.0), f"max |difference| at distance {at:.3f}"


def rho_b_decay(nus=(0.5, 1, 2, 3, 5), lmax=20):
    bad = 0
    for nu in nus:
        b = np.array([rf.b_ell_matern_closed(ell, ms.MaternParams(1, 10, nu)) for ell in range(lmax + 1)])
        if np.any(b <= 0) or not np.all(np.diff(b[4:]) < 0) or b[-1] > 0.05 * b[0]:
            bad += 1
    return float(bad)


# ---------------------------------------------------------------- monte carlo

MC_REAL = 2000


def _z_max(emp, theory, se, floor=1e-12):
    # rounding-level quantities (imaginary parts on the diagonal) have se ~ 0
    return float(np.max(np.abs(emp - theory) / np.maximum(se, floor)))


def mc_sphere(nreal=MC_REAL, lmax=12):
    p = ms.MaternParams(1, 10, 0.5)
    spec = ms.matern_angular_spectrum(p, [1.0], lmax, method="halfnu")
    grid = sm.SphereGrid.for_degree(lmax)
    cfg = sm.SimulationConfig.on_sphere(20240611, lmax, grid, nreal)
    real = sm.simulate_sphere_field(spec, cfg)
    c = spec.get(1.0)
    var_th = float((2 * np.arange(lmax + 1) + 1) @ c / (4 * np.pi))
    v = real.values[:, ::37]
    sq = v ** 2
    z_var = _z_max(sq.mean(axis=0), var_th, sq.std(axis=0, ddof=1) / math.sqrt(nreal))
    est = sm.estimate_angular_spectrum(real, lmax)
    z_c = _z_max(est.C, c, est.se)
    return max(z_var, z_c), f"max |z| variance {z_var:.2f}, spectrum {z_c:.2f}; imag {real.max_imag:.1e}"


def mc_se_scaling(nreal=MC_REAL, lmax=8):
    p = ms.MaternParams(1, 10, 0.5)
    spec = ms.matern_angular_spectrum(p, [1.0], lmax, method="halfnu")
    grid = sm.SphereGrid.for_degree(lmax)
    half = sm.estimate_angular_spectrum(
        sm.simulate_sphere_field(spec, sm.SimulationConfig.on_sphere(77, lmax, grid, nreal // 2)), lmax)
    full = sm.estimate_angular_spectrum(
        sm.simulate_sphere_field(spec, sm.SimulationConfig.on_sphere(77, lmax, grid, nreal)), lmax)
    ratio = float(np.median(half.se / full.se))
    return abs(ratio - math.sqrt(2)) / math.sqrt(2), f"median SE ratio {ratio:.3f}"


def mc_spin(nreal=MC_REAL):
    rng = np.random.default_rng(31)
    worst = 0.0
    for s in (0, 1, 2):
        spec = _random_spin_spectrum(s, 6, 9, 40 + s)
        pts = _random_ball_points(rng, 4)
        real = sm.simulate_ball_spin_field(spec, sm.SimulationConfig(1000 + s, 6, pts, nreal))
        v = real.values
        for i in range(len(pts)):
            for j in range(i, len(pts)):
                prod = np.conj(v[:, i]) * v[:, j]
                th = sf.two_point_correlation(spec, pts[i], pts[j])
                worst = max(worst,
                            _z_max(prod.real.mean(), th.real, prod.real.std(ddof=1) / math.sqrt(nreal)),
                            _z_max(prod.imag.mean(), th.imag, prod.imag.std(ddof=1) / math.sqrt(nreal)))
    return worst


def mc_rho(nreal=MC_REAL):
    spec = rf.rho_matern_spectrum(ms.MaternParams(1, 10, 1), 12)
    pts = np.array([[0.0, 0, 0], [0.1, 0.05, 0.0], [0.3, -0.2, 0.1], [-0.5, 0.4, -0.2]])
    real = sm.simulate_rho_field(spec, rf.BallSphereMap(1.0), sm.SimulationConfig(555, 12, pts, nreal))
    v = real.values
    worst = 0.0
    for i in range(len(pts)):
        for j in range(i, len(pts)):
            prod = v[:, i] * v[:, j]
            th = rf.covariance_from_b(spec, pts[i], pts[j])
            worst = max(worst, _z_max(prod.mean(), th, prod.std(ddof=1) / math.sqrt(nreal)))
    return worst


def mc_determinism():
    p = ms.MaternParams(1, 10, 0.5)
    spec = ms.matern_angular_spectrum(p, [1.0], 6, method="halfnu")
    cfg = sm.SimulationConfig.on_sphere(123, 6, sm.SphereGrid.for_degree(6), 50)
    a = sm.simulate_sphere_field(spec, cfg).to_bytes()
    b = sm.simulate_sphere_field(spec, cfg).to_bytes()
    spin = _random_spin_spectrum(1, 4, 6, 1)
    pts = _random_ball_points(np.random.default_rng(0), 5)
    c = sm.simulate_ball_spin_field(spin, sm.SimulationConfig(9, 4, pts, 20)).to_bytes()
    d = sm.simulate_ball_spin_field(spin, sm.SimulationConfig(9, 4, pts, 20)).to_bytes()
    return float(a != b or c != d)


# ---------------------------------------------------------------- suites

SUITES = {
    "specfun": [
        ("wigner_d_unitarity", 1e-10, wigner_unitarity),
        ("spin_harmonic_orthonormality", 1e-10, spin_orthonormality),
        ("spin_addition_theorem", 1e-9, spin_addition_theorem),
        ("legendre_bounds", 1e-12, legendre_bounds),
        ("bessel_wronskian", 1e-10, bessel_wronskian),
        ("hyp1f2_vs_extended_precision", 1e-10, hyp1f2_vs_mpmath),
        ("sphere3_orthonormality", 1e-10, sphere3_orthonormality),
    ],
    "matern": [
        ("closed_form_vs_quadrature", 1e-6, matern_route_equivalence),
        ("halfnu_bessel_route", 1e-8, matern_halfnu_route),
        ("reconstruction_exp_20_sin", 1e-4, matern_reconstruction),
        ("reconstruction_general_nu", 1e-4, matern_general_reconstruction),
        ("mass_identity", 1e-8, matern_mass_identity),
        ("degenerate_limit_continuity", 1e-3, matern_degenerate_continuity),
        ("collinear_cross_radius", 1e-8, matern_collinear),
    ],
    "spin": [
        ("zernike_dual_route", 1e-12, zernike_dual_route),
        ("zernike_orthonormality", 1e-10, zernike_orthonormality),
        ("two_point_addition_vs_brute_force", 1e-9, spin_two_point_routes),
        ("hermitian_and_rotation", 1e-10, spin_hermitian_and_rotation),
        ("spin0_matches_sphere_covariance", 1e-12, spin_s0_matches_sphere),
        ("mercer_kernel_psd", 1e-10, spin_mercer_psd),
    ],
    "rho": [
        ("metric_axioms_and_isometry", 1e-12, rho_metric_axioms),
        ("b_closed_vs_bessel_quadrature", 1e-6, rho_b_routes),
        ("b_nu1_bessel_form", 1e-8, rho_nu1_bessel_form),
        ("geodesic_matern_roundtrip", 1e-3, rho_geodesic_roundtrip),
        ("normalization_constant_pi2", 1e-6, rho_normalization_constant),
        ("constant_covariance_spectrum", 1e-12, rho_constant_spectrum),
        ("rho_stationarity", 1e-12, rho_stationarity),
        ("deviation_peaks_at_small_distance", 0.0, rho_small_distance_deviation),
        ("b_decay_in_degree", 0.0, rho_b_decay),
    ],
    "montecarlo": [
        ("sphere_variance_and_spectrum_z", 5.0, mc_sphere),
        ("se_sqrt2_scaling", 0.15, mc_se_scaling),
        ("spin_ball_covariance_z", 5.0, mc_spin),
        ("rho_covariance_z", 5.0, mc_rho),
        ("determinism", 0.0, mc_determinism),
    ],
}


def run_suite(name, progress=None):
    names = list(SUITES) if name == "all" else [name]
    if any(n not in SUITES for n in names):
        raise KeyError(name)
    results = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for suite in names:
            for check, tol, fn in SUITES[suite]:
                res = _check(f"{suite}.{check}", tol, fn)
                results.append(res)
                if progress:
                    progress(res)
    return results
