"""Random fields in the ball that are stationary in a non-Euclidean distance.

The ball is carried onto the unit 3-sphere (north pole removed) by an
arctan stretch followed by inverse stereographic projection; rho is the
pulled-back great-circle distance.  Isotropic covariances on S^3 are
Chebyshev-U series with coefficients b_l.
"""
import json
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np
from scipy.special import ive, kve

from .errors import DomainError, TruncationWarning
from .matern_sphere import MaternParams, is_degenerate, matern_covariance
from .specfun import (bessel_product_integral, cancellation_dps, chebyshev_u_table,
                      gauss_chebyshev2, hyp1f2_mp)

OMEGA3 = 4 * math.pi            # area of the unit 2-sphere
OMEGA4 = 2 * math.pi ** 2       # area of the unit 3-sphere
NORTH = np.array([0.0, 0.0, 0.0, 1.0])


@dataclass(frozen=True)
class BallSphereMap:
    r0: float = 1.0

    def __post_init__(self):
        if not self.r0 > 0:
            raise DomainError("ball radius must be positive")

    def stretch(self, x):
        """x~_i = tan(pi x_i / (2 r0))."""
        x = np.asarray(x, dtype=float)
        if np.any(np.linalg.norm(x, axis=-1) >= self.r0):
            raise DomainError(f"point outside the open ball of radius {self.r0}")
        return np.tan(np.pi * x / (2 * self.r0))

    def psi(self, x):
        xt = self.stretch(x)
        n2 = np.sum(xt * xt, axis=-1, keepdims=True)
        return np.concatenate([2 * xt, n2 - 1], axis=-1) / (1 + n2)

    def psi_inv(self, s):
        """Inverse map; its image is the open cube (-r0, r0)^3, which contains the ball."""
        s = np.asarray(s, dtype=float)
        if s.shape[-1] != 4:
            raise DomainError("points on S^3 need four coordinates")
        if np.any(np.abs(np.linalg.norm(s, axis=-1) - 1) > 1e-10):
            raise DomainError("point is not on the unit 3-sphere")
        denom = 1 - s[..., 3:]
        if np.any(denom <= 1e-15):
            raise DomainError("the north pole has no preimage")
        return 2 * self.r0 / np.pi * np.arctan(s[..., :3] / denom)


@dataclass(frozen=True)
class RhoMetricParams:
    r0: float = 1.0
    C: float = 1.0

    def __post_init__(self):
        if not (self.r0 > 0 and self.C > 0):
            raise DomainError("r0 and C must be positive")


def rho_distance(x, y, params: RhoMetricParams = RhoMetricParams()):
    """C arccos((4 x~.y~ + (1 - |x~|^2)(1 - |y~|^2)) / ((1 + |x~|^2)(1 + |y~|^2))).

    The angle is formed as 2 atan2(|u - v|, |u + v|) from the images u, v
    on S^3, which equals the arccos above but stays accurate when the
    points are close or nearly antipodal.
    """
    m = BallSphereMap(params.r0)
    xt, yt = m.stretch(x), m.stretch(y)
    nx = np.sum(xt * xt, axis=-1)
    ny = np.sum(yt * yt, axis=-1)
    arg = (4 * np.sum(xt * yt, axis=-1) + (1 - nx) * (1 - ny)) / ((1 + nx) * (1 + ny))
    if np.any(np.abs(arg) > 1 + 1e-12):
        raise DomainError("cosine outside [-1, 1] beyond rounding slack")
    u, v = m.psi(x), m.psi(y)
    angle = 2 * np.arctan2(np.linalg.norm(u - v, axis=-1), np.linalg.norm(u + v, axis=-1))
    return (params.C * angle)[()]


def matern_density_4d(lam, p: MaternParams):
    """sigma^2 nu (nu + 1) a^(2 nu) / (a^2 + lam^2)^(nu + 2).

    Its mass int d^4 lambda is pi^2 sigma^2, so b_l built on it describe
    a field of variance pi^2 sigma^2 (see ``rho_matern_spectrum``).
    """
    lam = np.asarray(lam, dtype=float)
    return (p.sigma2 * p.nu * (p.nu + 1) * p.a ** (2 * p.nu)
            * (p.a ** 2 + lam ** 2) ** (-(p.nu + 2)))[()]


def b_ell_numeric_bessel(ell, f4: Callable, rtol=1e-11):
    """(2 pi)^4 int_0^inf lam J_{l+1}(lam)^2 f4(lam) d lam."""
    return (2 * np.pi) ** 4 * bessel_product_integral(ell + 1, 1.0, 1.0, lambda lam: lam * f4(lam),
                                                      rtol=rtol)


def _b_terms(ell, p):
    mpf = mpmath.mpf
    nu, a = mpf(p.nu), mpf(p.a)
    z = a * a
    t1 = (mpmath.gamma(ell - nu) * mpmath.gamma(nu + mpf(3) / 2)
          / (mpmath.sqrt(mpmath.pi) * mpmath.gamma(ell + nu + 3))
          * hyp1f2_mp(nu + mpf(3) / 2, nu - ell + 1, nu + ell + 3, z))
    t2 = (mpmath.gamma(nu - ell) * a ** (2 * ell - 2 * nu) / (mpf(2) ** (2 * ell + 2) * mpmath.gamma(ell + 2))
          * hyp1f2_mp(ell + mpf(3) / 2, ell - nu + 1, 2 * ell + 3, z))
    pref = p.sigma2 * 8 * mpmath.pi ** 4 * a ** (2 * nu) / mpmath.gamma(nu)
    return pref * t1, pref * t2


def b_ell_matern_closed(ell, p: MaternParams):
    """Two-term 1F2 closed form of b_l; integer l - nu goes to quadrature."""
    if is_degenerate(ell, p.nu):
        return b_ell_numeric_bessel(ell, lambda lam: matern_density_4d(lam, p))
    dps = 30
    while True:
        with mpmath.workdps(dps):
            t1, t2 = _b_terms(ell, p)
            need = cancellation_dps([t1, t2], base=25)
            if need <= dps:
                return float(t1 + t2)
        dps = need + 5


def b_ell_matern_nu1(ell):
    """Modified-Bessel form of b_l for sigma^2 = 1, a = 10, nu = 1."""
    il, il1 = ive(ell, 10.0), ive(ell + 1, 10.0)
    kl, kl1 = kve(ell, 10.0), kve(ell + 1, 10.0)
    inner = (((ell ** 2 + 3 * ell + 52) * kl1 + 5 * kl * (ell + 2)) * il1
             - 5 * ((ell + 2) * kl1 + 10 * kl) * il)
    return float(4 * np.pi ** 4 / 25 * inner)


def geodesic_to_chordal(gamma):
    return 2 * np.sin(np.asarray(gamma, dtype=float) / 2)


def chordal_to_geodesic(u):
    return 2 * np.arcsin(np.clip(np.asarray(u, dtype=float) / 2, 0.0, 1.0))


def b_ell_from_covariance(ell, B: Callable, n=16384):
    """omega_3/(l+1) int_{-1}^{1} B(2 sin(g/2)) U_l(t) sqrt(1 - t^2) dt with t = cos g.

    ``B`` takes the chordal argument 2 sin(g/2) and may return scalars or
    (k, k) matrices.  ``ell`` may be an int or an array of degrees.
    """
    rule = gauss_chebyshev2(n)
    t = rule.nodes
    g = np.arccos(t)
    values = np.asarray(B(geodesic_to_chordal(g)), dtype=float)
    if values.ndim == 0:
        values = np.full(t.shape, float(values))
    ells = np.atleast_1d(np.asarray(ell))
    sin_g = np.sin(g)
    out = []
    for chunk in np.array_split(ells, max(1, len(ells) // 128)):
        # U_l(cos g) = sin((l + 1) g) / sin g; the GC2 nodes avoid g = 0, pi
        u = np.sin((chunk[:, None] + 1) * g[None, :]) / sin_g[None, :]
        out.append(np.tensordot(u * rule.weights[None, :], values, axes=(1, 0)))
    res = OMEGA3 / (ells + 1).reshape((-1,) + (1,) * (values.ndim - 1)) * np.concatenate(out)
    return res[0] if np.ndim(ell) == 0 else res


@dataclass(frozen=True)
class ChebyshevSpectrum:
    """b_l, l = 0..lmax, scalar (shape (L+1,)) or k-variate (shape (L+1, k, k))."""
    coeffs: np.ndarray
    model_tag: str = "custom"
    variance: object = None

    def __post_init__(self):
        b = np.array(self.coeffs, dtype=float)
        if b.ndim == 1:
            if np.any(b < 0):
                raise DomainError("scalar b_l must be non-negative")
        elif b.ndim == 3 and b.shape[1] == b.shape[2]:
            if not np.allclose(b, np.transpose(b, (0, 2, 1)), rtol=0, atol=1e-12):
                raise DomainError("matrix b_l must be symmetric")
            if np.min(np.linalg.eigvalsh(b)) < -1e-10:
                raise DomainError("matrix b_l must be non-negative definite")
        else:
            raise DomainError("b_l must be scalars or square matrices")
        b.setflags(write=False)
        object.__setattr__(self, "coeffs", b)

    @property
    def lmax(self):
        return self.coeffs.shape[0] - 1

    @property
    def k(self):
        return 1 if self.coeffs.ndim == 1 else self.coeffs.shape[1]

    def total_variance(self):
        ells = np.arange(self.lmax + 1)
        w = ((ells + 1) ** 2).reshape((-1,) + (1,) * (self.coeffs.ndim - 1))
        return (w * self.coeffs).sum(axis=0) / OMEGA4

    def to_json(self):
        entries = [{"ell": ell, "b": (float(b) if self.k == 1 and self.coeffs.ndim == 1
                                      else np.asarray(b).ravel().tolist())}
                   for ell, b in enumerate(self.coeffs)]
        return json.dumps({"k": self.k, "lmax": self.lmax, "model_tag": self.model_tag,
                           "entries": entries})

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        k = obj["k"]
        rows = sorted(obj["entries"], key=lambda e: e["ell"])
        if any(isinstance(e["b"], list) for e in rows):
            b = np.array([np.reshape(e["b"], (k, k)) for e in rows])
        else:
            b = np.array([e["b"] for e in rows])
        return cls(b, obj.get("model_tag", "custom"))


def covariance_from_b_angle(spec: ChebyshevSpectrum, gamma, tol=None):
    """(1/omega_4) sum_l (l + 1) U_l(cos gamma) b_l for geodesic angles gamma."""
    gamma = np.asarray(gamma, dtype=float)
    u = chebyshev_u_table(spec.lmax, np.cos(gamma))
    ells = np.arange(spec.lmax + 1)
    w = (ells + 1)[:, None] * u.reshape(spec.lmax + 1, -1) / OMEGA4
    value = np.tensordot(w, spec.coeffs, axes=(0, 0))
    if tol is not None:
        last = (spec.lmax + 1) ** 2 * np.max(np.abs(spec.coeffs[-1])) / OMEGA4
        if last > tol:
            warnings.warn(f"last retained term {last:.2e} exceeds tolerance {tol:.1e}",
                          TruncationWarning, stacklevel=2)
    return value.reshape(gamma.shape + spec.coeffs.shape[1:])[()]


def covariance_from_b(spec: ChebyshevSpectrum, x, y, params: RhoMetricParams = RhoMetricParams(),
                      tol=None):
    """Covariance of ball points x, y through the Chebyshev series at rho(x, y) / C."""
    rho = rho_distance(x, y, params)
    return covariance_from_b_angle(spec, np.asarray(rho) / params.C, tol=tol)


def rho_matern_spectrum(p: MaternParams, lmax, normalized=True):
    """b_l of the R^4 Matern restricted to S^3 (chordal distance).

    The closed form describes variance pi^2 sigma^2; ``normalized``
    divides by pi^2 so the series reconstructs variance sigma^2.
    """
    b = np.array([b_ell_matern_closed(ell, p) for ell in range(lmax + 1)])
    if normalized:
        b = b / np.pi ** 2
    return ChebyshevSpectrum(b, model_tag=f"rho_matern_chordal(sigma2={p.sigma2},a={p.a},nu={p.nu})")


def geodesic_matern_covariance(rho, p: MaternParams):
    """Matern covariance taken at the rho-distance."""
    return matern_covariance(rho, p)


def geodesic_matern_spectrum(p: MaternParams, lmax, n=16384, C=1.0):
    """b_l of the covariance M(a rho) with rho = C times the geodesic angle on S^3."""
    b = b_ell_from_covariance(np.arange(lmax + 1),
                              lambda u: matern_covariance(C * chordal_to_geodesic(u), p), n=n)
    return ChebyshevSpectrum(np.clip(b, 0.0, None),
                             model_tag=f"rho_matern_geodesic(sigma2={p.sigma2},a={p.a},nu={p.nu},C={C})")


def plane_difference(y1, y2, p: MaternParams, params: RhoMetricParams = RhoMetricParams()):
    """Euclidean Matern minus rho-Matern between the origin and (y1, y2, 0)."""
    y = np.stack(np.broadcast_arrays(np.asarray(y1, float), np.asarray(y2, float)), axis=-1)
    y = np.concatenate([y, np.zeros(y.shape[:-1] + (1,))], axis=-1)
    d = np.linalg.norm(y, axis=-1)
    rho = rho_distance(np.zeros_like(y), y, params)
    euclid = matern_covariance(d, p)
    ball = matern_covariance(rho, p)
    return euclid, ball, euclid - ball
