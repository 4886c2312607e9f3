"""Matern fields in R^3 restricted to concentric spheres.

Angular power spectra C_l(r1, r2) of the restriction, by Bessel-product
quadrature, by the two-term 1F2 closed form and (for nu = 1/2) by modified
Bessel functions, together with the Legendre reconstruction of the
covariance on the sphere.
"""
import json
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Mapping, NamedTuple, Optional

import mpmath
import numpy as np
from scipy.special import ive, kve

from .errors import DomainError, TruncationWarning
from .specfun import (bessel_product_integral, cancellation_dps, gauss_legendre, hyp1f2_mp,
                      integrate_interval, integrate_semi_infinite, legendre_table)

DEGENERATE_EPS = 1e-6


@dataclass(frozen=True)
class MaternParams:
    sigma2: float
    a: float
    nu: float

    def __post_init__(self):
        for name in ("sigma2", "a", "nu"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive, got {value}")
            object.__setattr__(self, name, float(value))


def matern_covariance(d, p: MaternParams):
    """sigma^2 2^(1-nu)/Gamma(nu) (a d)^nu K_nu(a d), equal to sigma^2 at d = 0."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise DomainError("distance must be non-negative")
    x = p.a * d
    out = np.full(x.shape, float(p.sigma2))
    pos = x > 0
    if p.nu == 0.5:
        out[pos] = p.sigma2 * np.exp(-x[pos])
        return out[()]
    xp = x[pos]
    # K_nu underflows near x ~ 700; the covariance is zero there anyway
    with np.errstate(under="ignore"):
        k = kve(p.nu, xp) * np.exp(-xp)
    log_pref = (1 - p.nu) * math.log(2) - math.lgamma(p.nu)
    out[pos] = p.sigma2 * np.exp(log_pref + p.nu * np.log(xp)) * k
    return out[()]


def matern_density_3d(lam, p: MaternParams):
    """Isotropic spectral density of the Matern covariance in R^3."""
    lam = np.asarray(lam, dtype=float)
    log_c = (math.lgamma(p.nu + 1.5) + 2 * p.nu * math.log(p.a)
             - 1.5 * math.log(math.pi) - math.lgamma(p.nu))
    return (p.sigma2 * np.exp(log_c) * (p.a ** 2 + lam ** 2) ** (-(p.nu + 1.5)))[()]


@dataclass(frozen=True)
class SpectralDensity3D:
    """Radial spectral density f; the measure is d mu = 4 pi lambda^2 f d lambda."""
    eval: Callable
    scale: float = 1.0
    variance: Optional[float] = None
    decay_exponent: Optional[float] = None
    tag: str = "custom"

    @classmethod
    def matern(cls, p: MaternParams):
        return cls(lambda lam: matern_density_3d(lam, p), scale=p.a, variance=p.sigma2,
                   decay_exponent=2 * p.nu + 1, tag=f"matern(sigma2={p.sigma2},a={p.a},nu={p.nu})")

    def __call__(self, lam):
        return self.eval(lam)

    def total_mass(self, rtol=1e-11):
        """int 4 pi lam^2 f d lam.

        With a known decay 4 pi lam^2 f ~ lam^-d (d > 1) the tail beyond
        ``scale`` is mapped by t = (lam / scale)^-(d - 1), which leaves a
        bounded integrand on (0, 1]; otherwise the rational map is used.
        """
        g = lambda lam: 4 * np.pi * lam ** 2 * self.eval(lam)
        d = self.decay_exponent
        if d is None or not d > 1:
            return integrate_semi_infinite(g, scale=self.scale, rtol=rtol)
        s, k = self.scale, d - 1
        head = integrate_interval(g, 0.0, s, rtol=rtol)

        def tail(t):
            lam = s * t ** (-1 / k)
            return g(lam) * lam / (k * t)

        # the tail integrand is a function of t^(2/(d-1)), not smooth at 0,
        # so panels are graded geometrically toward 0
        edges = 2.0 ** -np.arange(0, 60)
        body = sum(integrate_interval(tail, lo, hi, rtol=rtol) for lo, hi in zip(edges[1:], edges[:-1]))
        return head + body + tail(edges[-1]) * edges[-1]


def _check_radius(r):
    if not (np.isfinite(r) and r > 0):
        raise DomainError(f"radius must be positive, got {r}")


def angular_spectrum_numeric(ell, r1, r2, f: SpectralDensity3D, rtol=1e-11):
    """C_l(r1, r2) = 2 pi^2 int J_{l+1/2}(lam r1) J_{l+1/2}(lam r2) / (lam sqrt(r1 r2)) d mu."""
    _check_radius(r1)
    _check_radius(r2)
    rr = math.sqrt(r1 * r2)

    def g(lam):
        return 4 * np.pi * lam * f.eval(lam) / rr

    return 2 * np.pi ** 2 * bessel_product_integral(ell + 0.5, r1, r2, g, rtol=rtol)


def is_degenerate(ell, nu, eps=DEGENERATE_EPS):
    return abs((ell - nu) - round(ell - nu)) < eps


def _closed_terms(ell, r, p):
    mpf = mpmath.mpf
    nu, a, r = mpf(p.nu), mpf(p.a), mpf(r)
    z = (a * r) ** 2
    t1 = (nu * mpmath.gamma(ell - nu) / (mpmath.sqrt(mpmath.pi) * mpmath.gamma(ell + nu + 2))
          * r ** (2 * nu) * hyp1f2_mp(nu + 1, nu - ell + 1, nu + ell + 2, z))
    t2 = (mpmath.gamma(nu - ell) * a ** (2 * ell - 2 * nu) * r ** (2 * ell)
          / (mpf(2) ** (2 * ell + 1) * mpmath.gamma(nu) * mpmath.gamma(ell + mpf(3) / 2))
          * hyp1f2_mp(ell + 1, ell - nu + 1, 2 * ell + 2, z))
    pref = 4 * mpmath.pi ** mpf(1.5) * p.sigma2 * a ** (2 * nu)
    return pref * t1, pref * t2


def angular_spectrum_matern(ell, r, p: MaternParams):
    """Two-term 1F2 closed form of C_l(r) for the Matern family.

    The two terms nearly cancel when a r is large, so they are formed in
    extended precision chosen from the size of the cancellation.  Integer
    l - nu (where both terms have poles) falls back to quadrature.
    """
    _check_radius(r)
    if is_degenerate(ell, p.nu):
        return angular_spectrum_numeric(ell, r, r, SpectralDensity3D.matern(p))
    dps = 30
    while True:
        with mpmath.workdps(dps):
            t1, t2 = _closed_terms(ell, r, p)
            need = cancellation_dps([t1, t2], base=25)
            if need <= dps:
                return float(t1 + t2)
        dps = need + 5


def matern_spectrum_halfnu(ell, r, r2=None, sigma2=1.0, a=10.0):
    """C_l(r1, r2) for nu = 1/2 through modified Bessel functions.

    The defaults reproduce the sigma^2 = 1, a = 10 case.  With r2 = None the
    diagonal r1 = r2 = r is returned.
    """
    r1 = r
    r2 = r if r2 is None else r2
    _check_radius(r1)
    _check_radius(r2)
    rl, rg = min(r1, r2), max(r1, r2)
    mu = ell + 0.5
    x1, x2 = a * rl, a * rg
    with np.errstate(over="ignore", invalid="ignore"):
        i0, i1 = ive(mu, x1), ive(mu + 1, x1)
        k0, k1 = kve(mu, x2), kve(mu + 1, x2)
        terms = np.array([rg * i0 * k1, -rl * i1 * k0, -2 * mu / a * i0 * k0])
        bracket = terms.sum()
    # at high l the three terms nearly cancel (and K may overflow): redo in mpmath
    if not (np.all(np.isfinite(terms)) and abs(bracket) * 1e2 > np.abs(terms).max()):
        return _halfnu_mp(mu, r1, r2, rl, rg, sigma2, a)
    value = 4 * np.pi * sigma2 / math.sqrt(r1 * r2) * math.exp(x1 - x2) * bracket
    return float(value)


def _halfnu_mp(mu, r1, r2, rl, rg, sigma2, a):
    dps = 30
    while True:
        with mpmath.workdps(dps):
            mu_, a_ = mpmath.mpf(mu), mpmath.mpf(a)
            x1, x2 = a_ * rl, a_ * rg
            i0, i1 = mpmath.besseli(mu_, x1), mpmath.besseli(mu_ + 1, x1)
            k0, k1 = mpmath.besselk(mu_, x2), mpmath.besselk(mu_ + 1, x2)
            terms = [rg * i0 * k1, -rl * i1 * k0, -2 * mu_ / a_ * i0 * k0]
            need = cancellation_dps(terms, base=25)
            if need <= dps:
                return float(4 * mpmath.pi * sigma2 / mpmath.sqrt(mpmath.mpf(r1) * r2) * sum(terms))
        dps = need + 5


def angular_spectrum_funk_hecke(lmax, r, cov: Callable, n=4096):
    """C_l(r) = 2 pi int_0^pi B(2 r sin(g/2)) P_l(cos g) sin g dg, all l <= lmax.

    ``cov`` is the covariance as a function of Euclidean distance.  The
    substitution cos g = 1 - 2 u^2 clusters nodes at g = 0 where B has its
    least smooth point.
    """
    rule = gauss_legendre(n, 0.0, 1.0)
    u = rule.nodes
    t = 1 - 2 * u ** 2
    b = cov(2 * r * u)
    p = legendre_table(lmax, t)
    return 2 * np.pi * (p * (b * 4 * u * rule.weights)).sum(axis=1)


def chordal_distance(r, gamma):
    """Straight-line distance between two points of a radius-r sphere at angle gamma."""
    if r <= 0:
        raise DomainError("radius must be positive")
    gamma = np.asarray(gamma, dtype=float)
    if np.any((gamma < 0) | (gamma > np.pi + 1e-12)):
        raise DomainError("angle must lie in [0, pi]")
    return (2 * r * np.sin(gamma / 2))[()]


def _key(r1, r2):
    return (float(r1), float(r2))


@dataclass(frozen=True)
class AngularSpectrum:
    """C_l(r1, r2) for l = 0..lmax at a set of radius pairs."""
    coeffs: Mapping
    lmax: int
    spin: int = 0
    model_tag: str = "custom"
    variance: Optional[float] = None
    decay_exponent: Optional[float] = None

    def __post_init__(self):
        table = {}
        for (r1, r2), values in self.coeffs.items():
            values = np.array(values, dtype=float)
            if values.shape != (self.lmax + 1,):
                raise ValueError(f"expected {self.lmax + 1} coefficients at {(r1, r2)}")
            if r1 == r2 and np.any(values < 0):
                raise ValueError(f"negative diagonal coefficient at r={r1}")
            values.setflags(write=False)
            table[_key(r1, r2)] = values
        object.__setattr__(self, "coeffs", table)

    def get(self, r1, r2=None):
        r2 = r1 if r2 is None else r2
        for key in (_key(r1, r2), _key(r2, r1)):
            if key in self.coeffs:
                return self.coeffs[key]
        # radii recomputed from coordinates may differ in the last bits
        for (a, b), value in self.coeffs.items():
            if (math.isclose(a, r1, rel_tol=1e-12) and math.isclose(b, r2, rel_tol=1e-12)) or \
                    (math.isclose(a, r2, rel_tol=1e-12) and math.isclose(b, r1, rel_tol=1e-12)):
                return value
        raise KeyError(f"no coefficients for radii {(r1, r2)}")

    def __call__(self, ell, r1, r2=None):
        return float(self.get(r1, r2)[ell])

    def radial_cov(self, ell, r1, r2):
        return float(self.get(r1, r2)[ell])

    def radial_cov_all(self, r1, r2):
        return np.asarray(self.get(r1, r2))

    @property
    def radii(self):
        return sorted(self.coeffs)

    def rows(self):
        for r1, r2 in self.radii:
            for ell, c in enumerate(self.coeffs[r1, r2]):
                yield ell, r1, r2, float(c)

    def to_json(self):
        return json.dumps({
            "spin": self.spin, "lmax": self.lmax, "model_tag": self.model_tag,
            "variance": self.variance, "decay_exponent": self.decay_exponent,
            "entries": [{"ell": e, "r1": a, "r2": b, "C": c} for e, a, b, c in self.rows()],
        })

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        lmax = obj["lmax"]
        coeffs = {}
        for item in obj["entries"]:
            coeffs.setdefault(_key(item["r1"], item["r2"]), np.zeros(lmax + 1))[item["ell"]] = item["C"]
        return cls(coeffs, lmax, spin=obj.get("spin", 0), model_tag=obj.get("model_tag", "custom"),
                   variance=obj.get("variance"), decay_exponent=obj.get("decay_exponent"))


def matern_angular_spectrum(p: MaternParams, radii, lmax, method="closed"):
    """Tabulate C_l(r, r) for each radius (or (r1, r2) pair) up to lmax.

    ``method`` is ``closed`` (1F2 form), ``quadrature`` or ``halfnu``.
    Off-diagonal pairs always use quadrature unless ``halfnu`` is chosen.
    """
    pairs = [(r, r) if np.isscalar(r) else tuple(r) for r in radii]
    dens = SpectralDensity3D.matern(p)
    coeffs = {}
    for r1, r2 in pairs:
        if method == "halfnu":
            if p.nu != 0.5:
                raise DomainError("the I/K route needs nu = 1/2")
            vals = [matern_spectrum_halfnu(ell, r1, r2, p.sigma2, p.a) for ell in range(lmax + 1)]
        elif method == "closed" and r1 == r2:
            vals = [angular_spectrum_matern(ell, r1, p) for ell in range(lmax + 1)]
        elif method in ("closed", "quadrature"):
            vals = [angular_spectrum_numeric(ell, r1, r2, dens) for ell in range(lmax + 1)]
        else:
            raise ValueError(f"unknown method {method!r}")
        coeffs[r1, r2] = vals
    return AngularSpectrum(coeffs, lmax, model_tag=dens.tag + f";{method}",
                           variance=p.sigma2, decay_exponent=2 * p.nu + 1)


class CovarianceEstimate(NamedTuple):
    value: np.ndarray
    tail_bound: float
    tail_correction: float


def _fit_tail(c, decay=None):
    """Fit c_l ~ (l + 1/2)^-p (b0 + b1/(l + 1/2) + b2/(l + 1/2)^2) on the top half."""
    lmax = len(c) - 1
    ells = np.arange(lmax // 2, lmax + 1)
    y = c[ells]
    if np.any(y <= 0) or len(ells) < 8:
        return None
    x = ells + 0.5
    if decay is None:
        decay = -np.polyfit(np.log(x), np.log(y), 1)[0]
    if decay <= 1.0:
        return None
    design = np.stack([x ** (-decay - k) for k in range(3)], axis=1)
    w = 1 / y
    beta = np.linalg.lstsq(design * w[:, None], y * w, rcond=None)[0]
    return decay, beta


def _model(beta, decay, ell):
    x = np.asarray(ell, dtype=float) + 0.5
    return sum(b * x ** (-decay - k) for k, b in enumerate(beta))


def _model_mass_beyond(beta, decay, lstart):
    # integral of the model from lstart - 1/2 approximates the sum from lstart (midpoint rule)
    x0 = lstart
    return sum(b * x0 ** (1 - decay - k) / (decay + k - 1) for k, b in enumerate(beta))


def covariance_from_spectrum(spec: AngularSpectrum, r1, r2, gamma, tol=1e-4,
                             extrapolate=True, max_extension=400_000):
    """(1/4 pi) sum_l (2l + 1) C_l(r1, r2) P_l(cos gamma) with a tail estimate.

    Matern spectra decay only algebraically, so the truncated sum is
    completed by a fitted power-law tail, scaled to the exact missing
    variance when the spectrum knows it.  ``tail_bound`` is the uncorrected
    missing mass, an upper bound on the truncation error since |P_l| <= 1.
    """
    gamma = np.asarray(gamma, dtype=float)
    if np.any((gamma < 0) | (gamma > np.pi + 1e-12)):
        raise DomainError("angle must lie in [0, pi]")
    x = np.cos(gamma)
    c = (2 * np.arange(spec.lmax + 1) + 1) * spec.get(r1, r2) / (4 * np.pi)
    p = legendre_table(spec.lmax, x)
    head = np.tensordot(c, p, axes=1)
    diagonal = r1 == r2
    if diagonal:
        tail_mass = spec.variance - c.sum() if spec.variance is not None else None
    else:
        c1 = (2 * np.arange(spec.lmax + 1) + 1) * spec.get(r1) / (4 * np.pi) if _has(spec, r1) else None
        c2 = (2 * np.arange(spec.lmax + 1) + 1) * spec.get(r2) / (4 * np.pi) if _has(spec, r2) else None
        tail_mass = None
        if spec.variance is not None and c1 is not None and c2 is not None:
            tail_mass = math.sqrt(max(spec.variance - c1.sum(), 0) * max(spec.variance - c2.sum(), 0))
    fit = _fit_tail(c, spec.decay_exponent) if (extrapolate and diagonal) else None
    correction = np.zeros_like(head)
    uncertainty = 0.0
    if fit is not None:
        decay, beta = fit
        model_mass = _model_mass_beyond(beta, decay, spec.lmax + 1)
        scale = tail_mass / model_mass if tail_mass is not None and model_mass > 0 else 1.0
        # extend until the remaining model mass is below tol / 10
        lext = spec.lmax
        while lext < max_extension and scale * _model_mass_beyond(beta, decay, lext + 1) > tol / 10:
            lext = min(2 * lext, max_extension)
        ells = np.arange(spec.lmax + 1, lext + 1)
        ct = scale * _model(beta, decay, ells)
        correction = _legendre_tail(ct, spec.lmax + 1, x, p[-2], p[-1])
        rest = scale * _model_mass_beyond(beta, decay, lext + 1)
        # Mehler-Heine: P_l(cos g) ~ 1 only while l g << 1
        correction = correction + rest * np.clip(1 - lext * gamma / 2, 0, 1)
        uncertainty = rest + (abs(tail_mass - model_mass) if tail_mass is not None else 0.1 * model_mass)
        bound = tail_mass if tail_mass is not None else model_mass
    else:
        bound = tail_mass if tail_mass is not None else _crude_bound(c)
        uncertainty = bound
    if uncertainty > tol:
        warnings.warn(f"truncation error estimate {uncertainty:.2e} exceeds tolerance {tol:.1e}",
                      TruncationWarning, stacklevel=2)
    return CovarianceEstimate((head + correction)[()], float(bound), float(np.max(np.abs(correction))))


def _has(spec, r):
    try:
        spec.get(r)
        return True
    except KeyError:
        return False


def _crude_bound(c):
    # geometric continuation of the last ratio
    if len(c) < 2 or c[-2] <= 0:
        return float(abs(c[-1]))
    q = abs(c[-1] / c[-2])
    return float(abs(c[-1]) * q / (1 - q)) if q < 1 else float("inf")


def _legendre_tail(coeffs, lstart, x, p_prev, p_cur):
    """sum_k coeffs[k] P_{lstart + k}(x), continuing the recurrence from P_{lstart-2}, P_{lstart-1}."""
    total = np.zeros_like(x)
    a, b = p_prev.copy(), p_cur.copy()
    for k, ck in enumerate(coeffs):
        n = lstart + k - 1
        a, b = b, ((2 * n + 1) * x * b - n * a) / (n + 1)
        total += ck * b
    return total
