"""Spin-weighted random fields in a ball.

Radial dependence is expanded in 3D Zernike radial functions, so the
coefficient processes have covariance
sC_l(r1, r2) = sum_n A_l^(n) R~_nl(r1) R~_nl(r2).
"""
import json
import math
from fractions import Fraction
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

import numpy as np

from .errors import DomainError
from .specfun import gauss_legendre, jacobi_p, relative_euler, spin_sph_harm
from .specfun.wigner import cartesian_to_spherical


@dataclass(frozen=True)
class ZernikeIndex:
    n: int
    ell: int

    def __post_init__(self):
        if self.ell < 0 or self.n < self.ell:
            raise DomainError(f"need 0 <= ell <= n, got n={self.n}, ell={self.ell}")
        if (self.n - self.ell) % 2:
            raise DomainError(f"n - ell must be even, got n={self.n}, ell={self.ell}")


def _radial_unit(n, ell, r):
    k = (n - ell) // 2
    return math.sqrt(2 * n + 3) * r ** ell * jacobi_p(k, 0.0, ell + 0.5, 2 * r * r - 1)


def zernike_radial(idx: ZernikeIndex, r):
    """R_nl(r) on [0, 1] through its Jacobi form."""
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r > 1 + 1e-12)):
        raise DomainError("radius must lie in [0, 1]")
    return np.asarray(_radial_unit(idx.n, idx.ell, np.clip(r, 0, 1)))[()]


def _gen_binom(x, k):
    # exact rational value; x is a half-integer here
    out = Fraction(1)
    for j in range(k):
        out *= (x - j) / Fraction(j + 1)
    return out


def zernike_radial_sum(idx: ZernikeIndex, r):
    """R_nl(r) from the explicit alternating sum of monomials r^(n-2k).

    The terms cancel heavily for large n, so the sum is formed in exact
    rational arithmetic (every float is a rational) and rounded once.
    """
    r = np.asarray(r, dtype=float)
    n, ell = idx.n, idx.ell
    half = (n - ell) // 2
    coefs = [(-1) ** k * math.comb(half, k) * _gen_binom(Fraction(2 * n - 2 * k + 1, 2), half)
             for k in range(half + 1)]

    def exact(x):
        x = Fraction(x)
        return float(sum(c * x ** (n - 2 * k) for k, c in enumerate(coefs)))

    values = np.array([exact(x) for x in r.ravel()]).reshape(r.shape)
    return (math.sqrt(2 * n + 3) * values)[()]


def zernike_radial_scaled(idx: ZernikeIndex, r, r0=1.0):
    """R~_nl(r) = R_nl(r / r0) / r0^(3/2), orthonormal under r^2 dr on [0, r0]."""
    if r0 <= 0:
        raise DomainError("ball radius must be positive")
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r > r0 * (1 + 1e-12))):
        raise DomainError(f"radius must lie in [0, {r0}]")
    return np.asarray(_radial_unit(idx.n, idx.ell, np.clip(r / r0, 0, 1)) / r0 ** 1.5)[()]


def zernike_degrees(ell, nmax):
    """The admissible n for a given l: l, l + 2, ... up to nmax."""
    return list(range(ell, nmax + 1, 2))


@dataclass(frozen=True)
class SpinSpectrumBall:
    """Mercer coefficients A_l^(n) >= 0 of a spin-s field in the ball of radius r0."""
    spin: int
    A: Mapping
    r0: float = 1.0

    def __post_init__(self):
        if self.spin < 0:
            raise DomainError("spin weight must be non-negative")
        if self.r0 <= 0:
            raise DomainError("ball radius must be positive")
        table = {}
        for (ell, n), value in self.A.items():
            ZernikeIndex(n, ell)
            if ell < self.spin:
                raise DomainError(f"degree {ell} below spin {self.spin}")
            if not value >= 0:
                raise DomainError(f"A[{ell},{n}] must be non-negative")
            table[int(ell), int(n)] = float(value)
        object.__setattr__(self, "A", table)

    @property
    def lmax(self):
        return max((ell for ell, _ in self.A), default=self.spin)

    @property
    def nmax(self):
        return max((n for _, n in self.A), default=self.spin)

    def frame_function(self, ell, n, r):
        """sqrt(A) R~_nl(r), the frame element paired with X_lm^(n)."""
        return math.sqrt(self.A.get((ell, n), 0.0)) * zernike_radial_scaled(ZernikeIndex(n, ell), r, self.r0)

    def radial_cov(self, ell, r1, r2):
        return spin_spectrum_to_radial_cov(self, ell, r1, r2)

    def radial_cov_all(self, r1, r2):
        out = np.zeros(self.lmax + 1)
        for (ell, n), a in self.A.items():
            idx = ZernikeIndex(n, ell)
            out[ell] += a * zernike_radial_scaled(idx, r1, self.r0) * zernike_radial_scaled(idx, r2, self.r0)
        return out

    def to_json(self):
        entries = [{"ell": ell, "n": n, "A": a} for (ell, n), a in sorted(self.A.items())]
        return json.dumps({"spin": self.spin, "r0": self.r0, "entries": entries})

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        return cls(obj["spin"], {(e["ell"], e["n"]): e["A"] for e in obj["entries"]}, obj["r0"])


def spin_spectrum_to_radial_cov(spec: SpinSpectrumBall, ell, r1, r2):
    """sC_l(r1, r2) = sum_n A_l^(n) R~_nl(r1) R~_nl(r2)."""
    if ell < spec.spin:
        raise DomainError(f"degree {ell} below spin {spec.spin}")
    total = 0.0
    for (l, n), a in spec.A.items():
        if l == ell and a:
            idx = ZernikeIndex(n, ell)
            total += a * zernike_radial_scaled(idx, r1, spec.r0) * zernike_radial_scaled(idx, r2, spec.r0)
    return float(total)


@dataclass(frozen=True)
class RadialProcessMoments:
    """sC_l(r1, r2) as a function ``cov(ell, r1, r2)``, for degrees spin..lmax.

    Anything with this shape (a Mercer spectrum, a tabulated Matern model,
    a user kernel) can feed :func:`two_point_correlation`.
    """
    cov: Callable
    spin: int
    lmax: int
    r0: Optional[float] = None

    def __post_init__(self):
        if self.spin < 0 or self.lmax < self.spin:
            raise DomainError("need 0 <= spin <= lmax")

    @classmethod
    def from_spin_spectrum(cls, spec: "SpinSpectrumBall"):
        return cls(spec.radial_cov, spec.spin, spec.lmax, spec.r0)

    @classmethod
    def from_table(cls, table: Mapping, spin=0, r0=None):
        """From a map (ell, r1, r2) -> value; the mirrored (ell, r2, r1) is implied."""
        data = {}
        for (ell, r1, r2), value in table.items():
            data[int(ell), float(r1), float(r2)] = float(value)
            data.setdefault((int(ell), float(r2), float(r1)), float(value))

        def cov(ell, r1, r2):
            try:
                return data[int(ell), float(r1), float(r2)]
            except KeyError:
                raise KeyError(f"no moment for l={ell}, r1={r1}, r2={r2}") from None

        return cls(cov, spin, max(k[0] for k in data), r0)

    def radial_cov(self, ell, r1, r2):
        if ell < self.spin:
            raise DomainError(f"degree {ell} below spin {self.spin}")
        return float(self.cov(ell, r1, r2))

    def check(self, radii, atol=1e-12):
        """Worst asymmetry and most negative diagonal value over a radius grid."""
        asym, neg = 0.0, 0.0
        for ell in range(self.spin, self.lmax + 1):
            for i, r1 in enumerate(radii):
                neg = min(neg, self.radial_cov(ell, r1, r1))
                for r2 in radii[i + 1:]:
                    a, b = self.radial_cov(ell, r1, r2), self.radial_cov(ell, r2, r1)
                    asym = max(asym, abs(a - b) / max(1.0, abs(a)))
        if asym > atol or neg < -atol:
            raise DomainError(f"moments not symmetric/non-negative: asymmetry {asym:.2e}, min diagonal {neg:.2e}")
        return asym, neg


def project_radial_covariance(cov, spin, lmax, nmax, r0=1.0, nquad=64):
    """A_l^(n) as diagonal Zernike coefficients of a radial covariance cov(l, r1, r2).

    Exact when the R~_nl are the Mercer eigenfunctions; otherwise the
    cross terms are dropped and the result is only an approximation.
    """
    rule = gauss_legendre(nquad, 0.0, r0)
    r, w = rule.nodes, rule.weights * rule.nodes ** 2
    A = {}
    for ell in range(spin, lmax + 1):
        K = np.array([[cov(ell, a, b) for b in r] for a in r])
        for n in zernike_degrees(ell, nmax):
            phi = zernike_radial_scaled(ZernikeIndex(n, ell), r, r0) * w
            A[ell, n] = max(float(phi @ K @ phi), 0.0)
    return SpinSpectrumBall(spin, A, r0)


def _direction(x):
    x = np.asarray(x, dtype=float)
    rad = float(np.linalg.norm(x))
    if rad == 0:
        raise DomainError("direction undefined at the origin")
    _, theta, phi = cartesian_to_spherical(x)
    return rad, float(theta), float(phi)


def _radial_values(spec, r1, r2):
    if hasattr(spec, "radial_cov_all"):
        return spec.radial_cov_all(r1, r2)
    return np.array([spec.radial_cov(ell, r1, r2) if ell >= spec.spin else 0.0
                     for ell in range(spec.lmax + 1)])


def _check_in_ball(spec, rad):
    r0 = getattr(spec, "r0", None)
    if r0 is not None and rad > r0 * (1 + 1e-12):
        raise DomainError(f"point at radius {rad} lies outside the ball of radius {r0}")


def two_point_correlation(spec, x1, x2):
    """E[conj(sT(x1)) sT(x2)] through the spin addition theorem.

    ``spec`` is anything exposing ``spin``, ``lmax`` and ``radial_cov``.
    The finite spectrum is summed in full.
    """
    s = spec.spin
    r1, t1, p1 = _direction(x1)
    r2, t2, p2 = _direction(x2)
    _check_in_ball(spec, r1)
    _check_in_ball(spec, r2)
    rel = relative_euler(t1, p1, t2, p2)
    c = _radial_values(spec, r1, r2)
    total = 0.0j
    for ell in range(s, spec.lmax + 1):
        if c[ell] == 0:
            continue
        y = spin_sph_harm(s, ell, -s, rel.beta, rel.alpha)
        total += math.sqrt(2 * ell + 1) * c[ell] * y
    return complex(total * np.exp(-1j * s * rel.gamma) / (2 * math.sqrt(math.pi)))


def brute_force_two_point(spec, x1, x2, lmax=None):
    """Direct double sum sum_l sC_l sum_m conj(sY_lm(x1)) sY_lm(x2)."""
    s = spec.spin
    lmax = spec.lmax if lmax is None else lmax
    r1, t1, p1 = _direction(x1)
    r2, t2, p2 = _direction(x2)
    c = _radial_values(spec, r1, r2)
    total = 0.0j
    for ell in range(s, min(lmax, spec.lmax) + 1):
        m = np.arange(-ell, ell + 1)
        y1 = spin_sph_harm(s, ell, m, t1, p1)
        y2 = spin_sph_harm(s, ell, m, t2, p2)
        total += c[ell] * np.sum(np.conj(y1) * y2)
    return complex(total)
