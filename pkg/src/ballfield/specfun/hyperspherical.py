"""Real orthonormal harmonics on the unit 3-sphere in R^4.

Degree-L family: S_{L,l,m}(s) = N_{Ll} sin^l(chi) C^(l+1)_{L-l}(cos chi) Y^re_lm(theta, phi)
with s4 = cos chi and (s1, s2, s3) = sin chi * (unit vector at theta, phi),
l = 0..L, m = -l..l, so (L+1)^2 members.  The flat index j = l^2 + (m + l) + 1
runs over 1..(L+1)^2.
"""
import numpy as np
from scipy.special import gammaln

from ..errors import DomainError
from .polynomials import gegenbauer_c
from .wigner import spin_sph_harm

OMEGA4 = 2.0 * np.pi ** 2  # area of the unit 3-sphere


def index_to_lm(j):
    if j < 1:
        raise DomainError("harmonic index starts at 1")
    ell = int(np.floor(np.sqrt(j - 1)))
    return ell, (j - 1) - ell * ell - ell


def _check_unit(points):
    pts = np.asarray(points, dtype=float)
    if pts.shape[-1] != 4:
        raise DomainError("points on S^3 need four coordinates")
    if np.any(np.abs(np.linalg.norm(pts, axis=-1) - 1.0) > 1e-10):
        raise DomainError("point is not on the unit 3-sphere")
    return pts


def _angles(pts):
    chi = np.arccos(np.clip(pts[..., 3], -1.0, 1.0))
    rho = np.linalg.norm(pts[..., :3], axis=-1)
    safe = np.where(rho > 0, rho, 1.0)
    theta = np.where(rho > 0, np.arccos(np.clip(pts[..., 2] / safe, -1.0, 1.0)), 0.0)
    phi = np.mod(np.arctan2(pts[..., 1], pts[..., 0]), 2 * np.pi)
    return chi, theta, phi


def _norm(L, ell):
    lam = ell + 1
    n = L - ell
    log_h = (np.log(np.pi) + (1 - 2 * lam) * np.log(2.0) + gammaln(n + 2 * lam)
             - gammaln(n + 1) - np.log(n + lam) - 2 * gammaln(lam))
    return np.exp(-0.5 * log_h)


def real_sph_harm(ell, m, theta, phi):
    """Real orthonormal spherical harmonic on S^2."""
    if m == 0:
        return spin_sph_harm(0, ell, 0, theta, phi).real
    y = spin_sph_harm(0, ell, abs(m), theta, phi)
    sign = (-1.0) ** m
    return np.sqrt(2.0) * sign * (y.real if m > 0 else y.imag)


def _radial(L, ell, chi):
    return _norm(L, ell) * np.sin(chi) ** ell * gegenbauer_c(L - ell, ell + 1, np.cos(chi))


def sphere3_harmonic(L, j, s):
    """Value of the j-th degree-L harmonic at unit vector(s) ``s``."""
    if j > (L + 1) ** 2:
        raise DomainError(f"index j={j} outside 1..{(L + 1) ** 2}")
    pts = _check_unit(s)
    ell, m = index_to_lm(j)
    chi, theta, phi = _angles(pts)
    return (_radial(L, ell, chi) * real_sph_harm(ell, m, theta, phi))[()]


def sphere3_harmonic_matrix(lmax, points):
    """Columns ordered by (L, j); returns (matrix, degree of each column)."""
    pts = np.atleast_2d(_check_unit(points))
    chi, theta, phi = _angles(pts)
    ylm = {}
    cols, degrees = [], []
    for L in range(lmax + 1):
        for ell in range(L + 1):
            rad = _radial(L, ell, chi)
            for m in range(-ell, ell + 1):
                if (ell, m) not in ylm:
                    ylm[ell, m] = real_sph_harm(ell, m, theta, phi)
                cols.append(rad * ylm[ell, m])
                degrees.append(L)
    return np.stack(cols, axis=1), np.array(degrees)
