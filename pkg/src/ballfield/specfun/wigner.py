"""Wigner rotation matrices, Euler angles and spin-weighted harmonics.

Conventions: a rotation with Euler angles (alpha, beta, gamma) is the
matrix ``Rz(alpha) @ Ry(beta) @ Rz(gamma)`` and

    D^l_{m'm}(alpha, beta, gamma) = exp(-i m' alpha) d^l_{m'm}(beta) exp(-i m gamma)

so that ``D(g1 @ g2) = D(g1) @ D(g2)``.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from ..errors import DomainError

TWO_PI = 2.0 * np.pi
_GIMBAL_EPS = 1e-12


def _jacobi_at_degree(k, a, b, x):
    """P_k^(a,b)(x) elementwise, with per-element degree and parameters."""
    k, a, b, x = np.broadcast_arrays(k, a, b, x)
    a = a.astype(float)
    b = b.astype(float)
    out = np.ones(x.shape)
    p_prev = np.ones(x.shape)
    p = (a + 1) + (a + b + 2) * (x - 1) / 2
    out = np.where(k == 1, p, out)
    ab = a + b
    for j in range(2, int(k.max(initial=0)) + 1):
        c = 2 * j + ab
        a1 = 2 * j * (j + ab) * (c - 2)
        a2 = (c - 1) * (c * (c - 2) * x + a * a - b * b)
        a3 = 2 * (j + a - 1) * (j + b - 1) * c
        p_prev, p = p, (a2 * p - a3 * p_prev) / a1
        out = np.where(k == j, p, out)
    return out


def wigner_d_entries(ell, m_row, m_col, beta):
    """Elements d^ell_{m_row, m_col}(beta), broadcasting over all arguments.

    Half-angle factors times a Jacobi polynomial evaluated by its
    degree recurrence; no factorial sums are formed.
    """
    mp_, m, beta = np.broadcast_arrays(np.asarray(m_row), np.asarray(m_col),
                                       np.asarray(beta, dtype=float))
    if np.any(np.abs(mp_) > ell) or np.any(np.abs(m) > ell):
        raise DomainError("|m| must not exceed ell")
    j = ell
    cands = np.stack([j + m, j - m, j + mp_, j - mp_])
    k = cands.min(axis=0)
    which = cands.argmin(axis=0)
    a = np.where((which == 0) | (which == 3), mp_ - m, m - mp_)
    lam = np.where((which == 0) | (which == 3), mp_ - m, 0)
    b = 2 * j - 2 * k - a
    log_norm = 0.5 * (gammaln(2 * j - k + 1) + gammaln(k + 1)
                      - gammaln(k + a + 1) - gammaln(k + b + 1))
    half_s = np.sin(beta / 2)
    half_c = np.cos(beta / 2)
    sign = np.where(lam % 2 == 0, 1.0, -1.0)
    jac = _jacobi_at_degree(k, a, b, np.cos(beta))
    return sign * np.exp(log_norm) * half_s ** a * half_c ** b * jac


def wigner_d(ell, beta):
    """Real little-d matrix, rows/columns indexed by m = -ell..ell."""
    if ell < 0 or int(ell) != ell:
        raise DomainError("ell must be a non-negative integer")
    if not 0 <= beta <= np.pi + 1e-12:
        raise DomainError("beta must lie in [0, pi]")
    ms = np.arange(-ell, ell + 1)
    return wigner_d_entries(int(ell), ms[:, None], ms[None, :], beta)


def wigner_D(ell, alpha, beta, gamma):
    ms = np.arange(-ell, ell + 1)
    d = wigner_d(ell, beta)
    return np.exp(-1j * ms[:, None] * alpha) * d * np.exp(-1j * ms[None, :] * gamma)


@dataclass(frozen=True)
class EulerAngles:
    """zyz Euler angles, normalized to alpha, gamma in [0, 2pi), beta in [0, pi]."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not -1e-12 <= self.beta <= np.pi + 1e-12:
            raise DomainError("beta must lie in [0, pi]")
        object.__setattr__(self, "alpha", float(self.alpha) % TWO_PI)
        object.__setattr__(self, "beta", float(min(max(self.beta, 0.0), np.pi)))
        object.__setattr__(self, "gamma", float(self.gamma) % TWO_PI)

    def matrix(self):
        return rotation_matrix(self.alpha, self.beta, self.gamma)

    @classmethod
    def from_matrix(cls, rot):
        rot = np.asarray(rot, dtype=float)
        cb = rot[2, 2]
        sb = np.hypot(rot[0, 2], rot[1, 2])
        # atan2 keeps beta accurate near 0 and pi where arccos(cos beta) is not
        beta = np.arctan2(sb, cb)
        if sb < _GIMBAL_EPS:
            # gimbal lock: only alpha +/- gamma is determined, fix gamma = 0
            if cb > 0:
                return cls(np.arctan2(rot[1, 0], rot[0, 0]), 0.0, 0.0)
            return cls(np.arctan2(-rot[1, 0], rot[1, 1]), np.pi, 0.0)
        alpha = np.arctan2(rot[1, 2], rot[0, 2])
        gamma = np.arctan2(rot[2, 1], -rot[2, 0])
        return cls(alpha, beta, gamma)


def rot_z(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_y(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rotation_matrix(alpha, beta, gamma):
    return rot_z(alpha) @ rot_y(beta) @ rot_z(gamma)


def relative_euler(theta1, phi1, theta2, phi2):
    """Euler angles of g1^-1 g2, where g_i has Euler angles (phi_i, theta_i, 0)."""
    g1 = rotation_matrix(phi1, theta1, 0.0)
    g2 = rotation_matrix(phi2, theta2, 0.0)
    return EulerAngles.from_matrix(g1.T @ g2)


@dataclass(frozen=True)
class SpinHarmonicIndex:
    s: int
    ell: int
    m: int

    def __post_init__(self):
        if self.s < 0:
            raise DomainError("spin weight must be non-negative")
        if self.ell < self.s or abs(self.m) > self.ell:
            raise DomainError(f"invalid spin harmonic index {self}")


def spin_sph_harm(s, ell, m, theta, phi):
    """sY_lm(theta, phi) = sqrt((2l+1)/4pi) exp(i m phi) d^l_{m,-s}(theta).

    Accepts any integer spin with |s| <= ell (negative weights appear in
    the addition theorem); vectorized over ``m``, ``theta`` and ``phi``.
    """
    if abs(s) > ell:
        raise DomainError(f"|s|={abs(s)} exceeds ell={ell}")
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < -1e-12) or np.any(theta > np.pi + 1e-12):
        raise DomainError("theta must lie in [0, pi]")
    d = wigner_d_entries(ell, m, -s, np.clip(theta, 0.0, np.pi))
    return (np.sqrt((2 * ell + 1) / (4 * np.pi)) * np.exp(1j * np.asarray(m) * phi) * d)[()]


def spin_harmonic(idx, theta, phi):
    return spin_sph_harm(idx.s, idx.ell, idx.m, theta, phi)


def mode_list(s, lmax):
    """(ell, m) pairs with ell = |s|..lmax, m = -ell..ell, in storage order."""
    return [(ell, m) for ell in range(abs(s), lmax + 1) for m in range(-ell, ell + 1)]


def spin_harmonic_matrix(s, lmax, theta, phi):
    """Matrix ``Y[p, k] = sY_{l_k m_k}(theta_p, phi_p)`` over :func:`mode_list`."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    blocks = []
    for ell in range(abs(s), lmax + 1):
        ms = np.arange(-ell, ell + 1)
        blocks.append(spin_sph_harm(s, ell, ms[None, :], theta[:, None], phi[:, None]))
    if not blocks:
        return np.zeros((theta.size, 0), dtype=complex)
    return np.concatenate(blocks, axis=1)


def cartesian_to_spherical(points):
    """(r, theta, phi) of Cartesian points with shape (..., 3)."""
    pts = np.asarray(points, dtype=float)
    r = np.linalg.norm(pts, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        theta = np.arccos(np.clip(np.where(r > 0, pts[..., 2] / r, 1.0), -1.0, 1.0))
    phi = np.mod(np.arctan2(pts[..., 1], pts[..., 0]), TWO_PI)
    return r, theta, phi
