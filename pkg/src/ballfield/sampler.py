"""Gaussian realizations from truncated spectral expansions, and estimators.

Three models are supported: an isotropic field on a sphere (angular power
spectrum), a spin-weighted field in the ball (Zernike x spin harmonics) and
a rho-stationary field (3-sphere harmonics pulled back through psi).
"""
import csv
import math
import struct
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .rho_field import BallSphereMap, ChebyshevSpectrum
from .rng import normal_block
from .specfun import sphere3_harmonic_matrix, spin_harmonic_matrix, spin_sph_harm
from .specfun.wigner import cartesian_to_spherical
from .spin_field import SpinSpectrumBall, ZernikeIndex, zernike_degrees, zernike_radial_scaled

BINARY_MAGIC = b"BFRL"
BINARY_VERSION = 1


@dataclass(frozen=True)
class SphereGrid:
    """Gauss-Legendre in cos(theta) times uniform phi on a sphere of radius r."""
    n_theta: int
    n_phi: int
    radius: float = 1.0

    def __post_init__(self):
        if self.n_theta < 1 or self.n_phi < 1:
            raise DomainError("grid needs at least one node per direction")
        if self.radius <= 0:
            raise DomainError("radius must be positive")

    @classmethod
    def for_degree(cls, lmax, radius=1.0):
        """Smallest grid integrating products of two degree-lmax harmonics exactly."""
        return cls(lmax + 1, 2 * lmax + 1, radius)

    def angles(self):
        x, w = np.polynomial.legendre.leggauss(self.n_theta)
        theta = np.arccos(x[::-1])
        w = w[::-1]
        phi = 2 * np.pi * np.arange(self.n_phi) / self.n_phi
        T, P = np.meshgrid(theta, phi, indexing="ij")
        W = np.outer(w, np.full(self.n_phi, 2 * np.pi / self.n_phi))
        return T.ravel(), P.ravel(), W.ravel()

    def points(self):
        t, p, _ = self.angles()
        st = np.sin(t)
        return self.radius * np.stack([st * np.cos(p), st * np.sin(p), np.cos(t)], axis=1)


@dataclass(frozen=True)
class SimulationConfig:
    seed: int
    lmax: int
    grid: np.ndarray
    n_realizations: int = 1
    nmax: Optional[int] = None
    sphere_grid: Optional[SphereGrid] = None

    def __post_init__(self):
        g = np.atleast_2d(np.asarray(self.grid, dtype=float))
        if g.size == 0 or g.shape[1] != 3:
            raise DomainError("grid must be a non-empty (N, 3) array of points")
        if self.n_realizations < 1:
            raise DomainError("need at least one realization")
        if self.lmax < 0:
            raise DomainError("lmax must be non-negative")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        g.setflags(write=False)
        object.__setattr__(self, "grid", g)

    @classmethod
    def on_sphere(cls, seed, lmax, sphere_grid: SphereGrid, n_realizations=1, nmax=None):
        return cls(seed, lmax, sphere_grid.points(), n_realizations, nmax, sphere_grid)


@dataclass(frozen=True)
class FieldRealization:
    """values[k, p]: realization k at point p (a trailing axis for vector fields)."""
    points: np.ndarray
    values: np.ndarray
    model_tag: str
    seed: int
    lmax: int
    nmax: Optional[int] = None
    spin: int = 0
    sphere_grid: Optional[SphereGrid] = None
    max_imag: float = 0.0

    def __post_init__(self):
        if self.values.shape[1] != self.points.shape[0]:
            raise ValueError("value count does not match the grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite simulated values")

    @property
    def n_realizations(self):
        return self.values.shape[0]

    def to_csv(self, fh):
        """Long format: realization, x, y, z, [component,] re, im."""
        w = csv.writer(fh, lineterminator="\n")
        vector = self.values.ndim == 3
        w.writerow(["realization", "x", "y", "z"] + (["component"] if vector else []) + ["re", "im"])
        vals = self.values if vector else self.values[..., None]
        for k in range(vals.shape[0]):
            for p, (x, y, z) in enumerate(self.points):
                for c in range(vals.shape[2]):
                    v = complex(vals[k, p, c])
                    row = [k, f"{x:.17g}", f"{y:.17g}", f"{z:.17g}"]
                    row += [c] if vector else []
                    w.writerow(row + [f"{v.real:.17g}", f"{v.imag:.17g}"])

    def to_bytes(self):
        """magic, u32 version, u64 n_points, u64 n_realizations, u32 components,
        then points (n_points x 3) and values (re, im interleaved), little-endian float64."""
        vals = self.values if self.values.ndim == 3 else self.values[..., None]
        header = BINARY_MAGIC + struct.pack("<IQQI", BINARY_VERSION, self.points.shape[0],
                                            vals.shape[0], vals.shape[2])
        body = np.asarray(self.points, dtype="<f8").tobytes()
        cplx = np.empty(vals.shape + (2,), dtype="<f8")
        cplx[..., 0] = vals.real
        cplx[..., 1] = vals.imag if np.iscomplexobj(vals) else 0.0
        return header + body + cplx.tobytes()

    @staticmethod
    def read_bytes(data):
        """(points, values) from :meth:`to_bytes` output; values are complex."""
        if data[:4] != BINARY_MAGIC:
            raise ValueError("not a realization file")
        version, npts, nreal, ncomp = struct.unpack_from("<IQQI", data, 4)
        if version != BINARY_VERSION:
            raise ValueError(f"unsupported version {version}")
        off = 4 + struct.calcsize("<IQQI")
        pts = np.frombuffer(data, dtype="<f8", count=3 * npts, offset=off).reshape(npts, 3)
        off += 24 * npts
        raw = np.frombuffer(data, dtype="<f8", count=2 * nreal * npts * ncomp, offset=off)
        raw = raw.reshape(nreal, npts, ncomp, 2)
        vals = raw[..., 0] + 1j * raw[..., 1]
        return pts, (vals[..., 0] if ncomp == 1 else vals)


def _harmonic_block(s, ell, theta, phi):
    """sY_lm at the points, columns m = -l..l."""
    m = np.arange(-ell, ell + 1)
    return spin_sph_harm(s, ell, m[None, :], theta[:, None], phi[:, None])


def _real_coefficients(x, ell):
    """Complex a_lm (m = -l..l) with E|a|^2 = 1 and a_{l,-m} = (-1)^m conj(a_lm).

    ``x`` holds 2l + 1 real normals per row: x[:, 0] for m = 0, then a
    (re, im) pair for each m = 1..l.
    """
    nreal = x.shape[0]
    a = np.empty((nreal, 2 * ell + 1), dtype=complex)
    a[:, ell] = x[:, 0]
    if ell:
        m = np.arange(1, ell + 1)
        pos = (x[:, 1::2] + 1j * x[:, 2::2]) / math.sqrt(2)
        a[:, ell + m] = pos
        a[:, ell - m] = ((-1.0) ** m) * np.conj(pos)
    return a


def _finish_real(t, tag):
    imag = float(np.max(np.abs(t.imag))) if t.size else 0.0
    scale = max(1.0, float(np.max(np.abs(t.real))) if t.size else 1.0)
    if imag > 1e-9 * scale:
        raise RuntimeError(f"{tag}: real field has imaginary part {imag:.2e}")
    return t.real.copy(), imag


def simulate_sphere_field(spec, cfg: SimulationConfig, r=None):
    """T = sum_{l <= lmax} sum_m a_lm Y_lm with E|a_lm|^2 = C_l(r)."""
    if spec.spin != 0:
        raise DomainError("sphere simulation needs a spin-0 spectrum")
    if r is None:
        diag = [k for k in spec.coeffs if k[0] == k[1]]
        if len(diag) != 1:
            raise DomainError("spectrum has several radii; pass r")
        r = diag[0][0]
    c = np.asarray(spec.get(r))
    lmax = min(cfg.lmax, spec.lmax)
    if np.any(c[:lmax + 1] < 0):
        raise DomainError("negative angular power")
    _, theta, phi = cartesian_to_spherical(cfg.grid)
    nreal = cfg.n_realizations
    t = np.zeros((nreal, cfg.grid.shape[0]), dtype=complex)
    for ell in range(lmax + 1):
        if c[ell] == 0:
            continue
        x = normal_block(cfg.seed, "sphere", ell, 0, (nreal, 2 * ell + 1))
        a = math.sqrt(c[ell]) * _real_coefficients(x, ell)
        y = _harmonic_block(0, ell, theta, phi)
        t += a @ y.T
    values, imag = _finish_real(t, "sphere field")
    return FieldRealization(cfg.grid, values, f"sphere:{spec.model_tag}@r={r}", cfg.seed, lmax,
                            spin=0, sphere_grid=cfg.sphere_grid, max_imag=imag)


def simulate_ball_spin_field(spec: SpinSpectrumBall, cfg: SimulationConfig):
    """sT(x) = sum_l sum_n sum_m X_lm^(n) sqrt(A_l^(n)) R~_nl(r) sY_lm(theta, phi).

    Spin weights s > 0 use real standard normal X and give complex values
    in the spherical-coordinate frame.  For s = 0 the X are arranged with
    the conjugation rule so the field is real.
    """
    s = spec.spin
    lmax = min(cfg.lmax, spec.lmax)
    nmax = spec.nmax if cfg.nmax is None else min(cfg.nmax, spec.nmax)
    if lmax < s:
        raise DomainError("truncation below the spin weight")
    radius, theta, phi = cartesian_to_spherical(cfg.grid)
    if np.any(radius > spec.r0 * (1 + 1e-12)):
        bad = cfg.grid[np.argmax(radius)]
        raise DomainError(f"grid point {bad.tolist()} lies outside the ball of radius {spec.r0}")
    nreal = cfg.n_realizations
    t = np.zeros((nreal, cfg.grid.shape[0]), dtype=complex)
    for ell in range(s, lmax + 1):
        y = _harmonic_block(s, ell, theta, phi)
        for n in zernike_degrees(ell, nmax):
            amp = spec.A.get((ell, n), 0.0)
            if amp == 0:
                continue
            f = math.sqrt(amp) * zernike_radial_scaled(ZernikeIndex(n, ell), radius, spec.r0)
            x = normal_block(cfg.seed, "spin_ball", ell, n, (nreal, 2 * ell + 1))
            coef = _real_coefficients(x, ell) if s == 0 else x
            t += (coef @ y.T) * f[None, :]
    if s == 0:
        values, imag = _finish_real(t, "spin-0 ball field")
    else:
        values, imag = t, float("nan")
    return FieldRealization(cfg.grid, values, f"spin_ball:s={s}", cfg.seed, lmax, nmax, spin=s,
                            max_imag=imag)


def _sqrt_psd(b):
    w, v = np.linalg.eigh(b)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.T


def simulate_rho_field(spec: ChebyshevSpectrum, bmap: BallSphereMap, cfg: SimulationConfig):
    """T(x) = sum_L sum_j a_Lj S_Lj(psi(x)) with a_Lj ~ N(0, b_L)."""
    lmax = min(cfg.lmax, spec.lmax)
    s_pts = bmap.psi(cfg.grid)
    harm, degree = sphere3_harmonic_matrix(lmax, s_pts)
    nreal, k = cfg.n_realizations, spec.k
    t = np.zeros((nreal, cfg.grid.shape[0], k))
    for L in range(lmax + 1):
        b = spec.coeffs[L]
        cols = harm[:, degree == L]
        x = normal_block(cfg.seed, "rho", L, 0, (nreal, (L + 1) ** 2, k))
        if spec.coeffs.ndim == 1:
            if b == 0:
                continue
            a = math.sqrt(b) * x
        else:
            a = x @ _sqrt_psd(b)
        t += np.einsum("rjc,pj->rpc", a, cols)
    values = t[..., 0] if spec.coeffs.ndim == 1 else t
    return FieldRealization(cfg.grid, values, f"rho:{spec.model_tag}", cfg.seed, lmax, spin=0)


@dataclass(frozen=True)
class SpectrumEstimate:
    ells: np.ndarray
    C: np.ndarray
    se: np.ndarray
    n_realizations: int


def estimate_angular_spectrum(real: FieldRealization, lmax):
    """C^_l = mean over realizations of sum_m |a^_lm|^2 / (2l + 1), with standard errors.

    The a^_lm come from exact quadrature on the realization's sphere grid,
    which must integrate degree (lmax + field lmax) polynomials exactly.
    """
    grid = real.sphere_grid
    if grid is None:
        raise DomainError("realization was not sampled on a sphere grid")
    top = max(lmax, real.lmax)
    need_t, need_p = top + 1, 2 * top + 1
    if grid.n_theta < need_t or grid.n_phi < need_p:
        raise DomainError(f"grid {grid.n_theta} x {grid.n_phi} too coarse: need at least "
                          f"{need_t} Gauss-Legendre nodes and {need_p} longitude nodes")
    theta, phi, w = grid.angles()
    y = spin_harmonic_matrix(0, lmax, theta, phi)
    alm = (real.values * w[None, :]) @ np.conj(y)
    per = np.empty((real.n_realizations, lmax + 1))
    for ell in range(lmax + 1):
        per[:, ell] = np.sum(np.abs(alm[:, ell * ell:(ell + 1) ** 2]) ** 2, axis=1) / (2 * ell + 1)
    nreal = real.n_realizations
    se = per.std(axis=0, ddof=1) / math.sqrt(nreal) if nreal > 1 else np.full(lmax + 1, np.inf)
    return SpectrumEstimate(np.arange(lmax + 1), per.mean(axis=0), se, nreal)
