"""Classical orthogonal polynomials evaluated by three-term recurrences."""
import numpy as np

from ..errors import DomainError

_SLACK = 1e-12


def _check_interval(x, name="x"):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + _SLACK):
        raise DomainError(f"{name} must lie in [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def _check_degree(n):
    if int(n) != n or n < 0:
        raise DomainError(f"degree must be a non-negative integer, got {n}")
    return int(n)


def legendre_p(ell, x):
    """Legendre polynomial P_ell(x) on [-1, 1]."""
    ell = _check_degree(ell)
    x = _check_interval(x)
    p_prev = np.ones_like(x)
    if ell == 0:
        return p_prev[()]
    p = x.copy()
    for k in range(1, ell):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    return p[()]


def legendre_table(lmax, x):
    """Rows P_0(x) ... P_lmax(x); shape ``(lmax + 1,) + x.shape``."""
    x = _check_interval(x)
    out = np.empty((lmax + 1,) + x.shape)
    out[0] = 1.0
    if lmax >= 1:
        out[1] = x
    for k in range(1, lmax):
        out[k + 1] = ((2 * k + 1) * x * out[k] - k * out[k - 1]) / (k + 1)
    return out


def legendre_series(coeffs, x):
    """Sum_k coeffs[k] P_k(x) by Clenshaw's recurrence."""
    coeffs = np.asarray(coeffs, dtype=float)
    x = _check_interval(x)
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    for k in range(len(coeffs) - 1, 0, -1):
        alpha = (2 * k + 1) / (k + 1) * x
        beta = -(k + 1) / (k + 2)
        b1, b2 = coeffs[k] + alpha * b1 + beta * b2, b1
    # P_1 = x, and the k=0 step uses beta(1) = -1/2
    return (coeffs[0] + x * b1 - 0.5 * b2)[()] if len(coeffs) else np.zeros_like(x)[()]


def jacobi_p(k, alpha, beta, x):
    """Jacobi polynomial P_k^(alpha, beta)(x)."""
    k = _check_degree(k)
    if alpha <= -1 or beta <= -1:
        raise DomainError("Jacobi parameters must exceed -1")
    x = _check_interval(x)
    p_prev = np.ones_like(x)
    if k == 0:
        return p_prev[()]
    p = (alpha + 1) + (alpha + beta + 2) * (x - 1) / 2
    ab = alpha + beta
    for j in range(2, k + 1):
        c = 2 * j + ab
        a1 = 2 * j * (j + ab) * (c - 2)
        a2 = (c - 1) * (c * (c - 2) * x + alpha * alpha - beta * beta)
        a3 = 2 * (j + alpha - 1) * (j + beta - 1) * c
        p_prev, p = p, (a2 * p - a3 * p_prev) / a1
    return p[()]


def chebyshev_u(ell, t):
    """Chebyshev polynomial of the second kind U_ell(t)."""
    ell = _check_degree(ell)
    t = _check_interval(t, "t")
    u_prev = np.ones_like(t)
    if ell == 0:
        return u_prev[()]
    u = 2 * t
    for _ in range(1, ell):
        u_prev, u = u, 2 * t * u - u_prev
    return u[()]


def chebyshev_u_table(lmax, t):
    t = _check_interval(t, "t")
    out = np.empty((lmax + 1,) + t.shape)
    out[0] = 1.0
    if lmax >= 1:
        out[1] = 2 * t
    for k in range(1, lmax):
        out[k + 1] = 2 * t * out[k] - out[k - 1]
    return out


def gegenbauer_c(n, lam, x):
    """Gegenbauer polynomial C_n^(lam)(x), lam > 0."""
    n = _check_degree(n)
    x = _check_interval(x)
    c_prev = np.ones_like(x)
    if n == 0:
        return c_prev[()]
    c = 2 * lam * x
    for j in range(2, n + 1):
        c_prev, c = c, (2 * x * (j + lam - 1) * c - (j + 2 * lam - 2) * c_prev) / j
    return c[()]
