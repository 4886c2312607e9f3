"""Bessel functions of real order on the non-negative half line.

Thin, checked wrappers over :mod:`scipy.special`; overflow is reported
instead of silently returning ``inf``.
"""
import numpy as np
from scipy import special

from ..errors import DomainError


def _nonneg(x, strict=False):
    x = np.asarray(x, dtype=float)
    bad = (x <= 0) if strict else (x < 0)
    if np.any(bad):
        raise DomainError("argument must be %s" % ("positive" if strict else "non-negative"))
    return x


def _finite(value, what):
    value = np.asarray(value)
    if np.any(np.isinf(value)):
        raise OverflowError(f"{what} overflowed")
    return value[()]


def bessel_j(nu, x):
    """J_nu(x) for nu >= 0, x >= 0."""
    if nu < 0:
        raise DomainError("order must be non-negative")
    return _finite(special.jv(nu, _nonneg(x)), "J")


def bessel_y(nu, x):
    return _finite(special.yv(nu, _nonneg(x, strict=True)), "Y")


def bessel_i(nu, x):
    """Modified Bessel function of the first kind I_nu(x)."""
    return _finite(special.iv(nu, _nonneg(x)), "I")


def bessel_k(nu, x):
    """Modified Bessel function of the second kind K_nu(x), x > 0."""
    return _finite(special.kv(nu, _nonneg(x, strict=True)), "K")


def bessel_ik_scaled(nu, x):
    """(I_nu(x) e^-x, K_nu(x) e^x): products I*K need no exponentials."""
    x = _nonneg(x, strict=True)
    return special.ive(nu, x), special.kve(nu, x)
