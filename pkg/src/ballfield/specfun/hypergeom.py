"""Generalized hypergeometric 1F2 by direct power series."""
import math

import mpmath

from ..errors import ConvergenceError, DegenerateParameterError

MAX_TERMS = 10_000
POLE_EPS = 1e-10


def _near_pole(b):
    b = float(b)
    return b <= POLE_EPS and abs(b - round(b)) < POLE_EPS


def _series(a1, b1, b2, z, one, stop):
    term = one
    total = one
    small = 0
    for k in range(MAX_TERMS):
        ratio = (a1 + k) * z / ((b1 + k) * (b2 + k) * (k + 1))
        term = term * ratio
        total = total + term
        if term == 0:
            return total
        if abs(ratio) < 1 and abs(term) < stop * abs(total):
            small += 1
            if small == 3:
                return total
        else:
            small = 0
    raise ConvergenceError("1F2 series did not converge", estimate=total)


def hyp1f2(a1, b1, b2, z, dps=None):
    """1F2(a1; b1, b2; z) summed until three consecutive terms are negligible.

    With ``dps`` the same series runs in mpmath arithmetic at that many
    decimal digits; the result is still returned as a float.
    """
    if _near_pole(b1) or _near_pole(b2):
        raise DegenerateParameterError(
            f"lower parameter at a non-positive integer (b1={b1}, b2={b2})")
    if dps is None:
        return float(_series(float(a1), float(b1), float(b2), float(z), 1.0, 1e-17))
    with mpmath.workdps(dps):
        mpf = mpmath.mpf
        s = _series(mpf(a1), mpf(b1), mpf(b2), mpf(z), mpf(1), mpf(10) ** (-dps - 2))
        return float(s)


def hyp1f2_mp(a1, b1, b2, z):
    """Series in the current mpmath context; returns an mpf (internal use)."""
    if _near_pole(b1) or _near_pole(b2):
        raise DegenerateParameterError("lower parameter at a non-positive integer")
    mpf = mpmath.mpf
    return _series(mpf(a1), mpf(b1), mpf(b2), mpf(z), mpf(1),
                   mpf(10) ** (-mpmath.mp.dps - 2))


def cancellation_dps(terms, base=20):
    """Decimal digits needed to add ``terms`` without losing 15 digits."""
    terms = [float(t) for t in terms]
    if not all(math.isfinite(t) for t in terms):
        return 60
    total = abs(sum(terms))
    scale = sum(abs(t) for t in terms)
    if scale == 0:
        return base
    if total == 0:
        return 60
    return base + max(0, math.ceil(math.log10(scale / total)))
