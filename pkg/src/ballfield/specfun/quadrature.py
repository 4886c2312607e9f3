"""Quadrature rules and the Bessel-product integrals built on them."""
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy import special

from ..errors import ConvergenceError


class RuleKind(str, Enum):
    GAUSS_LEGENDRE = "gauss_legendre"
    GAUSS_CHEBYSHEV2 = "gauss_chebyshev2"
    SEMI_INFINITE = "semi_infinite"


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    kind: RuleKind

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-d of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "kind", RuleKind(self.kind))


@lru_cache(maxsize=64)
def _leggauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n, a=-1.0, b=1.0):
    x, w = _leggauss(n)
    half = 0.5 * (b - a)
    return QuadratureRule(a + half * (x + 1), half * w, RuleKind.GAUSS_LEGENDRE)


def gauss_chebyshev2(n):
    """n-point rule for int_{-1}^{1} h(t) sqrt(1 - t^2) dt (weight folded into weights)."""
    k = np.arange(n, 0, -1)
    ang = k * np.pi / (n + 1)
    return QuadratureRule(np.cos(ang), np.pi / (n + 1) * np.sin(ang) ** 2,
                          RuleKind.GAUSS_CHEBYSHEV2)


def semi_infinite(n, scale=1.0, panels=1):
    """Gauss-Legendre panels on u in [0, 1) mapped by lambda = scale * u / (1 - u).

    The Jacobian is folded into the weights, so integrate() sums f(lambda) directly.
    """
    x, w = _leggauss(n)
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    u = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wu = (half[:, None] * w[None, :]).ravel()
    lam = scale * u / (1 - u)
    jac = scale / (1 - u) ** 2
    return QuadratureRule(lam, wu * jac, RuleKind.SEMI_INFINITE)


def integrate(f, rule):
    values = np.asarray(f(rule.nodes), dtype=float)
    if np.any(np.isnan(values)):
        raise FloatingPointError("integrand produced NaN at a quadrature node")
    return float(np.dot(rule.weights, values))


def integrate_semi_infinite(f, scale=1.0, shift=0.0, rtol=1e-9, order=16,
                            min_level=2, max_level=14):
    """int_shift^inf f(lambda) d lambda by panel doubling in the mapped variable.

    Stops once two successive refinements agree to ``rtol`` (relative).
    """
    prev = None
    for level in range(min_level, max_level + 1):
        rule = semi_infinite(order, scale, panels=2 ** level)
        value = integrate(lambda lam: f(lam + shift), rule)
        if prev is not None and abs(value - prev) <= rtol * abs(value):
            return value
        if prev is not None and value == 0.0 and prev == 0.0:
            return 0.0
        prev = value
    raise ConvergenceError("semi-infinite quadrature did not converge", estimate=value)


def integrate_interval(f, a, b, rtol=1e-12, order=16, max_level=12):
    """Composite Gauss-Legendre on [a, b] with panel doubling."""
    x, w = _leggauss(order)
    prev = None
    for level in range(0, max_level + 1):
        edges = np.linspace(a, b, 2 ** level + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        value = float(np.dot((half[:, None] * w[None, :]).ravel(), f(pts)))
        if prev is not None and abs(value - prev) <= rtol * max(abs(value), 1e-300):
            return value
        prev = value
    raise ConvergenceError("interval quadrature did not converge", estimate=value)


def _averaged(partials, levels):
    # repeated means of neighbouring partial sums; exact for a remainder that
    # alternates with a polynomial amplitude of degree < levels
    s = np.asarray(partials[-(levels + 1):], dtype=float)
    for _ in range(levels):
        s = 0.5 * (s[1:] + s[:-1])
    return float(s[0])


def _alternating_panels(h, start, width, tol_abs, order=16, chunk=256, max_panels=400_000,
                        levels=12, accelerate=True):
    """Sum int over consecutive panels of ``width`` (a quarter period) to infinity.

    Pairs of panels make half-period sums that alternate in sign with a
    smooth amplitude, so their partial sums are accelerated by repeated
    averaging.  The accelerated value is accepted once it is stable when
    the last few half periods are dropped; otherwise summation continues
    until two successive panels fall below tol_abs.
    """
    x, w = _leggauss(order)
    half = 0.5 * width
    total = 0.0
    done = 0
    history = []
    while done < max_panels:
        left = start + width * np.arange(done, done + chunk)
        pts = (left[:, None] + half * (x[None, :] + 1)).ravel()
        vals = h(pts).reshape(chunk, order)
        panels = half * vals @ w
        below = np.nonzero(np.abs(panels) < tol_abs)[0]
        # need two successive small panels so one lucky zero crossing does not stop us
        hits = below[np.nonzero(np.diff(below) == 1)[0]] if below.size > 1 else []
        if len(hits):
            stop = hits[0] + 2
            partial = np.cumsum(panels[:stop])
            # average the last two partial sums to cancel the half-period remainder
            return total + 0.5 * (partial[-1] + partial[-2])
        pair_sums = panels.reshape(-1, 2).sum(axis=1)
        history.extend(total + np.cumsum(pair_sums))
        total += panels.sum()
        done += chunk
        if accelerate and len(history) > levels + 8:
            a = _averaged(history, levels)
            b = _averaged(history[:-4], levels)
            c = _averaged(history[:-8], levels)
            if max(abs(a - b), abs(a - c)) < tol_abs:
                return a
    raise ConvergenceError("oscillatory tail did not decay", estimate=total)


def bessel_product_integral(mu, r1, r2, g, rtol=1e-11):
    """int_0^inf J_mu(lambda r1) J_mu(lambda r2) g(lambda) d lambda.

    ``g`` must be smooth and decay algebraically.  Past the turning point
    J J = (JJ + YY)/2 + (JJ - YY)/2; the first part oscillates with
    frequency |r1 - r2| (not at all on the diagonal), the second with
    r1 + r2, and both are summed panel by panel.
    """
    rmin, rmax = min(r1, r2), max(r1, r2)
    lam0 = (mu + 3.0) / rmin

    def head(lam):
        return special.jv(mu, lam * r1) * special.jv(mu, lam * r2) * g(lam)

    def plus(lam):
        return 0.5 * (special.jv(mu, lam * r1) * special.jv(mu, lam * r2)
                      + special.yv(mu, lam * r1) * special.yv(mu, lam * r2)) * g(lam)

    def minus(lam):
        return 0.5 * (special.jv(mu, lam * r1) * special.jv(mu, lam * r2)
                      - special.yv(mu, lam * r1) * special.yv(mu, lam * r2)) * g(lam)

    part_a = integrate_interval(head, 0.0, lam0, rtol=rtol)
    diff = rmax - rmin
    if diff * lam0 < 0.5:
        part_b = integrate_semi_infinite(plus, scale=lam0, shift=lam0, rtol=rtol)
    else:
        part_b = None
    scale = abs(part_a) + abs(part_b or 0.0)
    if scale == 0:
        scale = abs(integrate_interval(lambda t: np.abs(head(t)), 0.0, lam0, rtol=1e-6))
    tol_abs = 0.05 * rtol * scale
    if part_b is None:
        part_b = _alternating_panels(plus, lam0, 0.5 * np.pi / diff, tol_abs)
    part_c = _alternating_panels(minus, lam0, 0.5 * np.pi / (r1 + r2), tol_abs)
    return part_a + part_b + part_c
