"""Special functions, orthogonal polynomials, harmonics and quadrature."""
from .bessel import bessel_i, bessel_ik_scaled, bessel_j, bessel_k, bessel_y
from .hypergeom import cancellation_dps, hyp1f2, hyp1f2_mp
from .hyperspherical import (OMEGA4, index_to_lm, real_sph_harm, sphere3_harmonic,
                             sphere3_harmonic_matrix)
from .polynomials import (chebyshev_u, chebyshev_u_table, gegenbauer_c, jacobi_p,
                          legendre_p, legendre_series, legendre_table)
from .quadrature import (QuadratureRule, RuleKind, bessel_product_integral,
                         gauss_chebyshev2, gauss_legendre, integrate,
                         integrate_interval, integrate_semi_infinite, semi_infinite)
from .wigner import (EulerAngles, SpinHarmonicIndex, cartesian_to_spherical, mode_list,
                     relative_euler, rotation_matrix, spin_harmonic, spin_harmonic_matrix,
                     spin_sph_harm, wigner_D, wigner_d, wigner_d_entries)

__all__ = [
    "bessel_i",
    "bessel_ik_scaled",
    "bessel_j",
    "bessel_k",
    "bessel_y",
    "cancellation_dps",
    "hyp1f2",
    "hyp1f2_mp",
    "OMEGA4",
    "index_to_lm",
    "real_sph_harm",
    "sphere3_harmonic",
    "sphere3_harmonic_matrix",
    "chebyshev_u",
    "chebyshev_u_table",
    "gegenbauer_c",
    "jacobi_p",
    "legendre_p",
    "legendre_series",
    "legendre_table",
    "QuadratureRule",
    "RuleKind",
    "bessel_product_integral",
    "gauss_chebyshev2",
    "gauss_legendre",
    "integrate",
    "integrate_interval",
    "integrate_semi_infinite",
    "semi_infinite",
    "EulerAngles",
    "SpinHarmonicIndex",
    "cartesian_to_spherical",
    "mode_list",
    "relative_euler",
    "rotation_matrix",
    "spin_harmonic",
    "spin_harmonic_matrix",
    "spin_sph_harm",
    "wigner_D",
    "wigner_d",
    "wigner_d_entries",
]
