"""Exact local factors, singular series, and prime-tuple counts for systems
of affine-linear forms.

The heavy lifting happens in the _lpp extension; rationals cross the boundary
as fractions.Fraction, big integers as plain int.
"""

from ._lpp import (  # noqa: F401
    AffineSystem,
    ArgumentError,
    ConvexBody,
    PrimeTable,
    RangeError,
    ResourceError,
    alpha_density,
    beta_infinity,
    beta_p,
    beta_p_bruteforce,
    beta_p_example1,
    beta_p_example2,
    c_psi_truncated,
    compare,
    congruence_solution_count,
    crt_local_product_check,
    domination_check,
    empirical_sum,
    exceptional_primes,
    finite_complexity,
    hermite_normal_form,
    is_admissible,
    kernel_lattice,
    lambda_chi_r,
    lambda_q,
    lattice_point_count,
    lattice_points,
    linear_forms_average,
    minors_product,
    mirsky_density,
    rank_mod_p,
    singular_series,
    sqfree_compare,
    subsystem,
    translate,
    volume,
    weight_f,
    wtrick_identity_check,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
