"""Local densities and masses of quadratic lattices over 2-adic rings."""

from __future__ import annotations

# base ring and residue field
from .base_ring import (
    DivisionByZero,
    KappaElem,
    NegativeValuation,
    NotAUnit,
    PrecisionExhausted,
    RingDescriptor,
    RingElem,
    additive_form_kernel,
    kappa_linear_solve,
    kappa_sqrt,
    lift,
    residue,
    ring_arith,
    unit_sqrt_mod2,
    unramified,
    valuation,
)

# lattices, Jordan splittings, unimodular normal forms
from .lattice_forms import (
    JordanConstituent,
    JordanSymbol,
    QuadLattice,
    UnimodularProfile,
    discriminant,
    jordan_split,
    norm_ideal,
    parity_type,
    scale_ideal,
    unimodular_normal_form,
    unit_square_class_is_trivial,
)

# residue chain and constituent types
from .invariant_chain import (
    ChainLattices,
    ChainReport,
    ConstituentType,
    KappaSubspace,
    OddDimension,
    ResidueSpace,
    ScaleChain,
    alpha,
    arf_class,
    beta,
    chain_compute,
    chain_report,
    classify,
    expected_residue_dimension,
)

# exponents, finite group orders, local density
from .density_engine import (
    DensityReport,
    ExponentReport,
    GroupOrderReport,
    NegativeUnipotentDim,
    density_report,
    exponents,
    finite_orthogonal_order,
    group_order_report,
    local_density,
    reductive_quotient,
    special_fiber_order,
)

# odd primes, archimedean constants, global mass
from .mass_engine import (
    MassReport,
    MissingFieldData,
    NumberFieldData,
    OddJordanBlock,
    archimedean_constant,
    bernoulli_number,
    fundamental_discriminant,
    generalized_bernoulli,
    kronecker_symbol,
    mass_report,
    mass_via_local,
    odd_jordan_split,
    odd_prime_density,
    special_values,
    sum_squares_mass_analytic,
    sum_squares_mass_rational,
)

# brute-force congruence counting
from .oracle import (
    BudgetExceeded,
    NotStabilized,
    StabilizationReport,
    brute_isometry,
    count_solutions,
    density_estimate,
    naive_count,
)

__all__ = [name for name in dir() if not name.startswith("_")]
