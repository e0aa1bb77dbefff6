"""Exact moment closures for extended hierarchies of balance laws.

The package builds, for a hierarchy of arbitrary fixed order N, the
coefficient lattice of the macroscopic closure, evaluates the generating
potential and the closing moments around thermodynamical equilibrium, and
machine-verifies the structural conditions: the scalar recurrences, closing
symmetry, frame (boost) invariance, equivalence with the kernel-integral
route, and the subsystem embedding.
"""

from .boosts import boost_moments, boost_multipliers
from .closure import (
    StateDecomposition,
    decompose_state,
    entropy_density,
    equilibrium_multiplier,
    eval_hprime,
    eval_moments,
    g_eval,
    hessian_h0,
    hprime_terms,
    random_deviation,
    residual_condition13,
    supplementary_term,
    symmetry_residual,
)
from .errors import DomainError, LatticeBuildError, NewtonError, QuadratureError
from .galilean import invert_moment_map, nonconvective_closure, verify_diagram
from .jets import Jet
from .kinetic import (
    ExponentialKernel,
    GLadder,
    QuadratureParams,
    TableKernel,
    eval_hprime_kinetic,
    eval_moments_kinetic,
    exponential_Cs,
    g_value_quadrature,
    kinetic_lattice,
    ladder_from_kernel,
)
from .lattice import (
    CoefficientLattice,
    SeedSpec,
    build_lattice,
    check_recurrences,
    exponential_seed,
)
from .subsystem import (
    compare_subsystem,
    lift_multipliers,
    multipliers_3d_to_4d,
    multipliers_4d_to_3d,
)
from .symtensor import (
    SymTensor,
    contract,
    h_tensor,
    iso_basis,
    multiset_multiplicity,
    outer_sym,
    t_vector,
)

__version__ = "0.1.0"
