"""Numerical toolkit for centering infinitely divisible measures.

Exact Lévy-triplet algebra with finite jump atoms, symmetry-group
centering, quasi-decomposability (operator-semistable / operator-stable)
witnesses and strictness centering, seed representations of the jump
measure, and characteristic-function verification throughout.
"""

from .idmeasure import (
    IdMeasure,
    LevyAtoms,
    TripletDiff,
    charfn,
    conv_power,
    convolve,
    dirac,
    gaussian,
    lk_exponent,
    pushforward,
    shift_correction_sum,
    shifted,
    ssupp,
    triplet_close,
    triplet_diff,
)
from .grids import frequency_grid
from .levyrep import (
    Integrand,
    MixingLevy,
    OrbitLevy,
    SupportReport,
    compensator_gap,
    drift_derivative,
    levy_mass,
    materialize,
    mixing_integrate,
    orbit_integrate,
    radial_compensator_mass,
    seed_pairing,
    shift_correction,
    validate_spectral_support,
)
from .linalg import (
    Subspace,
    mat_exp,
    null_space,
    orthogonal_project,
    orthogonalize_group,
    range_decompose,
)
from .quasidecomp import (
    CenteringResult,
    QdWitness,
    ShiftFlow,
    center_qd,
    center_stable,
    centering_propagates,
    check_qd,
    criterion,
    criterion_ordinary,
    discrete_iterate,
    lift_centering,
    make_shift_flow,
    qd_shift_formula,
    seed_first_moment,
    shift_flow,
    shift_rate,
    witness_reciprocal,
)
from .symmetry import (
    SymmetryGroup,
    centering_deviation,
    fixed_space,
    symmetry_group,
    universal_center,
    verify_symmetry,
)

__version__ = "0.1.0"

__all__ = [
    "IdMeasure",
    "LevyAtoms",
    "TripletDiff",
    "charfn",
    "conv_power",
    "convolve",
    "dirac",
    "gaussian",
    "lk_exponent",
    "pushforward",
    "shift_correction_sum",
    "shifted",
    "ssupp",
    "triplet_close",
    "triplet_diff",
    "frequency_grid",
    "Integrand",
    "MixingLevy",
    "OrbitLevy",
    "SupportReport",
    "compensator_gap",
    "drift_derivative",
    "levy_mass",
    "materialize",
    "mixing_integrate",
    "orbit_integrate",
    "radial_compensator_mass",
    "seed_pairing",
    "shift_correction",
    "validate_spectral_support",
    "Subspace",
    "mat_exp",
    "null_space",
    "orthogonal_project",
    "orthogonalize_group",
    "range_decompose",
    "CenteringResult",
    "QdWitness",
    "ShiftFlow",
    "center_qd",
    "center_stable",
    "centering_propagates",
    "check_qd",
    "criterion",
    "criterion_ordinary",
    "discrete_iterate",
    "lift_centering",
    "make_shift_flow",
    "qd_shift_formula",
    "seed_first_moment",
    "shift_flow",
    "shift_rate",
    "witness_reciprocal",
    "SymmetryGroup",
    "centering_deviation",
    "fixed_space",
    "symmetry_group",
    "universal_center",
    "verify_symmetry",
]
