"""Rudin-Shapiro polynomials: construction, unit-circle evaluation, certified
level-crossing counts, identity checks and value-distribution statistics."""

from .core import (
    CapacityError,
    RSPair,
    SignSequence,
    build_rs_pair,
    grs_coefficient,
    grs_coefficients,
    reciprocal_sign,
)
from .crossings import (
    CrossingReport,
    DomainError,
    count_level_crossings,
    theorem_2_2_bound,
    verify_sign_change_argument,
    verify_theorem_2_1,
    verify_theorem_2_2,
)
from .distribution import (
    mahler_measure,
    mahler_via_roots,
    moment,
    planar_distribution,
    value_distribution,
)
from .evaluation import (
    Autocorrelation,
    CircleGrid,
    autocorrelation,
    eval_point,
    eval_unit_circle,
    modulus_squared,
    rs_eval,
)
from .identities import check_antisymmetry, check_eq_1_1, check_eq_1_2, check_lemma_3_1

__version__ = "0.1.0"
