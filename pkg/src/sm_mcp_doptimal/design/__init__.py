"""Canonical moments, Toda evaluation and the D-optimal design solver."""

from .canonical import (
    CanonicalSequence,
    ZetaSequence,
    canonical_to_moments,
    canonical_to_zeta,
    hankel,
    hankel_product,
    measure_to_canonical,
    moment_bounds,
    moments_to_canonical,
    zeta_to_canonical,
)
from .measure import DesignMeasure, Domain, MomentSequence, moments
from .optimize import DesignResult, maximize_objective, reconstruct_design, solve
from .oracle import (
    ExchangeResult,
    GenHankelSpec,
    brute_force_design,
    gen_hankel,
    info_matrix_det,
)
from .toda import (
    ModelSpec,
    PriorMultiset,
    ZetaTable,
    evaluate_objective,
    reparam_shift,
    toda_step,
    zeta_chain,
)

__all__ = [
    "CanonicalSequence",
    "DesignMeasure",
    "DesignResult",
    "Domain",
    "ExchangeResult",
    "GenHankelSpec",
    "ModelSpec",
    "MomentSequence",
    "PriorMultiset",
    "ZetaSequence",
    "ZetaTable",
    "brute_force_design",
    "canonical_to_moments",
    "canonical_to_zeta",
    "evaluate_objective",
    "gen_hankel",
    "hankel",
    "hankel_product",
    "measure_to_canonical",
    "info_matrix_det",
    "maximize_objective",
    "moment_bounds",
    "moments",
    "moments_to_canonical",
    "reconstruct_design",
    "reparam_shift",
    "solve",
    "toda_step",
    "zeta_chain",
    "zeta_to_canonical",
]
