"""Divided powers, loop-algebra generators and the exact relation checks."""

from __future__ import annotations

from .divided import (
    BOUNDARY_OF,
    GEN_LABELS,
    boundary_divided_power,
    composition_sum,
    divided_power,
    divided_power_oracle,
    gaussian_binomial,
)
from .generators import (
    DrinfeldData,
    LoopGenerators,
    base_generators,
    check_lambda,
    extend_generators,
    lambda_coefficients,
)
from .verify import (
    RELATIONS,
    check_adq_eigen,
    check_adq_identities,
    check_comm_full,
    check_comm_sector,
    check_divided_power_oracle,
    sample_positions,
    splitmix64,
    verify_adq,
    verify_highest_weight,
    verify_induction_and_finiteness,
    verify_partial_serre,
    verify_serre,
    verify_tau2_commutation,
)
from .workspace import Workspace

__all__ = [
    "BOUNDARY_OF",
    "GEN_LABELS",
    "RELATIONS",
    "DrinfeldData",
    "LoopGenerators",
    "Workspace",
    "base_generators",
    "boundary_divided_power",
    "check_adq_eigen",
    "check_adq_identities",
    "check_comm_full",
    "check_comm_sector",
    "check_divided_power_oracle",
    "check_lambda",
    "composition_sum",
    "divided_power",
    "divided_power_oracle",
    "extend_generators",
    "gaussian_binomial",
    "lambda_coefficients",
    "sample_positions",
    "splitmix64",
    "verify_adq",
    "verify_highest_weight",
    "verify_induction_and_finiteness",
    "verify_partial_serre",
    "verify_serre",
    "verify_tau2_commutation",
]
