"""Finite-set capacities (fuzzy measures), their p-symmetric compressed form,
representation transforms and Choquet integration."""

from capax.setcore import (
    GroundSet,
    Partition,
    bernoulli,
    composition_of,
    enumerate_paths,
    path_count,
)
from capax.capacity import (
    SetFunction,
    Capacity,
    MobiusRepr,
    InteractionRepr,
    validate_capacity,
    dual,
    mobius_from_capacity,
    capacity_from_mobius,
    is_valid_mobius,
    is_belief,
    interaction_from_mobius,
    mobius_from_interaction,
    interaction_from_capacity,
    is_null_set,
    are_indifferent,
    is_set_of_indifference,
    lower_envelope,
    is_interadditive,
)
from capax.psym import (
    PSymmetricCapacity,
    coarsest_partition,
    compress,
    expand,
    psym_mobius,
    psym_capacity_from_mobius,
    psym_interaction_from_mobius,
    psym_mobius_from_interaction,
    psym_interaction_from_capacity,
    psym_capacity_from_interaction,
    dual_psym,
    storage_count,
)
from capax.integral import (
    DecompositionResult,
    choquet,
    choquet_mobius,
    choquet_psym,
    owa,
    owa_to_capacity,
    capacity_to_owa,
    decompose,
    belief_decompose,
    interaction_degree,
    vanishing_degree_check,
)

__version__ = "0.1.0"

__all__ = [
    "GroundSet",
    "Partition",
    "bernoulli",
    "composition_of",
    "enumerate_paths",
    "path_count",
    "SetFunction",
    "Capacity",
    "MobiusRepr",
    "InteractionRepr",
    "validate_capacity",
    "dual",
    "mobius_from_capacity",
    "capacity_from_mobius",
    "is_valid_mobius",
    "is_belief",
    "interaction_from_mobius",
    "mobius_from_interaction",
    "interaction_from_capacity",
    "is_null_set",
    "are_indifferent",
    "is_set_of_indifference",
    "lower_envelope",
    "is_interadditive",
    "PSymmetricCapacity",
    "coarsest_partition",
    "compress",
    "expand",
    "psym_mobius",
    "psym_capacity_from_mobius",
    "psym_interaction_from_mobius",
    "psym_mobius_from_interaction",
    "psym_interaction_from_capacity",
    "psym_capacity_from_interaction",
    "dual_psym",
    "storage_count",
    "DecompositionResult",
    "choquet",
    "choquet_mobius",
    "choquet_psym",
    "owa",
    "owa_to_capacity",
    "capacity_to_owa",
    "decompose",
    "belief_decompose",
    "interaction_degree",
    "vanishing_degree_check",
]
