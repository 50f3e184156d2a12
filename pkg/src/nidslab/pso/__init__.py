from .search import (
    FitnessEvaluator, PsoConfig, Swarm, clip_position, enforce_craft_pool,
    initialize, mutate, update_position, update_velocity,
)

__all__ = [
    "FitnessEvaluator", "PsoConfig", "Swarm", "clip_position",
    "enforce_craft_pool", "initialize", "mutate", "update_position",
    "update_velocity",
]
