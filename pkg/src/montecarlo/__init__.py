"""
Monte Carlo verification of the moment and aging computations.

Replicas are independent, seeded per index and merged in batch order, so a
run is reproducible for any batch size or worker count.

Example:
    >>> from src.montecarlo import derive_replica_seed
    >>> derive_replica_seed(42, 0) != derive_replica_seed(42, 1)
    True

Modules:
    seeding: derive_replica_seed, replica_generator
    accumulator: ReplicaAccumulator and estimate summaries
    lattice: simulate_lattice (Euler-Maruyama on a torus)
    dual: simulate_dual_pair, simulate_coalescing_dual
"""

from src.montecarlo.accumulator import (
    ReplicaAccumulator,
    is_heavy_tailed,
    replica_batches,
    summarize,
    summarize_correlation,
)
from src.montecarlo.dual import DualPairState, simulate_coalescing_dual, simulate_dual_pair
from src.montecarlo.lattice import simulate_lattice, torus_window
from src.montecarlo.seeding import derive_replica_seed, replica_generator

__all__: list[str] = [
    # Seeding
    "derive_replica_seed",
    "replica_generator",
    # Accumulation
    "ReplicaAccumulator",
    "replica_batches",
    "summarize",
    "summarize_correlation",
    "is_heavy_tailed",
    # Simulators
    "simulate_lattice",
    "torus_window",
    "simulate_dual_pair",
    "simulate_coalescing_dual",
    "DualPairState",
]
