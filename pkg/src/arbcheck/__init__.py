"""arbcheck: exact no-arbitrage analysis for finite markets with transaction costs.

Markets are described by per-date random trade maps over a finite scenario
set; the trader's information is an arbitrary partition filtration that need
not reveal the market data.  All decisions (weak / strict / robust
no-arbitrage, efficient friction, pricing-kernel existence) are made in exact
rational arithmetic and come with re-verifiable certificates.
"""

from .market import (
    AdaptedProcess,
    FiniteSpace,
    Filtration,
    RandomVector,
    adapted_process,
    build_filtration,
    build_space,
    change_measure,
    cond_expect,
    full_information_filtration,
    is_martingale,
    optional_projection,
    random_vector,
    scalar_random_vector,
)
from .rationals import rat, rat_str

__all__ = [
    "AdaptedProcess",
    "FiniteSpace",
    "Filtration",
    "RandomVector",
    "adapted_process",
    "build_filtration",
    "build_space",
    "change_measure",
    "cond_expect",
    "full_information_filtration",
    "is_martingale",
    "optional_projection",
    "random_vector",
    "scalar_random_vector",
    "rat",
    "rat_str",
]
