"""Thermalization analysis of commuting Pauli Hamiltonians under Davies dynamics."""

from __future__ import annotations

__version__ = "0.1.0"

from .barrier import (
    BarrierReport,
    PathFamily,
    PauliPath,
    exact_energy_cost,
    generalized_barrier_exact,
    heuristic_barrier,
    path_cost,
    reduced_generator_set,
    width,
)
from .bounds import (
    BoundReport,
    beta_zero_floor,
    c_beta,
    gen_bound,
    h_star,
    mixing_time_bound,
    one_d_bounds,
    special_bound,
    verify,
)
from .davies import (
    BathModel,
    coset_representatives,
    detailed_balance_check,
    dirichlet_block,
    full_generator,
    spectral_gap,
    support_bound_canonical,
    variance_block,
)
from .model import (
    ModelError,
    SizeLimitError,
    StabilizerModel,
    build_model,
    cluster_chain,
    ising_chain,
    random_commuting,
    toric_code,
)
from .modelfile import load_model
from .pauli import (
    PauliWord,
    commutation_sign,
    compose,
    format_pauli,
    parse_pauli,
    symplectic_parity,
    weight,
    weight_one_set,
)
