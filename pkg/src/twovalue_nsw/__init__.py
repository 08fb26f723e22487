"""Nash social welfare maximization for {1, p}-valued indivisible goods."""

from .core import (
    UNASSIGNED,
    Allocation,
    AlternatingPath,
    Instance,
    NswProduct,
    UsageError,
    allocation_distance,
    apply_path,
    compare_nsw,
    heavy_part,
    leximax_compare,
    nsw_product,
    utility_profile,
    utility_vector,
    welfare_key,
)
from .binary import (
    SaturatedGroup,
    binary_max_nsw,
    binary_max_nsw_fast,
    find_improving_path,
    max_heavy_multimatching,
    peel_heavy,
)
from .solver import (
    ApproxResult,
    Move,
    SolveResult,
    approx_solve,
    greedy_light_phase,
    phase3_rebalance,
    round_p,
    solve,
)

__version__ = "0.1.0"
