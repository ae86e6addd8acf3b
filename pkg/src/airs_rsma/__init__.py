"""Sum-rate optimization for AIRS-assisted vehicular networks with
rate-splitting SWIPT receivers.

The package is organized bottom-up:

* :mod:`.scenario` - configuration, road geometry, vehicle association
* :mod:`.channel` - LoS channels, reflection phases, effective gains
* :mod:`.rsma_swipt` - exact rates, harvested energy, feasibility checks
* :mod:`.surrogate` - convex lower bounds used by the block subproblems
* :mod:`.convex` - self-contained log-barrier solver for the canonical form
* :mod:`.subproblems` - trajectory / power-rate / power-splitting builders
* :mod:`.ao` - alternating-optimization driver with monotone safeguards
* :mod:`.oracle` - independent reference implementations for validation
* :mod:`.experiments` - schemes, sweeps and CSV emission
* :mod:`.cli` - command-line entry points
"""

from .scenario import NetworkConfig, default_config, load_config, save_config
from .rsma_swipt import NetworkState, evaluate, check_feasibility

__all__ = [
    "NetworkConfig",
    "NetworkState",
    "default_config",
    "load_config",
    "save_config",
    "evaluate",
    "check_feasibility",
]
