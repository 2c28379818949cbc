"""Energy efficiency of two-tier MIMO heterogeneous networks with wireless backhaul.

Stochastic-geometry rate expressions, a power consumption model, the
backhaul bandwidth optimiser and a Monte Carlo simulator that validates them.
"""

__version__ = "0.1.0"

from .errors import (ConfigError, DegenerateModel, DomainError, EmptyTier, HetNetError,
                     InvalidParams, NonConvergence, RankDeficient)
from .network import FDD, TDD, DerivedModel, ModelOptions, PowerParams, SystemParams, derive
from .rates import RateBundle, compute_rates, rates_fdd, rates_tdd, sum_rate_area
from .energy import AllocationScheme, EEResult, energy_efficiency, optimize_zeta, sweep
