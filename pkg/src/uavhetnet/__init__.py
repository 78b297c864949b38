"""Analytical and simulation model of cache-enabled UAV access points in a 3-D HetNet.

Ground users associate by strongest average power with terrestrial base
stations (TBSs) or aerial access points (UAV-APs); UAV-APs fetch missing
content over a wireless xHaul link from a TBS or an aerial base station
(UAV-BS). The package evaluates association, SINR coverage and end-to-end
content-delivery success, optimises the access/xHaul bandwidth split, and
checks the analytics against a Monte-Carlo oracle.
"""

__version__ = "0.1.0"

from .params import (  # noqa: E402
    ENVIRONMENTS,
    Config,
    ConfigError,
    Environment,
    NetworkParams,
    ServiceParams,
    dbm_to_watts,
    environment,
    load_config,
    paper_defaults,
    parse_config,
    watts_to_dbm,
)
from .quadrature import *  # noqa: E402,F401,F403
from .channel import *  # noqa: E402,F401,F403
from .geometry import *  # noqa: E402,F401,F403
from .association import *  # noqa: E402,F401,F403
from .coverage import *  # noqa: E402,F401,F403
from .content import *  # noqa: E402,F401,F403
from .optimizer import *  # noqa: E402,F401,F403
from .montecarlo import *  # noqa: E402,F401,F403
