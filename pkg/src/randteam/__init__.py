"""Team decision problems and team-vs-team zero-sum games with external randomness.

Submodules:

* :mod:`randteam.env` - finite and Gaussian environments, observation maps;
* :mod:`randteam.discrete` - finite games, payoff matrices, security levels;
* :mod:`randteam.lqg_team` - static LQG teams with private/common/dependent randomness;
* :mod:`randteam.lqg_zerosum` - the three-DM zero-sum LQG game;
* :mod:`randteam.oracle` - Monte Carlo, brute-force and grid-search checks;
* :mod:`randteam.report`, :mod:`randteam.experiments`, :mod:`randteam.cli` - reproduction harness.
"""

from .errors import (
    ConfigError,
    EnumerationCapError,
    GameValidationError,
    IndefiniteError,
    ModelError,
    NumericalError,
    RandTeamError,
    SingularSystemError,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "EnumerationCapError",
    "GameValidationError",
    "IndefiniteError",
    "ModelError",
    "NumericalError",
    "RandTeamError",
    "SingularSystemError",
    "__version__",
]
