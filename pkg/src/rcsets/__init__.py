"""Simulation and exact computation for random closed subsets of Cantor space.

Closed sets are represented by binary trees coded as trit or quad strings.
The package samples them under Bernoulli and Galton-Watson measures,
intersects and prunes them, and checks the closed-form probabilities
(survival, emptiness, induced parameters, thresholds) against exact
recurrences and seeded Monte Carlo estimates.
"""

from . import dimension, galton_watson, intersection, measures, montecarlo, tree_codec
from .dimension import *  # noqa: F401,F403
from .errors import *  # noqa: F401,F403
from .galton_watson import *  # noqa: F401,F403
from .intersection import *  # noqa: F401,F403
from .measures import *  # noqa: F401,F403
from .montecarlo import *  # noqa: F401,F403
from .tree_codec import *  # noqa: F401,F403

__version__ = "0.1.0"
