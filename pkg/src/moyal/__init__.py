"""Moyal star products, twisted convolution and Gel'fand-Shilov diagnostics."""
from .errors import *  # noqa: F401,F403
from .symbols import *  # noqa: F401,F403
from .spectral import *  # noqa: F401,F403
from .starproduct import *  # noqa: F401,F403
from .duality import *  # noqa: F401,F403
from .gsanalysis import *  # noqa: F401,F403

__version__ = "0.1.0"
