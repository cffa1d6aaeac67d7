"""Gamma-deformed Airy functions, crossover kernel Fredholm determinants, and
the right tail of the KPZ edge crossover distribution."""

from ._kpztail import *  # noqa: F401,F403
from ._kpztail import __version__  # noqa: F401
