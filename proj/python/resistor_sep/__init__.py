"""Weighted-graph potential theory and exclusion-process dynamics."""

from resistor_sep._core import *  # noqa: F401,F403
from resistor_sep._core import __version__  # noqa: F401
