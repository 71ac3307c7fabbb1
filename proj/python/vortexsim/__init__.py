"""Scalar wave-optics simulator for optical vortices and four-wave-mixing charge arithmetic."""

from ._core import *  # noqa: F401,F403
from ._core import Error, ParseError, PhaseMatchError, SamplingError

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
