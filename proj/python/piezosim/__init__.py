"""Piezo stage lab: plant simulation, friction identification, SMC benchmarks.

Everything lives in the compiled extension; this package re-exports it
flatly so `import piezosim` gives the full API.
"""

from piezosim._core import *  # noqa: F401,F403
from piezosim._core import friction, sysid  # noqa: F401

__all__ = [name for name in dir() if not name.startswith("_")]
