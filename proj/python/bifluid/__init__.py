"""Viscous compressible two-fluid mixture solver on the unit interval."""

from ._bifluid import *  # noqa: F401,F403
from ._bifluid import Error, __doc__  # noqa: F401
