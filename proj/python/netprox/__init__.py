"""Distributed primal-dual proximal optimization on simulated networks."""

from netprox._core import *  # noqa: F401,F403
from netprox._core import __doc__  # noqa: F401
