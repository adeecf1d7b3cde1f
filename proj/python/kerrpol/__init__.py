"""Null geodesics, parallel-propagated frames, and gravitational Faraday
rotation in the Kerr exterior."""

from kerrpol._core import *  # noqa: F401,F403
from kerrpol._core import __doc__  # noqa: F401
