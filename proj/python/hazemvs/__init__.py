"""Multi-view depth estimation for hazy and underwater scenes."""

from ._hazemvs import *  # noqa: F401,F403
from ._hazemvs import __doc__  # noqa: F401
