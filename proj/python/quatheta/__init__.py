from ._quatheta import *  # noqa: F401,F403
from ._quatheta import version

__version__ = version()
