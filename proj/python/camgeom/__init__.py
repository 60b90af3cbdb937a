from ._camgeom import *  # noqa: F401,F403
from ._camgeom import __version__, CamgeomError  # noqa: F401
