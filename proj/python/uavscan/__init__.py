"""Point-cloud processing and coverage planning for UAV structure inspection."""

from ._core import *  # noqa: F401,F403
from ._core import UavscanError

__all__ = [name for name in dir() if not name.startswith("_")]
