"""wraploss package entry.

Provides a stable module entrypoint (python -m wraploss) over the layered
top-level packages (core/, domain/, storage/, services/, infra/, app/).
"""

from app.version import __version__  # single source of truth

__all__ = ["__version__"]
