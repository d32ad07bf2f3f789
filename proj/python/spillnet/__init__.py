"""Sparse variance-decomposition spillover networks.

The heavy lifting lives in the compiled extension; this package re-exports
its surface: panel loading and standardization, VAR estimation, FEVD/GFEVD
tables, information-criterion edge selection, rolling penalty tuning, and
the Monte Carlo designs.
"""

from ._spillnet import *  # noqa: F401,F403
from ._spillnet import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
__doc__ = (__doc__ or "") + "\n\n" + (_core_doc or "")
