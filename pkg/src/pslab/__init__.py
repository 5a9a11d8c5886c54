"""pslab: numerics for Patterson-Sullivan theory of transverse subgroups of SL(d,R)."""

__version__ = "0.1.0"

from . import (  # noqa: F401
    asymptotics,
    cartan,
    cocycle,
    errors,
    flags,
    hilbert,
    matgroup,
    patterson,
    presets,
)
