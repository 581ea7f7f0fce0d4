"""Python face of the maxwellgas core.

Installed wheels carry the compiled module inside this package; during
development the CMake build directory provides it as a top-level module
instead, so fall back to an absolute import.
"""

try:
    from . import _maxwellgas as _core
except ImportError:  # development layout: extension lives on sys.path
    import _maxwellgas as _core

__version__ = _core.__version__

_names = [n for n in dir(_core) if not n.startswith("_")]
globals().update({n: getattr(_core, n) for n in _names})
__all__ = sorted(_names)
del _names
