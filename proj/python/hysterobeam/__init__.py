"""Cantilever beam with distributed Bouc-Wen hysteretic damping.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface. Installed wheels carry the extension inside the package;
development builds put it on sys.path instead.
"""

try:
    from ._hysterobeam import *  # noqa: F401,F403
    from ._hysterobeam import __version__  # noqa: F401
except ImportError:
    from _hysterobeam import *  # noqa: F401,F403
    from _hysterobeam import __version__  # noqa: F401
