"""Decomposition of finite metric spaces and finite-dimensional normed spaces.

Thin wrapper around the compiled module: metric product recognition and
factorization, norm rigidity certificates, inscribed ellipsoids, polytope
direct sums, instance generators and JSON/CSV serialization.
"""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __version__  # noqa: F401
except ImportError:
    # in-tree test runs load the module straight from the build directory
    # (see tests/python/conftest.py); installed wheels use the package-local
    # extension imported above
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
