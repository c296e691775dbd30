import os
import sys

# ctest exports DERHAM_PYMOD_DIR (build dir holding _core) and DERHAM_CLI
_here = os.path.dirname(os.path.abspath(__file__))
_root = os.path.dirname(os.path.dirname(_here))

_mod_dir = os.environ.get("DERHAM_PYMOD_DIR")
if _mod_dir and _mod_dir not in sys.path:
    sys.path.insert(0, _mod_dir)

_pkg_dir = os.path.join(_root, "python")
if _pkg_dir not in sys.path:
    sys.path.insert(0, _pkg_dir)
