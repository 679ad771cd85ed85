# This file is part of drmdp, a solver library for distributionally robust
# Markov decision processes with discounted and average-reward objectives.
#
# SPDX-License-Identifier: MIT
"""Python bindings for the drmdp C++ core.

The compiled extension lives either inside this package (wheel installs) or
next to it on PYTHONPATH (in-tree CMake builds).
"""

try:
    from drmdp._drmdp import *  # noqa: F401,F403
    from drmdp._drmdp import __doc__ as _core_doc  # noqa: F401
except ImportError:  # in-tree build: extension is a top-level module
    from _drmdp import *  # noqa: F401,F403
