"""Factored-MDP optimistic RL toolkit (pybind11 bindings)."""

from fmdp._core import *  # noqa: F401,F403
