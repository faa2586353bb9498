"""Tiling bodies, Monte Carlo estimators and symmetric odd cycle games."""

from fractions import Fraction

from ._core import *  # noqa: F401,F403
from ._core import brute_force_value as _brute_force_value
from ._core import exact_value as _exact_value

__version__ = "0.1.0"


def brute_force_value(n: int, t: int) -> Fraction:
    """Exact value of the t-fold symmetric repetition of the n-cycle game."""
    return Fraction(*_brute_force_value(n, t))


def exact_value(n: int, t: int, strategy: str) -> Fraction:
    """Exact success probability of a named strategy (parity, constant-0, constant-1)."""
    return Fraction(*_exact_value(n, t, strategy))
