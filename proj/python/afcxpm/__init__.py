"""Cross-phase modulation of a stored probe in an atomic frequency comb."""

from ._core import *  # noqa: F401,F403
from ._core import __version__

MHZ = 2e6 * 3.141592653589793


def mhz(value):
    """Frequency in MHz to angular frequency in rad/s."""
    return value * MHZ
