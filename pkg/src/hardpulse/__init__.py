"""Hard-pulse design by discrete inverse scattering."""

from .errors import PulseError
from .forward import (DiscreteScatteringData, ReducedScatteringData, forward_scatter,
                      find_bound_states, reduced_data)
from .pulse import HardPulse, MagnetizationProfile
from .spectral import CircleGrid, LaurentSeries

__all__ = ["CircleGrid", "DiscreteScatteringData", "HardPulse", "LaurentSeries",
           "MagnetizationProfile", "PulseError", "ReducedScatteringData", "find_bound_states",
           "forward_scatter", "reduced_data"]
