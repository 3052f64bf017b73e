"""Limit laws of the height: Tracy-Widom, critical, finite-n GUE and large deviations."""
from .airy import airy_ai, airy_pair
from .constants import RegimeConstants, regime_constants, saddle_inequality, time_constants
from .critical import critical_prob
from .gue import gue_approx, gue_cdf, gue_density, gue_moment, gue_moments
from .rate import epsilon_for, rate_gamma
from .tracy_widom import f2, f2_density, f2_moments, f2_painleve, f2_painleve_density

__all__ = [
    "RegimeConstants", "airy_ai", "airy_pair", "critical_prob", "epsilon_for", "f2", "f2_density",
    "f2_moments", "f2_painleve", "f2_painleve_density", "gue_approx", "gue_cdf", "gue_density",
    "gue_moment", "gue_moments", "rate_gamma", "regime_constants", "saddle_inequality",
    "time_constants",
]
