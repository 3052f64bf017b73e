"""Airy function wrappers with the domain the F2 routines rely on."""
from __future__ import annotations

import numpy as np
from scipy import special

AIRY_DOMAIN = (-20.0, 200.0)


def _check(x):
    x = np.asarray(x, dtype=float)
    if x.size and (x.min() < AIRY_DOMAIN[0] or x.max() > AIRY_DOMAIN[1]):
        raise ValueError(f"Airy evaluation limited to {AIRY_DOMAIN}")
    return x


def airy_ai(x):
    ai, _, _, _ = special.airy(_check(x))
    return ai


def airy_pair(x):
    """``(Ai(x), Ai'(x))``."""
    ai, aip, _, _ = special.airy(_check(x))
    return ai, aip
