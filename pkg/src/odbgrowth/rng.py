"""Counter-based random numbers.

Every random draw in the package is a pure function of an integer key and a
small tuple of counters, so a value never depends on how many draws came
before it.  The mixer is the SplitMix64 finalizer; it is written once and
compiled twice, for numpy arrays and for numba kernels.
"""
import numba
import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53

MASK64 = (1 << 64) - 1


def _fmix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _hash3(key, a, b):
    h = _fmix64(key + _GOLDEN)
    h = _fmix64(h ^ (a * _GOLDEN + _M1))
    return _fmix64(h ^ (b * _M2 + _GOLDEN))


def _unit(h):
    return (h >> _S11) * _INV53


fmix64_nb = numba.njit(inline="always")(_fmix64)


@numba.njit(inline="always")
def hash3_nb(key, a, b):
    h = fmix64_nb(key + _GOLDEN)
    h = fmix64_nb(h ^ (a * _GOLDEN + _M1))
    return fmix64_nb(h ^ (b * _M2 + _GOLDEN))


@numba.njit(inline="always")
def uniform_nb(key, a, b):
    return (hash3_nb(key, np.uint64(a), np.uint64(b)) >> _S11) * _INV53


def as_key(seed):
    """Reduce an arbitrary Python int to an unsigned 64-bit key."""
    return np.uint64(int(seed) & MASK64)


def uniforms(seed, a, b):
    """Uniform(0,1) values keyed by ``(seed, a, b)``; ``a`` and ``b`` broadcast."""
    a = np.asarray(a, dtype=np.int64).astype(np.uint64)
    b = np.asarray(b, dtype=np.int64).astype(np.uint64)
    a, b = np.broadcast_arrays(a, b)
    with np.errstate(over="ignore"):
        return _unit(_hash3(as_key(seed), a, b)).astype(np.float64)


def derive_seed(master_seed, index, stream=0):
    """Child key for sample ``index`` of ``stream``; independent of worker layout."""
    with np.errstate(over="ignore"):
        h = _hash3(as_key(master_seed), np.array([index], dtype=np.uint64),
                   np.array([stream], dtype=np.uint64))
    return int(h[0])
