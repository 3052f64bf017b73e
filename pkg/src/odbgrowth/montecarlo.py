"""Monte Carlo samplers and ECDF comparisons.

Sample ``i`` of a run draws every random number from the key
``derive_seed(master_seed, i, stream)``, so a run is a pure function of its
parameters and master seed whatever the thread count.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numba
import numpy as np
from numba import prange

from .growth import NEG_INF, VARIANTS
from .rng import as_key, hash3_nb, uniform_nb

_VARIANT_CODES = {"odb": 0, "inhomogeneous": 0, "weak": 1, "strict": 2}
REGIMES = ("universal", "critical", "deterministic", "finite_x")

STREAM_MARKS = 0
STREAM_WALKS = 1
STREAM_GUE = 2


class JacobiError(RuntimeError):
    pass


@dataclass
class SampleSet:
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values)
        self.meta.setdefault("N", int(self.values.size))

    def __len__(self):
        return int(self.values.size)

    def mean(self):
        return float(np.mean(self.values))

    def to_lines(self):
        return "".join(f"{v!r}\n" for v in self.values.tolist())


@numba.njit(inline="always")
def _child_key(master, index, stream):
    return hash3_nb(master, np.uint64(index), np.uint64(stream))


@numba.njit(cache=True)
def _height_path(key, code, x, t, probs):
    h = np.full(x + 1, NEG_INF, dtype=np.int64)
    h[0] = 0
    rested = np.ones(x + 1, dtype=np.bool_)
    for time in range(t):
        # descending sweep: site y still sees the old value at y - 1
        for y in range(x, -1, -1):
            eps = 1 if uniform_nb(key, y, time) < probs[y] else 0
            left = h[y - 1] if y > 0 else NEG_INF
            cur = h[y]
            if code == 0:
                bumped = cur + eps if cur != NEG_INF else NEG_INF
                h[y] = left if left > bumped else bumped
            elif code == 1:
                top = left if left > cur else cur
                h[y] = top + eps if top != NEG_INF else NEG_INF
            else:
                left_rested = rested[y - 1] if y > 0 else False
                if left > cur:
                    new = left
                elif left == cur and left_rested and cur != NEG_INF and eps == 1:
                    new = cur + 1
                else:
                    new = cur
                rested[y] = new == cur
                h[y] = new
    return h[x]


@numba.njit(parallel=True, cache=True)
def _heights_kernel(master, code, x, t, probs, count):
    out = np.empty(count, dtype=np.int64)
    for i in prange(count):
        out[i] = _height_path(_child_key(master, i, STREAM_MARKS), code, x, t, probs)
    return out


def _probabilities(variant, x, p):
    probs = np.asarray(p, dtype=float)
    if variant == "inhomogeneous":
        if probs.shape != (x + 1,):
            raise ValueError(f"inhomogeneous variant needs {x + 1} probabilities")
    else:
        if probs.ndim != 0:
            raise ValueError("homogeneous variants take a scalar probability")
        probs = np.full(x + 1, float(probs))
    if np.any(probs <= 0) or np.any(probs >= 1):
        raise ValueError("mark probabilities must lie strictly inside (0, 1)")
    return probs


def sample_heights(variant, x, t, p, N, master_seed=0):
    """``N`` samples of ``h_t(x)``.

    Sample ``i`` equals ``simulate(variant, x, t, p, seed=derive_seed(master_seed, i))``.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if N < 1:
        raise ValueError("N must be at least 1")
    if x < 0 or t < 0:
        raise ValueError("x and t must be nonnegative")
    probs = _probabilities(variant, x, p)
    vals = _heights_kernel(as_key(master_seed), _VARIANT_CODES[variant], x, t, probs, N)
    meta = {"kind": "heights", "variant": variant, "x": x, "t": t,
            "p": probs.tolist() if variant == "inhomogeneous" else float(probs[0]),
            "master_seed": int(master_seed), "N": int(N)}
    return SampleSet(vals, meta)


@numba.njit(inline="always")
def _increment(key, walk, k, steps, gaussian):
    if gaussian:
        u1 = uniform_nb(key, walk, 2 * k)
        u2 = uniform_nb(key, walk, 2 * k + 1)
        z = math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(2.0 * math.pi * u2)
        return z / math.sqrt(steps)
    return (1.0 if uniform_nb(key, walk, k) < 0.5 else -1.0) / math.sqrt(steps)


@numba.njit(cache=True)
def _brownian_functional(key, x, steps, gaussian, bridge):
    # g_0 = f_0; g_i(k) = max_{j<=k}(g_{i-1}(j) - f_i(j)) + f_i(k); answer g_x(steps)
    g = np.empty(steps + 1)
    f = 0.0
    g[0] = 0.0
    for k in range(1, steps + 1):
        f += _increment(key, 0, k - 1, steps, gaussian)
        g[k] = f
    var = 2.0 / steps
    for walk in range(1, x + 1):
        f = 0.0
        run = g[0]
        prev = g[0]
        for k in range(steps + 1):
            if k > 0:
                f += _increment(key, walk, k - 1, steps, gaussian)
            d = g[k] - f
            if bridge and k > 0:
                # g_0 - f_1 is Brownian with rate 2: draw its maximum over the step
                # from the bridge law given both endpoints
                u = uniform_nb(key, x + 1, k)
                top = 0.5 * (prev + d + math.sqrt((d - prev) ** 2 - 2.0 * var * math.log(1.0 - u)))
                if top > run:
                    run = top
            if d > run:
                run = d
            prev = d
            g[k] = run + f
    return g[steps]


@numba.njit(parallel=True, cache=True)
def _brownian_kernel(master, x, steps, count, gaussian, bridge):
    out = np.empty(count)
    for i in prange(count):
        out[i] = _brownian_functional(_child_key(master, i, STREAM_WALKS), x, steps, gaussian, bridge)
    return out


def sample_brownian_m(x, steps, N, master_seed=0, gaussian=False, bridge=False):
    """Samples of ``M_x = max f_0(t_0) + sum_i f_i(t_i) - f_i(t_{i-1})`` over ``t_0 <= ... <= t_x = 1``.

    Each of the ``x + 1`` walks has ``steps`` increments of ``+-1/sqrt(steps)``
    (or Gaussian ones with ``gaussian=True``).  The grid maximum sits below
    the continuous one by about ``0.58 sqrt(2 / steps)``.  With ``bridge``
    (only for ``x <= 1``, Gaussian increments) the maximum inside each step
    is drawn from the Brownian-bridge law, which makes the samples exact.
    """
    if steps < 1000:
        raise ValueError("steps must be at least 1000")
    if x < 0 or N < 1:
        raise ValueError("need x >= 0 and N >= 1")
    if bridge and x > 1:
        raise ValueError("bridge sampling is exact only for x <= 1")
    gaussian = gaussian or bridge
    vals = _brownian_kernel(as_key(master_seed), x, steps, N, gaussian, bridge)
    return SampleSet(vals, {"kind": "brownian_m", "x": x, "steps": steps, "gaussian": bool(gaussian),
                            "bridge": bool(bridge), "master_seed": int(master_seed), "N": int(N)})


@numba.njit(parallel=True, cache=True)
def _two_letter_kernel(master, steps, count, gaussian):
    out = np.empty(count)
    for i in prange(count):
        key = _child_key(master, i, STREAM_WALKS)
        f = 0.0
        best = 0.0
        for k in range(steps):
            f += _increment(key, 0, k, steps, gaussian)
            if f > best:
                best = f
        out[i] = 2.0 * best - f
    return out


def sample_two_letter(N, steps, master_seed=0, gaussian=False):
    """Samples of ``2 max B - B(1)`` for a single walk."""
    if steps < 1000 or N < 1:
        raise ValueError("need steps >= 1000 and N >= 1")
    vals = _two_letter_kernel(as_key(master_seed), steps, N, gaussian)
    return SampleSet(vals, {"kind": "two_letter", "steps": steps, "gaussian": bool(gaussian),
                            "master_seed": int(master_seed), "N": int(N)})


def two_letter_cdf(x):
    """CDF of the density ``sqrt(2/pi) x^2 e^{-x^2/2}`` on ``x >= 0``."""
    from scipy.special import erf
    x = np.maximum(np.asarray(x, dtype=float), 0.0)
    return erf(x / math.sqrt(2)) - math.sqrt(2 / math.pi) * x * np.exp(-x * x / 2)


@numba.njit(inline="always")
def _normal(key, a, b):
    u1 = uniform_nb(key, a, b)
    u2 = uniform_nb(key, a, b + 1)
    return math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(2.0 * math.pi * u2)


@numba.njit(cache=True)
def _jacobi_max(a, tol, max_sweeps):
    """Largest eigenvalue and trace of a real symmetric matrix by cyclic Jacobi."""
    n = a.shape[0]
    trace = 0.0
    for i in range(n):
        trace += a[i, i]
    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += a[i, j] * a[i, j]
        if math.sqrt(2.0 * off) < tol:
            best = a[0, 0]
            total = 0.0
            for i in range(n):
                total += a[i, i]
                if a[i, i] > best:
                    best = a[i, i]
            return best, total, trace
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                tt = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(tt * tt + 1.0)
                s = tt * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
    return np.nan, np.nan, trace


@numba.njit(parallel=True, cache=True)
def _gue_kernel(master, n, count, tol, max_sweeps):
    out = np.empty(count)
    gap = np.empty(count)
    for i in prange(count):
        key = _child_key(master, i, STREAM_GUE)
        # Hermitian H = A + iB embedded as the real symmetric [[A, -B], [B, A]];
        # every eigenvalue of H appears twice
        a = np.zeros((2 * n, 2 * n))
        for r in range(n):
            d = _normal(key, r, 0)
            a[r, r] = d
            a[r + n, r + n] = d
            for c in range(r + 1, n):
                idx = r * n + c
                re = _normal(key, idx, 2) / math.sqrt(2.0)
                im = _normal(key, idx, 4) / math.sqrt(2.0)
                a[r, c] = re
                a[c, r] = re
                a[r + n, c + n] = re
                a[c + n, r + n] = re
                a[r + n, c] = im
                a[c, r + n] = im
                a[c + n, r] = -im
                a[r, c + n] = -im
        best, total, trace = _jacobi_max(a, tol, max_sweeps)
        out[i] = best
        gap[i] = abs(total - trace)
    return out, gap


def sample_gue_max_eig(n, N, master_seed=0, tol=1e-10, max_sweeps=60):
    """Largest eigenvalue of ``N`` Hermitian matrices with density ``~ exp(-tr H^2 / 2)``."""
    if not 2 <= n <= 8:
        raise ValueError("n must be between 2 and 8")
    vals, gap = _gue_kernel(as_key(master_seed), n, N, tol, max_sweeps)
    if np.isnan(vals).any():
        raise JacobiError(f"Jacobi rotations did not converge within {max_sweeps} sweeps")
    return SampleSet(vals, {"kind": "gue_max_eig", "n": n, "master_seed": int(master_seed), "N": int(N),
                            "max_trace_error": float(gap.max(initial=0.0)) / 2})


def ks_distance(samples, cdf, cdf_left=None):
    """``sup |ECDF - F|`` checked on both sides of every jump.

    ``cdf_left`` gives ``F(v-)``; by default ``F`` is taken as continuous.
    """
    vals = np.sort(np.asarray(getattr(samples, "values", samples), dtype=float))
    if vals.size == 0:
        raise ValueError("no samples")
    uniq, first = np.unique(vals, return_index=True)
    n = vals.size
    after = np.append(first[1:], n) / n
    before = first / n
    f = np.asarray(cdf(uniq), dtype=float)
    fl = f if cdf_left is None else np.asarray(cdf_left(uniq), dtype=float)
    return float(max(np.abs(after - f).max(), np.abs(before - fl).max()))


def lattice_ks(samples, cdf):
    """``sup |ECDF - F|`` evaluated only at the sample values, for lattice data."""
    vals = np.sort(np.asarray(getattr(samples, "values", samples), dtype=float))
    uniq, first = np.unique(vals, return_index=True)
    after = np.append(first[1:], vals.size) / vals.size
    return float(np.abs(after - np.asarray(cdf(uniq), dtype=float)).max())


def _pointwise(std, theory, grid):
    vals = np.sort(std)
    ecdf = np.searchsorted(vals, grid, side="right") / vals.size
    return [{"s": float(s), "ecdf": float(e), "theory": float(t)} for s, e, t in zip(grid, ecdf, theory(grid))]


def _universal(params, N, seed):
    from .asymptotics import f2, regime_constants

    x, t, p = int(params["x"]), int(params["t"]), float(params["p"])
    m, n = t - x, x + 1
    rc = regime_constants(n / m, p / (1 - p))
    if not rc.subcritical:
        raise ValueError("universal regime needs p < p_c")
    hs = sample_heights("odb", x, t, p, N, seed)
    std = rc.standardize(hs.values, m)
    theory = np.vectorize(lambda s: f2(float(np.clip(s, -10, 8))))
    grid = np.linspace(-4, 3, 15)
    return {"ks": ks_distance(std, theory), "lattice_ks": lattice_ks(std, theory),
            "constants": rc.to_dict(), "mean": float(std.mean()), "pointwise": _pointwise(std, theory, grid)}


def _critical(params, N, seed):
    from .asymptotics import critical_prob

    x, t = int(params["x"]), int(params["t"])
    m = t - x
    p = float(params.get("p", m / (m + x + 1)))
    hs = sample_heights("odb", x, t, p, N, seed)
    dh = m - hs.values
    top = int(params.get("max_dh", 6))
    probs = np.array([critical_prob(k) - critical_prob(k + 1) for k in range(top)])
    probs = np.append(probs, critical_prob(top))
    counts = np.array([(dh == k).sum() for k in range(top)] + [(dh >= top).sum()], dtype=float)
    expected = probs * N
    mask = expected > 0
    chi2 = float(((counts[mask] - expected[mask]) ** 2 / expected[mask]).sum())
    sigma = np.sqrt(probs * (1 - probs) / N)
    return {"chi2": chi2, "dof": int(mask.sum() - 1),
            "frequencies": [{"dh": k, "freq": float(counts[k] / N), "theory": float(probs[k]),
                             "sigma": float(sigma[k])} for k in range(top + 1)]}


def _deterministic(params, N, seed):
    from .asymptotics import epsilon_for, rate_gamma
    from .exact import fredholm_result

    x, t, p = int(params["x"]), int(params["t"]), float(params["p"])
    m, n = t - x, x + 1
    hs = sample_heights("odb", x, t, p, N, seed)
    freq_top = float((hs.values == m).mean())
    below = 1 - freq_top
    exact_below = fredholm_result(m, n, p, m - 1).raw
    eps = epsilon_for(m, n, p)
    return {"freq_h_eq_m": freq_top, "exact_h_eq_m": 1 - exact_below,
            "empirical_rate": -math.log(below) / m if below > 0 else None,
            "exact_rate": -math.log(exact_below) / m if exact_below > 0 else None,
            "epsilon": eps, "gamma": rate_gamma(eps, p) if eps > -1 else None}


def exact_universal_distance(m, n, p, window=(-7.0, 5.0)):
    """Distance between the exact height CDF (Fredholm route) and F2 after standardizing.

    ``ks_atoms`` compares at the support points ``h``; ``ks_sup`` also takes the
    left limits, so it can never drop below half the largest atom.  Heights whose
    standardized value falls outside ``window`` only enter through a tail bound.
    """
    from .asymptotics import f2, regime_constants
    from .exact import fredholm_result

    rc = regime_constants(n / m, p / (1 - p))
    width = rc.scale * m ** (1 / 3)
    lo = max(0, int(math.floor(rc.c * m + window[0] * width)))
    hi = min(m, int(math.ceil(rc.c * m + window[1] * width)))
    cdf = {h: fredholm_result(m, n, p, h).value for h in range(lo - 1, hi + 1)}
    theory = {h: f2(float(np.clip(rc.standardize(h, m), -10, 8))) for h in range(lo - 1, hi + 1)}
    tail = max(cdf[lo - 1], theory[lo - 1], 1 - cdf[hi], 1 - theory[hi])
    atoms = max(abs(cdf[h] - theory[h]) for h in range(lo, hi + 1))
    left = max(abs(cdf[h - 1] - theory[h]) for h in range(lo, hi + 1))
    return {"m": m, "n": n, "p": p, "h_range": [lo, hi], "tail_bound": float(tail),
            "ks_atoms": float(max(atoms, tail)), "ks_sup": float(max(atoms, left, tail)),
            "max_atom": float(max(cdf[h] - cdf[h - 1] for h in range(lo, hi + 1)))}


def _finite_x(params, N, seed):
    from .asymptotics import gue_cdf

    x, t, p = int(params["x"]), int(params["t"]), float(params["p"])
    hs = sample_heights("odb", x, t, p, N, seed)
    std = (hs.values - p * t) / math.sqrt(p * (1 - p) * t)
    theory = lambda s: gue_cdf(x + 1, s)
    grid = np.linspace(-2, 2 * math.sqrt(x + 1) + 2, 15)
    return {"ks": ks_distance(std, theory), "lattice_ks": lattice_ks(std, theory),
            "mean": float(std.mean()), "second_moment": float((std ** 2).mean()),
            "pointwise": _pointwise(std, theory, grid)}


def regime_report(regime, params, N, master_seed=0):
    """Standardized samples in one regime compared with its limit law; a JSON-ready dict."""
    handlers = {"universal": _universal, "critical": _critical,
                "deterministic": _deterministic, "finite_x": _finite_x}
    if regime not in handlers:
        raise ValueError(f"unknown regime {regime!r}; expected one of {REGIMES}")
    body = handlers[regime](params, N, master_seed)
    return {"regime": regime, "params": dict(params), "N": int(N), "master_seed": int(master_seed), **body}


def report_json(report, **kw):
    return json.dumps(report, **kw)
