"""Numeric distribution of the height from Toeplitz and Fredholm determinants.

``Prob(H <= h) = (1-p)^{mn} D_h(phi)`` with
``phi(z) = (1+z)^n (1 - r/z)^{-m}`` and ``r = p / (1-p)``.  The same
probability is ``det(I - K_h)`` for a kernel of rank at most ``m - h``.

Fourier coefficients come from trapezoidal quadrature on a contour.  The
integrands are evaluated as complex logarithms and exponentiated after a
common shift, so large ``m`` does not overflow.  Rescaling every
coefficient by ``rho**k`` is a diagonal similarity and leaves all
determinants unchanged; that is why scaled coefficients are what the
determinant code actually consumes.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction

import numpy as np

from .tables import DistributionTable

MIN_QUAD_POINTS = 256
MAX_QUAD_POINTS = 1 << 20
QUAD_TOL = 1e-10
TOEPLITZ_WARN_SIZE = 80
TOEPLITZ_WARN_COND = 1e8
PARTS = ("phi", "minus_over_plus", "plus_over_minus")


class ConvergenceError(RuntimeError):
    """Contour quadrature did not settle when the node count was doubled."""


class RouteUnavailable(ValueError):
    pass


class ConditioningWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SymbolSpec:
    """``phi(z) = (1+z)^n (1-r/z)^{-m}``, or the inhomogeneous
    ``(1-1/z)^{-m} prod_j (1 + r_j z)`` when ``rs`` is given (then ``n`` and
    ``r`` are ignored)."""

    n: int
    m: int
    r: float = 0.0
    rs: tuple | None = None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.rs is None:
            if self.n < 1:
                raise ValueError("n must be at least 1")
            if self.r < 0:
                raise ValueError("r must be nonnegative")
        else:
            rs = tuple(float(v) for v in self.rs)
            if not rs or min(rs) <= 0:
                raise ValueError("inhomogeneous ratios must be positive")
            object.__setattr__(self, "rs", rs)

    @classmethod
    def from_probability(cls, m, n, p):
        p = float(p)
        if not 0 < p < 1:
            raise ValueError("p must lie in (0, 1)")
        return cls(n=n, m=m, r=p / (1 - p))

    @classmethod
    def inhomogeneous(cls, m, probabilities):
        ps = [float(v) for v in probabilities]
        if any(not 0 < v < 1 for v in ps):
            raise ValueError("each probability must lie in (0, 1)")
        return cls(n=len(ps), m=m, r=1.0, rs=tuple(v / (1 - v) for v in ps))

    @property
    def pole(self):
        return 1.0 if self.rs is not None else self.r

    def log_symbol(self, z, part="phi"):
        """Complex log of the chosen factor at points ``z``; only its
        exponential is meaningful since the branch is the principal one."""
        z = np.asarray(z, dtype=complex)
        if self.rs is not None:
            if part != "phi":
                raise ValueError("only the full symbol is available for the inhomogeneous spec")
            out = -self.m * np.log(1 - 1 / z)
            for rj in self.rs:
                out = out + np.log(1 + rj * z)
            return out
        plus = self.n * np.log(1 + z)
        minus = self.m * np.log(1 - self.r / z) if self.r else np.zeros_like(z)
        if part == "phi":
            return plus - minus
        if part == "minus_over_plus":
            return -minus - plus
        if part == "plus_over_minus":
            return plus + minus
        raise ValueError(f"unknown part {part!r}; expected one of {PARTS}")


def default_radius(spec, part="phi"):
    r = spec.pole
    if part == "minus_over_plus":
        return (1 + r) / 2
    if part == "plus_over_minus":
        return 1.0
    return max(2 * r, r + 1)


def _check_radius(spec, part, rho):
    r = spec.pole
    if rho <= 0:
        raise ValueError("radius must be positive")
    if part != "plus_over_minus" and rho <= r:
        raise ValueError(f"radius {rho} must exceed the pole at r={r}")
    if part == "minus_over_plus" and rho >= 1:
        raise ValueError(f"radius {rho} must stay below 1 so that z=-1 is outside the contour")


def _contour_sum(log_f, indices, center, radius, scale, q):
    """``scale**k`` times the ``z**k`` coefficient of ``exp(log_f)``, for each k.

    Trapezoid rule on the circle ``center + radius e^{i theta}`` with ``q``
    nodes.  Returns ``(values, shifts)``; the coefficient is
    ``values * exp(shifts)``, with one shift per index chosen as the peak
    log-modulus of its integrand.
    """
    theta = 2 * np.pi * np.arange(q) / q
    e = np.exp(1j * theta)
    z = center + radius * e
    lf = log_f(z) + np.log(radius * e / z)
    lz = np.log(scale / z)
    indices = np.asarray(indices, dtype=float)
    vals = np.empty(len(indices))
    shifts = np.empty(len(indices))
    # chunk over indices to bound memory at large q
    step = max(1, (1 << 21) // q)
    for s in range(0, len(indices), step):
        k = indices[s:s + step, None]
        expo = lf[None, :] + k * lz[None, :]
        peak = expo.real.max(axis=1)
        vals[s:s + step] = np.exp(expo - peak[:, None]).mean(axis=1).real
        shifts[s:s + step] = peak
    return vals, shifts


def _rel_change(old, new, floor=1e-300):
    size = max(np.abs(new).max(initial=0.0), floor)
    return np.abs(old - new).max(initial=0.0) / size


def _settle(compute, q, fixed, floor=1e-300):
    """Evaluate at ``q`` and ``2q`` nodes, doubling until stable unless ``fixed``.

    ``compute(q)`` returns ``(checked, payload)``; ``checked`` is a tuple of
    arrays compared between consecutive node counts.  Returns the payload of
    the finer evaluation.
    """
    prev, _ = compute(q)
    while True:
        cur, payload = compute(2 * q)
        if max(_rel_change(a, b, floor) for a, b in zip(prev, cur)) <= QUAD_TOL:
            return payload
        if fixed:
            raise ConvergenceError(f"{q} quadrature nodes are not enough")
        q *= 2
        if 2 * q > MAX_QUAD_POINTS:
            raise ConvergenceError(f"contour quadrature unsettled at {2 * q} nodes")
        prev = cur


def _start_points(spec, count):
    q = MIN_QUAD_POINTS
    need = 2 * (spec.m + spec.n + count)
    while q < need:
        q *= 2
    return q


def _validate_points(quad_points):
    if quad_points is not None and (quad_points < MIN_QUAD_POINTS or quad_points & (quad_points - 1)):
        raise ValueError("quad_points must be a power of two, at least 256")


def _common_scale(vals, shifts):
    top = shifts.max(initial=0.0)
    return vals * np.exp(shifts - top), top


def symbol_coeffs(spec, index_range, radius=None, quad_points=None, part="phi", scaled=False):
    """Fourier coefficients of ``phi`` (or of ``phi_-/phi_+``, ``phi_+/phi_-``).

    ``index_range`` is an iterable of integer indices.  With ``scaled`` the
    values are multiplied by ``radius**k``.  Without ``quad_points`` the node
    count is doubled from a size-based start until two consecutive results
    agree to 1e-10 relative; with it, that single doubling is still checked.
    """
    if part not in PARTS:
        raise ValueError(f"unknown part {part!r}")
    rho = default_radius(spec, part) if radius is None else float(radius)
    _check_radius(spec, part, rho)
    _validate_points(quad_points)
    idx = np.asarray(list(index_range), dtype=np.int64)

    def compute(q):
        vals, shifts = _contour_sum(lambda z: spec.log_symbol(z, part), idx, 0.0, rho, rho, q)
        rel, _ = _common_scale(vals, shifts)
        return (rel,), vals * np.exp(shifts)

    out = _settle(compute, quad_points or _start_points(spec, len(idx)), quad_points is not None)
    if not scaled:
        out = out / rho ** idx.astype(float)
    return out


def finite_sum_coeff(n, m, r, j):
    """``phi_j = sum_k C(n, j+k) C(m+k-1, k) r^k`` for ``j <= n``; zero above."""
    if j > n:
        return 0.0
    return math.fsum(math.comb(n, j + k) * math.comb(m + k - 1, k) * r ** k
                     for k in range(max(0, -j), n - j + 1))


def _log_toeplitz_det(spec, h, quad_points=None):
    """``(sign, log |D_h|)`` from scaled coefficients on ``|z| = rho``."""
    if h == 0:
        return 1.0, 0.0
    idx = np.arange(-(h - 1), h)
    rho = default_radius(spec)

    def compute(q):
        vals, shifts = _contour_sum(spec.log_symbol, idx, 0.0, rho, rho, q)
        rel, top = _common_scale(vals, shifts)
        return (rel,), (rel, top)

    c, top = _settle(compute, quad_points or _start_points(spec, len(idx)), quad_points is not None)
    i = np.arange(h)
    t = c[i[:, None] - i[None, :] + h - 1]
    cond = np.linalg.cond(t)
    if cond > TOEPLITZ_WARN_COND:
        warnings.warn(f"Toeplitz matrix condition number {cond:.2e}; the determinant is unreliable",
                      ConditioningWarning, stacklevel=4)
    sign, logdet = np.linalg.slogdet(t)
    return float(sign), float(logdet + h * top)


@dataclass(frozen=True)
class RouteResult:
    """A probability clamped to [0, 1] for reporting, with the raw value kept."""

    value: float
    raw: float

    def __float__(self):
        return self.value


def _result(raw):
    return RouteResult(min(1.0, max(0.0, raw)), raw)


def _signed_exp(sign, log_value):
    if log_value > 709:
        return sign * math.inf
    return sign * math.exp(log_value)


def _p_float(p):
    if isinstance(p, (str, Fraction)):
        p = Fraction(p)
    p = float(p)
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    return p


def _warn_size(h):
    if h > TOEPLITZ_WARN_SIZE:
        warnings.warn(f"{h}x{h} Toeplitz determinant at double precision may be ill conditioned",
                      ConditioningWarning, stacklevel=3)


def toeplitz_result(m, n, p, h, quad_points=None):
    p = _p_float(p)
    if h < 0:
        return _result(0.0)
    _warn_size(h)
    sign, logdet = _log_toeplitz_det(SymbolSpec.from_probability(m, n, p), h, quad_points)
    return _result(_signed_exp(sign, logdet + m * n * math.log1p(-p)))


def cdf_toeplitz(m, n, p, h, quad_points=None):
    """``(1-p)^{mn} D_h(phi)``, clamped to [0, 1]."""
    return toeplitz_result(m, n, p, h, quad_points).value


def _saddle_radius(m, n, r):
    """Modulus of the double critical point at the typical height.

    Used as the diagonal rescaling of the kernel, which keeps entries near
    unit size; outside the regime where it exists any radius in (0, 1) is valid.
    """
    alpha = n / m
    if r > 0 and alpha * r < 1:
        v = (1 - math.sqrt(alpha * r)) / (1 + math.sqrt(alpha / r))
        if 0.02 < v < 0.98:
            return v
    return 0.5


def _best_radii(log_f, indices, center, radii, probe=64):
    """Per index, the radius in ``radii`` minimizing the Cauchy bound on ``f(z) z^{-k-1} dz``."""
    theta = 2 * np.pi * np.arange(probe) / probe
    z = center + radii[:, None] * np.exp(1j * theta)[None, :]
    base = log_f(z).real
    lz = np.log(np.abs(z))
    out = np.empty(len(indices))
    for s in range(0, len(indices), 256):
        k = np.asarray(indices[s:s + 256], dtype=float)[:, None, None]
        bound = (base[None] - (k + 1) * lz[None]).max(axis=2) + np.log(radii)[None]
        out[s:s + 256] = radii[bound.argmin(axis=1)]
    return out


def _coeffs_on_circles(log_f, indices, center, radii, scale, q):
    """``scale**k`` times the ``z**k`` coefficient, each index on its own circle about ``center``."""
    vals = np.empty(len(indices))
    shifts = np.empty(len(indices))
    for rad in np.unique(radii):
        sel = radii == rad
        vals[sel], shifts[sel] = _contour_sum(log_f, indices[sel], center, rad, scale, q)
    return vals, shifts


@lru_cache(maxsize=16)
def _kernel_coeffs(m, n, r, q):
    """Rescaled ``a_i = (phi_-/phi_+)_i`` for ``1 <= i < 2m`` and ``b_i = (phi_+/phi_-)_{-i}`` for ``1 <= i <= m``.

    ``a_i`` is minus the residue at ``z = -1`` (the only singularity outside
    a contour around 0 and r, and the integrand decays at infinity), so it is
    integrated on a small circle about -1.  ``b`` is a Laurent polynomial and
    takes any circle about 0.  Each index gets the radius with the smallest
    Cauchy bound, which limits cancellation for every ``r``.
    """
    spec = SymbolSpec(n=n, m=m, r=r)
    rho = _saddle_radius(m, n, r)
    # reference magnitude at z = -rho; it cancels in every product a * b
    ref = float(spec.log_symbol(-rho + 0j, "plus_over_minus").real)
    minus = lambda z: spec.log_symbol(z, "minus_over_plus")
    plus = lambda z: spec.log_symbol(z, "plus_over_minus")
    a_idx = np.arange(1, 2 * m)
    b_idx = -np.arange(1, m + 1)
    a_radii = _best_radii(minus, a_idx, -1.0, np.geomspace(0.01, 0.99, 48))
    b_radii = _best_radii(plus, b_idx, 0.0, np.geomspace(1e-3, 10.0, 64) * (1 + r))
    va, sa = _coeffs_on_circles(minus, a_idx, -1.0, a_radii, rho, q)
    vb, sb = _coeffs_on_circles(plus, b_idx, 0.0, b_radii, rho, q)
    with np.errstate(over="ignore", under="ignore"):
        return -va * np.exp(sa + ref), vb * np.exp(sb - ref)


def kernel_matrix(m, n, p, h, quad_points=None):
    """The ``(m-h) x (m-h)`` block of ``K_h`` in a diagonally rescaled basis.

    ``K_h(j,k) = sum_l (phi_-/phi_+)_{h+j+l+1} (phi_+/phi_-)_{-h-k-l-1}``.
    The second factor is a Laurent polynomial with no terms past ``z^{-m}``,
    so the sum stops at ``l = m-h-k-1`` and columns ``k >= m-h`` vanish.
    """
    p = _p_float(p)
    size = m - h
    if size <= 0:
        return np.zeros((0, 0))
    r = p / (1 - p)
    spec = SymbolSpec(n=n, m=m, r=r)

    def compute(q):
        a, b = _kernel_coeffs(m, n, r, q)
        kmat = _assemble(a[h:], b[h:], size)
        if not np.all(np.isfinite(kmat)):
            raise ConvergenceError("kernel coefficients overflow at double precision")
        return (kmat,), kmat

    # stability is judged on the kernel itself: tiny coefficients far from
    # the saddle carry absolute noise that never reaches the determinant
    return _settle(compute, quad_points or _start_points(spec, 2 * m), quad_points is not None, floor=1.0)


def _assemble(a, b, size):
    kmat = np.empty((size, size))
    for k in range(size):
        bk = b[k:size]
        for j in range(size):
            kmat[j, k] = np.dot(a[j:j + size - k], bk)
    return kmat


def fredholm_result(m, n, p, h, quad_points=None):
    if h < 0:
        _p_float(p)
        return _result(0.0)
    kmat = kernel_matrix(m, n, p, h, quad_points)
    if kmat.size == 0:
        return _result(1.0)
    return _result(float(np.linalg.det(np.eye(len(kmat)) - kmat)))


def cdf_fredholm(m, n, p, h, quad_points=None):
    """``det(I - K_h)`` over the ``(m-h) x (m-h)`` block; 1 for ``h >= m``."""
    return fredholm_result(m, n, p, h, quad_points).value


def inhomo_result(m, probabilities, h, quad_points=None):
    ps = [_p_float(v) for v in probabilities]
    if h < 0:
        return _result(0.0)
    _warn_size(h)
    spec = SymbolSpec.inhomogeneous(m, ps)
    sign, logdet = _log_toeplitz_det(spec, h, quad_points)
    log_q = m * sum(math.log1p(-v) for v in ps)
    return _result(_signed_exp(sign, logdet + log_q))


def inhomo_cdf(m, probabilities, h, quad_points=None):
    """``Prob(h_t(x) <= h)`` for site probabilities ``(p_0, ..., p_x)`` and ``m = t - x``.

    ``q_0^m ... q_x^m D_h`` with symbol ``(1-1/z)^{-m} prod_j (1 + r_j z)``.
    """
    return inhomo_result(m, probabilities, h, quad_points).value


ROUTES = {"toeplitz": cdf_toeplitz, "fredholm": cdf_fredholm}


def numeric_table(m, n, p, route="toeplitz", h_values=None, quad_points=None):
    """DistributionTable of floats from one numeric route; ``meta`` keeps raw values."""
    if route not in ROUTES:
        raise ValueError(f"unknown numeric route {route!r}")
    fn = toeplitz_result if route == "toeplitz" else fredholm_result
    hs = range(m + 1) if h_values is None else h_values
    cdf, raw = {}, {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConditioningWarning)
        for h in hs:
            res = fn(m, n, p, h, quad_points)
            cdf[h] = res.value
            raw[h] = res.raw
    p_out = Fraction(p) if isinstance(p, (str, Fraction)) else float(p)
    return DistributionTable(m, n, p_out, "odb", cdf, route=route, meta={"raw": {str(k): v for k, v in raw.items()}})
