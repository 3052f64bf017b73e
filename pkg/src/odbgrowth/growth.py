"""Oriented digital boiling: height process from corner initialization.

Heights live in an ``int64`` array indexed ``[x, t]``.  Unoccupied columns
hold the sentinel :data:`NEG_INF`; adding a mark to the sentinel leaves it
unchanged.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .rng import uniforms

NEG_INF = np.iinfo(np.int64).min
VARIANTS = ("odb", "weak", "strict", "inhomogeneous")


@dataclass(frozen=True)
class MarkField:
    """Bernoulli marks on the window ``0 <= x < width``, ``0 <= t < depth``.

    Marks are never stored unless ``explicit`` is given: the mark at
    ``(x, t)`` is ``uniforms(seed, x, t) < p_x``, so any sub-window can be
    regenerated on demand.
    """

    width: int
    depth: int
    probabilities: np.ndarray
    seed: int = 0
    explicit: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def random(cls, width, depth, p, seed=0):
        probs = np.broadcast_to(np.asarray(p, dtype=float), (width,)).copy()
        if np.any(probs <= 0) or np.any(probs >= 1):
            raise ValueError("mark probabilities must lie strictly inside (0, 1)")
        return cls(width, depth, probs, int(seed))

    @classmethod
    def from_marks(cls, marks):
        """Field with the given boolean array ``marks[x, t]``."""
        marks = np.asarray(marks, dtype=bool)
        width, depth = marks.shape
        probs = np.full(width, marks.mean() if marks.size else 0.0)
        return cls(width, depth, probs, 0, marks)

    @classmethod
    def from_points(cls, points, width, depth):
        marks = np.zeros((width, depth), dtype=bool)
        for x, t in points:
            marks[x, t] = True
        return cls.from_marks(marks)

    def row(self, t):
        """Marks ``(x, t)`` for every site, shape ``(width,)``."""
        if self.explicit is not None:
            return self.explicit[:, t]
        return uniforms(self.seed, np.arange(self.width), t) < self.probabilities

    def column(self, x, t_lo, t_hi):
        """Marks ``(x, t)`` for ``t_lo <= t < t_hi``."""
        if self.explicit is not None:
            return self.explicit[x, t_lo:t_hi]
        return uniforms(self.seed, x, np.arange(t_lo, t_hi)) < self.probabilities[x]

    def to_array(self):
        if self.explicit is not None:
            return self.explicit.copy()
        x = np.arange(self.width)[:, None]
        t = np.arange(self.depth)[None, :]
        return uniforms(self.seed, x, t) < self.probabilities[:, None]


@dataclass
class HeightTrace:
    heights: np.ndarray
    variant: str

    @property
    def x_max(self):
        return self.heights.shape[0] - 1

    @property
    def t_max(self):
        return self.heights.shape[1] - 1

    def __call__(self, x, t):
        v = self.heights[x, t]
        return -np.inf if v == NEG_INF else int(v)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "t", "h"])
        for x in range(self.heights.shape[0]):
            for t in range(self.heights.shape[1]):
                v = self.heights[x, t]
                w.writerow([x, t, "-inf" if v == NEG_INF else int(v)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, variant="odb"):
        rows = list(csv.DictReader(io.StringIO(text)))
        xm = max(int(r["x"]) for r in rows)
        tm = max(int(r["t"]) for r in rows)
        h = np.full((xm + 1, tm + 1), NEG_INF, dtype=np.int64)
        for r in rows:
            if r["h"] != "-inf":
                h[int(r["x"]), int(r["t"])] = int(r["h"])
        return cls(h, variant)


def _bump(h, eps):
    return np.where(h == NEG_INF, NEG_INF, h + eps)


def _left(h):
    out = np.empty_like(h)
    out[..., 0] = NEG_INF
    out[..., 1:] = h[..., :-1]
    return out


def step(variant, h, eps, rested=None):
    """One update ``h_t -> h_{t+1}`` given the marks ``eps`` at time ``t``.

    Works on any leading batch shape; the last axis is space.  For the
    strict variant ``rested`` flags sites that did not grow on the previous
    step; the updated flags are returned alongside the heights.
    """
    eps = eps.astype(np.int64)
    left = _left(h)
    if variant in ("odb", "inhomogeneous"):
        return np.maximum(left, _bump(h, eps)), None
    if variant == "weak":
        return _bump(np.maximum(left, h), eps), None
    if variant == "strict":
        left_rested = _left(rested)
        left_rested[..., 0] = False
        grow = (left == h) & left_rested & (h != NEG_INF) & (eps > 0)
        new = np.where(left > h, left, np.where(grow, h + 1, h))
        return new, new == h
    raise ValueError(f"unknown variant {variant!r}")


def initial_heights(shape):
    h = np.full(shape, NEG_INF, dtype=np.int64)
    h[..., 0] = 0
    return h


def evolve(variant, marks):
    """Evolve a batch of explicit fields ``marks[..., x, t]``.

    Returns heights of shape ``marks.shape[:-1] + (t_max + 1,)`` where
    ``t_max`` equals the number of mark rows; row ``t`` of the marks drives
    the step from ``t`` to ``t + 1``.
    """
    marks = np.asarray(marks, dtype=bool)
    *batch, width, depth = marks.shape
    out = np.empty((*batch, width, depth + 1), dtype=np.int64)
    h = initial_heights((*batch, width))
    rested = np.ones((*batch, width), dtype=bool)
    out[..., 0] = h
    for t in range(depth):
        h, r = step(variant, h, marks[..., t], rested)
        if r is not None:
            rested = r
        out[..., t + 1] = h
    return out


def simulate(variant, x_max, t_max, probabilities=0.5, seed=0, marks=None):
    """Height trace on ``0..x_max`` by ``0..t_max``.

    ``probabilities`` is a scalar (homogeneous variants) or, for
    ``variant="inhomogeneous"``, a vector of length ``x_max + 1``.  Passing a
    :class:`MarkField` or boolean array as ``marks`` overrides the random
    field.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    if x_max < 0 or t_max < 0:
        raise ValueError("x_max and t_max must be nonnegative")
    if marks is None:
        probs = np.asarray(probabilities, dtype=float)
        if variant == "inhomogeneous":
            if probs.shape != (x_max + 1,):
                raise ValueError(
                    f"inhomogeneous variant needs {x_max + 1} probabilities, got shape {probs.shape}")
        elif probs.ndim != 0:
            raise ValueError("homogeneous variants take a scalar probability")
        field_ = MarkField.random(x_max + 1, t_max + 1, probs, seed)
    elif isinstance(marks, MarkField):
        field_ = marks
    else:
        field_ = MarkField.from_marks(marks)
    if field_.width < x_max + 1 or field_.depth < t_max:
        raise ValueError("mark field smaller than the requested window")

    out = np.empty((x_max + 1, t_max + 1), dtype=np.int64)
    h = initial_heights(x_max + 1)
    rested = np.ones(x_max + 1, dtype=bool)
    out[:, 0] = h
    for t in range(t_max):
        h, r = step(variant, h, field_.row(t)[: x_max + 1], rested)
        if r is not None:
            rested = r
        out[:, t + 1] = h
    return HeightTrace(out, variant)
