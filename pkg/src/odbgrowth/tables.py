"""DistributionTable: ``h -> Prob(H <= h)`` with the route that produced it."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction


def as_fraction(p):
    """Exact rational from a Fraction, int, or decimal/fraction string.

    Floats are refused: exact routes must not inherit binary rounding.
    """
    if isinstance(p, Fraction):
        return p
    if isinstance(p, int):
        return Fraction(p)
    if isinstance(p, str):
        return Fraction(p.strip())
    raise TypeError(f"exact routes need a rational probability, got {type(p).__name__}")


def _fmt(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return float(v)


def _parse(v):
    if isinstance(v, str):
        return Fraction(v)
    return float(v)


@dataclass
class DistributionTable:
    m: int
    n: int
    p: Fraction | float
    mode: str
    cdf: dict[int, Fraction | float]
    route: str = "brute"
    meta: dict = field(default_factory=dict)

    @property
    def exact(self):
        return all(isinstance(v, Fraction) for v in self.cdf.values())

    def __call__(self, h):
        if h < 0:
            return Fraction(0) if self.exact else 0.0
        if h > max(self.cdf):
            return Fraction(1) if self.exact else 1.0
        return self.cdf[h]

    def pmf(self):
        prev = 0
        out = {}
        for h in sorted(self.cdf):
            out[h] = self.cdf[h] - prev
            prev = self.cdf[h]
        return out

    def to_dict(self):
        d = {
            "m": self.m,
            "n": self.n,
            "p": _fmt(self.p),
            "mode": self.mode,
            "route": self.route,
            "cdf": [{"h": h, "prob": _fmt(v)} for h, v in sorted(self.cdf.items())],
        }
        if self.meta:
            d["meta"] = self.meta
        return d

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d):
        return cls(
            m=d["m"],
            n=d["n"],
            p=_parse(d["p"]),
            mode=d["mode"],
            cdf={row["h"]: _parse(row["prob"]) for row in d["cdf"]},
            route=d.get("route", "brute"),
            meta=d.get("meta", {}),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))
