"""CSV tables for the limit laws."""
from __future__ import annotations

import csv
import io

import numpy as np

from .critical import critical_prob
from .gue import gue_approx, gue_moments
from .tracy_widom import f2_painleve, f2_painleve_density, f2_with_density


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def f2_rows(s_values, route="nystrom"):
    for s in s_values:
        s = float(s)
        if route == "nystrom":
            cdf, dens = f2_with_density(s)
        elif route == "painleve":
            cdf, dens = f2_painleve(s), f2_painleve_density(s)
        else:
            raise ValueError(f"unknown F2 route {route!r}")
        yield s, float(cdf), float(dens)


def f2_csv(s_values=None, route="nystrom"):
    if s_values is None:
        s_values = np.linspace(-5, 3, 17)
    return _csv(["s", "F2(s)", "f2(s)"], f2_rows(s_values, route))


def critical_csv(max_dh=9):
    return _csv(["dh", "prob"], ((dh, critical_prob(dh)) for dh in range(max_dh + 1)))


def gue_table_rows(n_values=range(2, 10)):
    for n in n_values:
        mo = gue_moments(n)
        ap = gue_approx(n)
        yield n, mo.mean, mo.variance, mo.skewness, mo.excess_kurtosis, ap["mean"], ap["variance"]


def gue_table_csv(n_values=range(2, 10)):
    return _csv(["n", "mean", "var", "skew", "kurt", "approx_mean", "approx_var"], gue_table_rows(n_values))
