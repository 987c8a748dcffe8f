"""Mean-rescaling of counts, cross-stratum collapse and empirical CCDFs.

Rescaling divides every count in a stratum by the stratum's own mean
(computed on the sample at hand, zeros included), so each rescaled stratum
has mean 1 and strata of very different intensity become directly
comparable. Collapsing concatenates the rescaled strata of one year into a
single distribution. CCDFs are the plot-ready form: the fraction of the
sample at least as large as each distinct value.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import Group, GroupKey

__all__ = [
    "AllUnreadGroupError",
    "RescaledSample",
    "CcdfCurve",
    "rescale_group",
    "collapse",
    "ccdf",
    "ccdf_filename",
    "write_ccdf_tsv",
]


class AllUnreadGroupError(ValueError):
    """Every count in the group is zero, so the rescaling divisor vanishes."""


@dataclass(frozen=True)
class RescaledSample:
    """One stratum's counts divided by its internal mean ``r0``."""

    key: GroupKey
    values: np.ndarray
    r0: float


@dataclass(frozen=True)
class CcdfCurve:
    """Empirical complementary CDF.

    ``points`` has one row (x, p) per distinct sample value, ascending in x,
    where p is the fraction of the sample >= x. The first row has p = 1 and
    p never increases along the curve.
    """

    points: np.ndarray

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def p(self) -> np.ndarray:
        return self.points[:, 1]

    def fraction_at_least(self, threshold: float) -> float:
        """Empirical fraction of the sample >= the smallest point x >= threshold.

        Returns 0.0 when the threshold exceeds every sample value.
        """
        idx = np.searchsorted(self.x, threshold, side="left")
        if idx == len(self.points):
            return 0.0
        return float(self.points[idx, 1])


def rescale_group(group: Group) -> RescaledSample:
    """Divide each member's count by the group mean; rank order is preserved."""
    reads = np.asarray(group.reads, dtype=float)
    if reads.size == 0:
        raise ValueError("cannot rescale an empty group")
    r0 = float(reads.mean())
    if r0 == 0.0:
        raise AllUnreadGroupError(f"group {group.key} has only zero counts")
    return RescaledSample(key=group.key, values=reads / r0, r0=r0)


def collapse(samples: Sequence[RescaledSample]) -> np.ndarray:
    """Pool rescaled strata into one distribution.

    Unweighted concatenation (each publication counts once) in GroupKey
    order, so the output is reproducible regardless of input ordering.
    """
    if not samples:
        raise ValueError("nothing to collapse")
    ordered = sorted(samples, key=lambda s: s.key)
    return np.concatenate([s.values for s in ordered])


def ccdf(values: Sequence[float]) -> CcdfCurve:
    """Empirical CCDF with one point per distinct value.

    p at x is the fraction of values >= x (inclusive, matching survival-style
    plots of count data).
    """
    arr = np.sort(np.asarray(values, dtype=float))
    if arr.size == 0:
        raise ValueError("cannot compute the CCDF of an empty sample")
    xs = np.unique(arr)
    # fraction >= x: everything from the first index where arr == x onwards
    first = np.searchsorted(arr, xs, side="left")
    ps = (arr.size - first) / arr.size
    return CcdfCurve(points=np.column_stack([xs, ps]))


def _slug(label: str) -> str:
    return "".join(c if c.isalnum() else "_" for c in label.strip()).strip("_").lower()


def ccdf_filename(year: int, field: str | None = None) -> str:
    """Per-stratum curves are ``ccdf_<field>_<year>.tsv``; the pooled curve
    of a year is ``ccdf_merged_<year>.tsv``."""
    if field is None:
        return f"ccdf_merged_{year}.tsv"
    return f"ccdf_{_slug(field)}_{year}.tsv"


def write_ccdf_tsv(curve: CcdfCurve, target) -> None:
    """Write a curve as two-column TSV (x, p), full precision."""
    own = isinstance(target, (str, Path))
    stream = open(target, "w", encoding="utf-8", newline="") if own else target
    try:
        stream.write("x\tp\n")
        for x, p in curve.points:
            stream.write(f"{float(x)!r}\t{float(p)!r}\n")
    finally:
        if own:
            stream.close()
