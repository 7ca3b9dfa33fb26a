"""Frequency/co-occurrence to circle radii and ideal distances.

Words are drawn as circles sized by document frequency. The ideal distance
between two word circles is chosen so that the fraction of each circle
covered by the overlap lens tracks the fraction of that word's articles
shared with the other word: each side contributes an overlap extent
r * c / f along the center line, and the ideal distance is the sum of the
radii minus both contributions. Words whose combined overlap is at or below
a small threshold fall into a weak-relation regime that interpolates
linearly out to the maximal separation distance, so completely unrelated
words sit ``d_max`` apart.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analyzer import AnalysisSnapshot


class EulerError(ValueError):
    """Raised for inputs outside the frequency/co-occurrence invariants."""


@dataclass(frozen=True)
class WordStat:
    word: str
    frequency: int

    def __post_init__(self):
        if self.frequency < 1:
            raise EulerError(f"word {self.word!r}: frequency must be >= 1")


@dataclass(frozen=True)
class EulerParams:
    """Geometry of the word-circle mapping.

    ``d_max`` is the distance assigned to completely unrelated word pairs
    and must exceed any possible tangent distance (2 * r_max).
    ``epsilon_overlap`` is the combined-overlap level below which a pair is
    treated as weakly related; it may not exceed ``r_min`` so the weak
    branch never drops below zero distance.
    """

    r_min: float = 10.0
    r_max: float = 50.0
    d_max: float = 500.0
    epsilon_overlap: float = 0.0

    def __post_init__(self):
        if not (0 < self.r_min <= self.r_max):
            raise EulerError("need 0 < r_min <= r_max")
        if self.d_max <= 2 * self.r_max:
            raise EulerError("need d_max > 2 * r_max")
        if not (0 <= self.epsilon_overlap <= self.r_min):
            raise EulerError("need 0 <= epsilon_overlap <= r_min")


def radius_of(f: int, f_max: int, params: EulerParams) -> float:
    """Radius for a word seen in ``f`` of the window's articles.

    Square-root scaling of relative frequency keeps circle area roughly
    proportional to frequency.
    """
    if f_max < 1:
        raise EulerError("f_max must be >= 1")
    if not (1 <= f <= f_max):
        raise EulerError(f"need 1 <= f <= f_max, got f={f}, f_max={f_max}")
    return params.r_min + (params.r_max - params.r_min) * math.sqrt(f / f_max)


def overlap_from(c: int, f: int, r: float) -> float:
    """Overlap extent contributed by one side of a pair: r * c / f."""
    if f < 1:
        raise EulerError("f must be >= 1")
    if not (0 <= c <= f):
        raise EulerError(f"need 0 <= c <= f, got c={c}, f={f}")
    return r * c / f


def ideal_distance(
    stat_i: WordStat,
    stat_j: WordStat,
    c: int,
    r_i: float,
    r_j: float,
    params: EulerParams,
) -> float:
    """Ideal center distance for one word pair.

    Strong relation (mean per-side overlap above ``epsilon_overlap``):
    D = r_i + r_j - (o_i + o_j) with o = overlap_from(c, f, r), so a pair
    co-occurring in every article of both words becomes coincident.

    Weak relation: D interpolates linearly between the tangent distance
    r_i + r_j - 2 * epsilon_overlap at the crossover count c* and ``d_max``
    at c = 0, where c* is the count at which the mean overlap reaches
    ``epsilon_overlap`` (never below 1). Continuous and strictly
    decreasing in c; result lies in [0, d_max].
    """
    o_i = overlap_from(c, stat_i.frequency, r_i)
    o_j = overlap_from(c, stat_j.frequency, r_j)
    mean_overlap = (o_i + o_j) / 2
    if mean_overlap > params.epsilon_overlap:
        return r_i + r_j - (o_i + o_j)
    # Mean overlap grows linearly in c; find the real-valued crossover.
    per_count = (r_i / stat_i.frequency + r_j / stat_j.frequency) / 2
    c_star = max(1.0, params.epsilon_overlap / per_count)
    tangent = r_i + r_j - 2 * params.epsilon_overlap
    return params.d_max - (params.d_max - tangent) * (c / c_star)


def build_ideal_matrix(
    snapshot: AnalysisSnapshot, params: EulerParams
) -> tuple[dict[str, float], np.ndarray]:
    """Radii and the full ideal distance matrix for a snapshot's words.

    Words are taken in snapshot order; an empty snapshot yields empty
    outputs.
    """
    words = snapshot.words
    n = len(words)
    if n == 0:
        return {}, np.zeros((0, 0))
    f_max = max(snapshot.freq[w] for w in words)
    radii = {w: radius_of(snapshot.freq[w], f_max, params) for w in words}
    stats = {w: WordStat(w, snapshot.freq[w]) for w in words}
    matrix = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            u, v = words[i], words[j]
            d = ideal_distance(stats[u], stats[v], snapshot.cooc.get(u, v), radii[u], radii[v], params)
            matrix[i, j] = d
            matrix[j, i] = d
    return radii, matrix


def lens_area(r1: float, r2: float, d: float) -> float:
    """Exact area of the intersection of two circles at center distance d."""
    if r1 <= 0 or r2 <= 0:
        raise EulerError("radii must be > 0")
    if d < 0:
        raise EulerError("distance must be >= 0")
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        return math.pi * min(r1, r2) ** 2
    # Two circular segments joined along the common chord.
    a1 = math.acos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1))
    a2 = math.acos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2))
    triangle = 0.5 * math.sqrt(
        (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)
    )
    return r1 * r1 * a1 + r2 * r2 * a2 - triangle
