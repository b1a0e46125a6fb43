"""Finite-dimensional Gaussian inequalities and dyadic chaining nets.

Calculators for the classical comparison tools behind the closed-form bounds:
Sudakov's minorant from the minimal pairwise L2 distance, Chatterjee's bound
on the difference of expected maxima of two Gaussian vectors, a generic
chaining majorant over nested nets with the citable constant L = 3.75, and
the Mills-ratio tail bound.  Everything is a pure function; nets are built
once and reused.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import CHAINING_L
from .kernels import ProcessSpec, covariance_matrix

__all__ = [
    "FiniteGaussian",
    "ChainingNets",
    "sudakov_lower",
    "chatterjee_diff_bound",
    "dyadic_nets",
    "chaining_upper",
    "mills_tail_bound",
]


@dataclass
class FiniteGaussian:
    """A zero-mean Gaussian vector indexed by time points with its covariance."""

    points: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        self.points = np.asarray(self.points, dtype=float)
        self.cov = np.asarray(self.cov, dtype=float)
        k = self.points.size
        if self.cov.shape != (k, k):
            raise ValueError(
                f"cov shape {self.cov.shape} does not match {k} points")
        if not np.allclose(self.cov, self.cov.T, atol=1e-12):
            raise ValueError("cov must be symmetric")
        if k and np.linalg.eigvalsh(self.cov).min() < -1e-8:
            raise ValueError("cov must be positive semidefinite (min eigenvalue < -1e-8)")

    @classmethod
    def from_spec(cls, spec: ProcessSpec, points) -> "FiniteGaussian":
        points = np.asarray(points, dtype=float)
        return cls(points, covariance_matrix(spec, points))

    def squared_distances(self) -> np.ndarray:
        """Matrix of squared increment norms ||X_i - X_j||^2."""
        d = np.diag(self.cov)
        return np.maximum(d[:, None] + d[None, :] - 2.0 * self.cov, 0.0)


def sudakov_lower(fg: FiniteGaussian) -> float:
    """Sudakov minorant sqrt(log2 k / (2 pi)) * min_{i != j} ||X_i - X_j||.

    A lower bound for E max of the zero-mean vector; zero whenever two points
    coincide in L2.
    """
    k = fg.points.size
    if k < 2:
        raise ValueError(f"need at least 2 points, got {k}")
    sq = fg.squared_distances()
    off = sq[np.triu_indices(k, k=1)]
    return float(np.sqrt(np.log2(k) / (2.0 * np.pi)) * np.sqrt(off.min()))


def chatterjee_diff_bound(fga: FiniteGaussian, fgb: FiniteGaussian) -> float:
    """Bound sqrt(max_{ij} |a_ij - b_ij| ln k) for |E max X - E max Y|.

    a and b are the squared pairwise L2 distances of the two vectors, which
    must share a dimension k >= 2 (and are assumed to share means).
    """
    k = fga.points.size
    if fgb.points.size != k:
        raise ValueError(
            f"dimension mismatch: {k} vs {fgb.points.size} points")
    if k < 2:
        raise ValueError(f"need at least 2 points, got {k}")
    gap = np.abs(fga.squared_distances() - fgb.squared_distances()).max()
    return float(np.sqrt(gap * np.log(k)))


# ---------------------------------------------------------------------------
# chaining
# ---------------------------------------------------------------------------

@dataclass
class ChainingNets:
    """Nested finite subsets of [0, 1], level k of size at most 2^(2^k)."""

    levels: list[np.ndarray]

    def __post_init__(self) -> None:
        if not self.levels:
            raise ValueError("need at least one net level")
        self.levels = [np.unique(np.asarray(lv, dtype=float)) for lv in self.levels]
        if self.levels[0].size != 1:
            raise ValueError("level 0 must contain exactly one point")
        for k, lv in enumerate(self.levels):
            if lv.size > 2 ** (2 ** k):
                raise ValueError(
                    f"level {k} has {lv.size} points, above the ceiling {2 ** (2 ** k)}")
            if k and not np.isin(self.levels[k - 1], lv).all():
                raise ValueError(f"level {k} does not contain level {k - 1}")

    @property
    def final(self) -> np.ndarray:
        return self.levels[-1]


def dyadic_nets(depth: int, extra=None) -> ChainingNets:
    """The dyadic nets T_0 = {1/2}, T_k = {j 2^(-2^k), j = 1..2^(2^k)}.

    With `extra`, one more level T_depth U extra is appended (the device used
    to bring an arbitrary grid into a chaining net); it must respect the
    cardinality ceiling of its level index, otherwise the construction fails
    and the caller should increase depth.
    """
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth!r}")
    if 2 ** depth > 60:
        raise ValueError(f"depth {depth} makes 2^(2^depth) unrepresentable")
    levels = [np.array([0.5])]
    for k in range(1, depth + 1):
        step = 2.0 ** -(2 ** k)
        levels.append(np.arange(1, 2 ** (2 ** k) + 1) * step)
    if extra is not None:
        extra = np.asarray(extra, dtype=float)
        union = np.union1d(levels[-1], extra)
        if union.size > 2 ** (2 ** (depth + 1)):
            raise ValueError(
                f"union level has {union.size} points, above the ceiling "
                f"{2 ** (2 ** (depth + 1))} of level {depth + 1}; increase depth")
        levels.append(union)
    return ChainingNets(levels)


def _norm_matrix(increment_norm, ts: np.ndarray, ss: np.ndarray) -> np.ndarray:
    """Evaluate the norm oracle on a (ts x ss) grid, broadcasting if possible."""
    try:
        out = np.asarray(increment_norm(ts[:, None], ss[None, :]), dtype=float)
        if out.shape == (ts.size, ss.size):
            return out
    except Exception:
        pass
    out = np.empty((ts.size, ss.size))
    for i, t in enumerate(ts):
        for j, s in enumerate(ss):
            out[i, j] = increment_norm(t, s)
    return out


def chaining_upper(increment_norm, nets: ChainingNets, L: float = CHAINING_L) -> float:
    """Chaining majorant L max_{t in T} sum_k 2^(k/2) min_{s in T_k} ||X_t - X_s||.

    T is the final net level; the norm oracle is called on index grids (it
    should broadcast over numpy arrays, and may fall back to scalars).  The
    final level's own term vanishes because every t lies in it.
    """
    T = nets.final
    total = np.zeros(T.size)
    for k, lv in enumerate(nets.levels[:-1]):
        # points of T already in this level contribute 0 (zero-diagonal norm)
        todo = np.flatnonzero(~np.isin(T, lv))
        if todo.size == 0:
            continue
        dmin = np.zeros(T.size)
        chunk = max(1, (1 << 22) // max(lv.size, 1))
        for a in range(0, todo.size, chunk):
            sel = todo[a: a + chunk]
            dmin[sel] = _norm_matrix(increment_norm, T[sel], lv).min(axis=1)
        total += 2.0 ** (k / 2.0) * dmin
    return float(L * total.max())


def mills_tail_bound(x: float, sigma: float) -> float:
    """Mills-ratio tail bound (sigma / (x sqrt(2 pi))) exp(-x^2 / (2 sigma^2)).

    Dominates P(xi >= x) for xi ~ N(0, sigma^2), x > 0; invariant under the
    scaling (x, sigma) -> (c x, c sigma).
    """
    if x <= 0 or sigma <= 0:
        raise ValueError(f"x and sigma must be positive, got x={x!r}, sigma={sigma!r}")
    r = x / sigma
    return float(np.exp(-0.5 * r * r) / (r * np.sqrt(2.0 * np.pi)))
