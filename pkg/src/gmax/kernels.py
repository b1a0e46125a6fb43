"""Covariance kernels on [0, 1] and certification of two-sided Holder bounds.

Process families
----------------
FBM              fractional Brownian motion, R(t,s) = (t^2H + s^2H - |t-s|^2H)/2
SUBFBM           sub-fractional Brownian motion
BIFBM            bi-fractional Brownian motion with second exponent K
FREDHOLM         X_t = int_0^1 k(t,u) dB_u for a user-supplied kernel grid
WIENER_INTEGRAL  X_t = int_0^t f dB^H for a user-supplied integrand

Everything here is a pure function of its arguments; a ProcessSpec is a frozen
bag of parameters plus optional grid data.  ``certify_quasihelix`` checks the
two-sided increment bound

    C1 |t-s|^H1  <=  || X_t - X_s ||_2  <=  C2 |t-s|^H2

on all pairs of a uniform grid and reports the worst ratios with witnesses.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass

import numpy as np

from .frac_calculus import GridFunction, wiener_cov_matrix, wiener_integral_cov

__all__ = [
    "FBM",
    "SUBFBM",
    "BIFBM",
    "FREDHOLM",
    "WIENER_INTEGRAL",
    "FAMILIES",
    "ProcessSpec",
    "HolderCertificate",
    "fbm_cov",
    "subfbm_cov",
    "bifbm_cov",
    "covariance",
    "covariance_matrix",
    "increment_l2",
    "certify_quasihelix",
    "default_holder_constants",
    "fredholm_increment_sq",
    "limit_cov_H_to_0",
    "load_kernel_csv",
    "save_kernel_csv",
    "load_process_spec",
    "save_process_spec",
]

FBM = "FBM"
SUBFBM = "SUBFBM"
BIFBM = "BIFBM"
FREDHOLM = "FREDHOLM"
WIENER_INTEGRAL = "WIENER_INTEGRAL"
FAMILIES = (FBM, SUBFBM, BIFBM, FREDHOLM, WIENER_INTEGRAL)


class ConsistencyError(RuntimeError):
    """A computed quantity violates a structural identity beyond tolerance."""


# ---------------------------------------------------------------------------
# closed-form covariances
# ---------------------------------------------------------------------------

def _check_H(H: float, closed: bool) -> None:
    hi_ok = H <= 1.0 if closed else H < 1.0
    if not (H > 0.0 and hi_ok):
        rng = "(0, 1]" if closed else "(0, 1)"
        raise ValueError(f"H must be in {rng}, got {H!r}")


def fbm_cov(t: float, s: float, H: float) -> float:
    """Fractional Brownian covariance (t^2H + s^2H - |t-s|^2H)/2, H in (0, 1]."""
    _check_H(H, closed=True)
    if t < 0 or s < 0:
        raise ValueError("t and s must be nonnegative")
    return 0.5 * (t ** (2 * H) + s ** (2 * H) - abs(t - s) ** (2 * H))


def subfbm_cov(t: float, s: float, H: float) -> float:
    """Sub-fractional Brownian covariance, H in (0, 1).

    t^2H + s^2H - ((t+s)^2H + |t-s|^2H)/2; coincides with Brownian motion at
    H = 1/2 and has variance (2 - 2^(2H-1)) t^2H.
    """
    _check_H(H, closed=False)
    if t < 0 or s < 0:
        raise ValueError("t and s must be nonnegative")
    return t ** (2 * H) + s ** (2 * H) - 0.5 * ((t + s) ** (2 * H) + abs(t - s) ** (2 * H))


def bifbm_cov(t: float, s: float, H: float, K: float) -> float:
    """Bi-fractional Brownian covariance 2^-K ((t^2H + s^2H)^K - |t-s|^2HK).

    H in (0, 1), K in (0, 1]; K = 1 recovers the fractional Brownian case.
    """
    _check_H(H, closed=False)
    if not 0.0 < K <= 1.0:
        raise ValueError(f"K must be in (0, 1], got {K!r}")
    if t < 0 or s < 0:
        raise ValueError("t and s must be nonnegative")
    return 2.0 ** (-K) * ((t ** (2 * H) + s ** (2 * H)) ** K - abs(t - s) ** (2 * H * K))


def limit_cov_H_to_0(t: float, s: float) -> float:
    """Covariance of the weak limit of fBm as H -> 0.

    0 when t = 0 or s = 0; otherwise 1 on the diagonal and 1/2 off it (a unit
    white-noise field plus an independent common offset of variance 1/2).
    fbm_cov(t, s, H) converges to this value pointwise as H -> 0.
    """
    if t < 0 or s < 0:
        raise ValueError("t and s must be nonnegative")
    if t == 0.0 or s == 0.0:
        return 0.0
    return 1.0 if t == s else 0.5


# ---------------------------------------------------------------------------
# process specifications
# ---------------------------------------------------------------------------

@dataclass
class ProcessSpec:
    """Parameters of one process family, plus grid data where required.

    kernel_grid (FREDHOLM): values of k(t, u) on a uniform (q+1) x (q+1) grid
    over [0, 1]^2, rows indexed by t.  integrand (WIENER_INTEGRAL): the f of
    int_0^t f dB^H as a GridFunction, ideally with derivative samples.
    """

    family: str
    H: float | None = None
    K: float | None = None
    C: float = 1.0
    kernel_grid: np.ndarray | None = None
    integrand: GridFunction | None = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.C <= 0:
            raise ValueError(f"scale C must be positive, got {self.C!r}")
        if self.family == FBM:
            _check_H(self.H, closed=True)
        elif self.family in (SUBFBM, BIFBM, WIENER_INTEGRAL):
            _check_H(self.H, closed=False)
        if self.family == BIFBM:
            if self.K is None or not 0.0 < self.K <= 1.0:
                raise ValueError(f"K must be in (0, 1] for {BIFBM}, got {self.K!r}")
        if self.family == FREDHOLM:
            if self.kernel_grid is None:
                raise ValueError("FREDHOLM requires a kernel_grid")
            self.kernel_grid = np.asarray(self.kernel_grid, dtype=float)
            kg = self.kernel_grid
            if kg.ndim != 2 or kg.shape[0] != kg.shape[1] or kg.shape[0] < 2:
                raise ValueError("kernel_grid must be a square matrix of size >= 2")
            if not np.all(np.isfinite(kg)):
                raise ValueError("kernel_grid must be finite")
        if self.family == WIENER_INTEGRAL and self.integrand is None:
            raise ValueError("WIENER_INTEGRAL requires an integrand")

    def label(self) -> str:
        bits = [self.family]
        if self.H is not None:
            bits.append(f"H={self.H:g}")
        if self.family == BIFBM:
            bits.append(f"K={self.K:g}")
        if self.C != 1.0:
            bits.append(f"C={self.C:g}")
        return " ".join(bits)


def covariance(spec: ProcessSpec, t: float, s: float) -> float:
    """R(t, s) of the scaled process C * X; single-point evaluation.

    FREDHOLM/WIENER_INTEGRAL go through quadrature on the stored grids and
    require t, s to be grid points.
    """
    c2 = spec.C ** 2
    if spec.family == FBM:
        return c2 * fbm_cov(t, s, spec.H)
    if spec.family == SUBFBM:
        return c2 * subfbm_cov(t, s, spec.H)
    if spec.family == BIFBM:
        return c2 * bifbm_cov(t, s, spec.H, spec.K)
    if spec.family == FREDHOLM:
        kg = spec.kernel_grid
        q = kg.shape[0] - 1
        it, js = _grid_index(t, q), _grid_index(s, q)
        return c2 * float(np.trapezoid(kg[it] * kg[js], dx=1.0 / q))
    return c2 * wiener_integral_cov(spec.integrand, t, s, spec.H)


def _grid_index(t: float, q: int) -> int:
    j = int(round(t * q))
    if not 0 <= j <= q or abs(t - j / q) > 1e-9:
        raise ValueError(f"t={t!r} is not a point of the {q}-cell grid")
    return j


def covariance_matrix(spec: ProcessSpec, ts: np.ndarray) -> np.ndarray:
    """Covariance matrix of the scaled process over the given time points."""
    ts = np.asarray(ts, dtype=float)
    c2 = spec.C ** 2
    if spec.family in (FBM, SUBFBM, BIFBM):
        tt = ts[:, None]
        ss = ts[None, :]
        H = spec.H
        if spec.family == FBM:
            R = 0.5 * (tt ** (2 * H) + ss ** (2 * H) - np.abs(tt - ss) ** (2 * H))
        elif spec.family == SUBFBM:
            R = tt ** (2 * H) + ss ** (2 * H) - 0.5 * ((tt + ss) ** (2 * H) + np.abs(tt - ss) ** (2 * H))
        else:
            K = spec.K
            R = 2.0 ** (-K) * ((tt ** (2 * H) + ss ** (2 * H)) ** K - np.abs(tt - ss) ** (2 * H * K))
        return c2 * R
    if spec.family == FREDHOLM:
        kg = spec.kernel_grid
        q = kg.shape[0] - 1
        idx = [_grid_index(t, q) for t in ts]
        rows = kg[idx]
        w = np.full(q + 1, 1.0 / q)
        w[0] = w[-1] = 0.5 / q
        return c2 * (rows * w) @ rows.T
    return c2 * wiener_cov_matrix(spec.integrand, spec.H, ts)


def increment_l2(spec: ProcessSpec, t: float, s: float) -> float:
    """L2 norm of the increment, sqrt(R(t,t) + R(s,s) - 2 R(t,s)).

    A tiny negative radicand (>= -1e-12) is clamped to 0; anything more
    negative indicates an inconsistent covariance and raises.
    """
    if spec.family in (FREDHOLM, WIENER_INTEGRAL):
        R = covariance_matrix(spec, np.asarray([t, s]))
        v = R[0, 0] + R[1, 1] - 2.0 * R[0, 1]
    else:
        v = covariance(spec, t, t) + covariance(spec, s, s) - 2.0 * covariance(spec, t, s)
    if v < -1e-12:
        raise ConsistencyError(
            f"negative squared increment {v!r} at (t, s)=({t!r}, {s!r}) for {spec.label()}")
    return float(np.sqrt(max(v, 0.0)))


def fredholm_increment_sq(kernel_grid: np.ndarray, t_idx: int, s_idx: int) -> float:
    """Trapezoidal approximation of int_0^1 (k(t,u) - k(s,u))^2 du by row index."""
    kg = np.asarray(kernel_grid, dtype=float)
    if kg.ndim != 2:
        raise ValueError("kernel_grid must be a matrix")
    diff = kg[t_idx] - kg[s_idx]
    return float(np.trapezoid(diff * diff, dx=1.0 / (kg.shape[1] - 1)))


# ---------------------------------------------------------------------------
# Holder certification
# ---------------------------------------------------------------------------

@dataclass
class HolderCertificate:
    """Grid check of C1 |t-s|^H1 <= ||X_t - X_s|| <= C2 |t-s|^H2.

    worst_lower_pair / worst_upper_pair are (t, s, ratio) with ratio the
    smallest ||X_t - X_s|| / |t-s|^H1 resp. largest ||X_t - X_s|| / |t-s|^H2
    over all grid pairs; passed means both inequalities hold everywhere (with
    relative slack 1e-10 for roundoff).
    """

    C1: float
    H1: float
    C2: float
    H2: float
    grid_size: int
    passed: bool
    worst_lower_pair: tuple[float, float, float]
    worst_upper_pair: tuple[float, float, float]

    def to_dict(self) -> dict:
        return {
            "C1": self.C1, "H1": self.H1, "C2": self.C2, "H2": self.H2,
            "grid_size": self.grid_size, "passed": self.passed,
            "worst_lower_pair": list(self.worst_lower_pair),
            "worst_upper_pair": list(self.worst_upper_pair),
        }


_CERT_SLACK = 1e-10


def certify_quasihelix(spec: ProcessSpec, C1: float, H1: float, C2: float,
                       H2: float, grid_size: int = 257) -> HolderCertificate:
    """Check the two-sided Holder bound on all pairs of a uniform grid.

    grid_size is the number of grid points {i/(grid_size-1)}.  All O(grid^2)
    pairs are checked deterministically so the witnesses are reproducible.
    """
    if grid_size < 2:
        raise ValueError(f"grid_size must be >= 2, got {grid_size!r}")
    for name, v in (("C1", C1), ("H1", H1), ("C2", C2), ("H2", H2)):
        if v <= 0:
            raise ValueError(f"{name} must be positive, got {v!r}")
    ts = np.linspace(0.0, 1.0, grid_size)
    R = covariance_matrix(spec, ts)
    d = np.diag(R)
    sq = d[:, None] + d[None, :] - 2.0 * R
    bad = sq.min()
    if bad < -1e-10:
        raise ConsistencyError(f"covariance of {spec.label()} is not PSD on the grid ({bad!r})")
    dist = np.sqrt(np.maximum(sq, 0.0))
    gap = np.abs(ts[:, None] - ts[None, :])
    iu = np.triu_indices(grid_size, k=1)
    dd, gg = dist[iu], gap[iu]
    rlo = dd / gg ** H1
    rhi = dd / gg ** H2
    klo = int(np.argmin(rlo))
    khi = int(np.argmax(rhi))
    worst_lower = (float(ts[iu[1][klo]]), float(ts[iu[0][klo]]), float(rlo[klo]))
    worst_upper = (float(ts[iu[1][khi]]), float(ts[iu[0][khi]]), float(rhi[khi]))
    passed = bool(rlo[klo] >= C1 * (1.0 - _CERT_SLACK) and rhi[khi] <= C2 * (1.0 + _CERT_SLACK))
    return HolderCertificate(C1, H1, C2, H2, grid_size, passed, worst_lower, worst_upper)


def default_holder_constants(spec: ProcessSpec) -> tuple[float, float, float, float]:
    """(C1, H1, C2, H2) known in closed form for the scaled process.

    FBM: equality with constants (C, H, C, H).  SUBFBM: (C, H,
    C sqrt(2 - 2^(H-1)), H) — the lower constant is only valid for H <= 1/2.
    BIFBM: (C 2^(-K/2), HK, C 2^((1-K)/2), HK).  No closed form is available
    for the grid-data families.
    """
    C, H = spec.C, spec.H
    if spec.family == FBM:
        return C, H, C, H
    if spec.family == SUBFBM:
        return C, H, C * float(np.sqrt(2.0 - 2.0 ** (H - 1.0))), H
    if spec.family == BIFBM:
        K = spec.K
        return C * 2.0 ** (-K / 2.0), H * K, C * 2.0 ** ((1.0 - K) / 2.0), H * K
    raise ValueError(f"no default constants for family {spec.family}; pass them explicitly")


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

def save_kernel_csv(kernel_grid: np.ndarray, path) -> None:
    """Write a kernel grid as CSV rows t,s,value in row-major order."""
    kg = np.asarray(kernel_grid, dtype=float)
    q = kg.shape[0] - 1
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "s", "value"])
        for i in range(q + 1):
            for j in range(q + 1):
                w.writerow([repr(i / q), repr(j / q), repr(float(kg[i, j]))])


def load_kernel_csv(path) -> np.ndarray:
    """Read a t,s,value CSV back into a square matrix (rows indexed by t)."""
    vals = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(row for row in fh if not row.startswith("#"))
        next(reader)  # header
        for row in reader:
            if row:
                vals.append(float(row[2]))
    m = len(vals)
    n = int(round(np.sqrt(m)))
    if n * n != m or n < 2:
        raise ValueError(f"{path}: expected a square row-major grid, got {m} values")
    return np.asarray(vals).reshape(n, n)


def save_process_spec(spec: ProcessSpec, path) -> None:
    """Serialize to JSON with fields family,H,K,C,kernel_file,integrand_file.

    Grid data goes to sibling CSV files named after the JSON stem; the JSON
    stores their paths relative to its own directory.
    """
    base, _ = os.path.splitext(path)
    doc = {"family": spec.family, "H": spec.H, "K": spec.K, "C": spec.C,
           "kernel_file": None, "integrand_file": None}
    if spec.kernel_grid is not None:
        kpath = base + "_kernel.csv"
        save_kernel_csv(spec.kernel_grid, kpath)
        doc["kernel_file"] = os.path.basename(kpath)
    if spec.integrand is not None:
        ipath = base + "_integrand.csv"
        spec.integrand.write_csv(ipath)
        doc["integrand_file"] = os.path.basename(ipath)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_process_spec(path) -> ProcessSpec:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    here = os.path.dirname(os.path.abspath(path))
    kg = None
    ig = None
    if doc.get("kernel_file"):
        kg = load_kernel_csv(os.path.join(here, doc["kernel_file"]))
    if doc.get("integrand_file"):
        ig = GridFunction.read_csv(os.path.join(here, doc["integrand_file"]))
    return ProcessSpec(family=doc["family"], H=doc.get("H"), K=doc.get("K"),
                       C=doc.get("C", 1.0), kernel_grid=kg, integrand=ig)
