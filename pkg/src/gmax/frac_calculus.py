"""Right-sided Riemann-Liouville operators on [0, 1] and Wiener-integral covariances.

Grid functions live on the uniform grid t_i = i/q, i = 0..q.  The fractional
integral of order ``a`` in (0, 1] is

    (I^a f)(t) = (1/Gamma(a)) * int_t^1 f(s) (s - t)^(a-1) ds,

its order-0 limit is the identity, and negative orders in (-1, 0) are
derivatives, (I^a f)(t) = -d/dt (I^(a+1) f)(t).  On top of these sits the
Volterra map ``kH_apply`` that sends an integrand f to the kernel of the
Wiener integral int_0^t f dB^H, normalised so that f = 1 reproduces the
fractional Brownian covariance exactly.

Quadrature treats the endpoint singularities (s - t)^(a-1), s^(H-1/2) and
t^(1/2-H) by integrating the singular power exactly against a piecewise-linear
interpolant of the remaining factor; plain trapezoid rules diverge here.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as _fft
from scipy.special import gamma as _gamma

__all__ = [
    "GridFunction",
    "rl_integral_right",
    "rl_identity",
    "rl_derivative_right",
    "c_H",
    "kH_apply",
    "wiener_integral_cov",
    "wiener_cov_matrix",
    "check_sufficient_conditions",
    "SufficiencyReport",
]

# Working resolution for covariance quadrature: refine the stored grid until
# it has at least this many cells (refinement factor capped below).
_TARGET_CELLS = 65536
_MAX_REFINE = 64


@dataclass
class GridFunction:
    """Samples of a function on the uniform grid i/q, i = 0..q.

    Parameters
    ----------
    values : array of shape (q+1,)
        Function values; must be finite.
    derivative : optional array of shape (q+1,)
        Samples of f'.  When absent, consumers that need f' fall back to
        central differences of ``values``.
    """

    values: np.ndarray
    derivative: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 2:
            raise ValueError("values must be a 1-d array with at least 2 samples")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("values must be finite")
        if self.derivative is not None:
            self.derivative = np.asarray(self.derivative, dtype=float)
            if self.derivative.shape != self.values.shape:
                raise ValueError("derivative must match values in shape")

    @property
    def resolution(self) -> int:
        """Number of cells q."""
        return self.values.size - 1

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.values.size)

    def index_of(self, t: float) -> int:
        """Grid index of t; raises if t is not a grid point."""
        q = self.resolution
        j = int(round(t * q))
        if not 0 <= j <= q or abs(t - j / q) > 1e-9:
            raise ValueError(f"t={t!r} is not a point of the {q}-cell grid")
        return j

    def derivative_values(self) -> np.ndarray:
        """Stored derivative samples, or central differences of the values."""
        if self.derivative is not None:
            return self.derivative
        v, q = self.values, self.resolution
        d = np.empty_like(v)
        d[1:-1] = (v[2:] - v[:-2]) * (q / 2.0)
        d[0] = (v[1] - v[0]) * q
        d[-1] = (v[-1] - v[-2]) * q
        return d

    @classmethod
    def from_callable(cls, f, q: int, fprime=None) -> "GridFunction":
        t = np.linspace(0.0, 1.0, q + 1)
        d = None if fprime is None else np.asarray([fprime(x) for x in t], dtype=float)
        return cls(np.asarray([f(x) for x in t], dtype=float), d)

    @classmethod
    def read_csv(cls, path) -> "GridFunction":
        """Load from CSV with columns t,value[,derivative] on a uniform grid."""
        ts, vs, ds = [], [], []
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(row for row in fh if not row.startswith("#"))
            header = next(reader)
            has_d = len(header) >= 3
            for row in reader:
                if not row:
                    continue
                ts.append(float(row[0]))
                vs.append(float(row[1]))
                if has_d:
                    ds.append(float(row[2]))
        t = np.asarray(ts)
        q = len(t) - 1
        if q < 1 or np.abs(t - np.linspace(0.0, 1.0, q + 1)).max() > 1e-9:
            raise ValueError(f"{path}: expected a uniform grid over [0, 1]")
        return cls(np.asarray(vs), np.asarray(ds) if ds else None)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            cols = ["t", "value"] + (["derivative"] if self.derivative is not None else [])
            w.writerow(cols)
            for i, t in enumerate(self.grid):
                row = [repr(float(t)), repr(float(self.values[i]))]
                if self.derivative is not None:
                    row.append(repr(float(self.derivative[i])))
                w.writerow(row)


# ---------------------------------------------------------------------------
# product-integration core
# ---------------------------------------------------------------------------

def _power_weights(beta: float, ncells: int, delta: float):
    """Exact integrals of x^(beta-1) against the two hat functions per cell.

    A[k], B[k] weight the left/right endpoint of cell [k*delta, (k+1)*delta]
    so that sum(f[k] A[k] + f[k+1] B[k]) integrates the piecewise-linear
    interpolant of f against x^(beta-1) from 0 with no singularity error.
    """
    k = np.arange(ncells, dtype=float)
    kp = k + 1.0
    pa = (kp ** beta - k ** beta) / beta
    pb = (kp ** (beta + 1) - k ** (beta + 1)) / (beta + 1)
    A = delta ** beta * (kp * pa - pb)
    B = delta ** beta * (pb - k * pa)
    return A, B


def _corr_nonneg(fm: np.ndarray, w: np.ndarray) -> np.ndarray:
    """c[j] = sum_i fm[i] * w[i-j] for j = 0..len(fm)-1 (zero-padded FFT)."""
    n = fm.size
    size = _fft.next_fast_len(2 * n)
    F = _fft.rfft(fm, size)
    W = _fft.rfft(w, size)
    return _fft.irfft(F * np.conj(W), size)[:n]


def _weighted_integral_all(gvals: np.ndarray, beta: float, delta: float,
                           upper: int, head_pow: float, fvals: np.ndarray) -> np.ndarray:
    """J[j] = int_{j*delta}^{upper*delta} ghat(s) (s - j*delta)^(beta-1) ds.

    ghat is piecewise linear through gvals.  When head_pow != 0 the integrand
    near s = 0 is really s^head_pow * f(s) * s^(beta-1) with f given by fvals;
    the first cell of J[0] is then replaced by the exact double-power integral
    against linear f, which removes the s = 0 singularity error.
    """
    q = gvals.size - 1
    A, B = _power_weights(beta, q, delta)
    w = np.zeros(q + 1)
    w[:q] += A
    w[1:] += B
    fm = np.where(np.arange(q + 1) <= upper, gvals, 0.0)
    J = _corr_nonneg(fm, w)
    # the masked convolution treats cell [upper] as if g dropped linearly to
    # zero past the truncation point; remove that spurious contribution
    j = np.arange(q + 1)
    k = upper - j
    ok = (k >= 0) & (k < q)
    J[ok] -= fm[upper] * A[k[ok]]
    J[upper:] = 0.0
    if head_pow != 0.0 and upper >= 1:
        p = head_pow + beta
        exact = delta ** p * (fvals[0] / p + (fvals[1] - fvals[0]) / (p + 1.0))
        J[0] += exact - (fm[0] * A[0] + fm[1] * B[0])
    return J


def _rl_integral_all(values: np.ndarray, alpha: float) -> np.ndarray:
    """(I^alpha f) at every grid point for alpha in (0, 1]."""
    q = values.size - 1
    return _weighted_integral_all(values, alpha, 1.0 / q, q, 0.0, values) / _gamma(alpha)


# ---------------------------------------------------------------------------
# public fractional operators
# ---------------------------------------------------------------------------

def rl_integral_right(f: GridFunction, alpha: float, t: float) -> float:
    """Right-sided fractional integral (I^alpha f)(t) for alpha in (0, 1].

    The weight (s - t)^(alpha-1) is integrated exactly on every cell against
    the piecewise-linear interpolant of f; t must be a grid point.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha!r}")
    j = f.index_of(t)
    return float(_rl_integral_all(f.values, alpha)[j])


def rl_identity(f: GridFunction, t: float) -> float:
    """Order-0 operator: returns f(t)."""
    return float(f.values[f.index_of(t)])


def rl_derivative_right(f: GridFunction, alpha: float, t: float) -> float:
    """Fractional derivative (I^alpha f)(t) = -d/dt (I^(alpha+1) f)(t), alpha in (-1, 0).

    The (alpha+1)-integral is differenced centrally with step equal to the
    grid spacing (one-sided at the endpoints).
    """
    if not -1.0 < alpha < 0.0:
        raise ValueError(f"alpha must be in (-1, 0), got {alpha!r}")
    j = f.index_of(t)
    q = f.resolution
    J = _rl_integral_all(f.values, alpha + 1.0)
    if j == 0:
        return float(-(J[1] - J[0]) * q)
    if j == q:
        return float(-(J[q] - J[q - 1]) * q)
    return float(-(J[j + 1] - J[j - 1]) * q / 2.0)


def c_H(H: float) -> float:
    """Normalising constant of the fractional Volterra kernel.

    c_H = sqrt(2H * Gamma(3/2 - H) / (Gamma(2 - 2H) * Gamma(H + 1/2)));
    c_{1/2} = 1.
    """
    if not 0.0 < H < 1.0:
        raise ValueError(f"H must be in (0, 1), got {H!r}")
    return float(np.sqrt(2.0 * H * _gamma(1.5 - H) / (_gamma(2.0 - 2.0 * H) * _gamma(H + 0.5))))


def _kh_regular(fvals: np.ndarray, H: float, upper: int):
    """Regular part of the Volterra kernel applied to f * 1_[0, upper/q).

    Returns (expo, R) with kernel K(u) = u**expo * R(u) on the grid and
    R = 0 past the truncation index.  Includes the Gamma(H + 1/2) factor that
    makes 1_[0,t) -> K an isometry onto the fractional Brownian covariance.
    """
    q = fvals.size - 1
    delta = 1.0 / q
    s = np.linspace(0.0, 1.0, q + 1)
    scale = c_H(H) * _gamma(H + 0.5)
    if H == 0.5:
        return 0.0, np.where(np.arange(q + 1) < upper, fvals, 0.0)
    if H > 0.5:
        a = H - 0.5
        g = s ** a * fvals
        J = _weighted_integral_all(g, a, delta, upper, a, fvals)
        return -a, scale / _gamma(a) * J
    h = H - 0.5
    g = np.zeros(q + 1)
    g[1:] = s[1:] ** h * fvals[1:]
    J = _weighted_integral_all(g, 1.0 + h, delta, upper, h, fvals) / _gamma(1.0 + h)
    I = np.zeros(q + 1)
    if upper >= 2:
        I[1:upper] = -(J[2:upper + 1] - J[0:upper - 1]) * (q / 2.0)
    if upper >= 1:
        I[0] = -(J[1] - J[0]) * q
    return -h, scale * I


def kh_cross_check(f: GridFunction, H: float, t: float) -> np.ndarray:
    """Kernel of int_0^t f dB^H by the integration-by-parts route (H < 1/2).

    Independent of the finite-difference branch in `_kh_regular`; intended for
    validation.  Returns kernel values on the grid (0 at u = 0).
    """
    if not 0.0 < H < 0.5:
        raise ValueError("cross-check form applies to H < 1/2 only")
    fvals = f.values
    fderiv = f.derivative_values()
    q = f.resolution
    upper = f.index_of(t)
    delta = 1.0 / q
    s = np.linspace(0.0, 1.0, q + 1)
    h = H - 0.5
    # g'(s) = h s^(h-1) f + s^h f'; integrate g'(s)(s-u)^h with the s -> 0
    # double power (s^(h-1) f term) handled exactly on the first cell
    gp = np.zeros(q + 1)
    gp[1:] = h * s[1:] ** (h - 1.0) * fvals[1:] + s[1:] ** h * fderiv[1:]
    # the s -> 0 blow-up of g' sits entirely in the first cell, which only
    # feeds W[0]; W[0] is never read below, so no special handling is needed
    W = _weighted_integral_all(gp, 1.0 + h, delta, upper, 0.0, fvals)
    gT = (upper / q) ** h * fvals[upper] if upper > 0 else 0.0
    scale = c_H(H) * _gamma(H + 0.5) / _gamma(1.0 + h)
    K = np.zeros(q + 1)
    u = s[1:upper]
    K[1:upper] = scale * u ** (-h) * (gT * ((upper / q) - u) ** h - W[1:upper])
    return K


def kH_apply(f: GridFunction, H: float) -> GridFunction:
    """Apply the fractional Volterra map to f over the whole interval.

    For H = 1/2 this is the identity.  For H != 1/2 the kernel carries a power
    singularity at u = 0 (H > 1/2) or u = 1-side truncation effects; the value
    stored at u = 0 is fixed to 0 by convention (a single point of measure
    zero; covariance quadrature never reads it).
    """
    if not 0.0 < H < 1.0:
        raise ValueError(f"H must be in (0, 1), got {H!r}")
    if H == 0.5:
        return GridFunction(f.values.copy(), None)
    q = f.resolution
    expo, R = _kh_regular(f.values, H, q)
    u = np.linspace(0.0, 1.0, q + 1)
    vals = np.zeros(q + 1)
    vals[1:] = u[1:] ** expo * R[1:]
    return GridFunction(vals, None)


# ---------------------------------------------------------------------------
# Wiener-integral covariances
# ---------------------------------------------------------------------------

def _refine(values: np.ndarray) -> tuple[np.ndarray, int]:
    q = values.size - 1
    r = 1
    while q * r < _TARGET_CELLS and r < _MAX_REFINE:
        r *= 2
    if r == 1:
        return values, 1
    coarse = np.linspace(0.0, 1.0, q + 1)
    fine = np.linspace(0.0, 1.0, q * r + 1)
    return np.interp(fine, coarse, values), r


def _pair_integral(expo_i: float, Ri: np.ndarray, expo_j: float, Rj: np.ndarray,
                   H: float, A: np.ndarray, B: np.ndarray, beta: float,
                   delta: float) -> float:
    """int_0^1 u^(ei+ej) Ri(u) Rj(u) du with exact power weighting from u = 0."""
    X = Ri * Rj
    val = float(X[:-1] @ A + X[1:] @ B)
    if H < 0.5:
        # near u = 0 the product behaves like u^(4h); swap the linear first
        # cell for the exact local power model
        p = 4.0 * (H - 0.5)
        val += float(X[1]) * delta ** beta / (beta + p) - float(X[0] * A[0] + X[1] * B[0])
    return val


def wiener_integral_cov(f: GridFunction, t: float, s: float, H: float) -> float:
    """Covariance of the Wiener integrals int_0^t f dB^H and int_0^s f dB^H.

    Computed through the Volterra kernels of the truncated integrands and the
    L2 isometry; with f = 1 this reproduces the fractional Brownian covariance
    (to quadrature accuracy).  t and s must be grid points of f.
    """
    if not 0.0 < H < 1.0:
        raise ValueError(f"H must be in (0, 1), got {H!r}")
    it, js = f.index_of(t), f.index_of(s)
    if it == 0 or js == 0:
        return 0.0
    vals, r = _refine(f.values)
    q = vals.size - 1
    ei, Ri = _kh_regular(vals, H, it * r)
    ej, Rj = _kh_regular(vals, H, js * r)
    beta = 1.0 + ei + ej
    A, B = _power_weights(beta, q, 1.0 / q)
    return _pair_integral(ei, Ri, ej, Rj, H, A, B, beta, 1.0 / q)


def wiener_cov_matrix(f: GridFunction, H: float, ts: np.ndarray) -> np.ndarray:
    """Covariance matrix of int_0^t f dB^H over the given grid points of f."""
    if not 0.0 < H < 1.0:
        raise ValueError(f"H must be in (0, 1), got {H!r}")
    idx = [f.index_of(t) for t in np.asarray(ts, dtype=float)]
    vals, r = _refine(f.values)
    q = vals.size - 1
    kernels = {}
    for j in set(idx):
        if j > 0:
            kernels[j] = _kh_regular(vals, H, j * r)
    beta = None
    cov = np.zeros((len(idx), len(idx)))
    A = B = None
    for a in range(len(idx)):
        for b in range(a, len(idx)):
            ia, ib = idx[a], idx[b]
            if ia == 0 or ib == 0:
                continue
            ei, Ri = kernels[ia]
            ej, Rj = kernels[ib]
            if beta is None:
                beta = 1.0 + ei + ej
                A, B = _power_weights(beta, q, 1.0 / q)
            cov[a, b] = cov[b, a] = _pair_integral(ei, Ri, ej, Rj, H, A, B, beta, 1.0 / q)
    return cov


# ---------------------------------------------------------------------------
# sufficient conditions for two-sided Holder bounds of int f dB^H
# ---------------------------------------------------------------------------

@dataclass
class SufficiencyReport:
    """Outcome of the pointwise sufficient conditions at level c."""

    H: float
    c: float
    left_ok: bool
    right_ok: bool
    witnesses: dict = field(default_factory=dict)


def check_sufficient_conditions(f: GridFunction, H: float, c: float) -> SufficiencyReport:
    """Check the pointwise conditions under which int_0^t f dB^H is a quasi-helix.

    For H < 1/2 (h = H - 1/2): the lower bound c|t-s|^H needs f >= c and
    f - t f'/h >= c on the grid; the upper side needs |f| <= c and
    |f - t f'/h| <= c.  For H >= 1/2 the lower bound needs f of constant sign
    with |f| >= c, the upper side just |f| <= c.  Witnesses record the first
    few violating grid points per condition.
    """
    if not 0.0 < H < 1.0:
        raise ValueError(f"H must be in (0, 1), got {H!r}")
    if c <= 0:
        raise ValueError(f"c must be positive, got {c!r}")
    t = f.grid
    v = f.values
    wit: dict[str, list[float]] = {}

    def record(name, mask):
        bad = t[mask]
        if bad.size:
            wit[name] = [float(x) for x in bad[:8]]
        return bad.size == 0

    if H >= 0.5:
        pos = record("lower_sign_plus", v < c)
        neg = record("lower_sign_minus", v > -c)
        left = pos or neg
        if left:
            wit.pop("lower_sign_plus", None)
            wit.pop("lower_sign_minus", None)
        right = record("upper_abs", np.abs(v) > c)
        return SufficiencyReport(H, c, left, right, wit)

    h = H - 0.5
    combo = v - t * f.derivative_values() / h
    left = record("lower_f", v < c) & record("lower_combo", combo < c)
    right = record("upper_f", np.abs(v) > c) & record("upper_combo", np.abs(combo) > c)
    return SufficiencyReport(H, c, bool(left), bool(right), wit)
