"""Exact sampling of Gaussian processes on the uniform grid {i/n}.

Fractional Brownian paths come from circulant embedding of the increment
autocovariance (the Davies-Harte construction): the 2n-circulant built from
the folded autocovariance row is diagonalised by the FFT, and one complex
Gaussian draw per frequency yields n exact increments.  Every other family
goes through a Cholesky (or clamped eigenvalue) factorisation of its
covariance matrix on the grid.

Determinism contract: path j is a pure function of (spec, n, seed, j).  Each
base path draws from its own counter-based stream keyed by (seed, stream
index), so any partition of the work over threads or chunks reproduces the
same bytes.  Antithetic partners negate the base path's Gaussian draw and
share its stream: path 2p+1 = -(path 2p) exactly.
"""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import fft as _fft

from .kernels import FBM, ProcessSpec, covariance_matrix

__all__ = [
    "EmbeddingError",
    "NotPSDError",
    "CirculantSpectrum",
    "PathBatch",
    "fgn_autocovariance",
    "circulant_spectrum",
    "GridSampler",
    "sample_fbm_paths",
    "sample_by_cholesky",
    "sample_paths",
    "read_path_batch",
]

# target scalars per generation chunk; fixed so that chunk boundaries (and
# therefore results) never depend on thread count
_CHUNK_SCALARS = 1 << 21

_MAGIC = b"GMAXPB01"


class EmbeddingError(RuntimeError):
    """Circulant embedding produced a genuinely negative eigenvalue."""


class NotPSDError(RuntimeError):
    """Covariance matrix is not positive semidefinite within tolerance."""


# ---------------------------------------------------------------------------
# circulant spectrum of fractional Gaussian noise
# ---------------------------------------------------------------------------

def fgn_autocovariance(k, H: float):
    """Autocovariance of unit-variance fractional Gaussian noise at lag k.

    gamma(k) = (|k+1|^2H - 2 k^2H + |k-1|^2H) / 2, so gamma(0) = 1 and all
    lags vanish at H = 1/2.  Accepts H in (0, 1]; at H = 1 the increments are
    perfectly correlated (gamma = 1), which the samplers use for the
    degenerate straight-line process.
    """
    if not 0.0 < H <= 1.0:
        raise ValueError(f"H must be in (0, 1], got {H!r}")
    k = np.abs(np.asarray(k, dtype=float))
    out = 0.5 * ((k + 1.0) ** (2 * H) - 2.0 * k ** (2 * H) + np.abs(k - 1.0) ** (2 * H))
    return float(out) if out.ndim == 0 else out


@dataclass
class CirculantSpectrum:
    """Eigenvalues of the 2n-circulant embedding the fGn covariance.

    min_eigenvalue is recorded before clamping; eigenvalues are clamped at 0.
    """

    n: int
    H: float
    eigenvalues: np.ndarray
    min_eigenvalue: float


def circulant_spectrum(n: int, H: float) -> CirculantSpectrum:
    """FFT eigenvalues of the circulant row (g0..gn, g_{n-1}..g1).

    The embedding is nonnegative-definite for fractional Gaussian noise, so a
    negative eigenvalue below -1e-9 relative to the largest signals a genuine
    failure and raises EmbeddingError; tiny negatives are clamped to zero.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    gam = fgn_autocovariance(np.arange(n + 1), H)
    row = np.concatenate([gam, gam[-2:0:-1]])
    lam_c = _fft.fft(row)
    scale = np.abs(lam_c.real).max()
    if np.abs(lam_c.imag).max() > 1e-9 * scale:
        raise EmbeddingError(f"circulant eigenvalues not real at n={n}, H={H}")
    lam = lam_c.real.copy()
    mn = float(lam.min())
    if mn < -1e-9 * float(lam.max()):
        raise EmbeddingError(
            f"negative circulant eigenvalue {mn!r} at n={n}, H={H}: exact embedding invalid")
    np.maximum(lam, 0.0, out=lam)
    return CirculantSpectrum(n=n, H=H, eigenvalues=lam, min_eigenvalue=mn)


# ---------------------------------------------------------------------------
# path batches
# ---------------------------------------------------------------------------

@dataclass
class PathBatch:
    """m sampled paths on {i/n, i=0..n}; values has shape (m, n+1).

    Column 0 is identically 0, and with antithetic pairing row 2p+1 is the
    exact negation of row 2p.  Regeneration from (spec, n, m, seed) is
    bit-identical whatever the thread count.
    """

    spec: ProcessSpec
    n: int
    m: int
    values: np.ndarray
    seed: int
    antithetic: bool

    def write_binary(self, path) -> None:
        """32-byte header (magic, n, m, seed as little-endian int64) + row-major float64."""
        with open(path, "wb") as fh:
            fh.write(_MAGIC + struct.pack("<qqq", self.n, self.m, self.seed))
            fh.write(np.ascontiguousarray(self.values, dtype="<f8").tobytes())

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("path,i,t,value\n")
            for p in range(self.m):
                row = self.values[p]
                for i in range(self.n + 1):
                    fh.write(f"{p},{i},{i / self.n!r},{float(row[i])!r}\n")


def read_path_batch(path, spec: ProcessSpec | None = None,
                    antithetic: bool = False) -> PathBatch:
    """Read a binary PathBatch written by write_binary."""
    with open(path, "rb") as fh:
        head = fh.read(32)
        if len(head) != 32 or head[:8] != _MAGIC:
            raise ValueError(f"{path}: not a path-batch file")
        n, m, seed = struct.unpack("<qqq", head[8:])
        values = np.frombuffer(fh.read(), dtype="<f8").reshape(m, n + 1).copy()
    return PathBatch(spec=spec, n=n, m=m, values=values, seed=seed, antithetic=antithetic)


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def _stream_gaussians(seed: int, stream: int, count: int) -> np.ndarray:
    key = np.array([np.uint64(seed & (2 ** 64 - 1)), np.uint64(stream)], dtype=np.uint64)
    g = np.random.Generator(np.random.Philox(key=key))
    return g.standard_normal(count)


class GridSampler:
    """Reusable per-(spec, n) sampler state: spectrum or matrix factor.

    `base_paths(seed, s0, s1)` returns the base path of each stream in
    [s0, s1) as rows of an (s1-s0, n+1) array; all public samplers and the
    Monte Carlo estimator are thin layers over it.
    """

    def __init__(self, spec: ProcessSpec, n: int, method: str = "auto"):
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n!r}")
        if method not in ("auto", "fft", "factor"):
            raise ValueError(f"unknown method {method!r}")
        self.spec = spec
        self.n = n
        use_fft = spec.family == FBM if method == "auto" else method == "fft"
        if use_fft and spec.family != FBM:
            raise ValueError("the FFT route applies to the FBM family only")
        self.draws_per_stream: int
        if use_fft:
            self._lam_half = circulant_spectrum(n, spec.H).eigenvalues[: n + 1]
            self._factor = None
            self.draws_per_stream = 2 * n
        else:
            self._lam_half = None
            self._factor = _covariance_factor(spec, n)
            self.draws_per_stream = self._factor.shape[1]

    # -- generation ----------------------------------------------------

    def base_paths(self, seed: int, s0: int, s1: int) -> np.ndarray:
        ns = s1 - s0
        Z = np.empty((ns, self.draws_per_stream))
        for i in range(ns):
            Z[i] = _stream_gaussians(seed, s0 + i, self.draws_per_stream)
        if self._lam_half is not None:
            return self._fbm_from_gaussians(Z)
        return Z @ self._factor.T

    def _fbm_from_gaussians(self, Z: np.ndarray) -> np.ndarray:
        n, lam = self.n, self._lam_half
        ns = Z.shape[0]
        half = np.empty((ns, n + 1), dtype=np.complex128)
        half[:, 0] = np.sqrt(lam[0] / (2 * n)) * Z[:, 0]
        half[:, n] = np.sqrt(lam[n] / (2 * n)) * Z[:, 1]
        amp = np.sqrt(lam[1:n] / (4 * n))
        half[:, 1:n] = amp * (Z[:, 2:n + 1] + 1j * Z[:, n + 1:2 * n])
        fgn = (2 * n) * _fft.irfft(half, 2 * n, axis=1)[:, :n]
        paths = np.empty((ns, n + 1))
        paths[:, 0] = 0.0
        np.cumsum(fgn, axis=1, out=paths[:, 1:])
        paths *= self.spec.C * float(n) ** (-self.spec.H)
        return paths


def _covariance_factor(spec: ProcessSpec, n: int) -> np.ndarray:
    """Factor F (shape (n+1, k)) with F F^T = R and an exactly-zero first row.

    The time-0 row of every supported covariance vanishes, so the factor is a
    jittered Cholesky of the (1..n, 1..n) block.  If that block is slightly
    indefinite (down to -1e-8 relative) an eigenvalue-clamped square root is
    used instead; anything worse raises NotPSDError.
    """
    ts = np.linspace(0.0, 1.0, n + 1)
    R = covariance_matrix(spec, ts)
    if abs(R[0, 0]) > 1e-10:
        raise NotPSDError(
            f"{spec.label()} has nonzero variance {R[0, 0]!r} at t=0; paths must start at 0")
    A = R[1:, 1:] + 1e-12 * np.eye(n)
    try:
        L = np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        w, V = np.linalg.eigh(A)
        if w.min() < -1e-8 * max(w.max(), 1.0):
            raise NotPSDError(
                f"covariance of {spec.label()} has eigenvalue {w.min()!r} on the {n}-cell grid")
        L = V * np.sqrt(np.maximum(w, 0.0))
    F = np.zeros((n + 1, L.shape[1]))
    F[1:] = L
    return F


def _expand_block(base: np.ndarray, antithetic: bool) -> np.ndarray:
    if not antithetic:
        return base
    ns, w = base.shape
    out = np.empty((2 * ns, w))
    out[0::2] = base
    out[1::2] = -base
    return out


def _fill_batch(sampler: GridSampler, m: int, seed: int, antithetic: bool,
                threads: int) -> np.ndarray:
    if antithetic and m % 2:
        raise ValueError(f"antithetic sampling needs an even path count, got m={m}")
    n = sampler.n
    streams = m // 2 if antithetic else m
    chunk = max(1, _CHUNK_SCALARS // max(sampler.draws_per_stream, n + 1))
    values = np.empty((m, n + 1))
    spans = [(s, min(s + chunk, streams)) for s in range(0, streams, chunk)]

    def work(span):
        s0, s1 = span
        block = _expand_block(sampler.base_paths(seed, s0, s1), antithetic)
        k = 2 if antithetic else 1
        values[k * s0: k * s1] = block

    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, spans))
    else:
        for span in spans:
            work(span)
    return values


def sample_fbm_paths(n: int, m: int, H: float, seed: int,
                     antithetic: bool = True, threads: int = 1) -> PathBatch:
    """Exact fractional Brownian paths on {i/n} via circulant embedding.

    Increments are generated in the Fourier domain from the clamped circulant
    spectrum, cumulated, and scaled by n^-H; the population covariance of the
    output equals the fractional Brownian covariance restricted to the grid.
    """
    spec = ProcessSpec(family=FBM, H=H)
    sampler = GridSampler(spec, n)
    values = _fill_batch(sampler, m, seed, antithetic, threads)
    return PathBatch(spec=spec, n=n, m=m, values=values, seed=seed, antithetic=antithetic)


def sample_by_cholesky(spec: ProcessSpec, n: int, m: int, seed: int,
                       antithetic: bool = True, threads: int = 1) -> PathBatch:
    """Exact paths for any covariance-defined spec via matrix factorisation."""
    sampler = GridSampler(spec, n, method="factor")
    values = _fill_batch(sampler, m, seed, antithetic, threads)
    return PathBatch(spec=spec, n=n, m=m, values=values, seed=seed, antithetic=antithetic)


def sample_paths(spec: ProcessSpec, n: int, m: int, seed: int,
                 antithetic: bool = True, threads: int = 1) -> PathBatch:
    """Sample any family: circulant embedding for FBM, factorisation otherwise.

    If the embedding fails (it provably should not for fractional Gaussian
    noise) the factorisation route is used as a fallback.
    """
    if spec.family == FBM:
        try:
            sampler = GridSampler(spec, n, method="fft")
        except EmbeddingError:
            return sample_by_cholesky(spec, n, m, seed, antithetic, threads)
        values = _fill_batch(sampler, m, seed, antithetic, threads)
        return PathBatch(spec=spec, n=n, m=m, values=values, seed=seed,
                         antithetic=antithetic)
    return sample_by_cholesky(spec, n, m, seed, antithetic, threads)
