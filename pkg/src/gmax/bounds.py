"""Closed-form bounds for expected maxima of Holder-continuous Gaussian processes.

Throughout, f(H) denotes E max_{t in [0,1]} of a process whose increments are
squeezed between C1 |t-s|^H1 and C2 |t-s|^H2, f(H, n) its restriction to the
grid {i/n}, and Delta_n = f(H) - f(H, n) the discretization gap.  The
functions here evaluate:

* a lower bound C / sqrt(4 H pi e ln 2) and an upper bound
  L C sqrt(2 pi / (H ln^3 2)) erfc(sqrt(H ln 2 / 2)) for f(H), both of order
  1/sqrt(H) as H -> 0;
* the Sudakov grid bound and the sharper small-H grid lower bounds;
* an upper bound for Delta_n valid once n >= 2^(1/H), and the classical
  sqrt(n)-asymptotic 0.5826 / sqrt(n) for the Brownian case;
* the modulus sqrt(alpha_n ln n) controlling |f(H1, n) - f(H2, n)|, and the
  H -> 0 limit of f(H, n) as a one-dimensional integral.

Each operation returns a bare float; ``evaluate_all`` wraps the same values
in BoundReport records carrying the constants used and the validity
conditions, which is what the reporting CLI consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.special import erfc, log_ndtr

__all__ = [
    "CHAINING_L",
    "C1_THM4",
    "C2_SUDAKOV",
    "ALPHA_CS",
    "ValidityError",
    "BoundReport",
    "lower_bound_thm1",
    "simple_lower_bound",
    "upper_bound_thm1",
    "upper_bound_sudakov_fernique",
    "sudakov_grid_lower_bound",
    "delta_upper_bound_thm2",
    "chernoff_siegmund_delta",
    "chatterjee_modulus",
    "chatterjee_alpha",
    "chatterjee_alpha_majorant",
    "h_zero_limit",
    "thm4iii_lower_bound",
    "thm4iii_simplified_floor",
    "evaluate_all",
]

# chaining constant: only the ceiling 3.75 is citable, so bounds use it as-is
CHAINING_L = 3.75
# constants of the small-H grid lower bound
C1_THM4 = 0.0107
C2_SUDAKOV = float((2.0 * np.pi * np.log(2.0)) ** -0.5)  # 0.47917851...
# coefficient of the n^(-1/2) Brownian discretization asymptotic,
# -zeta(1/2)/sqrt(2 pi) to the printed precision
ALPHA_CS = 0.5826


class ValidityError(ValueError):
    """A bound was requested outside its stated range of validity."""


def _check_H_open(H: float) -> None:
    if not 0.0 < H < 1.0:
        raise ValueError(f"H must be in (0, 1), got {H!r}")


def _check_C(C: float) -> None:
    if C <= 0:
        raise ValueError(f"C must be positive, got {C!r}")


# ---------------------------------------------------------------------------
# bounds on f(H)
# ---------------------------------------------------------------------------

def lower_bound_thm1(C: float, H: float) -> float:
    """Lower bound C / sqrt(4 H pi e ln 2) for f(H).

    Valid when the lower increment inequality holds with constants (C, H);
    exceeds C / (5 sqrt(H)) for every H.
    """
    _check_C(C)
    _check_H_open(H)
    return C / float(np.sqrt(4.0 * H * np.pi * np.e * np.log(2.0)))


def simple_lower_bound(C: float, H: float) -> float:
    """Display form C / (5 sqrt(H)) of the lower bound; slightly below
    `lower_bound_thm1` (whose constant is 0.2055...)."""
    _check_C(C)
    _check_H_open(H)
    return C / (5.0 * float(np.sqrt(H)))


def upper_bound_thm1(C: float, H: float) -> float:
    """Upper bound L C sqrt(2 pi / (H ln^3 2)) erfc(sqrt(H ln 2 / 2)) for f(H).

    Valid when the upper increment inequality holds with constants (C, H);
    always below 16.3 C / sqrt(H).
    """
    _check_C(C)
    _check_H_open(H)
    ln2 = np.log(2.0)
    return float(CHAINING_L * C * np.sqrt(2.0 * np.pi / (H * ln2 ** 3))
                 * erfc(np.sqrt(H * ln2 / 2.0)))


def upper_bound_sudakov_fernique(C: float) -> float:
    """Upper bound C sqrt(2 pi) for f(H), valid when the upper increment
    inequality holds with exponent H >= 1/2 (comparison with scaled Brownian
    motion); much sharper than `upper_bound_thm1` in that regime."""
    _check_C(C)
    return C * float(np.sqrt(2.0 * np.pi))


# ---------------------------------------------------------------------------
# grid bounds
# ---------------------------------------------------------------------------

def sudakov_grid_lower_bound(C: float, H: float, n: int) -> float:
    """Lower bound C sqrt(log2(n+1) / (n^2H 2 pi)) for f(H, n).

    Valid when the lower increment inequality holds; maximizing over n near
    e^(1/2H) recovers a bound of order 0.2055 / sqrt(H).
    """
    _check_C(C)
    if H <= 0:
        raise ValueError(f"H must be positive, got {H!r}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    return C * float(np.sqrt(np.log2(n + 1.0) / (float(n) ** (2.0 * H) * 2.0 * np.pi)))


def delta_upper_bound_thm2(C: float, H: float, n: int) -> float:
    """Upper bound (2 C sqrt(ln n) / n^H)(1 + 4/n^H + 0.0074/(ln n)^1.5) for Delta_n.

    Stated only for n >= 2^(1/H); below that threshold a ValidityError names
    the threshold.
    """
    _check_C(C)
    _check_H_open(H)
    if n < 2.0 ** (1.0 / H):
        raise ValidityError(
            f"delta bound requires n >= 2^(1/H) = {2.0 ** (1.0 / H):.6g}, got n={n}")
    ln_n = np.log(float(n))
    nH = float(n) ** H
    return float(2.0 * C * np.sqrt(ln_n) / nH * (1.0 + 4.0 / nH + 0.0074 / ln_n ** 1.5))


def chernoff_siegmund_delta(n: int) -> float:
    """Brownian-case asymptotic Delta_n ~ 0.5826 n^(-1/2) (H = 1/2 only)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    return ALPHA_CS / float(np.sqrt(n))


# ---------------------------------------------------------------------------
# dependence on H
# ---------------------------------------------------------------------------

def chatterjee_alpha(H1: float, H2: float, n: int) -> float:
    """alpha_n = max_{1<=j<=n} ((j/n)^2H1 - (j/n)^2H2) for 0 <= H1 < H2 < 1."""
    if not (0.0 <= H1 < H2 < 1.0):
        raise ValueError(f"need 0 <= H1 < H2 < 1, got H1={H1!r}, H2={H2!r}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    j = np.arange(1, n + 1, dtype=float) / n
    return float(np.max(j ** (2.0 * H1) - j ** (2.0 * H2)))


def chatterjee_modulus(H1: float, H2: float, n: int) -> float:
    """Continuity modulus sqrt(alpha_n ln n) bounding |f(H1, n) - f(H2, n)|.

    alpha_n compares the grid variances of the two exponents; see
    `chatterjee_alpha_majorant` for its closed-form ceilings.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n!r}")
    return float(np.sqrt(chatterjee_alpha(H1, H2, n) * np.log(n)))


def chatterjee_alpha_majorant(H1: float, H2: float, n: int) -> float:
    """Closed-form ceiling for alpha_n: (H2-H1)/(e H1) when H1 > 0, else 1 - n^(-2H2)."""
    if not (0.0 <= H1 < H2 < 1.0):
        raise ValueError(f"need 0 <= H1 < H2 < 1, got H1={H1!r}, H2={H2!r}")
    if H1 > 0.0:
        return (H2 - H1) / (np.e * H1)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    return 1.0 - float(n) ** (-2.0 * H2)


def h_zero_limit(n: int) -> float:
    """Limit of f(H, n) as H -> 0: (1/sqrt(2)) E (max of n iid standard normals)^+.

    Evaluated as the tail integral (1/sqrt 2) int_0^inf (1 - Phi(u)^n) du with
    absolute quadrature error below 1e-8; strictly increasing in n, with
    value 1/(2 sqrt(pi)) at n = 1.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")

    def tail(u):
        return -np.expm1(n * log_ndtr(u))

    cut = float(np.sqrt(2.0 * np.log(n + 1.0))) + 10.0
    head, _ = quad(tail, 0.0, cut, epsabs=1e-10, epsrel=1e-10, limit=200)
    rest, _ = quad(tail, cut, np.inf, epsabs=1e-10, epsrel=1e-10, limit=200)
    return (head + rest) / float(np.sqrt(2.0))


def thm4iii_lower_bound(H: float, n: int) -> float:
    """Small-H lower bound for f(H, n), explosive as H -> 0 with n >= 2^(1/H).

    For n >= 2^(1/H): max{1/(5 sqrt H) - 6 sqrt(ln n)/n^H,
    c2 sqrt(ln n)/n^H} - c1 with c1 = 0.0107, c2 = (2 pi ln 2)^(-1/2);
    otherwise (c2/2) sqrt(ln n).
    """
    _check_H_open(H)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    ln_n = np.log(float(n))
    if n < 2.0 ** (1.0 / H):
        return float(0.5 * C2_SUDAKOV * np.sqrt(ln_n))
    t = np.sqrt(ln_n) / float(n) ** H
    return float(max(0.2 / np.sqrt(H) - 6.0 * t, C2_SUDAKOV * t) - C1_THM4)


def thm4iii_simplified_floor(H: float) -> float:
    """H-only floor c2 / ((6 + c2) 5 sqrt(H)) - c1 implied by `thm4iii_lower_bound`
    for every n >= 2^(1/H); of exact order 1/sqrt(H)."""
    _check_H_open(H)
    return float(C2_SUDAKOV / ((6.0 + C2_SUDAKOV) * 5.0 * np.sqrt(H)) - C1_THM4)


# ---------------------------------------------------------------------------
# reporting
# ---------------------------------------------------------------------------

@dataclass
class BoundReport:
    """One named bound value with the constants it used and when it applies."""

    name: str
    value: float
    constants_used: dict = field(default_factory=dict)
    validity: str = "always"


def evaluate_all(C: float, H: float, n: int) -> list[BoundReport]:
    """All bounds at one (C, H, n), as reports; out-of-validity values are NaN."""
    reports = [
        BoundReport("lower_thm1", lower_bound_thm1(C, H),
                    validity="lower increment bound holds with (C, H)"),
        BoundReport("upper_thm1", upper_bound_thm1(C, H), {"L": CHAINING_L},
                    validity="upper increment bound holds with (C, H)"),
        BoundReport("upper_sf", upper_bound_sudakov_fernique(C) if H >= 0.5 else float("nan"),
                    validity="upper increment bound holds with H >= 1/2"),
        BoundReport("sudakov_grid", sudakov_grid_lower_bound(C, H, n),
                    validity="lower increment bound holds with (C, H)"),
    ]
    try:
        delta = delta_upper_bound_thm2(C, H, n)
    except ValidityError:
        delta = float("nan")
    reports.append(BoundReport("delta_thm2", delta, validity="n >= 2^(1/H)"))
    reports.append(BoundReport("chernoff_delta", chernoff_siegmund_delta(n),
                               {"alpha": ALPHA_CS}, validity="H = 1/2, n -> inf asymptotic"))
    reports.append(BoundReport("thm4iii_lower", thm4iii_lower_bound(H, n),
                               {"c1": C1_THM4, "c2": C2_SUDAKOV},
                               validity="unit-constant two-sided increment bounds"))
    reports.append(BoundReport("modulus_h0", chatterjee_modulus(0.0, H, n) if n >= 2 else float("nan"),
                               validity="|f(0+, n) - f(H, n)| control"))
    return reports
