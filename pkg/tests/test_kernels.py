"""Covariance families: closed forms, certificates, serialization."""

from __future__ import annotations

import numpy as np
import pytest

from gmax.frac_calculus import GridFunction
from gmax.kernels import (
    BIFBM,
    FAMILIES,
    FBM,
    FREDHOLM,
    SUBFBM,
    WIENER_INTEGRAL,
    ProcessSpec,
    bifbm_cov,
    certify_quasihelix,
    covariance,
    covariance_matrix,
    default_holder_constants,
    fbm_cov,
    fredholm_increment_sq,
    increment_l2,
    limit_cov_H_to_0,
    load_kernel_csv,
    load_process_spec,
    save_kernel_csv,
    save_process_spec,
    subfbm_cov,
)


def _step_kernel(q: int = 8) -> np.ndarray:
    """Indicator kernel whose integral process is standard Brownian motion."""
    t = np.linspace(0.0, 1.0, q + 1)
    return (t[None, :] <= t[:, None]).astype(float)


# ---------------------------------------------------------------------------
# closed-form covariances
# ---------------------------------------------------------------------------

def test_fbm_closed_form():
    assert abs(fbm_cov(0.5, 0.25, 0.75) - 0.1767766952966369) < 1e-15
    # H = 1/2 is min(t, s)
    for t, s in [(0.2, 0.7), (0.9, 0.4)]:
        assert abs(fbm_cov(t, s, 0.5) - min(t, s)) < 1e-15
    # formula belt: 0.5 (t^2H + s^2H - |t-s|^2H)
    t, s, H = 0.8, 0.3, 0.6
    want = 0.5 * (t ** (2 * H) + s ** (2 * H) - abs(t - s) ** (2 * H))
    assert fbm_cov(t, s, H) == want


def test_subfbm_closed_form():
    assert abs(subfbm_cov(1.0, 1.0, 0.75) - 0.5857864376269049) < 1e-15
    t, s, H = 0.6, 0.2, 0.3
    want = t ** (2 * H) + s ** (2 * H) - 0.5 * ((t + s) ** (2 * H) + abs(t - s) ** (2 * H))
    assert abs(subfbm_cov(t, s, H) - want) < 1e-15


def test_bifbm_closed_form():
    assert abs(bifbm_cov(0.5, 0.5, 0.3, 0.5) - 0.8122523963562355) < 1e-15
    # K = 1 collapses onto the two-parameter form with the same H
    for t, s in [(0.3, 0.8), (1.0, 0.5)]:
        assert abs(bifbm_cov(t, s, 0.45, 1.0) - fbm_cov(t, s, 0.45)) < 1e-15


def test_rough_limit_covariance():
    assert limit_cov_H_to_0(0.3, 0.7) == 0.5
    assert limit_cov_H_to_0(0.4, 0.4) == 1.0
    assert limit_cov_H_to_0(0.0, 0.6) == 0.0
    assert limit_cov_H_to_0(0.0, 0.0) == 0.0


# ---------------------------------------------------------------------------
# process specs
# ---------------------------------------------------------------------------

def test_spec_validation():
    assert ProcessSpec(family=FBM, H=1.0).label() == "FBM H=1"
    with pytest.raises(ValueError):
        ProcessSpec(family=FBM, H=1.2)
    with pytest.raises(ValueError):
        ProcessSpec(family=SUBFBM, H=1.0)
    with pytest.raises(ValueError):
        ProcessSpec(family=BIFBM, H=0.3)  # K required
    with pytest.raises(ValueError):
        ProcessSpec(family=FREDHOLM, H=0.5)  # kernel required
    with pytest.raises(ValueError):
        ProcessSpec(family=WIENER_INTEGRAL, H=0.5)  # integrand required
    with pytest.raises(ValueError):
        ProcessSpec(family="GARBAGE", H=0.5)
    assert set(FAMILIES) == {FBM, SUBFBM, BIFBM, FREDHOLM, WIENER_INTEGRAL}


def test_scale_constant_squares_in_covariance():
    a = ProcessSpec(family=FBM, H=0.7)
    b = ProcessSpec(family=FBM, H=0.7, C=2.0)
    assert covariance(b, 0.6, 0.4) == 4.0 * covariance(a, 0.6, 0.4)
    assert increment_l2(b, 0.6, 0.4) == 2.0 * increment_l2(a, 0.6, 0.4)


@pytest.mark.parametrize("spec", [
    ProcessSpec(family=FBM, H=0.3),
    ProcessSpec(family=SUBFBM, H=0.6),
    ProcessSpec(family=BIFBM, H=0.4, K=0.7),
    ProcessSpec(family=FREDHOLM, kernel_grid=_step_kernel(16)),
])
def test_matrix_matches_pointwise(spec):
    ts = np.array([0.0, 0.125, 0.375, 0.75, 1.0])
    M = covariance_matrix(spec, ts)
    P = np.array([[covariance(spec, t, s) for s in ts] for t in ts])
    assert np.max(np.abs(M - P)) < 1e-12


@pytest.mark.parametrize("H", [0.1, 0.3, 0.5, 0.7, 0.9])
@pytest.mark.parametrize("family", [FBM, SUBFBM])
def test_covariance_matrices_are_psd(H, family):
    spec = ProcessSpec(family=family, H=H)
    ts = np.linspace(0.0, 1.0, 33)
    M = covariance_matrix(spec, ts)
    lo = np.min(np.linalg.eigvalsh((M + M.T) / 2))
    assert lo > -1e-8 * np.max(np.abs(M))


def test_increment_norms():
    spec = ProcessSpec(family=FBM, H=0.35)
    for t, s in [(0.9, 0.2), (0.5, 0.5), (0.0, 1.0)]:
        assert abs(increment_l2(spec, t, s) - abs(t - s) ** 0.35) < 1e-12


def test_fredholm_increments_on_step_kernel():
    # interior increments integrate to exactly |t - s|; the terminal pair
    # loses half a cell to the trapezoid rule at the jump
    k = _step_kernel(8)
    assert fredholm_increment_sq(k, 5, 2) == 0.375
    assert fredholm_increment_sq(k, 8, 7) == 0.0625


# ---------------------------------------------------------------------------
# two-sided increment certificates
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("H", [0.2, 0.5, 0.8, 1.0])
def test_fbm_certificate_is_tight(H):
    spec = ProcessSpec(family=FBM, H=H)
    cert = certify_quasihelix(spec, 1.0, H, 1.0, H, grid_size=65)
    assert cert.passed
    assert abs(cert.worst_lower_pair[2] - 1.0) < 1e-9
    assert abs(cert.worst_upper_pair[2] - 1.0) < 1e-9


def test_subfbm_certificate_splits_at_half():
    lo = ProcessSpec(family=SUBFBM, H=0.25)
    c1, h1, c2, h2 = default_holder_constants(lo)
    assert certify_quasihelix(lo, c1, h1, c2, h2, grid_size=129).passed

    hi = ProcessSpec(family=SUBFBM, H=0.6)
    cert = certify_quasihelix(hi, *default_holder_constants(hi), grid_size=129)
    assert not cert.passed
    # the lower side degrades against the origin as H grows past 1/2
    t, s, ratio = cert.worst_lower_pair
    assert s == 0.0 and ratio < 1.0


def test_bifbm_certificate_with_default_constants():
    spec = ProcessSpec(family=BIFBM, H=0.3, K=0.5)
    assert certify_quasihelix(spec, *default_holder_constants(spec), grid_size=129).passed


def test_step_kernel_certificate():
    # slack constants absorb the trapezoid half-cell at the terminal jump;
    # tight ones catch it
    spec = ProcessSpec(family=FREDHOLM, kernel_grid=_step_kernel(64))
    assert certify_quasihelix(spec, 0.65, 0.5, 1.05, 0.5, grid_size=65).passed
    cert = certify_quasihelix(spec, 0.95, 0.5, 1.05, 0.5, grid_size=65)
    assert not cert.passed and cert.worst_lower_pair[0] == 1.0


def test_certificate_report_shape():
    spec = ProcessSpec(family=FBM, H=0.5)
    cert = certify_quasihelix(spec, 1.0, 0.5, 1.0, 0.5, grid_size=33)
    d = cert.to_dict()
    assert d["passed"] is True and d["grid_size"] == 33
    assert set(d) >= {"C1", "H1", "C2", "H2", "worst_lower_pair", "worst_upper_pair"}


def test_default_constants():
    assert default_holder_constants(ProcessSpec(family=FBM, H=0.4, C=2.0)) == (2.0, 0.4, 2.0, 0.4)
    c1, h1, c2, h2 = default_holder_constants(ProcessSpec(family=SUBFBM, H=0.3))
    assert (c1, h1, h2) == (1.0, 0.3, 0.3)
    assert abs(c2 - np.sqrt(2.0 - 2.0 ** (0.3 - 1.0))) < 1e-15
    c1, h1, c2, h2 = default_holder_constants(ProcessSpec(family=BIFBM, H=0.3, K=0.5))
    assert (h1, h2) == (0.15, 0.15)
    assert abs(c1 - 2.0 ** -0.25) < 1e-15 and abs(c2 - 2.0 ** 0.25) < 1e-15
    with pytest.raises(ValueError):
        default_holder_constants(ProcessSpec(family=FREDHOLM, kernel_grid=_step_kernel()))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_kernel_csv_round_trip(tmp_path):
    k = np.outer(np.linspace(0, 1, 5), np.linspace(1, 2, 5))
    p = tmp_path / "k.csv"
    save_kernel_csv(k, p)
    assert np.array_equal(load_kernel_csv(p), k)


def test_spec_round_trip_plain(tmp_path):
    spec = ProcessSpec(family=BIFBM, H=0.35, K=0.8, C=1.5)
    p = tmp_path / "spec.json"
    save_process_spec(spec, p)
    back = load_process_spec(p)
    assert (back.family, back.H, back.K, back.C) == (BIFBM, 0.35, 0.8, 1.5)


def test_spec_round_trip_with_kernel(tmp_path):
    spec = ProcessSpec(family=FREDHOLM, kernel_grid=_step_kernel(8))
    p = tmp_path / "fred.json"
    save_process_spec(spec, p)
    assert (tmp_path / "fred_kernel.csv").exists()
    back = load_process_spec(p)
    assert back.family == FREDHOLM
    assert np.array_equal(back.kernel_grid, spec.kernel_grid)


def test_spec_round_trip_with_integrand(tmp_path):
    f = GridFunction.from_callable(lambda s: 1 + s, 16)
    spec = ProcessSpec(family=WIENER_INTEGRAL, H=0.3, integrand=f)
    p = tmp_path / "wi.json"
    save_process_spec(spec, p)
    assert (tmp_path / "wi_integrand.csv").exists()
    back = load_process_spec(p)
    assert back.H == 0.3
    assert np.array_equal(back.integrand.values, f.values)
