"""Monte Carlo estimation of expected grid maxima and refinement gaps."""

from __future__ import annotations

import json

import numpy as np
import pytest
from scipy.special import ndtri

from gmax.estimator import estimate_expected_max, estimate_gap, grid_max
from gmax.kernels import FBM, ProcessSpec


SQRT_2PI = float(np.sqrt(2.0 * np.pi))


def _fbm(H: float = 0.5) -> ProcessSpec:
    return ProcessSpec(family=FBM, H=H)


def test_grid_max():
    assert grid_max(np.array([0.0, -1.0, 2.0, 0.5])) == 2.0
    assert grid_max(np.zeros(4)) == 0.0


# ---------------------------------------------------------------------------
# closed-form anchors
# ---------------------------------------------------------------------------

def test_single_step_anchor():
    # on the grid {0, 1} the maximum is the positive part of one Gaussian,
    # whose mean is 1/sqrt(2 pi); antithetic pairing makes this very tight
    est = estimate_expected_max(_fbm(0.5), n=1, m=40000, seed=17)
    assert est.stderr < 0.003
    assert abs(est.mean - 1.0 / SQRT_2PI) < 4.0 * est.stderr + 1e-4


def test_ray_anchor_any_grid():
    # at H = 1 paths are rays, so the grid maximum is again a positive part
    est = estimate_expected_max(_fbm(1.0), n=7, m=40000, seed=23)
    assert abs(est.mean - 1.0 / SQRT_2PI) < 4.0 * est.stderr + 1e-4


def test_scale_constant_is_linear_in_the_mean():
    a = estimate_expected_max(_fbm(0.5), n=16, m=2000, seed=5)
    b = estimate_expected_max(ProcessSpec(family=FBM, H=0.5, C=2.0),
                              n=16, m=2000, seed=5)
    assert abs(b.mean - 2.0 * a.mean) < 1e-12
    assert abs(b.stderr - 2.0 * a.stderr) < 1e-12


# ---------------------------------------------------------------------------
# estimate structure
# ---------------------------------------------------------------------------

def test_estimate_fields_and_json():
    est = estimate_expected_max(_fbm(0.3), n=8, m=200, seed=1)
    assert (est.n, est.m, est.seed, est.ci_level) == (8, 200, 1, 0.999)
    assert est.half_width == ndtri(0.9995) * est.stderr
    d = json.loads(est.to_json())
    assert d["spec"]["family"] == "FBM" and d["spec"]["H"] == 0.3
    assert d["mean"] == est.mean and d["m"] == 200


def test_ci_level_scales_half_width():
    tight = estimate_expected_max(_fbm(0.5), n=8, m=400, seed=2, ci_level=0.95)
    wide = estimate_expected_max(_fbm(0.5), n=8, m=400, seed=2, ci_level=0.999)
    assert tight.mean == wide.mean and tight.stderr == wide.stderr
    ratio = wide.half_width / tight.half_width
    assert abs(ratio - ndtri(0.9995) / ndtri(0.975)) < 1e-12


def test_determinism_across_threads():
    one = estimate_expected_max(_fbm(0.4), n=64, m=256, seed=9, threads=1)
    many = estimate_expected_max(_fbm(0.4), n=64, m=256, seed=9, threads=3)
    assert one.mean == many.mean and one.stderr == many.stderr


def test_antithetic_requires_even_m():
    with pytest.raises(ValueError):
        estimate_expected_max(_fbm(0.5), n=8, m=11, seed=1)
    est = estimate_expected_max(_fbm(0.5), n=8, m=11, seed=1, antithetic=False)
    assert est.m == 11


def test_antithetic_reduces_variance_here():
    # for the grid maximum the pairing is strongly negatively correlated
    anti = estimate_expected_max(_fbm(0.5), n=16, m=4000, seed=3)
    plain = estimate_expected_max(_fbm(0.5), n=16, m=4000, seed=3, antithetic=False)
    assert anti.stderr < plain.stderr


# ---------------------------------------------------------------------------
# nested-grid refinement gap
# ---------------------------------------------------------------------------

def test_gap_is_nonnegative_and_coupled():
    gap = estimate_gap(_fbm(0.5), coarse_n=8, fine_n=64, m=2000, seed=4)
    assert gap.mean_gap > 0.0
    assert gap.stderr > 0.0
    assert (gap.coarse_n, gap.fine_n) == (8, 64)


def test_gap_vanishes_when_grids_coincide():
    gap = estimate_gap(_fbm(0.5), coarse_n=16, fine_n=16, m=200, seed=4)
    assert gap.mean_gap == 0.0 and gap.stderr == 0.0


def test_gap_requires_nested_grids():
    with pytest.raises(ValueError):
        estimate_gap(_fbm(0.5), coarse_n=12, fine_n=64, m=200, seed=1)
    with pytest.raises(ValueError):
        estimate_gap(_fbm(0.5), coarse_n=64, fine_n=16, m=200, seed=1)


def test_gap_shrinks_with_finer_coarse_grid():
    # nested coupling: refining the coarse grid can only remove gap
    wide = estimate_gap(_fbm(0.5), coarse_n=4, fine_n=256, m=2000, seed=6)
    narrow = estimate_gap(_fbm(0.5), coarse_n=64, fine_n=256, m=2000, seed=6)
    assert narrow.mean_gap < wide.mean_gap
