"""Finite-dimensional Gaussian inequalities: minoration, comparison, chaining."""

from __future__ import annotations

import numpy as np
import pytest
from scipy.special import ndtr

from gmax.bounds import chatterjee_modulus, sudakov_grid_lower_bound
from gmax.gauss_inequalities import (
    ChainingNets,
    FiniteGaussian,
    chaining_upper,
    chatterjee_diff_bound,
    dyadic_nets,
    mills_tail_bound,
    sudakov_lower,
)
from gmax.kernels import FBM, ProcessSpec


def _pair(rho: float) -> FiniteGaussian:
    return FiniteGaussian(np.array([0.0, 1.0]),
                          np.array([[1.0, rho], [rho, 1.0]]))


# ---------------------------------------------------------------------------
# finite Gaussian container
# ---------------------------------------------------------------------------

def test_container_validation():
    with pytest.raises(ValueError):
        FiniteGaussian(np.array([0.0, 1.0]), np.array([[1.0, 0.5], [0.4, 1.0]]))
    with pytest.raises(ValueError):
        FiniteGaussian(np.array([0.0, 1.0]), np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(ValueError):
        FiniteGaussian(np.array([0.0, 1.0, 2.0]), np.eye(2))


def test_squared_distances():
    fg = _pair(0.25)
    d2 = fg.squared_distances()
    assert d2.shape == (2, 2)
    assert d2[0, 0] == 0.0 and d2[0, 1] == d2[1, 0] == 1.5


def test_from_spec_restricts_covariance():
    pts = np.array([0.0, 0.5, 1.0])
    fg = FiniteGaussian.from_spec(ProcessSpec(family=FBM, H=0.5), pts)
    assert np.allclose(fg.cov, [[0.0, 0.0, 0.0], [0.0, 0.5, 0.5], [0.0, 0.5, 1.0]])
    d2 = fg.squared_distances()
    assert abs(d2[0, 1] - 0.5) < 1e-15 and abs(d2[1, 2] - 0.5) < 1e-15


# ---------------------------------------------------------------------------
# minoration
# ---------------------------------------------------------------------------

def test_minoration_two_points_is_sharp():
    # two independent standard normals: the bound equals E max = 1/sqrt(pi)
    assert abs(sudakov_lower(_pair(0.0)) - 1.0 / np.sqrt(np.pi)) < 1e-15


def test_minoration_needs_two_points():
    with pytest.raises(ValueError):
        sudakov_lower(FiniteGaussian(np.array([0.0]), np.array([[1.0]])))


@pytest.mark.parametrize("H,n", [(0.5, 16), (0.3, 64)])
def test_minoration_matches_grid_closed_form(H, n):
    pts = np.linspace(0.0, 1.0, n + 1)
    fg = FiniteGaussian.from_spec(ProcessSpec(family=FBM, H=H), pts)
    assert abs(sudakov_lower(fg) - sudakov_grid_lower_bound(1.0, H, n)) < 1e-14


# ---------------------------------------------------------------------------
# comparison of two Gaussian vectors
# ---------------------------------------------------------------------------

def test_comparison_symmetric_and_zero_on_equal():
    a, b = _pair(0.0), _pair(0.5)
    assert chatterjee_diff_bound(a, b) == chatterjee_diff_bound(b, a)
    assert chatterjee_diff_bound(a, a) == 0.0
    assert abs(chatterjee_diff_bound(a, b) - np.sqrt(np.log(2.0))) < 1e-15


def test_comparison_dominates_true_difference():
    # E max of a correlated standard pair is sqrt((1-rho)/pi)
    a, b = _pair(0.0), _pair(0.5)
    truth = abs(np.sqrt(1.0 / np.pi) - np.sqrt(0.5 / np.pi))
    assert chatterjee_diff_bound(a, b) > truth


@pytest.mark.parametrize("H1,H2,n", [(0.3, 0.5, 16), (0.2, 0.7, 32)])
def test_comparison_matches_modulus_on_grid(H1, H2, n):
    # two rough-path families on the origin-free grid {j/n, j=1..n}
    pts = np.arange(1, n + 1) / n
    a = FiniteGaussian.from_spec(ProcessSpec(family=FBM, H=H1), pts)
    b = FiniteGaussian.from_spec(ProcessSpec(family=FBM, H=H2), pts)
    assert abs(chatterjee_diff_bound(a, b) - chatterjee_modulus(H1, H2, n)) < 1e-14


# ---------------------------------------------------------------------------
# nets and chaining
# ---------------------------------------------------------------------------

def test_net_structure():
    nets = dyadic_nets(3)
    assert np.array_equal(nets.levels[0], [0.5])
    for k in (1, 2, 3):
        lv = nets.levels[k]
        assert lv.size == 2 ** (2 ** k)
        assert lv[0] == 2.0 ** -(2 ** k) and lv[-1] == 1.0
        assert np.all(np.isin(nets.levels[k - 1], lv))  # nested


def test_net_extra_level_and_ceiling():
    extra = np.linspace(0.0, 1.0, 18)
    with pytest.raises(ValueError):
        dyadic_nets(1, extra=extra)  # 4-point level cannot absorb 18 points
    nets = dyadic_nets(2, extra=extra)
    assert nets.levels[-1].size <= 2 ** (2 ** 3)
    assert np.all(np.isin(extra, nets.levels[-1]))


def test_net_depth_cap():
    with pytest.raises(ValueError):
        dyadic_nets(6)
    with pytest.raises(ValueError):
        dyadic_nets(-1)


def test_chaining_toy_value():
    # depth 1, distance |t-s|^(1/2): the extremal point is 1.0 at distance
    # sqrt(1/2) from the coarse net {1/2}, so the bound is L sqrt(1/2)
    nets = dyadic_nets(1)
    got = chaining_upper(lambda t, s: np.abs(t - s) ** 0.5, nets)
    assert abs(got - 3.75 * np.sqrt(0.5)) < 1e-12


def test_chaining_matches_bruteforce():
    nets = dyadic_nets(2, extra=np.array([0.3, 0.77]))
    norm = lambda t, s: np.abs(t - s) ** 0.4

    def reference(nets, norm):
        T = nets.levels[-1]
        best = 0.0
        for t in T:
            total = 0.0
            for k, lv in enumerate(nets.levels[:-1]):
                total += 2.0 ** (k / 2.0) * min(norm(t, s) for s in lv)
            best = max(best, total)
        return 3.75 * best

    assert abs(chaining_upper(norm, nets) - reference(nets, norm)) < 1e-12


def test_chaining_scalar_norm_fallback():
    nets = dyadic_nets(2)
    vector = chaining_upper(lambda t, s: np.abs(t - s) ** 0.4, nets)

    def scalar_only(t, s):
        return abs(float(t) - float(s)) ** 0.4  # refuses arrays

    assert abs(chaining_upper(scalar_only, nets) - vector) < 1e-12


def test_chaining_custom_constant():
    nets = dyadic_nets(1)
    norm = lambda t, s: np.abs(t - s) ** 0.5
    assert abs(chaining_upper(norm, nets, L=1.0) * 3.75
               - chaining_upper(norm, nets)) < 1e-12


# ---------------------------------------------------------------------------
# tail bound
# ---------------------------------------------------------------------------

def test_tail_bound_values():
    assert abs(mills_tail_bound(1.0, 1.0) - 0.24197072451914337) < 1e-15
    assert abs(mills_tail_bound(3.0, 1.0) - 0.001477282803979336) < 1e-15


def test_tail_bound_dominates_and_scales():
    for x in (0.8, 1.5, 3.0):
        assert mills_tail_bound(x, 1.0) > 1.0 - ndtr(x)
    assert abs(mills_tail_bound(2.0, 0.5) - mills_tail_bound(4.0, 1.0)) < 1e-18


def test_tail_bound_domain():
    with pytest.raises(ValueError):
        mills_tail_bound(0.0, 1.0)
    with pytest.raises(ValueError):
        mills_tail_bound(1.0, -1.0)
