import math

import numpy as np
import pytest

import contsid as cs
from contsid.errors import ArityError, DegenerateColumnError, DomainError
from contsid.kernels import KernelConfig


def test_rbf_same_point_is_one():
    for a, g in [(0.0, 1.0), (-3.7, 0.2), (1e6, 42.0)]:
        assert cs.rbf_eval(a, a, g) == 1.0


def test_rbf_closed_form_point():
    # distance gamma * sqrt(2) lands exactly on exp(-1)
    g = 1.7
    assert cs.rbf_eval(0.0, g * math.sqrt(2.0), g) == pytest.approx(math.exp(-1.0), rel=1e-12)


def test_rbf_symmetry_and_range():
    rng = np.random.default_rng(0)
    for _ in range(200):
        x, y = rng.normal(size=2) * 5
        g = float(rng.uniform(0.4, 4.0))
        v = cs.rbf_eval(x, y, g)
        assert v == cs.rbf_eval(y, x, g)
        assert 0.0 < v <= 1.0
        assert (v == 1.0) == (x == y)


def test_rbf_invalid_bandwidth():
    with pytest.raises(DomainError):
        cs.rbf_eval(0.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        cs.rbf_eval(0.0, 1.0, -1.0)


def test_rbf_nonfinite_input():
    with pytest.raises(DomainError):
        cs.rbf_eval(float("nan"), 1.0, 1.0)
    with pytest.raises(DomainError):
        cs.rbf_eval(0.0, float("inf"), 1.0)


def test_product_identical_tuples():
    cfg = KernelConfig(bandwidths={0: 1.0, 1: 2.0})
    assert cs.product_eval((0.3, -1.2), (0.3, -1.2), cfg, [0, 1]) == 1.0


def test_product_two_columns_multiplies():
    # each column at distance gamma * sqrt(2) contributes exp(-1)
    cfg = KernelConfig(bandwidths={0: 1.0, 1: 3.0})
    a = (0.0, 0.0)
    b = (math.sqrt(2.0), 3.0 * math.sqrt(2.0))
    assert cs.product_eval(a, b, cfg, [0, 1]) == pytest.approx(math.exp(-2.0), rel=1e-12)


def test_product_arity_mismatch():
    cfg = KernelConfig(bandwidths={0: 1.0, 1: 1.0})
    with pytest.raises(ArityError):
        cs.product_eval((0.0,), (0.0, 1.0), cfg, [0, 1])


def test_product_single_column_equals_rbf():
    cfg = KernelConfig(bandwidths={3: 0.8})
    rng = np.random.default_rng(1)
    for _ in range(50):
        x, y = rng.normal(size=2)
        assert cs.product_eval((x,), (y,), cfg, [3]) == pytest.approx(
            cs.rbf_eval(x, y, 0.8), rel=1e-14)


def test_gram_single_point():
    cfg = KernelConfig(bandwidths={0: 1.0})
    gm = cs.gram([(0.5,)], [(0.5,)], cfg, [0])
    assert gm.values.shape == (1, 1)
    assert gm.values[0, 0] == 1.0


def test_gram_self_two_points():
    cfg = KernelConfig(bandwidths={0: 1.0})
    pts = [(0.0,), (1.0,)]
    gm = cs.gram(pts, pts, cfg, [0])
    assert gm.symmetric
    assert np.allclose(np.diag(gm.values), 1.0)
    assert 0.0 < gm.values[0, 1] < 1.0


def test_gram_transpose_property():
    cfg = KernelConfig(bandwidths={0: 1.0, 1: 2.0})
    rng = np.random.default_rng(2)
    a = rng.normal(size=(7, 2))
    b = rng.normal(size=(5, 2))
    left = cs.gram(a, b, cfg, [0, 1]).values
    right = cs.gram(b, a, cfg, [0, 1]).values
    assert np.array_equal(left.T, right)


def test_gram_self_is_psd():
    rng = np.random.default_rng(3)
    cfg = KernelConfig(bandwidths={0: 1.3})
    for n in (5, 50, 200):
        pts = rng.normal(size=(n, 1)) * 3
        gm = cs.gram(pts, pts, cfg, [0])
        eigmin = float(np.linalg.eigvalsh(gm.values)[0])
        assert eigmin >= -1e-8 * np.trace(gm.values) / n


def test_gram_arity_mismatch():
    cfg = KernelConfig(bandwidths={0: 1.0})
    with pytest.raises(ArityError):
        cs.gram([(0.0, 1.0)], [(0.0, 1.0)], cfg, [0])


def test_median_bandwidth_single_pair():
    assert cs.median_bandwidth([0.0, 1.0]) == 1.0


def test_median_bandwidth_three_points():
    # pairwise gaps {1, 2, 3}, median 2
    assert cs.median_bandwidth([0.0, 1.0, 3.0]) == 2.0


def test_median_bandwidth_lower_median_on_ties():
    # gaps sorted: [1, 1, 2, 2, 3, 4]; lower median is the third entry
    assert cs.median_bandwidth([0.0, 1.0, 2.0, 4.0]) == 2.0


def test_median_bandwidth_constant_column():
    with pytest.raises(DegenerateColumnError):
        cs.median_bandwidth([5.0, 5.0, 5.0])


def test_median_bandwidth_mostly_tied_column():
    # not all equal, but the median pairwise gap is still zero
    with pytest.raises(DegenerateColumnError):
        cs.median_bandwidth([5.0, 5.0, 5.0, 7.0])


def test_median_bandwidth_too_short():
    with pytest.raises(DegenerateColumnError):
        cs.median_bandwidth([1.0])


def test_config_validation():
    with pytest.raises(DomainError):
        KernelConfig(regularization=0.0)
    with pytest.raises(DomainError):
        KernelConfig(bandwidths={0: -1.0})
    with pytest.raises(DomainError):
        KernelConfig(family="laplacian")
    with pytest.raises(DomainError):
        KernelConfig(bandwidth_rule="silverman")


def test_config_bandwidth_resolution():
    cfg = KernelConfig(bandwidths={1: 2.5}, bandwidth_rule="fixed", fixed_bandwidth=0.7)
    assert cfg.bandwidth_for(1) == 2.5
    assert cfg.bandwidth_for(0) == 0.7
    strict = KernelConfig(bandwidths={1: 2.5})
    with pytest.raises(DomainError):
        strict.bandwidth_for(0)


def test_config_with_bandwidths_merges():
    cfg = KernelConfig(bandwidths={0: 1.0})
    merged = cfg.with_bandwidths({1: 2.0})
    assert merged.bandwidth_for(0) == 1.0
    assert merged.bandwidth_for(1) == 2.0
