import numpy as np
import pytest

from wagner.curvature import (FLAT_TOLERANCE, agrees, bracket_table, curvature_at,
                              flatness_scan, lie_bracket_oracle, trace_identity,
                              wagner_horizontal, wagner_mixed)
from wagner.errors import ConfigurationError, StepUnderflowError
from wagner.finsler import FinslerMetric
from wagner.sampling import sample_points


def test_curv5_horizontal_at_origin(heis5, curv5, origin_e1):
    R = wagner_horizontal(curv5, heis5, origin_e1)
    assert R[1, 0, 1] == pytest.approx(1.0)
    assert R[1, 1, 0] == pytest.approx(-1.0)
    np.testing.assert_allclose(R, -R.transpose(0, 2, 1), atol=1e-12)


def test_curv5_k_trace(heis5, curv5, origin_e1):
    curvature = curvature_at(curv5, heis5, origin_e1)
    assert curvature.K_trace[1] == pytest.approx(2.0)
    assert curvature.max_abs >= 1.0


def test_warp5_is_flat_at_origin(heis5, warp5, origin_e1):
    np.testing.assert_allclose(wagner_horizontal(warp5, heis5, origin_e1), 0, atol=1e-12)
    np.testing.assert_allclose(wagner_mixed(warp5, heis5, origin_e1), 0, atol=1e-12)


def test_trace_identity_matches_curvature(heis5, curv5, generic_point):
    identity = trace_identity(curv5, heis5, generic_point)
    np.testing.assert_allclose(identity['residual'], identity['lhs'] - identity['rhs'])
    curvature = curvature_at(curv5, heis5, generic_point)
    np.testing.assert_allclose(curvature.trace_residual, identity['residual'], atol=1e-12)


@pytest.mark.parametrize('pair', [(1, 2), (1, 3), (2, 4), (1, 'n'), (2, 'n')])
def test_bracket_oracle_curv5(heis5, curv5, generic_point, pair):
    result = lie_bracket_oracle(curv5, heis5, generic_point, pair)
    curvature = curvature_at(curv5, heis5, generic_point)
    a = pair[0] - 1
    if pair[1] == 'n':
        formula = curvature.R_mixed[:, a]
    else:
        formula = curvature.R_hor[:, a, pair[1] - 1]
    assert agrees(formula, result.components)
    assert result.structure_residual <= 1e-6


def test_bracket_u_component(heis5, curv5, origin_e1):
    result = lie_bracket_oracle(curv5, heis5, origin_e1, (1, 2))
    assert result.u_component == pytest.approx(-1.0, abs=1e-8)
    assert abs(result.u_residual) <= 1e-8


def test_bracket_bad_pair(heis5, curv5, origin_e1):
    with pytest.raises(ConfigurationError):
        lie_bracket_oracle(curv5, heis5, origin_e1, (0, 2))
    with pytest.raises(ConfigurationError):
        lie_bracket_oracle(curv5, heis5, origin_e1, (1, 'x'))


def test_step_underflow(heis5, curv5, origin_e1):
    with pytest.raises(StepUnderflowError):
        lie_bracket_oracle(curv5, heis5, origin_e1, (1, 2), h=1e-20)


def test_agrees():
    assert agrees([1.0, 0.0], [1.0 + 1e-7, 1e-9])
    assert not agrees([1.0], [1.01])
    assert not agrees([0.0], [1e-6])
    assert agrees([0.005], [0.005 + 5e-9])


@pytest.mark.parametrize('name, expected', [
    ('F_EUC', 'flat'),
    ('WARP5', 'flat'),
    ('RAND5', 'flat'),
    ('CURV5', 'non-flat'),
])
def test_flatness_scan(heis5, name, expected):
    samples = sample_points(2, 6, seed=2)
    report = flatness_scan(FinslerMetric.preset(name), heis5, samples)
    assert report.classification == expected
    assert report.count == 6
    assert len(report.per_sample) == 6
    if expected == 'flat':
        assert report.max_R_hor <= FLAT_TOLERANCE
    else:
        assert report.argmax_R_hor in samples


def test_flatness_scan_threads_keep_order(heis5, curv5):
    samples = sample_points(2, 4, seed=9)
    serial = flatness_scan(curv5, heis5, samples)
    threaded = flatness_scan(curv5, heis5, samples, threads=3)
    assert threaded.per_sample == serial.per_sample


def test_flatness_scan_needs_samples(heis5, curv5):
    with pytest.raises(ConfigurationError):
        flatness_scan(curv5, heis5, [])


@pytest.mark.slow
@pytest.mark.parametrize('name', ['F_EUC', 'WARP5', 'CURV5', 'RAND5'])
def test_bracket_table(heis5, name):
    fm = FinslerMetric.preset(name)
    for p in sample_points(2, 100, seed=4):
        rows = bracket_table(fm, heis5, p)
        assert len(rows) == 6 + 4
        assert all(row['passed'] for row in rows)


@pytest.mark.parametrize('name', ['WARP5', 'CURV5', 'RAND5'])
@pytest.mark.parametrize('factor', [0.5, 2.0, 7.0])
def test_curvature_homogeneity(heis5, generic_point, name, factor):
    fm = FinslerMetric.preset(name)
    base = curvature_at(fm, heis5, generic_point)
    scaled = curvature_at(fm, heis5, generic_point.scaled(factor))
    np.testing.assert_allclose(scaled.R_hor, factor * base.R_hor, rtol=1e-8, atol=1e-9)
    np.testing.assert_allclose(scaled.R_mixed, factor * base.R_mixed, rtol=1e-8, atol=1e-9)


def test_curv5_curvature_is_large_on_unit_vectors(heis5, curv5):
    samples = sample_points(2, 10, seed=0, radius=(1.0, 1.0))
    report = flatness_scan(curv5, heis5, samples)
    assert report.classification == 'non-flat'
    assert max(report.max_R_hor, report.max_R_mixed) > 0.1


@pytest.mark.slow
@pytest.mark.parametrize('name, expected', [
    ('F_EUC', 'flat'),
    ('WARP5', 'flat'),
    ('CURV5', 'non-flat'),
])
def test_flatness_scan_unit_box(heis5, name, expected):
    samples = sample_points(2, 1000, seed=0, radius=(1.0, 1.0))
    report = flatness_scan(FinslerMetric.preset(name), heis5, samples)
    assert report.classification == expected
    if expected == 'non-flat':
        assert max(report.max_R_hor, report.max_R_mixed) > 0.1
