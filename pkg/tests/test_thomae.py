from itertools import combinations

import numpy as np
import pytest

from thomae_lab.characteristics import enumerate_partitions
from thomae_lab.indexsets import complement_finite, iset
from thomae_lab.thomae import (
    EIGHTH_ROOTS,
    calibrate_phases,
    first_thomae_rhs,
    general_thomae_ratio_rhs,
    general_thomae_rhs,
    second_thomae_rhs,
    second_thomae_rhs_vector,
    snap_phase,
)


@pytest.mark.parametrize("g", [2, 3])
def test_first_thomae_all_characteristics(ctx, g):
    c = ctx(g)
    for i0 in combinations(range(1, 2 * g + 2), g):
        lhs = c.const(i0)
        rhs = first_thomae_rhs(c, i0)
        ratio = lhs / rhs
        assert abs(abs(ratio) - 1.0) < 1e-6, i0
        _, snap = snap_phase(ratio)
        assert snap < 1e-6, i0


def test_first_thomae_rejects_wrong_multiplicity(ctx):
    with pytest.raises(ValueError):
        first_thomae_rhs(ctx(2), (1,))


def test_first_thomae_common_factor_ratio(ctx):
    # the det(omega) factor drops out of ratios of two characteristics
    c = ctx(2)
    from thomae_lab.curve import vandermonde

    a, b = (1, 2), (3, 5)
    ratio = first_thomae_rhs(c, a) / first_thomae_rhs(c, b)
    ja, jb = complement_finite(5, a), complement_finite(5, b)
    expected = (
        vandermonde(c.spec, a) * vandermonde(c.spec, ja)
        / (vandermonde(c.spec, b) * vandermonde(c.spec, jb))
    ) ** 0.25
    assert abs(ratio - expected) < 1e-12 * abs(expected)


@pytest.mark.parametrize("g", [2, 3])
def test_second_thomae_componentwise(ctx, g):
    c = ctx(g)
    for part in enumerate_partitions(g, 1):
        lhs = c.grad(part.part)
        rhs = second_thomae_rhs_vector(c, part.part)
        k = int(np.argmax(np.abs(lhs)))
        phase, snap = snap_phase(lhs[k] / rhs[k])
        assert snap < 1e-6, part
        assert np.max(np.abs(lhs - phase * rhs)) < 1e-6 * np.max(np.abs(lhs)), part


def test_second_thomae_phase_common_across_components(ctx):
    c = ctx(3)
    lhs = c.grad((1, 2))
    rhs = second_thomae_rhs_vector(c, (1, 2))
    phases = lhs / rhs
    assert np.max(np.abs(phases - phases[0])) < 1e-10


def test_second_thomae_matches_general_machinery(ctx):
    # the closed form is the |K| = 1 general formula
    c = ctx(3)
    i1 = (2, 5)
    for k in complement_finite(7, i1)[:3]:
        v = general_thomae_rhs(c, i1, (2,), (k,))
        assert abs(v - second_thomae_rhs(c, i1, 2)) < 1e-12 * abs(v)


def test_second_thomae_rejects_wrong_multiplicity(ctx):
    with pytest.raises(ValueError):
        second_thomae_rhs(ctx(2), (1, 2), 1)


def test_general_thomae_m2_full_tensor(ctx):
    c = ctx(3)
    lhs = c.hess(())
    k_set = (1, 2, 3)
    pred = np.empty((3, 3), dtype=complex)
    for n1 in range(1, 4):
        for n2 in range(n1, 4):
            v = general_thomae_rhs(c, (), (n1, n2), k_set)
            pred[n1 - 1, n2 - 1] = pred[n2 - 1, n1 - 1] = v
    i, j = np.unravel_index(np.argmax(np.abs(lhs)), lhs.shape)
    phase, snap = snap_phase(lhs[i, j] / pred[i, j])
    assert snap < 1e-5
    assert np.max(np.abs(lhs - phase * pred)) < 1e-5 * np.max(np.abs(lhs))


def test_general_thomae_k_independence(ctx):
    c = ctx(3)
    vals = [
        general_thomae_rhs(c, (), (1, 2), k)
        for k in [(1, 2, 3), (4, 5, 6), (2, 5, 7), (3, 6, 7)]
    ]
    scale = max(abs(v) for v in vals)
    for v in vals[1:]:
        assert abs(v - vals[0]) < 1e-8 * scale


def test_general_thomae_tensor_symmetry(ctx):
    # the ordered-tuple sum is symmetric in the multi-index (up to the
    # floating-point summation order)
    c = ctx(3)
    v1 = general_thomae_rhs(c, (), (1, 2), (1, 2, 3))
    v2 = general_thomae_rhs(c, (), (2, 1), (1, 2, 3))
    assert abs(v1 - v2) < 1e-13 * abs(v1)


def test_general_thomae_k_size_validation(ctx):
    c = ctx(3)
    with pytest.raises(ValueError, match=r"\|K\|"):
        general_thomae_rhs(c, (), (1, 2), (1, 2, 3, 4))
    with pytest.raises(ValueError, match="disjoint"):
        general_thomae_rhs(c, (1,), (1,), (1, 2))
    with pytest.raises(ValueError, match="infinity"):
        general_thomae_rhs(c, (), (1, 2), (0, 2, 3))


def test_ratio_form_equals_quotient(ctx):
    c = ctx(3)
    i0 = (2, 4, 6)
    k_set = (2, 4, 6)
    r1 = general_thomae_ratio_rhs(c, (), (1, 3), k_set, i0)
    r2 = general_thomae_rhs(c, (), (1, 3), k_set) / first_thomae_rhs(c, i0)
    assert abs(r1 - r2) < 1e-10 * abs(r1)


def test_ratio_form_prefactor_positive(ctx):
    # with sorted real branch points the quartic prefactor is positive real
    c = ctx(4)
    i0 = (1, 2, 3, 4)
    val_a = general_thomae_ratio_rhs(c, (4,), (1, 1), (1, 2, 3), i0)
    val_b = general_thomae_rhs(c, (4,), (1, 1), (1, 2, 3)) / first_thomae_rhs(c, i0)
    assert abs(val_a - val_b) < 1e-10 * abs(val_a)


def test_calibration(ctx):
    for g in (2, 3):
        cal = calibrate_phases(ctx(g))
        assert cal.worst_residual() < 1e-6
        for ph in cal.phases.values():
            assert abs(ph**8 - 1) < 1e-12
            assert any(abs(ph - r) < 1e-12 for r in EIGHTH_ROOTS)
        assert len(cal.phases) == len(list(enumerate_partitions(g, 0)))


def test_calibration_failure_detected(ctx):
    # corrupting one cached theta constant must trip the calibration guard
    import copy

    c = ctx(2)
    broken = copy.copy(c)
    broken._const = dict(c._const)
    ch = c.char((1, 2))
    broken._const[ch] = c.const((1, 2)) * 1.07
    with pytest.raises(ValueError, match="phase calibration failed"):
        calibrate_phases(broken)
