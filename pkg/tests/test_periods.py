import numpy as np
import pytest

from thomae_lab.characteristics import branch_char
from thomae_lab.curve import validate_curve
from thomae_lab.periods import (
    abel_branch_point,
    branch_point_char_residuals,
    compute_periods,
    differential_row,
    halfperiod_residual,
)


def test_differential_row_imaginary_on_negative_f(curve):
    # g=1, x=0.5: f = (x+1) x (x-1) < 0, so the value is purely imaginary
    spec = curve(1)
    v = differential_row(spec, 1, 0.5)
    assert abs(v.real) < 1e-15 * abs(v)


def test_differential_row_parity_rule(curve):
    # between e_4 and e_5 one branch point lies to the right: imaginary
    spec = curve(2)
    v = differential_row(spec, 1, 4.5)
    assert abs(v.real) < 1e-15 * abs(v)
    # between e_3 and e_4 two branch points to the right: real
    v = differential_row(spec, 2, 3.5)
    assert abs(v.imag) < 1e-15 * abs(v)


def test_differential_row_singular_at_branch_point(curve):
    with pytest.raises(ValueError, match="singular at branch point"):
        differential_row(curve(2), 2, 3.0)


def test_g1_period_against_mpmath_oracle(curve):
    # |omega| = 2 int_{-1}^{0} dx / (2 sqrt|f|); the oracle is 200-digit
    # adaptive quadrature of the same segment integral
    mp = pytest.importorskip("mpmath")
    spec = curve(1)
    p = compute_periods(spec, 32)
    with mp.workdps(200):
        oracle = mp.quad(lambda x: 1 / mp.sqrt(abs((x + 1) * x * (x - 1))), [-1, 0])
    assert abs(abs(p.omega[0, 0]) - float(oracle)) < 1e-10


def test_tau_invariants(ctx):
    for g in (2, 3, 4):
        tau = ctx(g).periods.tau
        assert np.max(np.abs(tau - tau.T)) < 1e-9 * np.max(np.abs(tau))
        assert np.min(np.linalg.eigvalsh(tau.imag)) > 0


def test_order_doubling_stability(curve):
    spec = curve(2)
    p1 = compute_periods(spec, 48)
    p2 = compute_periods(spec, 96)
    scale = np.max(np.abs(p2.tau))
    assert np.max(np.abs(p1.tau - p2.tau)) < 1e-10 * scale
    assert p1.est_error < 1e-10


def test_halfperiod_residual_exact_target(ctx):
    c = ctx(2)
    char = branch_char(2, 3)
    tau = c.periods.tau
    v = 0.5 * np.asarray(char.eps, float) + tau @ (0.5 * np.asarray(char.eps_prime, float))
    assert halfperiod_residual(c.periods, v, char).norm < 1e-12


def test_halfperiod_residual_lattice_shift(ctx):
    c = ctx(2)
    char = branch_char(2, 4)
    tau = c.periods.tau
    v = 0.5 * np.asarray(char.eps, float) + tau @ (0.5 * np.asarray(char.eps_prime, float))
    v = v + tau[:, 0] + np.array([1.0, 0.0])
    assert halfperiod_residual(c.periods, v, char).norm < 1e-12


def test_halfperiod_residual_detects_wrong_char(ctx):
    c = ctx(2)
    v = abel_branch_point(c.spec, c.periods, 1)
    assert halfperiod_residual(c.periods, v, branch_char(2, 2)).norm > 1e-3


def test_abel_branch_points_match_characteristic_table(ctx):
    # the decisive cross-check of sheet and homology conventions
    for g in (2, 3, 4):
        c = ctx(g)
        res = branch_point_char_residuals(c.spec, c.periods)
        assert max(res.values()) < 1e-8, res


def test_abel_half_period_doubling(ctx):
    # 2 A(e_k) is a lattice point
    from thomae_lab.characteristics import zero_char

    c = ctx(2)
    for k in (1, 3, 5):
        v = 2.0 * abel_branch_point(c.spec, c.periods, k)
        assert halfperiod_residual(c.periods, v, zero_char(2)).norm < 1e-8


def test_period_cache_roundtrip(curve):
    from thomae_lab.periods import periods_from_json, periods_to_json

    spec = curve(2)
    p = compute_periods(spec, 48)
    back = periods_from_json(spec, periods_to_json(p))
    assert np.allclose(back.omega, p.omega)
    assert np.allclose(back.omega_prime, p.omega_prime)
    other = validate_curve(2, [1, 2, 3, 4, 6])
    with pytest.raises(ValueError, match="does not match curve"):
        periods_from_json(other, periods_to_json(p))
