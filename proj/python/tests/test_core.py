import math

import numpy as np
import pytest

import leakywire as lw


def test_green_values():
    assert lw.green(1.0, 1.0) == pytest.approx(math.exp(-1.0) / (4.0 * math.pi))
    assert lw.green_smooth(1.0, 0.0) == pytest.approx(-1.0 / (4.0 * math.pi))
    with pytest.raises(lw.DomainError):
        lw.green(1.0, 0.0)


def test_thresholds():
    t = lw.thresholds(0.0)
    assert t.L_no_bind == pytest.approx(2.0)
    assert t.L_exists == pytest.approx(11.1908, rel=1e-5)
    assert t.ratio == pytest.approx(math.pi * math.exp(0.5772156649015329))


def test_curves():
    c = lw.Curve.circle(2.0 * math.pi)
    assert c.closed
    assert c.chord(0.0, math.pi) == pytest.approx(2.0)
    seg = lw.Curve.segment(3.0)
    assert np.allclose(seg.point(1.5), [1.5, 0.0, 0.0])
    with pytest.raises(lw.ConfigError):
        lw.Curve.fourier(2.0 * math.pi, [0, 0, 0], [[1, 0, 0]], [[0, 2, 0]])


def test_operator_matrices():
    op = lw.QOperator(lw.Curve.segment(2.0), panels=16)
    q = op.assemble(-1.0)
    assert q.M.shape == (op.size, op.size)
    assert np.allclose(q.M, q.M.T)
    assert np.all(np.linalg.eigvalsh(q.B) > 0.0)


def test_circle_trig_basis():
    c = lw.Curve.circle(2.0 * math.pi)
    op = lw.QOperator(c, basis="trig", panels=32, harmonics=3)
    eta = op.eta(-1.0)
    assert eta[0] == pytest.approx(lw.circle_symbol(c, -1.0, 0), rel=1e-8)


def test_bound_states():
    op = lw.QOperator(lw.Curve.segment(6.0), panels=48)
    states = lw.bound_states(op, 0.0)
    assert states
    g = states[0]
    assert g.lambda_ < 0.0
    assert g.trace(3.0) > 0.0
    assert g.psi([3.0, 0.5, 0.0]) > 0.0
    assert lw.bound_states(lw.QOperator(lw.Curve.segment(0.5), panels=16), 0.0) == []


def test_regularized_limit():
    c = lw.Curve.segment(2.0)
    direct = lw.q_apply_direct(c, -1.0, "one", 0.7)
    value, error = lw.q_apply_via_family(c, -1.0, "recess", "one", 0.7)
    assert abs(value - direct) <= error + 1e-12
