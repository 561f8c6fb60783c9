import numpy as np
import pytest

from fomlab.engine import run_chain, run_fsfom, run_method, trace_metrics
from fomlab.errors import NumericalFailure, ParameterError
from fomlab.oracle import Quadratic, SmoothOracle
from fomlab.schedule import momentum_coefficients, theta_sequence
from fomlab.stepmatrix import StepSchedule, step_schedule

import _instances


def _e1(d=4):
    x = np.zeros(d)
    x[0] = 1.0
    return x


def test_ogmg_matches_triangle_least_squares(rng):
    ls = _instances.least_squares(rng)
    x0 = _instances.start(rng, ls.d)
    ref = run_fsfom(ls, x0, step_schedule("ogmg", 10)).xs
    for method in ("ogmg", "ogmg_zform"):
        assert _instances.rel_iterate_deviation(run_method(method, ls, x0, 10).xs, ref) <= 1e-9


def test_ogm_zform_matches(rng):
    q = _instances.quadratic(rng)
    x0 = _instances.start(rng, q.d)
    a = run_method("ogm", q, x0, 10).xs
    b = run_method("ogm_zform", q, x0, 10).xs
    assert _instances.rel_iterate_deviation(b, a) <= 1e-12


def test_gm_is_plain_gradient(rng):
    lg = _instances.logistic(rng)
    x0 = _instances.start(rng, lg.d)
    tr = run_method("gm", lg, x0, 5)
    for i in range(5):
        np.testing.assert_allclose(tr.xs[i + 1], tr.xs[i] - tr.grads[i] / lg.L)
    np.testing.assert_allclose(run_fsfom(lg, x0, step_schedule("gm", 5)).xs, tr.xs)


def test_ogmg_quadratic_worst_contraction():
    q = Quadratic(L=1.0, d=4)
    t = theta_sequence("ogmg", 8).values
    xs = run_method("ogmg", q, _e1(), 8).xs
    for i in range(1, 8):
        expected = -(2 * t[i + 1] - 1) / (2 * t[i] - 1) * xs[i]
        np.testing.assert_allclose(xs[i + 1], expected, atol=1e-15)


def test_accelerated_with_coefficients(rng):
    ls = _instances.least_squares(rng)
    x0 = _instances.start(rng, ls.d)
    c = momentum_coefficients("ogmg", theta_sequence("ogmg", 6))
    np.testing.assert_array_equal(run_method("accelerated", ls, x0, coeffs=c).xs,
                                  run_method("ogmg", ls, x0, 6).xs)
    with pytest.raises(ParameterError):
        run_method("accelerated", ls, x0, 5, coeffs=c)
    with pytest.raises(ParameterError):
        run_method("accelerated", ls, x0)


def test_quadratic_final_iterates_of_mirror_methods_coincide(rng):
    # on a quadratic the two triangles, related by index reversal, give the same x_N
    ls = _instances.least_squares(rng)
    x0 = _instances.start(rng, ls.d)
    a = run_method("ogm", ls, x0, 7)
    b = run_method("ogmg", ls, x0, 7)
    np.testing.assert_allclose(a.xs[-1], b.xs[-1], rtol=1e-10)
    assert not np.allclose(a.xs[3], b.xs[3])


def test_fgm_decreases_gap(rng):
    ls = _instances.least_squares(rng)
    tr = run_method("fgm", ls, _instances.start(rng, ls.d), 30)
    assert tr.fvals[-1] < tr.fvals[0]


def test_chain_structure():
    q = Quadratic(L=1.0, d=4)
    x0 = _e1()
    tr = run_chain(q, x0, 2)
    one = run_method("ogm", q, x0, 1)
    two = run_method("ogmg", q, one.xs[-1], 1)
    np.testing.assert_array_equal(tr.xs, np.vstack([one.xs, two.xs[1:]]))
    assert tr.N == 2 and tr.xs.shape == (3, 4)
    assert run_chain(q, x0, 7).method == "chain[ogm:4+ogmg:3]"
    with pytest.raises(ParameterError):
        run_chain(q, x0, 1)
    with pytest.raises(ParameterError):
        run_chain(q, x0, 4, split=4)


def test_chain_decreases_gradient(rng):
    ls = _instances.least_squares(rng)
    tr = run_chain(ls, _instances.start(rng, ls.d), 20)
    assert tr.grad_norm_sq[-1] <= tr.grad_norm_sq[0]


def test_trace_metrics(rng):
    ls = _instances.least_squares(rng)
    tr = run_method("ogmg", ls, _instances.start(rng, ls.d), 4)
    m = trace_metrics(tr, ls)
    assert len(m.per_iter) == 5
    assert m.func_gap_final == pytest.approx(tr.fvals[-1])
    assert m.grad_norm_sq_final == pytest.approx(float(tr.grads[-1] @ tr.grads[-1]))
    lg = _instances.logistic(rng)
    assert trace_metrics(run_method("gm", lg, np.zeros(lg.d), 2), lg).func_gap_final is None


class _Blowup(SmoothOracle):
    # declared L far below the true curvature, so the first step overflows
    def __init__(self):
        super().__init__(2, 1e-10)

    def value(self, x):
        return 0.5e300 * float(x @ x)

    def gradient(self, x):
        return 1e300 * x


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_non_finite_reports_iteration():
    with pytest.raises(NumericalFailure) as exc:
        run_method("gm", _Blowup(), np.array([1.0, 0.0]), 5)
    assert exc.value.iteration == 1


def test_custom_triangle(rng):
    q = _instances.quadratic(rng)
    s = StepSchedule(2, np.array([[1.0, 0.0], [0.5, 1.0]]))
    tr = run_fsfom(q, np.ones(q.d), s)
    g0, g1 = tr.grads[0], tr.grads[1]
    np.testing.assert_allclose(tr.xs[2], tr.xs[1] - (0.5 * g0 + g1) / q.L)


def test_unknown_method(rng):
    with pytest.raises(ParameterError):
        run_method("newton", _instances.quadratic(rng), np.ones(4), 3)


@pytest.mark.parametrize("factory", [_instances.least_squares, _instances.logistic,
                                     _instances.huber, _instances.quadratic])
@pytest.mark.parametrize("N", [1, 2, 3, 5, 10, 30])
def test_triangle_and_recursion_agree_everywhere(rng, factory, N):
    oracle = factory(rng)
    x0 = _instances.start(rng, oracle.d)
    for method in ("ogmg", "ogm"):
        ref = run_method(method, oracle, x0, N).xs
        xs = run_fsfom(oracle, x0, step_schedule(method, N)).xs
        assert _instances.rel_iterate_deviation(xs, ref) <= 1e-9
