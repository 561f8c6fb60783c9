import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fomlab.errors import ParameterError
from fomlab.schedule import (
    canonical_variant,
    fgm_coefficients,
    momentum_coefficients,
    theta_sequence,
    verify_theta_identities,
)

# theta_0^2 frozen from a 40-digit evaluation of the backward recursion
THETA0_SQ = {
    1: 4.0,
    2: 8.07830365682409,
    3: 13.2652746187085,
    4: 19.5435089332265,
    10: 79.5357825143482,
    20: 262.545137097213,
    30: 547.810612804233,
    40: 934.609833324206,
    50: 1422.57569485264,
}


@pytest.mark.parametrize("N,expected", sorted(THETA0_SQ.items()))
def test_theta0_squared_frozen(N, expected):
    assert theta_sequence("ogmg", N).theta0_sq == pytest.approx(expected, rel=1e-13)


def test_small_sequences():
    np.testing.assert_allclose(theta_sequence("ogmg", 1).values, [2.0, 1.0])
    np.testing.assert_allclose(theta_sequence("ogmg", 2).values,
                               [2.842235679, (1 + math.sqrt(5)) / 2, 1.0], rtol=1e-9)
    np.testing.assert_allclose(theta_sequence("ogm", 2).values,
                               [1.0, (1 + math.sqrt(5)) / 2, 2.842235679], rtol=1e-9)


def test_aliases():
    assert canonical_variant("ogmg") == "ogmg_tilde"
    assert canonical_variant("hat") == "ogm_hat"
    with pytest.raises(ParameterError):
        canonical_variant("fgm")


@pytest.mark.parametrize("N", [0, -3, 2.5, True])
def test_bad_N(N):
    with pytest.raises(ParameterError):
        theta_sequence("ogmg", N)


def test_sequence_is_immutable():
    seq = theta_sequence("ogmg", 5)
    with pytest.raises(ValueError):
        seq.values[0] = 1.0


def test_ogmg_momentum_frozen():
    c = momentum_coefficients("ogmg", theta_sequence("ogmg", 2))
    np.testing.assert_allclose(c.beta, [0.309392311007, 0.17082039325], rtol=1e-11)
    np.testing.assert_allclose(c.gamma, [0.477336246996, 0.4472135955], rtol=1e-11)


def test_ogm_momentum_matches_definition():
    seq = theta_sequence("ogm", 6)
    c = momentum_coefficients("ogm", seq)
    t = seq.values
    for i in range(6):
        assert c.beta[i] == pytest.approx((t[i] - 1) / t[i + 1])
        assert c.gamma[i] == pytest.approx(t[i] / t[i + 1])


def test_momentum_variant_mismatch():
    with pytest.raises(ParameterError):
        momentum_coefficients("ogm", theta_sequence("ogmg", 3))


def test_fgm_coefficients():
    c = fgm_coefficients(3)
    assert c.N == 3
    assert np.all(c.gamma == 0.0)
    assert c.beta[0] == 0.0
    assert c.beta[1] == pytest.approx(((1 + math.sqrt(5)) / 2 - 1) / ((1 + math.sqrt(1 + 4 * ((1 + math.sqrt(5)) / 2) ** 2)) / 2))


def test_identity_report_catches_corruption():
    seq = theta_sequence("ogmg", 6)
    values = seq.values.copy()
    values[3] *= 1.001
    bad = type(seq)(seq.variant, seq.N, values)
    rep = verify_theta_identities(bad)
    assert not rep.ok
    assert {v[1] for v in rep.violations} >= {2, 3}


def test_symmetry_needs_opposite_variant():
    with pytest.raises(ParameterError):
        verify_theta_identities(theta_sequence("ogmg", 3), theta_sequence("ogmg", 3))


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=400))
def test_mirror_and_rule(N):
    tilde = theta_sequence("ogmg", N)
    hat = theta_sequence("ogm", N)
    assert verify_theta_identities(tilde, rel=1e-13).ok
    assert verify_theta_identities(hat, tilde, rel=1e-13).ok
    np.testing.assert_array_equal(hat.values, tilde.values[::-1])


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=2, max_value=300))
def test_sequence_decreasing_and_bounded(N):
    t = theta_sequence("ogmg", N).values
    assert np.all(np.diff(t) < 0)
    assert t[0] >= (N + 1) / math.sqrt(2)
