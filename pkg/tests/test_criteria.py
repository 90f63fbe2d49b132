import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from hpnc.criteria import (CriterionReport, evaluate_all, first_order_violation,
                           higher_order_violation, mandel_violation, min_quadrature_variance,
                           squeezing_violation)
from hpnc.errors import DimensionError
from hpnc.fock import (DensityOperator, StateSpec, quadrature_variance, random_pure_state,
                       state_from_spec)


def build(kind, dim, **params):
    return state_from_spec(StateSpec(kind, params), dim)


def test_mandel_examples():
    assert mandel_violation(build("coherent", 40, alpha=1)) == pytest.approx(0, abs=1e-12)
    assert mandel_violation(build("fock", 10, n=1)) == 1
    th = build("thermal", 60, nbar=1.0)
    # <a^dag^2 a^2> = 2 nbar^2 by the diagonal sum
    diag_sum = sum(n * (n - 1) * w for n, w in enumerate(np.diag(th.matrix).real))
    assert diag_sum == pytest.approx(oracles.thermal_factorial_moment(1.0, 2), abs=1e-12)
    assert mandel_violation(th) == pytest.approx(-1, abs=1e-12)


@pytest.mark.parametrize("n,ell,expected", [(2, 3, 8), (3, 3, 21)])
def test_higher_order_on_fock(n, ell, expected):
    assert higher_order_violation(build("fock", 10, n=n), ell) == pytest.approx(expected)


@pytest.mark.parametrize("ell", [2, 3, 4, 5])
def test_higher_order_zero_on_coherent(ell):
    s = build("coherent", 60, alpha=1.3 - 0.4j)
    assert higher_order_violation(s, ell) == pytest.approx(0, abs=1e-10)


def test_higher_order_bounds():
    s = build("fock", 4, n=0)
    with pytest.raises(DimensionError):
        higher_order_violation(s, 4)
    with pytest.raises(DimensionError):
        higher_order_violation(s, 1)


def test_first_order_examples():
    assert first_order_violation(build("coherent", 60, alpha=2)) == pytest.approx(0, abs=1e-12)
    assert first_order_violation(build("fock", 10, n=1)) == pytest.approx(-1)
    assert first_order_violation(build("squeezed_vacuum", 40, r=0.5)) == pytest.approx(
        -math.sinh(0.5) ** 2, abs=1e-12)


def test_squeezing_examples():
    value, _ = squeezing_violation(build("fock", 5, n=0))
    assert value == pytest.approx(0, abs=1e-15)
    value, theta = squeezing_violation(build("squeezed_vacuum", 40, r=0.5))
    assert value == pytest.approx(0.5 - math.exp(-1) / 2, abs=1e-12)
    assert min(theta, math.pi - theta) < 1e-6
    value, _ = squeezing_violation(build("fock", 10, n=1))
    assert value == pytest.approx(-1, abs=1e-12)


def test_min_variance_matches_fine_grid(rng):
    # brute force over a 1e-6 rad grid around the coarse optimum
    s = random_pure_state(rng, 10)
    coarse = np.linspace(0, math.pi, 2001)
    vals = [oracles.padded_quadrature_variance(s.amplitudes, t) for t in coarse]
    t0 = coarse[int(np.argmin(vals))]
    fine = np.arange(t0 - 2e-3, t0 + 2e-3, 1e-6)
    grid_min = min(quadrature_variance(s, t) for t in fine)
    var, theta = min_quadrature_variance(s)
    assert var == pytest.approx(grid_min, abs=1e-10)
    assert quadrature_variance(s, theta) == pytest.approx(var, abs=1e-13)


def test_report_decision_follows_tolerance():
    assert CriterionReport("mandel", 2e-9).nonclassical
    assert not CriterionReport("mandel", 5e-10).nonclassical
    rows = evaluate_all(build("fock", 10, n=1))
    assert [(r.criterion, r.order) for r in rows] == [
        ("mandel", None), ("higher_order", 3), ("first_order", None), ("squeezing", None)]
    assert [round(r.value, 12) for r in rows] == [1, 1, -1, -1]


@pytest.mark.parametrize("n", range(1, 12))
def test_mandel_on_fock_equals_n(n):
    assert mandel_violation(build("fock", 14, n=n)) == pytest.approx(n)


def random_mixed(rng, dim, k=3):
    vecs = [random_pure_state(rng, dim).amplitudes for _ in range(k)]
    w = rng.dirichlet(np.ones(k))
    rho = sum(wi * np.outer(v, v.conj()) for wi, v in zip(w, vecs))
    return DensityOperator(rho / np.trace(rho))


@settings(max_examples=80, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(2, 20))
def test_first_order_never_fires(seed, dim):
    rng = np.random.default_rng(seed)
    assert first_order_violation(random_pure_state(rng, dim)) <= 1e-12
    assert first_order_violation(random_mixed(rng, dim)) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_ell_two_is_mandel_bit_for_bit(seed):
    s = random_pure_state(np.random.default_rng(seed), 12)
    assert higher_order_violation(s, 2) == mandel_violation(s)


@settings(max_examples=40, deadline=None)
@given(alpha=st.complex_numbers(max_magnitude=2.5, allow_nan=False, allow_infinity=False),
       nbar=st.floats(0, 2.0))
def test_classical_states_not_flagged(alpha, nbar):
    for s in (build("coherent", 70, alpha=alpha), build("thermal", 90, nbar=nbar)):
        for report in evaluate_all(s, orders=(3, 4)):
            assert not report.nonclassical, report
