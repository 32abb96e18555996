import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rotorkick.basis import ORIENTATION, build_basis
from rotorkick.dynamics import apply_kick, free_propagate, make_kick
from rotorkick.evolution import PERIOD, TraceSeries, global_max, measure_above
from rotorkick.operators import cos_theta_matrix, h0_matrix, thermal_state


def _kicked_state(j_max=3, beta=0.3, amplitude=1.7):
    basis = build_basis(j_max)
    rho = apply_kick(thermal_state(basis, beta), make_kick(basis, ORIENTATION, amplitude))
    return basis, rho


def test_series_matches_direct_propagation():
    # the frequency-grouped series must agree with propagating the state and
    # taking the trace directly, at every sample time
    basis, rho = _kicked_state()
    h0 = h0_matrix(basis)
    obs = cos_theta_matrix(basis)
    energies = np.diag(h0.matrix).real
    series = TraceSeries(rho.matrix, obs.matrix, energies)
    ts = np.linspace(0.0, 2 * PERIOD, 97)
    direct = np.array([free_propagate(rho, h0, t).expectation(obs) for t in ts])
    assert np.max(np.abs(series.values(ts) - direct)) < 1e-13


def test_series_is_periodic():
    basis, rho = _kicked_state()
    h0 = h0_matrix(basis)
    obs = cos_theta_matrix(basis)
    series = TraceSeries(rho.matrix, obs.matrix, np.diag(h0.matrix).real)
    ts = np.linspace(0.0, PERIOD, 33)
    assert np.max(np.abs(series.values(ts) - series.values(ts + PERIOD))) < 1e-12


def test_global_max_dominates_dense_grid():
    basis, rho = _kicked_state(j_max=4, amplitude=2.0)
    h0 = h0_matrix(basis)
    obs = cos_theta_matrix(basis)
    series = TraceSeries(rho.matrix, obs.matrix, np.diag(h0.matrix).real)
    res = global_max(series, 0.0)
    dense = series.values(np.linspace(0.0, PERIOD, 200001))
    assert res.value >= float(dense.max()) - 1e-10
    assert 0.0 <= res.t < PERIOD


def test_measure_above_matches_dense_count():
    basis, rho = _kicked_state(j_max=4, amplitude=2.0)
    h0 = h0_matrix(basis)
    obs = cos_theta_matrix(basis)
    series = TraceSeries(rho.matrix, obs.matrix, np.diag(h0.matrix).real)
    threshold = 0.2
    res = measure_above(series, threshold, t_anchor=0.1234)
    n = 400001
    dense = series.values(0.1234 + np.arange(n) * (PERIOD / n))
    fraction = float(np.count_nonzero(dense >= threshold)) / n
    assert res.total == pytest.approx(fraction, abs=2e-4)
    assert res.longest <= res.total + 1e-12


@settings(max_examples=40, deadline=None)
@given(
    st.floats(min_value=-4.0, max_value=4.0),
    st.floats(min_value=-4.0, max_value=4.0),
)
def test_free_propagation_composes(t1, t2):
    basis, rho = _kicked_state(j_max=2)
    h0 = h0_matrix(basis)
    one_step = free_propagate(rho, h0, t1 + t2)
    two_step = free_propagate(free_propagate(rho, h0, t1), h0, t2)
    assert np.max(np.abs(one_step.matrix - two_step.matrix)) < 1e-12
