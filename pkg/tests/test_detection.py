import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import qubit_projective_mi_grid, sdp_guessing_probability
from qpinsker import detection as det
from qpinsker.entropy import holevo_information
from qpinsker.errors import DimensionMismatch, NoConvergence
from qpinsker.states import Ensemble, Povm, pure_state, random_mixed, random_pure

HELSTROM_ZERO_PLUS = 0.5 * (1 + 1 / math.sqrt(2))


def _random_ensemble(seed, m=None, d=None):
    rng = np.random.default_rng(seed)
    m = m or int(rng.integers(2, 5))
    d = d or int(rng.integers(2, 5))
    return Ensemble(rng.dirichlet(np.ones(m)), [random_mixed(d, rng) for _ in range(m)])


def test_helstrom_examples(ket0, ket1, ketplus):
    r = det.helstrom_binary(0.5, ket0, ket1)
    assert r.p_e == pytest.approx(0.0, abs=1e-12)
    r = det.helstrom_binary(0.5, ket0, ket0)
    assert r.p_e == pytest.approx(0.5, abs=1e-12)
    r = det.helstrom_binary(0.5, ket0, ketplus)
    assert r.p_e == pytest.approx(0.146447, abs=1e-6)
    assert r.p_e == pytest.approx(0.5 * (1 - 1 / math.sqrt(2)), abs=1e-12)
    assert r.certificate_residual < 1e-12
    with pytest.raises(DimensionMismatch):
        det.helstrom_binary(0.5, ket0, np.eye(3) / 3)


def test_helstrom_pure_state_formula(rng):
    for _ in range(50):
        d = int(rng.integers(2, 6))
        a, b = random_pure(d, rng), random_pure(d, rng)
        p0 = float(rng.uniform(0.05, 0.95))
        overlap = float(np.real(np.trace(a.matrix @ b.matrix)))
        expected = 0.5 * (1 - math.sqrt(1 - 4 * p0 * (1 - p0) * overlap))
        assert det.helstrom_binary(p0, a, b).p_e == pytest.approx(expected, abs=1e-10)


def test_pgm_examples(ket0, ket1, zero_plus):
    pgm = det.pretty_good_measurement(Ensemble.uniform([ket0, ket1]))
    assert det.detection_probability(Ensemble.uniform([ket0, ket1]), pgm) == pytest.approx(1.0)
    # for two equiprobable pure states the square-root measurement is optimal
    assert det.detection_probability(zero_plus, det.pretty_good_measurement(zero_plus)) == pytest.approx(
        HELSTROM_ZERO_PLUS, abs=1e-12)


def test_pgm_rank_deficient_average_is_complete(ket0):
    e = Ensemble([0.5, 0.5], [pure_state([1, 0, 0]), pure_state([1, 1, 0])])
    pgm = det.pretty_good_measurement(e)
    assert np.allclose(sum(pgm.elements), np.eye(3), atol=1e-12)


def test_optimize_examples(ket0, ket1, zero_plus, trine):
    assert det.optimize_detection(Ensemble.uniform([ket0, ket1])).p_d == pytest.approx(1.0)
    r = det.optimize_detection(zero_plus)
    assert r.p_d == pytest.approx(0.853553, abs=1e-6)
    assert r.p_d + r.p_e == pytest.approx(1.0, abs=1e-12)
    assert r.converged
    t = det.optimize_detection(trine)
    assert t.p_d == pytest.approx(2 / 3, abs=1e-9)
    assert t.certificate_residual <= 1e-9


def test_single_hypothesis_and_identical_states():
    rho = random_mixed(3, 1)
    assert det.optimize_detection(Ensemble([1.0], [rho])).p_d == pytest.approx(1.0)
    r = det.optimize_detection(Ensemble([0.2, 0.8], [rho, rho]))
    assert r.p_d == pytest.approx(0.8, abs=1e-12)


def test_residual_examples(zero_plus):
    blind = det.blind_povm(2, 2)
    assert det.optimality_residual(zero_plus, blind) > 0.1
    assert det.optimality_residual(zero_plus, det.optimize_detection(zero_plus).povm) <= 1e-9
    with pytest.raises(DimensionMismatch):
        det.optimality_residual(zero_plus, det.blind_povm(3, 2))


def test_strict_raises_when_budget_exhausted():
    e = _random_ensemble(5, m=4, d=3)
    loose = det.optimize_detection(e, tol=1e-15, max_iter=1)
    assert not loose.converged
    with pytest.raises(NoConvergence) as info:
        det.optimize_detection(e, tol=1e-15, max_iter=1, strict=True)
    assert info.value.result.p_d == loose.p_d


def test_history_is_monotone():
    for seed in range(20):
        h = det.optimize_detection(_random_ensemble(seed)).history
        assert all(b >= a - 1e-12 for a, b in zip(h, h[1:]))


def test_dual_bound_brackets_optimum():
    for seed in range(10):
        r = det.optimize_detection(_random_ensemble(seed))
        assert r.p_d <= r.dual_bound + 1e-12
        assert r.dual_bound - r.p_d <= 1e-7


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_detection_ordering(seed):
    e = _random_ensemble(seed)
    r = det.optimize_detection(e)
    pgm = det.detection_probability(e, det.pretty_good_measurement(e))
    assert r.p_d >= pgm - 1e-9
    assert r.p_d >= float(np.max(e.p)) - 1e-9
    assert abs(r.p_d + r.p_e - 1) <= 1e-9


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 0.99), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_binary_matches_helstrom(p0, d, seed):
    rng = np.random.default_rng(seed)
    a, b = random_mixed(d, rng), random_mixed(d, rng)
    opt = det.optimize_detection(Ensemble([p0, 1 - p0], [a, b]))
    assert opt.p_e == pytest.approx(det.helstrom_binary(p0, a, b).p_e, abs=1e-7)


def test_matches_sdp_oracle():
    pytest.importorskip("cvxpy")
    for seed in range(5):
        e = _random_ensemble(100 + seed)
        assert det.optimize_detection(e).p_d == pytest.approx(sdp_guessing_probability(e.weighted()), abs=1e-6)


def test_accessible_information_examples(ket0, ket1, zero_plus):
    assert det.accessible_information(Ensemble.uniform([ket0, ket1])) == pytest.approx(1.0, abs=1e-9)
    basis = [pure_state(np.eye(4)[i]) for i in range(4)]
    assert det.accessible_information(Ensemble.uniform(basis)) == pytest.approx(2.0, abs=1e-6)
    rho = random_mixed(3, 2)
    assert det.accessible_information(Ensemble.uniform([rho, rho, rho])) == pytest.approx(0.0, abs=1e-12)
    assert det.accessible_information(zero_plus) == pytest.approx(0.399124, abs=1e-6)


def test_accessible_information_matches_grid(zero_plus, trine):
    for e in (zero_plus, trine):
        assert det.accessible_information(e) == pytest.approx(qubit_projective_mi_grid(e.weighted()), abs=1e-6)


def test_accessible_information_below_holevo():
    for seed in range(8):
        e = _random_ensemble(seed, d=int(np.random.default_rng(seed).integers(2, 4)))
        cfg = det.AccessibleInfoConfig(restarts=4, max_iter=200)
        assert det.accessible_information(e, cfg) <= holevo_information(e) + 1e-7


def test_mutual_information_of_random_povm_is_valid(rng):
    e = _random_ensemble(3, m=3, d=3)
    povm = det.random_povm(3, 9, rng)
    assert isinstance(povm, Povm)
    joint = povm.joint(e)
    assert np.all(joint >= -1e-12)
    assert joint.sum() == pytest.approx(1.0, abs=1e-12)
    assert 0 <= det.mutual_information_of(e, povm) <= holevo_information(e) + 1e-7


def test_ascent_does_not_decrease(rng):
    e = _random_ensemble(9, m=3, d=3)
    start = det.random_povm(3, 9, rng)
    value, povm = det.povm_mi_ascent(e, start.stack(), max_iter=100)
    assert value >= det.mutual_information_of(e, start) - 1e-12
    assert np.allclose(povm.sum(axis=0), np.eye(3), atol=1e-9)
