import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import entropy_bits, h2
from qpinsker import entropy as ent
from qpinsker.errors import DimensionMismatch, LengthMismatch, SupportViolation
from qpinsker.states import Ensemble, build_cq_state, pure_state, random_mixed, tensor, validate_density

X_ZERO_PLUS = (1 + 1 / math.sqrt(2)) / 2


@pytest.mark.parametrize("p, expected", [((0.5, 0.5), 1.0), ((1, 0), 0.0), ((0.25, 0.75), h2(0.25))])
def test_shannon(p, expected):
    assert ent.shannon_entropy(p) == pytest.approx(expected, abs=1e-12)


def test_shannon_frozen_value():
    assert h2(0.25) == pytest.approx(0.811278, abs=1e-6)


@pytest.mark.parametrize("joint, expected", [
    (np.full((2, 2), 0.25), 1.0),
    (np.diag([0.5, 0.5]), 0.0),
    ([[0.4, 0.1], [0.1, 0.4]], h2(0.2)),
])
def test_conditional_entropy(joint, expected):
    assert ent.conditional_entropy(joint) == pytest.approx(expected, abs=1e-12)


def test_conditional_entropy_zero_column():
    assert ent.conditional_entropy([[0.5, 0.0], [0.5, 0.0]]) == pytest.approx(1.0)


@pytest.mark.parametrize("joint, expected", [
    (np.outer([0.3, 0.7], [0.6, 0.4]), 0.0),
    (np.diag([0.5, 0.5]), 1.0),
    ([[0.4, 0.1], [0.1, 0.4]], 1 - h2(0.2)),
])
def test_mutual_information(joint, expected):
    assert ent.mutual_information(joint) == pytest.approx(expected, abs=1e-12)
    assert 1 - h2(0.2) == pytest.approx(0.278072, abs=1e-6)


def test_classical_relative_entropy():
    assert ent.classical_relative_entropy([0.2, 0.8], [0.2, 0.8]) == 0.0
    assert ent.classical_relative_entropy([1, 0], [0.5, 0.5]) == pytest.approx(1.0)
    assert ent.classical_relative_entropy([0.5, 0.5], [1, 0]) == math.inf
    with pytest.raises(SupportViolation):
        ent.classical_relative_entropy([0.5, 0.5], [1, 0], mode="strict")
    with pytest.raises(LengthMismatch):
        ent.classical_relative_entropy([1], [0.5, 0.5])


def test_von_neumann():
    assert ent.von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0, abs=1e-12)
    assert ent.von_neumann_entropy(pure_state([1, 2, 3j])) == pytest.approx(0.0, abs=1e-12)
    assert ent.von_neumann_entropy(np.diag([0.25, 0.75])) == pytest.approx(h2(0.25), abs=1e-12)


def test_von_neumann_matches_spectrum(rng):
    rho = random_mixed(5, rng)
    assert ent.von_neumann_entropy(rho) == pytest.approx(entropy_bits(np.linalg.eigvalsh(rho.matrix)), abs=1e-12)


def test_quantum_relative_entropy_examples(ket0):
    rho = random_mixed(3, 4)
    assert ent.quantum_relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-12)
    assert ent.quantum_relative_entropy(ket0, np.eye(2) / 2) == pytest.approx(1.0, abs=1e-12)
    assert ent.quantum_relative_entropy(np.eye(2) / 2, ket0) == math.inf
    with pytest.raises(SupportViolation):
        ent.quantum_relative_entropy(np.eye(2) / 2, ket0, mode="strict")
    with pytest.raises(DimensionMismatch):
        ent.quantum_relative_entropy(ket0, np.eye(3) / 3)


def test_relative_entropy_inside_support():
    rho = validate_density(np.diag([0.5, 0.5, 0]))
    sigma = validate_density(np.diag([0.25, 0.25, 0.5]))
    assert ent.quantum_relative_entropy(rho, sigma) == pytest.approx(1.0, abs=1e-12)


def test_relative_entropy_commuting_case_matches_classical(rng):
    p, q = rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(4))
    u = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))[0]
    rho = u @ np.diag(p) @ u.conj().T
    sigma = u @ np.diag(q) @ u.conj().T
    expected = float(sum(a * math.log2(a / b) for a, b in zip(p, q)))
    assert ent.quantum_relative_entropy(rho, sigma) == pytest.approx(expected, abs=1e-10)


def test_quantum_mutual_information_examples(bell):
    prod = tensor(random_mixed(2, 1), random_mixed(3, 2))
    assert ent.quantum_mutual_information(prod, (2, 3)) == pytest.approx(0.0, abs=1e-12)
    assert ent.quantum_mutual_information(bell, (2, 2)) == pytest.approx(2.0, abs=1e-12)
    assert ent.quantum_joint_entropy(bell, (2, 2)) == pytest.approx(0.0, abs=1e-12)
    cc = validate_density(np.diag([0.5, 0, 0, 0.5]))
    assert ent.quantum_mutual_information(cc, (2, 2)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DimensionMismatch):
        ent.quantum_mutual_information(bell, (3, 3))


def test_holevo_examples(ket0, ket1, zero_plus):
    rho = random_mixed(2, 3)
    assert ent.holevo_information(Ensemble.uniform([rho, rho])) == pytest.approx(0.0, abs=1e-12)
    assert ent.holevo_information(Ensemble.uniform([ket0, ket1])) == pytest.approx(1.0, abs=1e-12)
    assert ent.holevo_information(zero_plus) == pytest.approx(h2(X_ZERO_PLUS), abs=1e-12)
    assert h2(X_ZERO_PLUS) == pytest.approx(0.600876, abs=1e-6)


def test_cq_joint_entropy_examples(ket0):
    states = [pure_state(v) for v in ([1, 0, 0], [0, 1, 1], [1, 1j, 0])]
    assert ent.cq_joint_entropy(build_cq_state(Ensemble.uniform(states))) == pytest.approx(math.log2(3))
    rho = random_mixed(3, 8)
    assert ent.cq_joint_entropy(build_cq_state(Ensemble([1.0], [rho]))) == pytest.approx(ent.von_neumann_entropy(rho))
    c = build_cq_state(Ensemble.uniform([ket0, np.eye(2) / 2]))
    assert ent.cq_joint_entropy(c) == pytest.approx(1.5, abs=1e-12)
    assert ent.cq_dense_entropy(c) == pytest.approx(1.5, abs=1e-12)


def _random_joint(seed):
    rng = np.random.default_rng(seed)
    n, m = rng.integers(1, 9, size=2)
    return rng.dirichlet(np.ones(n * m)).reshape(n, m)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_mutual_information_identities(seed):
    j = _random_joint(seed)
    px, py = j.sum(1), j.sum(0)
    i = ent.mutual_information(j)
    assert ent.classical_relative_entropy(j.ravel(), np.outer(px, py).ravel()) == pytest.approx(i, abs=1e-9)
    assert ent.shannon_entropy(px) - ent.conditional_entropy(j, "Y") == pytest.approx(i, abs=1e-9)
    assert ent.shannon_entropy(py) - ent.conditional_entropy(j, "X") == pytest.approx(i, abs=1e-9)
    assert i >= -1e-9


def _random_ensemble(seed):
    rng = np.random.default_rng(seed)
    m, d = int(rng.integers(1, 5)), int(rng.integers(1, 5))
    return Ensemble(rng.dirichlet(np.ones(m)), [random_mixed(d, rng) for _ in range(m)])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_holevo_identities(seed):
    e = _random_ensemble(seed)
    c = build_cq_state(e)
    chi = ent.holevo_information(e)
    assert 0 <= chi <= math.log2(e.dim) + 1e-9
    assert ent.quantum_mutual_information(c.dense_state(), (c.classical_dim, c.dim)) == pytest.approx(chi, abs=1e-9)
    assert ent.holevo_from_relative_entropies(e) == pytest.approx(chi, abs=1e-9)
    assert ent.cq_joint_entropy(c) == pytest.approx(ent.cq_dense_entropy(c), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_mutual_information_is_relative_entropy(da, db, seed):
    rho = random_mixed(da * db, seed)
    iq = ent.quantum_mutual_information(rho, (da, db))
    assert iq >= -1e-9
    assert ent.quantum_relative_entropy(rho, ent.product_of_marginals(rho, (da, db))) == pytest.approx(iq, abs=1e-9)
