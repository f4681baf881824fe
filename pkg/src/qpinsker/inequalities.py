"""Both sides of the Pinsker-type bounds, returned as BoundCheck records.

``slack = lhs - rhs``; an infinite left side (support violation) gives an
infinite slack, which counts as the bound holding.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from . import entropy
from .distance import cq_trace_distance, statistical_distance, trace_norm
from .entropy import product_of_marginals
from .states import Ensemble, as_density, as_joint, as_probdist, build_cq_state

LN2 = math.log(2.0)
# coefficient of ||.||^2 in the un-halved forms
PINSKER_COEF = 1.0 / (2.0 * LN2)
# coefficient of Delta^2 in the halved forms
HALVED_COEF = 2.0 / LN2


@dataclass(frozen=True)
class BoundCheck:
    lhs: float
    rhs: float
    slack: float
    theorem: str
    inputs_digest: str

    @property
    def holds(self) -> bool:
        return self.slack >= -1e-9

    def as_dict(self) -> dict:
        return {"theorem": self.theorem, "lhs": self.lhs, "rhs": self.rhs,
                "slack": self.slack, "inputs_digest": self.inputs_digest}


def digest(*arrays) -> str:
    """Short content hash of the numeric inputs, for tracing instances in reports."""
    h = hashlib.sha256()
    for a in arrays:
        a = np.ascontiguousarray(np.asarray(getattr(a, "matrix", getattr(a, "probs", a))))
        h.update(str(a.shape).encode())
        h.update(a.astype(complex if np.iscomplexobj(a) else float).tobytes())
    return h.hexdigest()[:16]


def _check(lhs: float, rhs: float, theorem: str, *inputs) -> BoundCheck:
    slack = math.inf if math.isinf(lhs) else lhs - rhs
    return BoundCheck(float(lhs), float(rhs), float(slack), theorem, digest(*inputs))


def pinsker_classical(p, q) -> BoundCheck:
    """D(P||Q) >= ||P - Q||^2 / (2 ln 2) with the un-halved L1 norm."""
    p, q = as_probdist(p), as_probdist(q)
    lhs = entropy.classical_relative_entropy(p, q)
    rhs = PINSKER_COEF * statistical_distance(p, q) ** 2
    return _check(lhs, rhs, "pinsker_classical", p, q)


def joint_delta_c(j) -> float:
    """Half the L1 distance between P(x, y) and P(x)P(y)."""
    j = as_joint(j)
    return 0.5 * float(np.sum(np.abs(j.probs - np.outer(j.px, j.py))))


def pinsker_mutual(j) -> BoundCheck:
    """I(X;Y) >= (2 / ln 2) Delta_c^2."""
    j = as_joint(j)
    lhs = entropy.mutual_information(j)
    rhs = HALVED_COEF * joint_delta_c(j) ** 2
    return _check(lhs, rhs, "pinsker_mutual", j)


def pinsker_quantum(rho, sigma) -> BoundCheck:
    """D(rho||sigma) >= ||rho - sigma||_1^2 / (2 ln 2)."""
    rho, sigma = as_density(rho), as_density(sigma)
    lhs = entropy.quantum_relative_entropy(rho, sigma)
    rhs = PINSKER_COEF * trace_norm(np.asarray(rho.matrix) - np.asarray(sigma.matrix)) ** 2
    return _check(lhs, rhs, "pinsker_quantum", rho, sigma)


def bipartite_delta_q(rho_ab, dims) -> float:
    """Half the trace norm of rho_AB - rho_A (x) rho_B."""
    rho_ab = as_density(rho_ab)
    prod = product_of_marginals(rho_ab, dims)
    return 0.5 * trace_norm(np.asarray(rho_ab.matrix) - np.asarray(prod.matrix))


def pinsker_quantum_mutual(rho_ab, dims) -> BoundCheck:
    """I_q(A;B) >= (2 / ln 2) Delta_q^2, Delta_q = ||rho_AB - rho_A (x) rho_B||_1 / 2."""
    rho_ab = as_density(rho_ab)
    lhs = entropy.quantum_mutual_information(rho_ab, dims)
    rhs = HALVED_COEF * bipartite_delta_q(rho_ab, dims) ** 2
    return _check(lhs, rhs, "pinsker_quantum_mutual", rho_ab, np.asarray(dims))


def pinsker_quantum_mutual_overscaled(rho_ab, dims) -> BoundCheck:
    """The variant with coefficient 1/ln 2 on the squared un-halved trace norm.

    That coefficient is twice the consistent one and the bound is false
    in general: the Bell state gives 3.246 on the right against I_q = 2.
    Kept only to document the discrepancy.
    """
    rho_ab = as_density(rho_ab)
    lhs = entropy.quantum_mutual_information(rho_ab, dims)
    rhs = (1.0 / LN2) * (2.0 * bipartite_delta_q(rho_ab, dims)) ** 2
    return _check(lhs, rhs, "pinsker_quantum_mutual_overscaled", rho_ab, np.asarray(dims))


def holevo_vs_trace(e: Ensemble) -> BoundCheck:
    """chi >= (2 / ln 2) Delta_q^2 with Delta_q the cq trace distance."""
    lhs = entropy.holevo_information(e)
    rhs = HALVED_COEF * cq_trace_distance(build_cq_state(e)).value ** 2
    return _check(lhs, rhs, "holevo_vs_trace", e.priors, *e.states)
