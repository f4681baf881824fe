"""Classical and quantum entropic quantities, all in bits.

Relative entropies return ``math.inf`` when the support condition fails,
unless called with ``mode="strict"``, which raises SupportViolation instead.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DimensionMismatch, LengthMismatch, SupportViolation
from .states import (
    CQState,
    DensityOperator,
    Ensemble,
    as_density,
    as_joint,
    as_probdist,
    clamp_spectrum,
    partial_trace,
    support_threshold,
    tensor,
    validate_density,
)

INF = math.inf


def _entropy_of(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(max(0.0, -np.sum(p * np.log2(p))))


def shannon_entropy(p) -> float:
    """H(X) = -sum p log2 p with 0 log 0 = 0."""
    return _entropy_of(as_probdist(p).probs)


def joint_entropy(j) -> float:
    return _entropy_of(as_joint(j).probs)


def conditional_entropy(j, given: str = "Y") -> float:
    """H(X|Y) for a joint P(x, y) (rows x, columns y); ``given="X"`` gives H(Y|X)."""
    p = as_joint(j).probs
    if given in ("X", "x"):
        p = p.T
    total = 0.0
    for col, py in zip(p.T, p.sum(axis=0)):
        if py > 0:
            total += py * _entropy_of(col / py)
    return total


def mutual_information(j) -> float:
    """I(X;Y) = H(X) + H(Y) - H(X,Y), clipped at zero."""
    jd = as_joint(j)
    val = _entropy_of(jd.px) + _entropy_of(jd.py) - _entropy_of(jd.probs)
    return max(0.0, val)


def classical_relative_entropy(p, q, mode: str = "extended") -> float:
    """D(P||Q) = sum P log2(P/Q); inf when P puts mass where Q has none."""
    p = np.asarray(p.probs if hasattr(p, "probs") else p, dtype=float).ravel()
    q = np.asarray(q.probs if hasattr(q, "probs") else q, dtype=float).ravel()
    if p.shape != q.shape:
        raise LengthMismatch(f"distributions of length {p.size} and {q.size}")
    as_probdist(p)
    as_probdist(q)
    mask = p > 0
    if np.any(q[mask] <= 0):
        if mode == "strict":
            raise SupportViolation("P(x) > 0 where Q(x) = 0")
        return INF
    return float(max(0.0, np.sum(p[mask] * np.log2(p[mask] / q[mask]))))


def von_neumann_entropy(rho) -> float:
    rho = as_density(rho)
    return _entropy_of(clamp_spectrum(rho.eigvals, rho.tol.clamp))


def quantum_relative_entropy(rho, sigma, mode: str = "extended") -> float:
    """Umegaki relative entropy Tr rho (log2 rho - log2 sigma).

    Each logarithm is taken through the cached eigendecomposition and restricted
    to the operator's support.
    """
    rho, sigma = as_density(rho), as_density(sigma)
    if rho.dim != sigma.dim:
        raise DimensionMismatch(f"states of dimension {rho.dim} and {sigma.dim}")
    lam = clamp_spectrum(rho.eigvals, rho.tol.clamp)
    mu = clamp_spectrum(sigma.eigvals, sigma.tol.clamp)
    # weights[j] = <v_j| rho |v_j> over sigma's eigenbasis
    v = np.asarray(sigma.eigvecs)
    weights = np.real(np.einsum("ij,ik,kj->j", v.conj(), np.asarray(rho.matrix), v))
    off_support = weights[mu <= 0].sum()
    if off_support > max(support_threshold(rho.eigvals, rho.tol.clamp), 1e-14):
        if mode == "strict":
            raise SupportViolation(f"rho has weight {off_support:.3e} outside supp(sigma)")
        return INF
    pos = lam > 0
    tr_rho_log_rho = float(np.sum(lam[pos] * np.log2(lam[pos])))
    on = mu > 0
    tr_rho_log_sigma = float(np.sum(weights[on] * np.log2(mu[on])))
    return max(0.0, tr_rho_log_rho - tr_rho_log_sigma)


def _check_dims(rho: DensityOperator, dims) -> tuple[int, int]:
    d_a, d_b = int(dims[0]), int(dims[1])
    if d_a * d_b != rho.dim:
        raise DimensionMismatch(f"dims {tuple(dims)} do not factor dimension {rho.dim}")
    return d_a, d_b


def quantum_joint_entropy(rho_ab, dims) -> float:
    rho_ab = as_density(rho_ab)
    _check_dims(rho_ab, dims)
    return von_neumann_entropy(rho_ab)


def quantum_mutual_information(rho_ab, dims) -> float:
    """I_q(A;B) = S(A) + S(B) - S(AB)."""
    rho_ab = as_density(rho_ab)
    dims = _check_dims(rho_ab, dims)
    s_a = von_neumann_entropy(partial_trace(rho_ab, dims, "A"))
    s_b = von_neumann_entropy(partial_trace(rho_ab, dims, "B"))
    return max(0.0, s_a + s_b - von_neumann_entropy(rho_ab))


def product_of_marginals(rho_ab, dims) -> DensityOperator:
    rho_ab = as_density(rho_ab)
    dims = _check_dims(rho_ab, dims)
    return tensor(partial_trace(rho_ab, dims, "A"), partial_trace(rho_ab, dims, "B"))


def holevo_information(e: Ensemble) -> float:
    """chi = S(average state) - sum_x p(x) S(rho^x)."""
    avg = e.average
    inner = sum(px * von_neumann_entropy(s) for px, s in zip(e.p, e.states))
    return max(0.0, von_neumann_entropy(avg) - inner)


def holevo_from_relative_entropies(e: Ensemble) -> float:
    """chi written as sum_x p(x) D(rho^x || average); an independent route to the same value."""
    avg = e.average
    return float(sum(px * quantum_relative_entropy(s, avg) for px, s in zip(e.p, e.states) if px > 0))


def cq_joint_entropy(c: CQState) -> float:
    """S(X, Y) of a cq state from its block structure: H(priors) + sum p(x) S(rho^x)."""
    e = c.ensemble
    return shannon_entropy(e.priors) + sum(px * von_neumann_entropy(s) for px, s in zip(e.p, e.states))


def cq_dense_entropy(c: CQState) -> float:
    """Von Neumann entropy of the materialized block-diagonal cq matrix."""
    return von_neumann_entropy(validate_density(c.dense()))


def binary_entropy(x: float) -> float:
    return _entropy_of([x, 1.0 - x])
