"""Statistical (Kolmogorov) distance and trace distance."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, LengthMismatch
from .states import CQState, as_density, as_probdist, support_threshold


@dataclass(frozen=True)
class DistanceResult:
    """A distance value and, for quantum distances, the projector that attains it."""

    value: float
    optimal_projector: np.ndarray | None = None

    def __float__(self):
        return self.value


def statistical_distance(p, q) -> float:
    """Un-halved L1 distance sum |P - Q|, in [0, 2]."""
    p, q = as_probdist(p).probs, as_probdist(q).probs
    if p.shape != q.shape:
        raise LengthMismatch(f"distributions of length {p.size} and {q.size}")
    return float(np.sum(np.abs(p - q)))


def delta_c(p, q) -> float:
    """Half the statistical distance."""
    return 0.5 * statistical_distance(p, q)


def trace_norm(m) -> float:
    """Sum of singular values; for Hermitian input, sum of |eigenvalues|."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"trace norm needs a square matrix, got shape {a.shape}")
    if np.allclose(a, a.conj().T, atol=1e-14, rtol=0):
        return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (a + a.conj().T)))))
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def helstrom_projector(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Projector onto the nonnegative eigenspace of Hermitian ``h`` and the spectrum of ``h``.

    Eigenvalues within the clamp threshold of zero are put in the nonnegative part.
    """
    h = 0.5 * (h + h.conj().T)
    w, v = np.linalg.eigh(h)
    keep = w >= -support_threshold(w)
    vp = v[:, keep]
    return vp @ vp.conj().T, w


def trace_distance(rho, sigma) -> DistanceResult:
    """Half the trace norm of rho - sigma, with the optimal projective test."""
    rho, sigma = as_density(rho), as_density(sigma)
    if rho.dim != sigma.dim:
        raise DimensionMismatch(f"states of dimension {rho.dim} and {sigma.dim}")
    proj, w = helstrom_projector(np.asarray(rho.matrix) - np.asarray(sigma.matrix))
    value = float(min(1.0, 0.5 * np.sum(np.abs(w))))
    return DistanceResult(value, proj)


def cq_trace_distance(c: CQState) -> DistanceResult:
    """Distance between a cq state and the same classical marginal times the average state.

    Block diagonality makes this exact as (1/2) sum_x p(x) ||rho^x - avg||_1.
    """
    e = c.ensemble
    avg = np.asarray(c.avg.matrix)
    d = c.dim
    proj = np.zeros((c.classical_dim * d, c.classical_dim * d), dtype=complex)
    total = 0.0
    for x, (px, s) in enumerate(zip(e.p, e.states)):
        block, w = helstrom_projector(px * (np.asarray(s.matrix) - avg))
        proj[x * d:(x + 1) * d, x * d:(x + 1) * d] = block
        total += np.sum(np.abs(w))
    return DistanceResult(float(min(1.0, 0.5 * total)), proj)


def dense_cq_trace_distance(c: CQState) -> float:
    """Same quantity computed on the materialized matrices; used as a cross-check."""
    return 0.5 * trace_norm(c.dense() - c.dense_decoupled())
