"""State-like objects: density operators, distributions, ensembles, cq states, POVMs.

Everything here is immutable after construction. Arrays handed out by the
containers are read-only views.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidDistribution,
    LengthMismatch,
    NotAPovm,
    NotHermitian,
    NotPSD,
    QInfoError,
    TraceOutOfRange,
    ZeroVector,
)


@dataclass(frozen=True)
class Tolerances:
    """Absolute tolerances used when validating inputs."""

    herm: float = 1e-9
    psd: float = 1e-9
    trace: float = 1e-9
    recon: float = 1e-9
    # eigenvalues below clamp * max eigenvalue count as exact zeros
    clamp: float = 1e-12


DEFAULT_TOL = Tolerances()


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def as_operator(m) -> np.ndarray:
    """Return ``m`` as a square complex array or raise DimensionMismatch."""
    a = np.asarray(m, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"operator must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise QInfoError("operator contains NaN or Inf")
    return a


def support_threshold(eigvals: np.ndarray, clamp: float = DEFAULT_TOL.clamp) -> float:
    top = float(np.max(np.abs(eigvals))) if eigvals.size else 0.0
    return clamp * top


def clamp_spectrum(eigvals: np.ndarray, clamp: float = DEFAULT_TOL.clamp) -> np.ndarray:
    """Zero out eigenvalues that are numerical dust relative to the largest one."""
    ev = np.asarray(eigvals, dtype=float).copy()
    ev[np.abs(ev) < support_threshold(ev, clamp)] = 0.0
    return ev


class DensityOperator:
    """A validated density matrix with its spectral decomposition cached.

    Build one with :func:`validate_density`, :func:`pure_state` or the random
    generators rather than calling the constructor directly.
    """

    __slots__ = ("_m", "_eigvals", "_eigvecs", "tol", "trace_deviation")

    def __init__(self, m: np.ndarray, eigvals: np.ndarray, eigvecs: np.ndarray,
                 tol: Tolerances = DEFAULT_TOL, trace_deviation: float = 0.0):
        self._m = _frozen(m)
        self._eigvals = _frozen(eigvals)
        self._eigvecs = _frozen(eigvecs)
        self.tol = tol
        self.trace_deviation = trace_deviation

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def eigvals(self) -> np.ndarray:
        return self._eigvals

    @property
    def eigvecs(self) -> np.ndarray:
        return self._eigvecs

    @property
    def dim(self) -> int:
        return self._m.shape[0]

    def support_projector(self) -> np.ndarray:
        ev = clamp_spectrum(self._eigvals, self.tol.clamp)
        v = self._eigvecs[:, ev > 0]
        return v @ v.conj().T

    def rank(self) -> int:
        return int(np.count_nonzero(clamp_spectrum(self._eigvals, self.tol.clamp) > 0))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self._m, dtype=dtype)

    def __repr__(self):
        return f"DensityOperator(dim={self.dim}, eigvals={np.round(self._eigvals, 6).tolist()})"


def _from_hermitian(h: np.ndarray, tol: Tolerances, deviation: float = 0.0) -> DensityOperator:
    w, v = np.linalg.eigh(h)
    return DensityOperator(h, w, v, tol, deviation)


def validate_density(m, tol: Tolerances = DEFAULT_TOL) -> DensityOperator:
    """Check that ``m`` is a density matrix and return it as a DensityOperator.

    A trace within ``tol.trace`` of one is renormalized exactly; the original
    deviation is kept on ``trace_deviation``.
    """
    a = as_operator(m)
    herm_err = float(np.max(np.abs(a - a.conj().T)))
    if herm_err > tol.herm:
        raise NotHermitian(f"max |m - m^dagger| = {herm_err:.3e} exceeds {tol.herm:g}")
    h = 0.5 * (a + a.conj().T)
    tr = float(np.real(np.trace(h)))
    if abs(tr - 1.0) > tol.trace:
        raise TraceOutOfRange(f"trace {tr:.12g} differs from 1 by more than {tol.trace:g}")
    w = np.linalg.eigvalsh(h)
    if w[0] < -tol.psd:
        raise NotPSD(f"min eigenvalue {w[0]:.6g} below -{tol.psd:g}")
    if tr != 1.0:
        h = h / tr
    rho = _from_hermitian(h, tol, tr - 1.0)
    recon = rho.eigvecs @ np.diag(rho.eigvals) @ rho.eigvecs.conj().T
    assert np.max(np.abs(recon - h)) <= tol.recon
    return rho


def pure_state(v, tol: Tolerances = DEFAULT_TOL) -> DensityOperator:
    """Projector onto the ray of ``v``."""
    v = np.asarray(v, dtype=complex).ravel()
    norm = np.linalg.norm(v)
    if v.size == 0 or norm == 0:
        raise ZeroVector("cannot build a pure state from the zero vector")
    v = v / norm
    return _from_hermitian(np.outer(v, v.conj()), tol)


def maximally_mixed(dim: int, tol: Tolerances = DEFAULT_TOL) -> DensityOperator:
    return DensityOperator(np.eye(dim, dtype=complex) / dim, np.full(dim, 1.0 / dim),
                           np.eye(dim, dtype=complex), tol)


def tensor(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    """Kronecker product of two states."""
    m = np.kron(a.matrix, b.matrix)
    ev = np.kron(a.eigvals, b.eigvals)
    vecs = np.kron(a.eigvecs, b.eigvecs)
    order = np.argsort(ev, kind="stable")
    return DensityOperator(m, ev[order], vecs[:, order], a.tol)


def _partial_trace_array(m: np.ndarray, dims: tuple[int, int], keep: str) -> np.ndarray:
    d_a, d_b = dims
    t = m.reshape(d_a, d_b, d_a, d_b)
    if keep in ("A", "a", 0):
        return np.einsum("ijkj->ik", t)
    if keep in ("B", "b", 1):
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def partial_trace(rho: DensityOperator, dims: tuple[int, int], keep: str = "A") -> DensityOperator:
    """Reduced state on subsystem ``keep`` of a bipartite state with ``dims = (dA, dB)``."""
    d_a, d_b = int(dims[0]), int(dims[1])
    if d_a < 1 or d_b < 1 or d_a * d_b != rho.dim:
        raise DimensionMismatch(f"dims {dims} do not factor dimension {rho.dim}")
    red = _partial_trace_array(np.asarray(rho.matrix), (d_a, d_b), keep)
    return _from_hermitian(0.5 * (red + red.conj().T), rho.tol)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_pure(dim: int, seed=None) -> DensityOperator:
    """Haar-random pure state from a normalized complex Gaussian vector."""
    if dim < 1:
        raise DimensionMismatch("dim must be >= 1")
    rng = _rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return pure_state(v)


def random_mixed(dim: int, seed=None, rank: int | None = None) -> DensityOperator:
    """Hilbert-Schmidt random state GG^dagger / Tr(GG^dagger).

    With ``rank`` smaller than ``dim`` G is dim x rank, giving the induced
    measure on states of that rank.
    """
    if dim < 1:
        raise DimensionMismatch("dim must be >= 1")
    k = dim if rank is None else int(rank)
    rng = _rng(seed)
    g = rng.standard_normal((dim, k)) + 1j * rng.standard_normal((dim, k))
    w = g @ g.conj().T
    w = 0.5 * (w + w.conj().T)
    return _from_hermitian(w / np.real(np.trace(w)), DEFAULT_TOL)


@dataclass(frozen=True)
class ProbDist:
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise InvalidDistribution(f"probability vector must be 1-D and non-empty, got shape {p.shape}")
        _check_probs(p)
        object.__setattr__(self, "probs", _frozen(p))

    def __len__(self):
        return self.probs.size


@dataclass(frozen=True)
class JointDist:
    """Joint distribution P(x, y); rows index x and columns index y."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 2 or p.size == 0:
            raise InvalidDistribution(f"joint distribution must be a non-empty matrix, got shape {p.shape}")
        _check_probs(p)
        object.__setattr__(self, "probs", _frozen(p))

    @property
    def px(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    @property
    def py(self) -> np.ndarray:
        return self.probs.sum(axis=0)

    @property
    def shape(self):
        return self.probs.shape


def _check_probs(p: np.ndarray, tol: float = DEFAULT_TOL.trace):
    if not np.all(np.isfinite(p)):
        raise InvalidDistribution("probabilities contain NaN or Inf")
    if np.any(p < 0):
        raise InvalidDistribution(f"negative probability {p.min():.3g}")
    if abs(p.sum() - 1.0) > tol:
        raise InvalidDistribution(f"probabilities sum to {p.sum():.12g}, not 1")


def as_probdist(p) -> ProbDist:
    return p if isinstance(p, ProbDist) else ProbDist(p)


def as_joint(j) -> JointDist:
    return j if isinstance(j, JointDist) else JointDist(j)


def as_density(rho) -> DensityOperator:
    return rho if isinstance(rho, DensityOperator) else validate_density(rho)


@dataclass(frozen=True)
class Ensemble:
    """Prior probabilities paired with states of a common dimension."""

    priors: ProbDist
    states: tuple[DensityOperator, ...]

    def __post_init__(self):
        priors = as_probdist(self.priors)
        states = tuple(as_density(s) for s in self.states)
        if len(priors) != len(states):
            raise LengthMismatch(f"{len(priors)} priors for {len(states)} states")
        dims = {s.dim for s in states}
        if len(dims) != 1:
            raise DimensionMismatch(f"ensemble states have differing dimensions {sorted(dims)}")
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "states", states)

    @classmethod
    def uniform(cls, states: Sequence) -> "Ensemble":
        n = len(states)
        return cls(ProbDist(np.full(n, 1.0 / n)), tuple(states))

    @property
    def p(self) -> np.ndarray:
        return self.priors.probs

    @property
    def dim(self) -> int:
        return self.states[0].dim

    def __len__(self):
        return len(self.states)

    def weighted(self) -> np.ndarray:
        """Stack of p(x) rho^x, shape (M, d, d)."""
        return np.array([px * s.matrix for px, s in zip(self.p, self.states)])

    @cached_property
    def average(self) -> DensityOperator:
        avg = self.weighted().sum(axis=0)
        return _from_hermitian(0.5 * (avg + avg.conj().T), self.states[0].tol)


@dataclass(frozen=True)
class CQState:
    """Classical-quantum state sum_x p(x)|x><x| (x) rho^x kept in block form."""

    ensemble: Ensemble
    avg: DensityOperator = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "avg", self.ensemble.average)

    @property
    def classical_dim(self) -> int:
        return len(self.ensemble)

    @property
    def dim(self) -> int:
        return self.ensemble.dim

    def blocks(self) -> np.ndarray:
        return self.ensemble.weighted()

    def dense(self) -> np.ndarray:
        """The full block-diagonal matrix of size classical_dim * dim."""
        return _block_diag(self.blocks())

    def dense_decoupled(self) -> np.ndarray:
        """sum_x p(x)|x><x| (x) avg, the same classical marginal with no correlation."""
        avg = np.asarray(self.avg.matrix)
        return _block_diag(np.array([px * avg for px in self.ensemble.p]))

    def dense_state(self) -> DensityOperator:
        return validate_density(self.dense())


def _block_diag(blocks: np.ndarray) -> np.ndarray:
    n, d, _ = blocks.shape
    out = np.zeros((n * d, n * d), dtype=complex)
    for x in range(n):
        out[x * d:(x + 1) * d, x * d:(x + 1) * d] = blocks[x]
    return out


def build_cq_state(e: Ensemble) -> CQState:
    return CQState(e)


@dataclass(frozen=True)
class Povm:
    """Measurement given by PSD elements summing to the identity."""

    elements: tuple[np.ndarray, ...]

    def __post_init__(self):
        els = [as_operator(e) for e in self.elements]
        if not els:
            raise NotAPovm("a POVM needs at least one element")
        d = els[0].shape[0]
        if any(e.shape != (d, d) for e in els):
            raise DimensionMismatch("POVM elements have differing dimensions")
        tol = DEFAULT_TOL
        for i, e in enumerate(els):
            if np.max(np.abs(e - e.conj().T)) > tol.herm:
                raise NotAPovm(f"element {i} is not Hermitian")
            if np.linalg.eigvalsh(0.5 * (e + e.conj().T))[0] < -tol.psd:
                raise NotAPovm(f"element {i} is not positive semidefinite")
        total = sum(els)
        err = float(np.max(np.abs(total - np.eye(d))))
        if err > tol.recon:
            raise NotAPovm(f"elements sum to identity only within {err:.3e}")
        object.__setattr__(self, "elements", tuple(_frozen(0.5 * (e + e.conj().T)) for e in els))

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self):
        return len(self.elements)

    def stack(self) -> np.ndarray:
        return np.array(self.elements)

    def outcome_probs(self, rho) -> np.ndarray:
        m = np.asarray(rho.matrix if isinstance(rho, DensityOperator) else rho)
        if m.shape[0] != self.dim:
            raise DimensionMismatch(f"POVM dim {self.dim} vs state dim {m.shape[0]}")
        return np.real(np.einsum("kij,ji->k", self.stack(), m))

    def joint(self, e: Ensemble) -> np.ndarray:
        """Outcome table P(x, y) = p(x) Tr(Pi_y rho^x)."""
        if e.dim != self.dim:
            raise DimensionMismatch(f"POVM dim {self.dim} vs ensemble dim {e.dim}")
        return np.real(np.einsum("xij,yji->xy", e.weighted(), self.stack()))
