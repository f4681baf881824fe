"""Minimum-error detection, pretty-good measurement, and accessible-information search.

The optimal detector is found with a damped fixed-point iteration

    Pi_j <- G^{-1/2} (I + eps W_j) Pi_j (I + eps W_j) G^{-1/2},   W_j = p(j) rho_j,

where G renormalizes the elements to sum to the identity. Large ``eps`` recovers
the undamped update Pi_j <- G^{-1/2} W_j Pi_j W_j G^{-1/2}; steps that would
lower the detection probability are rejected and ``eps`` shrinks, so the
sequence of accepted detection probabilities never decreases.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .distance import helstrom_projector
from .errors import DimensionMismatch, NoConvergence
from .states import Ensemble, Povm, as_density, support_threshold


@dataclass(frozen=True)
class DetectionResult:
    p_e: float
    p_d: float
    povm: Povm
    certificate_residual: float
    converged: bool = True
    iterations: int = 0
    # upper bound on the optimal P_d from the dual certificate
    dual_bound: float = math.nan
    history: tuple[float, ...] = field(default=(), repr=False)


def _herm(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + np.swapaxes(a, -1, -2).conj())


def _inv_sqrt(g: np.ndarray) -> np.ndarray:
    """Inverse square root of a PSD matrix, restricted to its support."""
    w, v = np.linalg.eigh(_herm(g))
    keep = w > max(support_threshold(w), 1e-300)
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / np.sqrt(w[keep])
    return (v * inv) @ v.conj().T


def _finite_povm(elements: np.ndarray) -> Povm:
    return Povm(tuple(_herm(elements)))


def detection_probability(e: Ensemble, povm: Povm) -> float:
    """sum_i p(i) Tr(Pi_i rho_i) with outcome i read as label i."""
    if len(povm) != len(e):
        raise DimensionMismatch(f"{len(povm)} POVM outcomes for {len(e)} hypotheses")
    if povm.dim != e.dim:
        raise DimensionMismatch(f"POVM dim {povm.dim} vs ensemble dim {e.dim}")
    return _pd(e.weighted(), povm.stack())


def _pd(w: np.ndarray, p: np.ndarray) -> float:
    return float(np.real(np.einsum("kij,kji->", w, p)))


def _residual_parts(w: np.ndarray, p: np.ndarray) -> tuple[float, float]:
    gamma = np.einsum("kij,kjl->il", w, p)
    anti = 0.5 * (gamma - gamma.conj().T)
    anti_norm = float(np.linalg.norm(anti, 2)) if anti.size else 0.0
    gh = 0.5 * (gamma + gamma.conj().T)
    gap = 0.0
    for wj in w:
        gap = max(gap, -float(np.linalg.eigvalsh(gh - wj)[0]))
    return anti_norm, gap


def optimality_residual(e: Ensemble, povm: Povm) -> float:
    """Violation of the minimum-error optimality conditions for ``povm``.

    With Gamma = sum_i p(i) rho_i Pi_i, a POVM is optimal exactly when Gamma is
    Hermitian and Gamma - p(j) rho_j is PSD for every j. The residual is the
    spectral norm of Gamma's anti-Hermitian part plus the largest negative
    eigenvalue magnitude among the gaps.
    """
    if len(povm) != len(e) or povm.dim != e.dim:
        raise DimensionMismatch(
            f"POVM with {len(povm)} outcomes of dim {povm.dim} vs ensemble of {len(e)} states of dim {e.dim}")
    anti, gap = _residual_parts(e.weighted(), povm.stack())
    return anti + gap


def _dual_bound(w: np.ndarray, p: np.ndarray) -> float:
    # Hermitian part of Gamma shifted by the worst gap is dual feasible
    _, gap = _residual_parts(w, p)
    return _pd(w, p) + w.shape[1] * gap


def helstrom_binary(p0: float, rho0, rho1) -> DetectionResult:
    """Closed-form optimal discrimination of two states with priors (p0, 1 - p0)."""
    rho0, rho1 = as_density(rho0), as_density(rho1)
    if rho0.dim != rho1.dim:
        raise DimensionMismatch(f"states of dimension {rho0.dim} and {rho1.dim}")
    if not 0.0 <= p0 <= 1.0:
        raise ValueError(f"prior {p0} outside [0, 1]")
    p1 = 1.0 - p0
    diff = p0 * np.asarray(rho0.matrix) - p1 * np.asarray(rho1.matrix)
    proj, w = helstrom_projector(diff)
    norm = float(np.sum(np.abs(w)))
    p_e = min(1.0, max(0.0, 0.5 * (1.0 - norm)))
    povm = _finite_povm(np.array([proj, np.eye(rho0.dim) - proj]))
    e = Ensemble((p0, p1), (rho0, rho1))
    residual = optimality_residual(e, povm)
    return DetectionResult(p_e, 1.0 - p_e, povm, residual, True, 0, 1.0 - p_e, (1.0 - p_e,))


def pretty_good_measurement(e: Ensemble) -> Povm:
    """Square-root measurement avg^{-1/2} p(x) rho^x avg^{-1/2}.

    The inverse root is taken on the support of the average state; the
    projector onto its kernel is added to outcome 0.
    """
    w = e.weighted()
    avg = w.sum(axis=0)
    x = _inv_sqrt(avg)
    els = x @ w @ x
    completion = np.eye(e.dim) - els.sum(axis=0)
    els[0] = els[0] + completion
    return _finite_povm(els)


def _damped_step(w: np.ndarray, p: np.ndarray, eps: float, scale: float) -> np.ndarray | None:
    d = w.shape[1]
    r = np.eye(d) + (eps / scale) * w
    a = r @ p @ r
    x = _inv_sqrt(a.sum(axis=0))
    q = _herm(x @ a @ x)
    if not np.all(np.isfinite(q)):
        return None
    # restore exact completeness lost on a rank-deficient G
    q[0] += np.eye(d) - q.sum(axis=0)
    if min(float(np.linalg.eigvalsh(qk)[0]) for qk in q) < -1e-12:
        return None
    return q


def optimize_detection(e: Ensemble, tol: float = 1e-9, max_iter: int = 10_000,
                       strict: bool = False, check_every: int = 5) -> DetectionResult:
    """Search for the minimum-error POVM of ``e``, seeded with the pretty-good measurement.

    Stops once :func:`optimality_residual` drops to ``tol`` or after
    ``max_iter`` updates. An unconverged result is returned with
    ``converged=False``; pass ``strict=True`` to get NoConvergence instead.
    """
    w = e.weighted()
    m = len(e)
    d = e.dim
    p = pretty_good_measurement(e).stack().copy()
    best = _pd(w, p)
    history = [best]
    scale = max(float(np.linalg.eigvalsh(wj)[-1]) for wj in w)
    residual = sum(_residual_parts(w, p))
    it = 0
    eps = 1e3
    if scale > 0 and m > 1:
        while residual > tol and it < max_iter:
            it += 1
            q = _damped_step(w, p, eps, scale)
            val = _pd(w, q) if q is not None else -np.inf
            if val > best:
                p, best = q, val
                history.append(best)
                eps = min(eps * 2.0, 1e8)
            else:
                eps *= 0.25
                if eps < 1e-12:
                    residual = sum(_residual_parts(w, p))
                    break
            if it % check_every == 0:
                residual = sum(_residual_parts(w, p))
        residual = sum(_residual_parts(w, p))
    else:
        residual = 0.0 if m == 1 or scale == 0 else residual

    # guessing the likeliest label is always available
    top = int(np.argmax(e.p))
    if e.p[top] > best:
        p = np.zeros((m, d, d), dtype=complex)
        p[top] = np.eye(d)
        best = float(e.p[top])
        history.append(best)
        residual = sum(_residual_parts(w, p))

    povm = _finite_povm(p)
    converged = residual <= tol
    p_d = min(1.0, best)
    result = DetectionResult(1.0 - p_d, p_d, povm, residual, converged, it,
                             min(1.0, _dual_bound(w, povm.stack())), tuple(history))
    if strict and not converged:
        raise NoConvergence(f"residual {residual:.3e} above {tol:g} after {it} iterations", result)
    return result


def guessing_probability(e: Ensemble, tol: float = 1e-9, max_iter: int = 10_000,
                         strict: bool = False) -> float:
    """Optimal probability of naming the label of ``e`` from one copy of its state."""
    return optimize_detection(e, tol=tol, max_iter=max_iter, strict=strict).p_d


@dataclass(frozen=True)
class AccessibleInfoConfig:
    grid_points: int = 2048
    restarts: int = 32
    max_iter: int = 500
    outcomes: int | None = None
    seed: int = 0
    refine: bool = True


def mutual_information_of(e: Ensemble, povm) -> float:
    """Shannon mutual information between label and outcome for measurement ``povm``."""
    els = povm.stack() if isinstance(povm, Povm) else np.asarray(povm)
    return _mi(np.real(np.einsum("xij,yji->xy", e.weighted(), els)))


def _mi(joint: np.ndarray) -> float:
    joint = np.clip(joint, 0.0, None)
    px = joint.sum(axis=1, keepdims=True)
    py = joint.sum(axis=0, keepdims=True)
    prod = px * py
    mask = joint > 1e-300
    return float(max(0.0, np.sum(joint[mask] * np.log2(joint[mask] / prod[mask]))))


def _fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    phi = math.pi * (1.0 + 5 ** 0.5) * i
    r = np.sqrt(1.0 - z * z)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


_PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def _bloch(e: Ensemble) -> tuple[np.ndarray, np.ndarray]:
    """Weights p(x) and weighted Bloch vectors p(x) r_x for a qubit ensemble."""
    w = e.weighted()
    return e.p, np.real(np.einsum("aij,xji->xa", _PAULI, w))


def _projective_qubit_mi(p: np.ndarray, pr: np.ndarray, n: np.ndarray) -> np.ndarray:
    # P(x, +) = (p_x + p_x r_x . n) / 2 for each direction n
    dots = n @ pr.T
    plus = 0.5 * (p[None, :] + dots)
    minus = 0.5 * (p[None, :] - dots)
    out = np.zeros(len(n))
    for tab in (plus, minus):
        tab = np.clip(tab, 0.0, None)
        py = tab.sum(axis=1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(tab > 1e-300, tab * np.log2(tab / (py * p[None, :])), 0.0)
        out += terms.sum(axis=1)
    return out


def _qubit_projective_search(e: Ensemble, cfg: AccessibleInfoConfig) -> float:
    p, pr = _bloch(e)
    grid = _fibonacci_sphere(cfg.grid_points)
    vals = _projective_qubit_mi(p, pr, grid)
    k = int(np.argmax(vals))
    best = float(vals[k])
    if cfg.refine:
        x0 = grid[k]
        start = np.array([math.acos(np.clip(x0[2], -1, 1)), math.atan2(x0[1], x0[0])])

        def neg(angles):
            th, ph = angles
            n = np.array([[math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)]])
            return -float(_projective_qubit_mi(p, pr, n)[0])

        res = minimize(neg, start, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-15, "maxiter": 2000})
        best = max(best, -float(res.fun))
    return max(0.0, best)


def _mi_gradient(w: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, float]:
    joint = np.clip(np.real(np.einsum("xij,yji->xy", w, p)), 0.0, None)
    prod = joint.sum(axis=1, keepdims=True) * joint.sum(axis=0, keepdims=True)
    logs = np.zeros_like(joint)
    mask = joint > 1e-300
    logs[mask] = np.log2(joint[mask] / prod[mask])
    value = float(np.sum(joint[mask] * logs[mask]))
    return np.einsum("xij,xy->yij", w, logs), value


def povm_mi_ascent(e: Ensemble, start: np.ndarray, max_iter: int = 500) -> tuple[float, np.ndarray]:
    """Monotone ascent of label/outcome mutual information from the POVM ``start``."""
    w = e.weighted()
    d = e.dim
    p = _herm(np.asarray(start, dtype=complex))
    grad, val = _mi_gradient(w, p)
    for _ in range(max_iter):
        top = max(float(np.max(np.abs(np.linalg.eigvalsh(g)))) for g in grad)
        if top == 0:
            break
        eps = 0.5 / top
        accepted = False
        for _ in range(40):
            r = np.eye(d) + eps * grad
            a = r @ p @ r
            x = _inv_sqrt(a.sum(axis=0))
            q = _herm(x @ a @ x)
            g_new, v_new = _mi_gradient(w, q)
            if v_new > val:
                accepted = True
                break
            eps *= 0.5
        if not accepted or v_new - val < 1e-15:
            if accepted:
                p, val = q, v_new
            break
        p, val, grad = q, v_new, g_new
    return max(0.0, val), p


def _random_rank_one_povm(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    els = np.einsum("ni,nj->nij", v, v.conj())
    x = _inv_sqrt(els.sum(axis=0))
    return _herm(x @ els @ x)


def accessible_information(e: Ensemble, search: AccessibleInfoConfig | None = None) -> float:
    """Best label/outcome mutual information found over measurements; a lower bound on I_acc.

    Qubit ensembles are scanned over all projective measurements on a sphere
    grid with local refinement. Larger dimensions use random-restart ascent
    over rank-one POVMs with d^2 outcomes.
    """
    cfg = search or AccessibleInfoConfig()
    if len(e) == 1 or e.dim == 1:
        return 0.0
    if e.dim == 2:
        return _qubit_projective_search(e, cfg)
    rng = np.random.default_rng(cfg.seed)
    n = cfg.outcomes or e.dim ** 2
    best = 0.0
    for _ in range(cfg.restarts):
        val, _ = povm_mi_ascent(e, _random_rank_one_povm(e.dim, n, rng), cfg.max_iter)
        best = max(best, val)
    return best


def random_povm(d: int, n: int, seed=None) -> Povm:
    """Random rank-one POVM with ``n`` outcomes on dimension ``d``."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    els = _random_rank_one_povm(d, n, rng)
    els[0] += np.eye(d) - els.sum(axis=0)
    return Povm(tuple(els))


def blind_povm(m: int, d: int) -> Povm:
    """Every outcome equal to I/m; carries no information about the state."""
    return Povm(tuple(np.eye(d, dtype=complex) / m for _ in range(m)))
