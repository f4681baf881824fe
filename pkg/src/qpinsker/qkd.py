"""Guessing-probability bounds for a key correlated with an eavesdropper's quantum system.

The real protocol is the cq state sum_k p(k)|k><k| (x) rho^k_E; the ideal one
is rho_K (x) rho_E with rho_K uniform over the M = 2^|K| key values and rho_E
the eavesdropper's average state.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .detection import DetectionResult, _random_rank_one_povm, _mi, optimize_detection
from .distance import helstrom_projector
from .errors import DimensionMismatch, LengthMismatch, SandwichViolation
from .states import CQState, Ensemble, JointDist, Povm, ProbDist, as_density, as_joint, build_cq_state

CHAIN_TOL = 1e-7


@dataclass(frozen=True)
class KeyEnsemble:
    cq: CQState
    key_bits: int | None = None

    @property
    def m(self) -> int:
        return self.cq.classical_dim

    @property
    def ensemble(self) -> Ensemble:
        return self.cq.ensemble

    @property
    def is_uniform(self) -> bool:
        return bool(np.allclose(self.ensemble.p, 1.0 / self.m, atol=1e-12, rtol=0))

    def real_dense(self) -> np.ndarray:
        return self.cq.dense()

    def ideal_blocks(self) -> np.ndarray:
        avg = np.asarray(self.cq.avg.matrix)
        return np.array([avg / self.m] * self.m)

    def ideal_dense(self) -> np.ndarray:
        """rho_K (x) rho_E with rho_K = I/M."""
        return np.kron(np.eye(self.m) / self.m, np.asarray(self.cq.avg.matrix))


def build_key_ensemble(eve_states, priors="uniform", key_bits: int | None = None) -> KeyEnsemble:
    """Pair each key value k with the eavesdropper state rho^k."""
    states = tuple(as_density(s) for s in eve_states)
    if not states:
        raise LengthMismatch("need at least one key value")
    if len({s.dim for s in states}) != 1:
        raise DimensionMismatch("eavesdropper states have differing dimensions")
    m = len(states)
    if isinstance(priors, str):
        if priors != "uniform":
            raise ValueError(f"unknown prior specification {priors!r}")
        priors = np.full(m, 1.0 / m)
    priors = priors if isinstance(priors, ProbDist) else ProbDist(priors)
    if len(priors) != m:
        raise LengthMismatch(f"{len(priors)} priors for {m} key values")
    if key_bits is not None and 2 ** int(key_bits) != m:
        raise LengthMismatch(f"key_bits={key_bits} implies M={2 ** int(key_bits)}, got {m} states")
    return KeyEnsemble(build_cq_state(Ensemble(priors, states)), key_bits)


def qkd_delta(k: KeyEnsemble) -> float:
    """Trace distance between the real cq state and rho_K (x) rho_E.

    Both are block diagonal, so the trace norm splits into per-key blocks
    p(k) rho^k - avg / M.
    """
    real = k.cq.blocks()
    ideal = k.ideal_blocks()
    total = 0.0
    for r, i in zip(real, ideal):
        total += float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (r - i + (r - i).conj().T)))))
    return min(1.0, 0.5 * total)


def qkd_delta_dense(k: KeyEnsemble) -> tuple[float, np.ndarray]:
    """Dense route to the same distance, with the optimal test on the composite system."""
    proj, w = helstrom_projector(k.real_dense() - k.ideal_dense())
    return float(min(1.0, 0.5 * np.sum(np.abs(w)))), proj


@dataclass(frozen=True)
class SuboptimalDetection:
    povm: Povm
    p_d_real: float
    p_d_ideal: float
    eve_detection: DetectionResult


def suboptimal_povm(k: KeyEnsemble, tol: float = 1e-9, max_iter: int = 10_000,
                    detection: DetectionResult | None = None) -> SuboptimalDetection:
    """Composite test Lambda+ = sum_k |k><k| (x) Pi_k built from the eavesdropper's best detector.

    Returns the two-outcome measurement {Lambda+, I - Lambda+} together with
    Tr Lambda+ (real) and Tr Lambda+ (ideal), both evaluated on the dense
    composite matrices.
    """
    det = detection or optimize_detection(k.ensemble, tol=tol, max_iter=max_iter)
    m, d = k.m, k.cq.dim
    lam = np.zeros((m * d, m * d), dtype=complex)
    for key, pi in enumerate(det.povm.elements):
        lam[key * d:(key + 1) * d, key * d:(key + 1) * d] = pi
    p_real = float(np.real(np.trace(lam @ k.real_dense())))
    p_ideal = float(np.real(np.trace(lam @ k.ideal_dense())))
    if abs(p_ideal - 1.0 / m) > 1e-9:
        raise SandwichViolation(f"Tr Lambda+ (ideal) = {p_ideal!r}, expected 1/M = {1.0 / m!r}")
    povm = Povm((lam, np.eye(m * d) - lam))
    return SuboptimalDetection(povm, p_real, p_ideal, det)


@dataclass(frozen=True)
class GuessBoundReport:
    m: int
    delta_q: float
    lower: float
    upper: float
    p_guess: float
    p_d_sub: float | None
    residual: float
    kind: str = "quantum"
    # dual certificate: the optimal guessing probability is at most this
    p_guess_dual: float | None = None
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def as_dict(self) -> dict:
        return asdict(self)


def guess_bound(k: KeyEnsemble, tol: float = 1e-9, max_iter: int = 10_000,
                check: bool = True) -> GuessBoundReport:
    """1/M <= P_guess <= 1/M + Delta_q together with the Lambda+ chain.

    Raises SandwichViolation when ``check`` is set and any link fails by more
    than 1e-7; that indicates a numerical fault, not a property of the input.
    """
    m = k.m
    delta = qkd_delta(k)
    det = optimize_detection(k.ensemble, tol=tol, max_iter=max_iter)
    sub = suboptimal_povm(k, detection=det)
    lam = sub.povm.elements[0]
    bias = float(np.real(np.trace(lam @ (k.real_dense() - k.ideal_dense()))))
    lower, upper = 1.0 / m, 1.0 / m + delta
    checks = {
        "ideal_is_uniform_guess": abs(sub.p_d_ideal - lower) <= 1e-9,
        "test_bias_within_delta": bias <= delta + 1e-9,
        "real_detection_within_upper": sub.p_d_real <= upper + 1e-9,
        "lower_le_p_d_sub": lower <= sub.p_d_real + CHAIN_TOL,
        "p_d_sub_le_p_guess": sub.p_d_real <= det.p_d + CHAIN_TOL,
        "p_guess_le_upper": det.p_d <= upper + CHAIN_TOL,
        "lower_le_p_guess": lower - 1e-9 <= det.p_d,
    }
    report = GuessBoundReport(m, delta, lower, upper, det.p_d, sub.p_d_real,
                              det.certificate_residual, "quantum", det.dual_bound, checks)
    if check and not report.passed:
        failed = [name for name, ok in checks.items() if not ok]
        raise SandwichViolation(f"guessing-probability chain failed: {failed}; report={report}")
    return report


def classical_guess_bound(j, check: bool = True) -> GuessBoundReport:
    """Maximum-a-posteriori guess of x from y against 1/M + Delta_c.

    Delta_c is taken against the uniform key marginal: (1/2) sum |P(x,y) - P(y)/M|.
    """
    j = as_joint(j)
    p = j.probs
    m = p.shape[0]
    p_guess = float(np.sum(np.max(p, axis=0)))
    delta = 0.5 * float(np.sum(np.abs(p - np.outer(np.full(m, 1.0 / m), j.py))))
    lower, upper = 1.0 / m, 1.0 / m + delta
    checks = {"p_guess_le_upper": p_guess <= upper + 1e-12}
    report = GuessBoundReport(m, delta, lower, upper, p_guess, None, 0.0, "classical", None, checks)
    if check and not report.passed:
        raise SandwichViolation(f"classical guessing bound failed: {report}")
    return report


def measured_joint(k: KeyEnsemble, povm: Povm) -> JointDist:
    """Key/outcome distribution P(k, y) = p(k) Tr(Pi_y rho^k)."""
    table = np.clip(povm.joint(k.ensemble), 0.0, None)
    return JointDist(table / table.sum())


@dataclass(frozen=True)
class PerfectCaseReport:
    perfect: bool
    delta_q: float
    max_mutual_information: float | None


def perfect_case_check(k: KeyEnsemble, tol: float = 1e-9, samples: int = 16,
                       seed: int = 0) -> PerfectCaseReport:
    """Whether the real protocol equals the ideal one (Delta_q <= tol).

    In that case every measurement leaves the key independent of the outcome;
    this is spot-checked on ``samples`` random POVMs.
    """
    delta = qkd_delta(k)
    if delta > tol:
        return PerfectCaseReport(False, delta, None)
    rng = np.random.default_rng(seed)
    d = k.cq.dim
    worst = 0.0
    for _ in range(samples):
        n = int(rng.integers(2, d * d + 2))
        els = _random_rank_one_povm(d, n, rng)
        worst = max(worst, _mi(np.real(np.einsum("xij,yji->xy", k.ensemble.weighted(), els))))
    return PerfectCaseReport(worst <= tol, delta, worst)


def key_ensemble_from_bits(eve_states, key_bits: int) -> KeyEnsemble:
    return build_key_ensemble(eve_states, "uniform", key_bits)


def holevo_delta_link(k: KeyEnsemble) -> tuple[float, float]:
    """(chi, (2 / ln 2) Delta_q^2) for the key ensemble."""
    from .entropy import holevo_information

    return holevo_information(k.ensemble), 2.0 / math.log(2.0) * qkd_delta(k) ** 2
