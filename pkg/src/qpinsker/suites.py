"""Randomized verification suites for every bound and identity.

Instance ``i`` of configuration ``c`` in suite ``s`` draws from
``default_rng([seed, suite_index, c, i])``, so any single instance can be
regenerated with :func:`rerun_instance` without running the rest.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import entropy, inequalities, qkd
from .detection import optimize_detection, random_povm
from .distance import cq_trace_distance, dense_cq_trace_distance
from .io import dist_to_doc, ensemble_to_doc, operator_to_doc
from .states import (
    Ensemble,
    JointDist,
    ProbDist,
    build_cq_state,
    random_mixed,
    random_pure,
    tensor,
    validate_density,
)

DEFAULT_DIMS = (2, 3, 4, 8)
SUITE_NAMES = ("1", "2", "3", "4", "5", "6", "7", "identities")


@dataclass(frozen=True)
class Check:
    name: str
    slack: float
    tol: float


@dataclass
class CheckSummary:
    suite: str
    config: str
    check: str
    tol: float
    instances: int = 0
    min_slack: float = math.inf
    argmin_index: int = -1
    argmin_digest: str = ""

    @property
    def passed(self) -> bool:
        return self.min_slack >= -self.tol

    def update(self, index: int, slack: float, digest: str):
        self.instances += 1
        if slack < self.min_slack or self.argmin_index < 0:
            self.min_slack, self.argmin_index, self.argmin_digest = slack, index, digest


@dataclass(frozen=True)
class Suite:
    name: str
    title: str
    configs: Callable[[tuple[int, ...]], list]
    generate: Callable[[np.random.Generator, object], dict]
    evaluate: Callable[[dict], list[Check]]
    serialize: Callable[[dict], dict]


# instance generators --------------------------------------------------------

def _random_probs(rng, n: int) -> np.ndarray:
    p = rng.dirichlet(np.full(n, rng.choice([0.3, 1.0, 3.0])))
    if n > 1 and rng.random() < 0.1:
        p[rng.integers(n)] = 0.0
        p = p / p.sum()
    return p


def _random_state(rng, d: int):
    u = rng.random()
    if u < 0.15:
        return random_pure(d, rng)
    if u < 0.3 and d > 1:
        return random_mixed(d, rng, rank=int(rng.integers(1, d)))
    return random_mixed(d, rng)


def _near(rng, rho, d: int):
    t = 10.0 ** rng.uniform(-6, 0)
    m = (1 - t) * np.asarray(rho.matrix) + t * np.asarray(random_mixed(d, rng).matrix)
    return validate_density(m)


# suite 1: classical Pinsker
def _gen1(rng, n):
    p = _random_probs(rng, n)
    q = _random_probs(rng, n) if rng.random() < 0.7 else 0.9 * p + 0.1 * _random_probs(rng, n)
    return {"p": p, "q": q / q.sum()}


def _eval1(inst):
    b = inequalities.pinsker_classical(inst["p"], inst["q"])
    return [Check("pinsker_classical", b.slack, 1e-9)]


# suite 2: mutual-information Pinsker
def _gen2(rng, shape):
    n, m = shape
    if rng.random() < 0.5:
        j = rng.dirichlet(np.ones(n * m)).reshape(n, m)
    else:
        t = rng.uniform(0, 1)
        prod = np.outer(rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(m)))
        j = (1 - t) * prod + t * rng.dirichlet(np.ones(n * m)).reshape(n, m)
    return {"joint": j / j.sum()}


def _eval2(inst):
    b = inequalities.pinsker_mutual(inst["joint"])
    return [Check("pinsker_mutual", b.slack, 1e-9)]


# suite 3: quantum Pinsker
def _gen3(rng, d):
    rho = _random_state(rng, d)
    sigma = _near(rng, rho, d) if rng.random() < 0.3 else _random_state(rng, d)
    return {"rho": rho, "sigma": sigma}


def _eval3(inst):
    b = inequalities.pinsker_quantum(inst["rho"], inst["sigma"])
    return [Check("pinsker_quantum", b.slack, 1e-9)]


# suite 4: quantum mutual-information Pinsker
def _gen4(rng, dims):
    d = dims[0] * dims[1]
    if rng.random() < 0.3:
        a = _random_state(rng, dims[0])
        b = _random_state(rng, dims[1])
        rho = _near(rng, tensor(a, b), d)
    else:
        rho = _random_state(rng, d)
    return {"rho_ab": rho, "dims": dims}


def _eval4(inst):
    b = inequalities.pinsker_quantum_mutual(inst["rho_ab"], inst["dims"])
    return [Check("pinsker_quantum_mutual", b.slack, 1e-9)]


def _random_ensemble(rng, m: int, d: int, uniform: bool = False) -> Ensemble:
    priors = np.full(m, 1.0 / m) if uniform else rng.dirichlet(np.ones(m))
    if rng.random() < 0.2:
        base = _random_state(rng, d)
        states = tuple(_near(rng, base, d) for _ in range(m))
    else:
        states = tuple(_random_state(rng, d) for _ in range(m))
    return Ensemble(ProbDist(priors), states)


# suite 5: Holevo information vs cq trace distance
def _gen5(rng, dims):
    m = int(rng.integers(2, 9))
    d = int(rng.choice(dims))
    return {"ensemble": _random_ensemble(rng, m, d)}


def _eval5(inst):
    b = inequalities.holevo_vs_trace(inst["ensemble"])
    return [Check("holevo_vs_trace", b.slack, 1e-9)]


# suite 6: classical guessing bound, on random joints and on measured key ensembles
def _gen6(rng, m):
    u = rng.random()
    if u < 0.3:
        n = int(rng.integers(2, 9))
        return {"joint": rng.dirichlet(np.ones(m * n)).reshape(m, n)}
    if u < 0.5:
        # uniform key, arbitrary channel to the observation
        n = int(rng.integers(2, 9))
        return {"joint": rng.dirichlet(np.ones(n), size=m) / m}
    d = int(rng.integers(2, 5))
    k = qkd.build_key_ensemble([_random_state(rng, d) for _ in range(m)])
    povm = random_povm(d, int(rng.integers(2, d * d + 1)), rng)
    return {"joint": qkd.measured_joint(k, povm).probs}


def _eval6(inst):
    r = qkd.classical_guess_bound(inst["joint"], check=False)
    return [Check("p_guess_le_upper", r.upper - r.p_guess, 1e-12)]


# suite 7: quantum guessing sandwich with the Lambda+ chain
def _gen7(rng, dims):
    m = int(rng.choice([2, 4, 8]))
    d = int(rng.choice(dims))
    e = _random_ensemble(rng, m, d, uniform=True)
    return {"key": qkd.build_key_ensemble(e.states)}


SUITE7_MAX_ITER = 2000


def _eval7(inst):
    k = inst["key"]
    det = optimize_detection(k.ensemble, max_iter=SUITE7_MAX_ITER)
    sub = qkd.suboptimal_povm(k, detection=det)
    delta = qkd.qkd_delta(k)
    lam = sub.povm.elements[0]
    bias = float(np.real(np.trace(lam @ (k.real_dense() - k.ideal_dense()))))
    chi, delta_bound = qkd.holevo_delta_link(k)
    inv_m = 1.0 / k.m
    return [
        Check("lower_le_p_guess", det.p_d - inv_m, 1e-9),
        Check("p_guess_le_upper", inv_m + delta - det.p_d, 1e-7),
        Check("ideal_detection_is_1/M", -abs(sub.p_d_ideal - inv_m), 1e-9),
        Check("test_bias_le_delta", delta - bias, 1e-9),
        Check("real_detection_le_upper", inv_m + delta - sub.p_d_real, 1e-9),
        Check("p_d_sub_le_p_guess", det.p_d - sub.p_d_real, 1e-7),
        Check("holevo_ge_delta_bound", chi - delta_bound, 1e-9),
    ]


# identities -----------------------------------------------------------------
IDENTITY_CONFIGS = ("classical", "bipartite", "cq")


def _gen_id(rng, which):
    if which == "classical":
        n, m = (int(x) for x in rng.integers(1, 9, size=2))
        return {"joint": rng.dirichlet(np.ones(n * m)).reshape(n, m)}
    if which == "bipartite":
        da, db = (int(x) for x in rng.integers(2, 5, size=2))
        return {"rho_ab": _random_state(rng, da * db), "dims": (da, db)}
    m = int(rng.integers(1, 5))
    d = int(rng.integers(1, 5))
    return {"ensemble": _random_ensemble(rng, m, d)}


def _eval_id(inst):
    if "joint" in inst:
        j = JointDist(inst["joint"])
        prod = np.outer(j.px, j.py).ravel()
        d = entropy.classical_relative_entropy(j.probs.ravel(), prod)
        i = entropy.mutual_information(j)
        alt1 = entropy.shannon_entropy(j.px) - entropy.conditional_entropy(j, "Y")
        alt2 = entropy.shannon_entropy(j.py) - entropy.conditional_entropy(j, "X")
        return [Check("relent_equals_mutual", -abs(d - i), 1e-9),
                Check("mutual_forms_agree", -max(abs(alt1 - i), abs(alt2 - i)), 1e-9)]
    if "rho_ab" in inst:
        rho, dims = inst["rho_ab"], inst["dims"]
        iq = entropy.quantum_mutual_information(rho, dims)
        d = entropy.quantum_relative_entropy(rho, entropy.product_of_marginals(rho, dims))
        return [Check("mutual_equals_relent", -abs(iq - d), 1e-9)]
    e = inst["ensemble"]
    c = build_cq_state(e)
    chi = entropy.holevo_information(e)
    return [
        Check("cq_entropy_structured_vs_dense", -abs(entropy.cq_joint_entropy(c) - entropy.cq_dense_entropy(c)), 1e-9),
        Check("holevo_equals_cq_mutual",
              -abs(chi - entropy.quantum_mutual_information(c.dense_state(), (c.classical_dim, c.dim))), 1e-9),
        Check("holevo_equals_avg_relent", -abs(chi - entropy.holevo_from_relative_entropies(e)), 1e-9),
        Check("cq_distance_blockwise_vs_dense",
              -abs(cq_trace_distance(c).value - dense_cq_trace_distance(c)), 1e-9),
    ]


# serialization of instances for failure reports ------------------------------

def serialize_instance(inst: dict) -> dict:
    out = {}
    for key, val in inst.items():
        if key in ("p", "q"):
            out[key] = dist_to_doc(val)
        elif key == "joint":
            out[key] = dist_to_doc(val)
        elif key in ("rho", "sigma", "rho_ab"):
            out[key] = operator_to_doc(val)
        elif key == "dims":
            out[key] = [int(x) for x in val]
        elif key == "ensemble":
            out[key] = ensemble_to_doc(val)
        elif key == "key":
            out[key] = ensemble_to_doc(val.ensemble)
    return out


def _single_quantum_dims(dims):
    return list(dims)


SUITES: dict[str, Suite] = {
    "1": Suite("1", "classical Pinsker", lambda dims: [2, 4, 8, 16], _gen1, _eval1, serialize_instance),
    "2": Suite("2", "mutual-information Pinsker",
               lambda dims: [(2, 2), (2, 4), (4, 4), (8, 8)], _gen2, _eval2, serialize_instance),
    "3": Suite("3", "quantum Pinsker", _single_quantum_dims, _gen3, _eval3, serialize_instance),
    "4": Suite("4", "quantum mutual-information Pinsker",
               lambda dims: [(2, 2), (2, 3), (3, 3), (4, 4)], _gen4, _eval4, serialize_instance),
    "5": Suite("5", "Holevo information vs cq trace distance",
               lambda dims: [tuple(d for d in dims if d <= 4) or (2,)], _gen5, _eval5, serialize_instance),
    "6": Suite("6", "classical guessing bound", lambda dims: [2, 4, 8], _gen6, _eval6, serialize_instance),
    "7": Suite("7", "quantum guessing sandwich",
               lambda dims: [tuple(d for d in dims if d <= 4) or (2,)], _gen7, _eval7, serialize_instance),
    "identities": Suite("identities", "entropy identities", lambda dims: list(IDENTITY_CONFIGS),
                        _gen_id, _eval_id, serialize_instance),
}


def config_label(name: str, config) -> str:
    if name in ("5", "7"):
        return "dims=" + ",".join(map(str, config))
    if isinstance(config, tuple):
        return "x".join(map(str, config))
    return str(config)


def instance_rng(seed: int, suite: str, config_index: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), SUITE_NAMES.index(suite), int(config_index), int(index)])


def _digest(inst: dict) -> str:
    parts = []
    for key in sorted(inst):
        val = inst[key]
        if key == "key":
            val = val.ensemble
        if hasattr(val, "states"):
            parts.extend([val.priors, *val.states])
        else:
            parts.append(np.asarray(getattr(val, "matrix", val)))
    return inequalities.digest(*parts)


@dataclass
class SuiteReport:
    seed: int
    samples: int
    dims: tuple[int, ...]
    summaries: list[CheckSummary] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.summaries)


def run_suite(name: str, samples: int, seed: int, dims=DEFAULT_DIMS, report: SuiteReport | None = None) -> SuiteReport:
    """Run ``samples`` instances of every configuration of suite ``name``."""
    suite = SUITES[name]
    report = report or SuiteReport(seed, samples, tuple(dims))
    for ci, config in enumerate(suite.configs(tuple(dims))):
        label = config_label(name, config)
        summaries: dict[str, CheckSummary] = {}
        for i in range(samples):
            inst = suite.generate(instance_rng(seed, name, ci, i), config)
            dg = _digest(inst)
            for chk in suite.evaluate(inst):
                s = summaries.setdefault(chk.name, CheckSummary(name, label, chk.name, chk.tol))
                s.update(i, chk.slack, dg)
        for s in summaries.values():
            report.summaries.append(s)
            if not s.passed:
                inst = suite.generate(instance_rng(seed, name, ci, s.argmin_index), config)
                report.failures.append({
                    "suite": name, "config": label, "config_index": ci, "check": s.check,
                    "seed": seed, "instance_index": s.argmin_index, "slack": s.min_slack,
                    "instance": suite.serialize(inst),
                })
    return report


def run_all(samples: int, seed: int, dims=DEFAULT_DIMS, names=SUITE_NAMES) -> SuiteReport:
    report = SuiteReport(seed, samples, tuple(dims))
    for name in names:
        run_suite(name, samples, seed, dims, report)
    return report


def rerun_instance(name: str, seed: int, config_index: int, index: int, dims=DEFAULT_DIMS):
    """Regenerate one instance and return it with its checks."""
    suite = SUITES[name]
    config = suite.configs(tuple(dims))[config_index]
    inst = suite.generate(instance_rng(seed, name, config_index, index), config)
    return inst, suite.evaluate(inst)
