"""Command-line front end.

Exit status: 0 success, 1 input or validation error, 2 a verification suite
found a violated inequality, 3 an iterative search did not reach its tolerance.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, entropy, inequalities, qkd, suites
from .detection import (
    AccessibleInfoConfig,
    accessible_information,
    helstrom_binary,
    optimize_detection,
)
from .distance import cq_trace_distance, dense_cq_trace_distance, statistical_distance, trace_distance
from .errors import QInfoError, SandwichViolation
from .io import Loaded, doc_to_key_ensemble, load, loads, operator_to_doc, parse_document
from .states import build_cq_state

EXIT_OK, EXIT_INPUT, EXIT_SUITE, EXIT_NOCONV = 0, 1, 2, 3
COMMANDS = ("entropy", "reldiv", "mutual", "holevo", "dist", "pinsker", "holevo-trace",
            "helstrom", "accinfo", "guess", "verify")
DEFAULT_SEED = 0


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list[str] = field(default_factory=list)
    seed: int = DEFAULT_SEED
    samples: int = 1000
    dims: list[int] = field(default_factory=list)
    tol: float = 1e-9
    output: str | None = None
    format: str = "human"
    theorem: str = "all"
    max_iter: int = 10_000
    config_index: int | None = None
    instance: int | None = None

    def validate(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.samples < 1:
            raise InputError("samples must be >= 1")
        if not self.tol > 0:
            raise InputError("tol must be > 0")
        if any(d < 2 for d in self.dims):
            raise InputError("all dims must be >= 2")
        if self.seed < 0:
            raise InputError("seed must be a non-negative integer")
        if self.format not in ("human", "machine"):
            raise InputError(f"unknown format {self.format!r}")


def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.9g}")
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return x


def _digest_file(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def _load_inputs(cfg: RunConfig, count: int | tuple[int, ...]) -> list[Loaded]:
    allowed = (count,) if isinstance(count, int) else count
    if len(cfg.inputs) not in allowed:
        raise InputError(f"{cfg.command} takes {' or '.join(map(str, allowed))} --input file(s), got {len(cfg.inputs)}")
    out = []
    for path in cfg.inputs:
        try:
            out.append(load(path))
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc
    return out


def _bipartite_dims(cfg: RunConfig, doc: Loaded):
    if doc.dims is not None:
        return doc.dims
    if len(cfg.dims) >= 2:
        return (cfg.dims[0], cfg.dims[1])
    return None


def _kinds(docs) -> tuple[str, ...]:
    return tuple(d.kind for d in docs)


def _bad_kinds(cfg, docs):
    return InputError(f"{cfg.command} does not accept inputs of kind {', '.join(_kinds(docs))}")


def cmd_entropy(cfg: RunConfig) -> tuple[dict, int]:
    (doc,) = _load_inputs(cfg, 1)
    if doc.kind == "probs":
        return {"H": entropy.shannon_entropy(doc.value)}, EXIT_OK
    if doc.kind == "joint":
        j = doc.value
        return {"H_X": entropy.shannon_entropy(j.px), "H_Y": entropy.shannon_entropy(j.py),
                "H_XY": entropy.joint_entropy(j), "H_X_given_Y": entropy.conditional_entropy(j, "Y"),
                "H_Y_given_X": entropy.conditional_entropy(j, "X"),
                "I_XY": entropy.mutual_information(j)}, EXIT_OK
    if doc.kind == "operator":
        out = {"S": entropy.von_neumann_entropy(doc.value)}
        dims = _bipartite_dims(cfg, doc)
        if dims:
            from .states import partial_trace

            out["S_A"] = entropy.von_neumann_entropy(partial_trace(doc.value, dims, "A"))
            out["S_B"] = entropy.von_neumann_entropy(partial_trace(doc.value, dims, "B"))
        return out, EXIT_OK
    e = doc.value
    c = build_cq_state(e)
    return {"H_priors": entropy.shannon_entropy(e.priors), "S_avg": entropy.von_neumann_entropy(e.average),
            "S_cq_structured": entropy.cq_joint_entropy(c), "S_cq_dense": entropy.cq_dense_entropy(c)}, EXIT_OK


def cmd_reldiv(cfg: RunConfig):
    a, b = _load_inputs(cfg, 2)
    if _kinds((a, b)) == ("probs", "probs"):
        return {"D_c": entropy.classical_relative_entropy(a.value, b.value)}, EXIT_OK
    if _kinds((a, b)) == ("operator", "operator"):
        return {"D_q": entropy.quantum_relative_entropy(a.value, b.value)}, EXIT_OK
    raise _bad_kinds(cfg, (a, b))


def cmd_mutual(cfg: RunConfig):
    (doc,) = _load_inputs(cfg, 1)
    if doc.kind == "joint":
        j = doc.value
        prod = np.outer(j.px, j.py).ravel()
        return {"I": entropy.mutual_information(j),
                "D_c_joint_vs_product": entropy.classical_relative_entropy(j.probs.ravel(), prod)}, EXIT_OK
    if doc.kind == "operator":
        dims = _bipartite_dims(cfg, doc)
        if dims is None:
            raise InputError("mutual on an operator needs --dims dA,dB or a 'dims' field")
        rho = doc.value
        return {"I_q": entropy.quantum_mutual_information(rho, dims),
                "D_q_joint_vs_product": entropy.quantum_relative_entropy(rho, entropy.product_of_marginals(rho, dims)),
                "S_AB": entropy.quantum_joint_entropy(rho, dims)}, EXIT_OK
    raise _bad_kinds(cfg, (doc,))


def _ensemble(cfg) -> "Loaded":
    (doc,) = _load_inputs(cfg, 1)
    if doc.kind != "ensemble":
        raise _bad_kinds(cfg, (doc,))
    return doc


def cmd_holevo(cfg: RunConfig):
    e = _ensemble(cfg).value
    c = build_cq_state(e)
    return {"chi": entropy.holevo_information(e),
            "I_cq_dense": entropy.quantum_mutual_information(c.dense_state(), (c.classical_dim, c.dim)),
            "avg_relative_entropy": entropy.holevo_from_relative_entropies(e)}, EXIT_OK


def cmd_dist(cfg: RunConfig):
    docs = _load_inputs(cfg, (1, 2))
    kinds = _kinds(docs)
    if kinds == ("probs", "probs"):
        s = statistical_distance(docs[0].value, docs[1].value)
        return {"statistical_distance": s, "delta_c": 0.5 * s}, EXIT_OK
    if kinds == ("operator", "operator"):
        r = trace_distance(docs[0].value, docs[1].value)
        return {"delta_q": r.value, "optimal_projector": operator_to_doc(r.optimal_projector)}, EXIT_OK
    if kinds == ("ensemble",):
        c = build_cq_state(docs[0].value)
        return {"delta_q_cq": cq_trace_distance(c).value, "delta_q_cq_dense": dense_cq_trace_distance(c)}, EXIT_OK
    raise _bad_kinds(cfg, docs)


def cmd_pinsker(cfg: RunConfig):
    docs = _load_inputs(cfg, (1, 2))
    kinds = _kinds(docs)
    if kinds == ("probs", "probs"):
        b = inequalities.pinsker_classical(docs[0].value, docs[1].value)
    elif kinds == ("joint",):
        b = inequalities.pinsker_mutual(docs[0].value)
    elif kinds == ("operator", "operator"):
        b = inequalities.pinsker_quantum(docs[0].value, docs[1].value)
    elif kinds == ("operator",):
        dims = _bipartite_dims(cfg, docs[0])
        if dims is None:
            raise InputError("pinsker on one operator needs --dims dA,dB or a 'dims' field")
        b = inequalities.pinsker_quantum_mutual(docs[0].value, dims)
        overscaled = inequalities.pinsker_quantum_mutual_overscaled(docs[0].value, dims)
        out = b.as_dict()
        out["holds"] = b.holds
        out["overscaled_coefficient_rhs"] = overscaled.rhs
        out["overscaled_coefficient_holds"] = overscaled.holds
        return out, EXIT_OK
    else:
        raise _bad_kinds(cfg, docs)
    out = b.as_dict()
    out["holds"] = b.holds
    return out, EXIT_OK


def cmd_holevo_trace(cfg: RunConfig):
    b = inequalities.holevo_vs_trace(_ensemble(cfg).value)
    out = b.as_dict()
    out["holds"] = b.holds
    return out, EXIT_OK


def _detection_dict(r) -> dict:
    return {"p_e": r.p_e, "p_d": r.p_d, "certificate_residual": r.certificate_residual,
            "converged": r.converged, "iterations": r.iterations, "dual_bound": r.dual_bound,
            "povm": [operator_to_doc(el) for el in r.povm.elements]}


def cmd_helstrom(cfg: RunConfig):
    e = _ensemble(cfg).value
    out = {}
    if len(e) == 2:
        out["helstrom"] = _detection_dict(helstrom_binary(float(e.p[0]), *e.states))
    r = optimize_detection(e, tol=cfg.tol, max_iter=cfg.max_iter)
    out["optimized"] = _detection_dict(r)
    return out, EXIT_OK if r.converged else EXIT_NOCONV


def cmd_accinfo(cfg: RunConfig):
    e = _ensemble(cfg).value
    search = AccessibleInfoConfig(seed=cfg.seed)
    return {"accessible_information_lower_bound": accessible_information(e, search),
            "holevo_upper_bound": entropy.holevo_information(e)}, EXIT_OK


def cmd_guess(cfg: RunConfig):
    (path,) = cfg.inputs if len(cfg.inputs) == 1 else (None,)
    if path is None:
        raise InputError("guess takes exactly one --input file")
    doc = loads(Path(path).read_text())
    if isinstance(doc, dict) and "joint" in doc:
        r = qkd.classical_guess_bound(parse_document(doc).value, check=False)
        code = EXIT_OK if r.passed else EXIT_SUITE
        return r.as_dict(), code
    if not isinstance(doc, dict) or "states" not in doc:
        raise InputError("guess needs a key ensemble or a joint distribution")
    k = doc_to_key_ensemble(doc)
    r = qkd.guess_bound(k, tol=cfg.tol, max_iter=cfg.max_iter, check=False)
    out = r.as_dict()
    out["key_bits"] = k.key_bits
    if not r.passed:
        return out, EXIT_SUITE
    return out, EXIT_OK if r.residual <= cfg.tol else EXIT_NOCONV


def _suite_names(theorem: str) -> tuple[str, ...]:
    if theorem == "all":
        return suites.SUITE_NAMES
    names = tuple(t.strip() for t in theorem.split(","))
    for n in names:
        if n not in suites.SUITES:
            raise InputError(f"unknown theorem {n!r}; choose from all, {', '.join(suites.SUITE_NAMES)}")
    return names


def cmd_verify(cfg: RunConfig):
    dims = tuple(cfg.dims) if cfg.dims else suites.DEFAULT_DIMS
    names = _suite_names(cfg.theorem)
    if cfg.instance is not None:
        if len(names) != 1:
            raise InputError("--instance needs a single --theorem")
        inst, checks = suites.rerun_instance(names[0], cfg.seed, cfg.config_index or 0, cfg.instance, dims)
        ok = all(c.slack >= -c.tol for c in checks)
        return {"suite": names[0], "seed": cfg.seed, "config_index": cfg.config_index or 0,
                "instance_index": cfg.instance, "instance": suites.serialize_instance(inst),
                "checks": [{"check": c.name, "slack": c.slack, "tol": c.tol, "passed": c.slack >= -c.tol}
                           for c in checks], "passed": ok}, EXIT_OK if ok else EXIT_SUITE
    report = suites.run_all(cfg.samples, cfg.seed, dims, names)
    rows = [{"suite": s.suite, "config": s.config, "check": s.check, "instances": s.instances,
             "min_slack": s.min_slack, "tol": s.tol, "argmin_index": s.argmin_index,
             "argmin_digest": s.argmin_digest, "passed": s.passed} for s in report.summaries]
    out = {"samples": cfg.samples, "dims": list(dims), "theorems": list(names), "results": rows,
           "failures": report.failures, "passed": report.passed}
    return out, EXIT_OK if report.passed else EXIT_SUITE


HANDLERS = {
    "entropy": cmd_entropy, "reldiv": cmd_reldiv, "mutual": cmd_mutual, "holevo": cmd_holevo,
    "dist": cmd_dist, "pinsker": cmd_pinsker, "holevo-trace": cmd_holevo_trace,
    "helstrom": cmd_helstrom, "accinfo": cmd_accinfo, "guess": cmd_guess, "verify": cmd_verify,
}


def _human(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    for key, val in obj.items():
        if isinstance(val, dict) and "matrix" in val:
            lines.append(f"{pad}{key}: <operator dim={val['dim']}>")
        elif isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines.extend(_human(val, indent + 1))
        elif key == "inputs":
            lines.append(f"{pad}inputs: " + ", ".join(f"{v['path']} ({v['digest']})" for v in val))
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            lines.append(f"{pad}{key}: [{len(val)} entries]")
        else:
            lines.append(f"{pad}{key}: {val}")
    return lines


def _verify_table(doc: dict) -> list[str]:
    lines = [f"seed {doc['seed']}  samples {doc['samples']}  dims {doc['dims']}",
             f"{'suite':<11}{'config':<12}{'check':<32}{'n':>6}  {'min slack':>16}  status"]
    for r in doc["results"]:
        status = "pass" if r["passed"] else "FAIL"
        lines.append(f"{r['suite']:<11}{r['config']:<12}{r['check']:<32}{r['instances']:>6}"
                     f"  {r['min_slack']!s:>16}  {status}")
    for f in doc["failures"]:
        lines.append(f"failure: suite {f['suite']} config {f['config']} (index {f['config_index']}) "
                     f"check {f['check']} instance {f['instance_index']} slack {f['slack']}; "
                     f"rerun with: verify --theorem {f['suite']} --seed {f['seed']} "
                     f"--config-index {f['config_index']} --instance {f['instance_index']}")
    lines.append("PASSED" if doc["passed"] else "FAILED")
    return lines


def render(doc: dict, fmt: str) -> str:
    doc = _num(doc)
    if fmt == "machine":
        return json.dumps(doc, separators=(",", ":")) + "\n"
    if doc.get("command") == "verify" and "results" in doc:
        return "\n".join(_verify_table(doc)) + "\n"
    return "\n".join(_human(doc)) + "\n"


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute one command; returns the exit status and the rendered report."""
    try:
        cfg.validate()
        body, code = HANDLERS[cfg.command](cfg)
        inputs = [{"path": p, "digest": _digest_file(p)} for p in cfg.inputs]
    except (InputError, QInfoError) as exc:
        return EXIT_INPUT, render({"command": cfg.command, "error": f"{type(exc).__name__}: {exc}"}, cfg.format)
    except SandwichViolation as exc:
        return EXIT_SUITE, render({"command": cfg.command, "error": str(exc)}, cfg.format)
    doc = {"command": cfg.command, "version": __version__, "seed": cfg.seed, "tol": cfg.tol,
           "inputs": inputs, **body, "exit_status": code}
    return code, render(doc, cfg.format)


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpinsker", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", "-i", action="append", default=[], dest="inputs",
                       help="input document (repeat for two-argument commands)")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--samples", type=int, default=1000)
        p.add_argument("--dims", type=_int_list, default=[])
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--max-iter", type=int, default=10_000)
        p.add_argument("--output", "-o")
        p.add_argument("--format", choices=("human", "machine"), default="human")
        if name == "verify":
            p.add_argument("--theorem", default="all",
                           help="all, identities, or a comma list of 1-7")
            p.add_argument("--config-index", type=int, default=None)
            p.add_argument("--instance", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(command=args.command, inputs=args.inputs, seed=args.seed, samples=args.samples,
                    dims=args.dims, tol=args.tol, output=args.output, format=args.format,
                    theorem=getattr(args, "theorem", "all"), max_iter=args.max_iter,
                    config_index=getattr(args, "config_index", None), instance=getattr(args, "instance", None))
    code, text = run(cfg)
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
