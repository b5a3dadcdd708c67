"""Command-line front end.

Every verb writes one JSON (or text) report and exits with a code that is a
pure function of the report's ``status``:

====================================  ====
status                                exit
====================================  ====
In, positive, ok, reproduced          0
Out, negative_witness, contradicted   1
Inconclusive, zero_boundary, partial  2
input error                           3
====================================  ====

Inputs are JSON files (tensor, generating vector or decomposition, told
apart by their fields) or ``bundled:<name>`` for the shipped examples.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bundled
from .cones import (
    check_cd_hankel,
    check_cp_witness,
    check_sos,
    check_sos_star,
    check_ssos,
    cone_chain_harness,
    precondition,
)
from .decomposition import (
    GeneratingVector,
    PronyError,
    generating_from_hankel,
    hankel_from_generating,
    inherit_reshape,
    prony_decompose,
    schur_decomposed,
)
from .jsonio import dumps
from .spectral import copositive_min, min_h_eigenvalue, numeric_pd_check
from .tensor import DecompositionList, SymmetricTensor, eval_tensor, from_weighted_powers, hadamard, tensor_scale

__all__ = ["EXIT_CODES", "InputError", "build_parser", "exit_code", "main", "reproduce", "run"]

EXIT_CODES = {
    "In": 0,
    "positive": 0,
    "ok": 0,
    "reproduced": 0,
    "Out": 1,
    "negative_witness": 1,
    "contradicted": 1,
    "Inconclusive": 2,
    "zero_boundary": 2,
    "partial": 2,
}
INPUT_ERROR = 3
TARGETS = ("sos", "ssos", "sos-star", "pd-probe", "cop-probe", "cd-hankel", "cp-witness")


class InputError(ValueError):
    pass


def exit_code(status: str) -> int:
    return EXIT_CODES.get(status, INPUT_ERROR)


# ---------------------------------------------------------------------------
# input handling


def _read(spec: str) -> dict:
    try:
        if spec.startswith("bundled:"):
            return bundled.load_bundled(spec.split(":", 1)[1])
        with open(spec, encoding="utf-8") as fh:
            data = json.load(fh)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from exc
    except OSError as exc:
        raise InputError(f"cannot read input '{spec}': {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"input '{spec}' is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InputError(f"input '{spec}' must hold a JSON object")
    return data


def _kind(data: dict) -> str:
    if "entries" in data:
        return "tensor"
    if "h" in data:
        return "generating"
    if "vectors" in data:
        return "decomposition"
    raise InputError("input has none of the fields 'entries', 'h', 'vectors'")


def _load(spec: str, want: tuple[str, ...]):
    data = _read(spec)
    kind = _kind(data)
    try:
        if kind == "tensor":
            obj = SymmetricTensor.from_dict(data)
        elif kind == "generating":
            obj = GeneratingVector.from_dict(data)
        else:
            obj = DecompositionList.from_dict(data)
    except (ValueError, TypeError) as exc:
        raise InputError(f"{spec}: {exc}") from exc
    if kind not in want:
        raise InputError(f"{spec}: expected {' or '.join(want)} input, got {kind}")
    return kind, obj


def _as_tensor(spec: str, order: int | None = None) -> SymmetricTensor:
    kind, obj = _load(spec, ("tensor", "generating", "decomposition"))
    if kind == "tensor":
        return obj
    if kind == "generating":
        return hankel_from_generating(obj)
    if order is None:
        raise InputError(f"{spec}: a decomposition input needs --order")
    return from_weighted_powers(obj, order)


def _as_generating(spec: str) -> GeneratingVector:
    kind, obj = _load(spec, ("tensor", "generating"))
    if kind == "generating":
        return obj
    try:
        return generating_from_hankel(obj)
    except ValueError as exc:
        raise InputError(f"{spec}: {exc}") from exc


def _single_input(args) -> str:
    if not args.input or len(args.input) != 1:
        raise InputError(f"'{args.verb}' needs exactly one --input")
    return args.input[0]


def _parse_vector(text: str | None, name: str) -> np.ndarray:
    if text is None:
        raise InputError(f"missing --{name}")
    try:
        return np.array([float(v) for v in text.replace(",", " ").split()], dtype=float)
    except ValueError as exc:
        raise InputError(f"--{name}: {exc}") from exc


# ---------------------------------------------------------------------------
# verbs


def _verb_eval(args) -> dict:
    A = _as_tensor(_single_input(args), args.order)
    x = _parse_vector(args.x, "x")
    try:
        value = eval_tensor(A, x)
    except ValueError as exc:
        raise InputError(f"--x: {exc}") from exc
    return {"verb": "eval", "status": "ok", "value": value, "x": x}


def _verb_hankel_build(args) -> dict:
    kind, h = _load(_single_input(args), ("generating",))
    return {"verb": "hankel-build", "status": "ok", "tensor": hankel_from_generating(h).to_dict()}


def _verb_prony(args) -> dict:
    h = _as_generating(_single_input(args))
    try:
        dec = prony_decompose(h, tol=args.tol if args.tol is not None else 1e-10)
    except PronyError as exc:
        return {"verb": "prony", "status": "Inconclusive", "reason": exc.reason, "message": str(exc)}
    return {"verb": "prony", "status": "ok", "decomposition": dec.to_dict()}


def _verb_inherit(args) -> dict:
    h = _as_generating(_single_input(args))
    if args.q is None or args.p is None:
        raise InputError("inherit needs --q and --p")
    try:
        B = inherit_reshape(h, args.q, args.p, construction=args.construction)
    except PronyError as exc:
        return {"verb": "inherit", "status": "Inconclusive", "reason": exc.reason, "message": str(exc)}
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return {"verb": "inherit", "status": "ok", "construction": args.construction, "tensor": B.to_dict()}


def _verb_hadamard(args) -> dict:
    if not args.input or len(args.input) != 2:
        raise InputError("hadamard needs two --input files")
    loaded = [_load(spec, ("tensor", "decomposition")) for spec in args.input]
    if all(kind == "decomposition" for kind, _ in loaded):
        if args.order is None:
            raise InputError("hadamard of two decompositions needs --order")
        try:
            dec = schur_decomposed(loaded[0][1], loaded[1][1])
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        return {
            "verb": "hadamard",
            "status": "ok",
            "tensor": from_weighted_powers(dec, args.order).to_dict(),
            "decomposition": dec.to_dict(),
        }
    if args.order is None and any(kind == "decomposition" for kind, _ in loaded):
        raise InputError("a decomposition input needs --order")
    tensors = [obj if kind == "tensor" else from_weighted_powers(obj, args.order) for kind, obj in loaded]
    try:
        out = hadamard(tensors[0], tensors[1])
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    return {"verb": "hadamard", "status": "ok", "tensor": out.to_dict()}


def _probe_report(name: str, rep) -> dict:
    d = rep.to_dict()
    return {"cone": name, "status": d.pop("status"), **d}


def _verb_check(args) -> dict:
    if args.target is None:
        raise InputError("check needs --target")
    spec = _single_input(args)
    tol = args.tol if args.tol is not None else 1e-8
    target = args.target
    if target == "cd-hankel":
        return check_cd_hankel(_as_generating(spec), tol=tol).to_dict()
    if target == "cp-witness":
        _, dec = _load(spec, ("decomposition",))
        return check_cp_witness(dec).to_dict()
    A = _as_tensor(spec, args.order)
    try:
        if target == "sos":
            return check_sos(A, tol=tol, seed=args.seed, restarts=args.restarts).to_dict()
        if target == "ssos":
            return check_ssos(A, tol=tol, seed=args.seed).to_dict()
        if target == "sos-star":
            return check_sos_star(A, tol=tol).to_dict()
        if target == "pd-probe":
            pre = precondition(A) if args.precondition else None
            probe = numeric_pd_check(pre.tensor if pre else A, restarts=args.restarts, seed=args.seed)
            out = _probe_report("PD", probe)
            if pre is not None:
                out["preconditioning"] = pre.to_dict()
            return out
        if target == "cop-probe":
            return _probe_report("COP", copositive_min(A, restarts=args.restarts, seed=args.seed))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    raise InputError(f"unknown target '{target}'")


def _verb_harness(args) -> dict:
    rep = cone_chain_harness(args.order or 4, args.dim or 3, args.samples, seed=args.seed)
    return {"verb": "harness", **rep.to_dict()}


# ---------------------------------------------------------------------------
# reproduction pipelines


def _claim(name: str, expected, observed, verdict: str) -> dict:
    return {"claim": name, "expected": expected, "observed": observed, "verdict": verdict}


def _overall(claims: list[dict]) -> str:
    verdicts = {c["verdict"] for c in claims}
    if verdicts == {"reproduced"}:
        return "reproduced"
    if "contradicted" in verdicts:
        return "contradicted"
    return "partial"


def _prony_claim(h, nodes, weights) -> dict:
    expected = {"nodes": list(nodes), "weights": list(weights)}
    try:
        dec = prony_decompose(h)
    except PronyError as exc:
        return _claim("prony recovers the Vandermonde data (1e-6 relative)", expected,
                      {"error": exc.reason, "message": str(exc)}, "not_reproduced")
    observed = dec.to_dict()
    ok = dec.nodes.size == len(nodes)
    if ok:
        order = np.argsort(nodes)
        want_n, want_w = np.array(nodes)[order], np.array(weights)[order]
        ok = bool(np.all(np.abs(dec.nodes - want_n) <= 1e-6 * np.abs(want_n))
                  and np.all(np.abs(dec.weights - want_w) <= 1e-6 * np.abs(want_w)))
    return _claim("prony recovers the Vandermonde data (1e-6 relative)", expected, observed,
                  "reproduced" if ok else "not_reproduced")


def reproduce(name: str, seed: int = 0, restarts: int | None = None) -> dict:
    if name == "sec54":
        A, dec = bundled.sec54_tensor(), bundled.sec54_decomposition()
        h = generating_from_hankel(A)
        claims = []
        pair = min_h_eigenvalue(A, restarts=restarts or 16, seed=seed)
        claims.append(_claim("smallest H-eigenvalue 0.9956 +- 1e-3", 0.9956, pair.to_dict(),
                             "reproduced" if abs(pair.lambda_ - 0.9956) <= 1e-3 else "contradicted"))
        sos = check_sos(A, seed=seed)
        claims.append(_claim("SOS (n = 2 quartic, PD)", "In", sos.to_dict(),
                             {"In": "reproduced", "Out": "contradicted"}.get(sos.status, "not_reproduced")))
        claims.append(_prony_claim(h, dec.nodes, dec.weights))
        cd = check_cd_hankel(h)
        claims.append(_claim("not CD", "Out", cd.to_dict(),
                             {"Out": "reproduced", "In": "contradicted"}.get(cd.status, "not_reproduced")))
        return {"verb": "reproduce", "example": name, "status": _overall(claims), "claims": claims}
    if name == "sec55":
        A, dec = bundled.sec55_tensor(), bundled.sec55_decomposition()
        h = generating_from_hankel(A)
        claims = []
        pre = precondition(A)
        probe = numeric_pd_check(pre.tensor, restarts=restarts, seed=seed)
        margin = probe.min_value / tensor_scale(pre.tensor)
        claims.append(_claim("PD (probe on the preconditioned tensor)", "positive", probe.to_dict(),
                             "reproduced" if probe.status == "positive" else
                             "contradicted" if probe.status == "negative_witness" else "not_reproduced"))
        claims.append(_claim("PD margin > 1e-6 * scale", 1e-6, {"relative_margin": margin},
                             "reproduced" if margin > 1e-6 else "not_reproduced"))
        sos = check_sos(A, seed=seed)
        claims.append(_claim("not SOS", "Out", sos.to_dict(),
                             {"Out": "reproduced", "In": "contradicted"}.get(sos.status, "not_reproduced")))
        cd = check_cd_hankel(h)
        claims.append(_claim("not CD", "Out", cd.to_dict(),
                             {"Out": "reproduced", "In": "contradicted"}.get(cd.status, "not_reproduced")))
        return {"verb": "reproduce", "example": name, "preconditioning": pre.to_dict(),
                "status": _overall(claims), "claims": claims}
    raise InputError(f"unknown reproduction '{name}' (choose sec54 or sec55)")


def _verb_reproduce(args) -> dict:
    return reproduce(args.example, seed=args.seed, restarts=args.restarts)


VERBS = {
    "eval": _verb_eval,
    "hankel-build": _verb_hankel_build,
    "prony": _verb_prony,
    "inherit": _verb_inherit,
    "hadamard": _verb_hadamard,
    "check": _verb_check,
    "harness": _verb_harness,
    "reproduce": _verb_reproduce,
}


# ---------------------------------------------------------------------------
# driver


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", action="append", help="input JSON file or bundled:<name> (repeatable)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=None)
    common.add_argument("--restarts", type=int, default=None)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--order", type=int, default=None, help="order for decomposition inputs / harness")

    parser = argparse.ArgumentParser(prog="structensor", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="verb", required=True)
    p = sub.add_parser("eval", parents=[common], help="evaluate A x^m")
    p.add_argument("--x", required=False, help="comma-separated point")
    sub.add_parser("hankel-build", parents=[common], help="Hankel tensor from a generating vector")
    sub.add_parser("prony", parents=[common], help="Vandermonde decomposition of a generating vector")
    p = sub.add_parser("inherit", parents=[common], help="inherited order-qm, dim-p Hankel tensor")
    p.add_argument("--q", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--construction", choices=("node_power", "generating"), default="node_power")
    sub.add_parser("hadamard", parents=[common], help="Hadamard product of two inputs")
    p = sub.add_parser("check", parents=[common], help="cone membership check or probe")
    p.add_argument("--target", choices=TARGETS)
    p.add_argument("--no-precondition", dest="precondition", action="store_false",
                   help="pd-probe on the raw tensor")
    p = sub.add_parser("harness", parents=[common], help="cone chain and duality harness")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--samples", type=int, default=20)
    p = sub.add_parser("reproduce", parents=[common], help="run a bundled example end to end")
    p.add_argument("example", choices=("sec54", "sec55"))
    return parser


def _as_text(report: dict) -> str:
    lines = []
    for key, value in report.items():
        if isinstance(value, (dict, list)):
            lines.append(f"{key}:")
            lines.extend("  " + ln for ln in dumps(value).rstrip("\n").splitlines())
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def run(argv=None) -> tuple[int, dict]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2, which would read as Inconclusive; usage errors are input errors
        if exc.code in (0, None):
            raise
        return INPUT_ERROR, {"verb": None, "status": "input_error", "message": "invalid command line"}
    try:
        report = VERBS[args.verb](args)
        code = exit_code(report["status"])
    except InputError as exc:
        report = {"verb": args.verb, "status": "input_error", "message": str(exc)}
        code = INPUT_ERROR
    text = dumps(report) if args.format == "json" else _as_text(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if code == INPUT_ERROR:
        sys.stderr.write(f"error: {report['message']}\n")
    return code, report


def main(argv=None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
