"""Batch front end: JSON job descriptors in, JSON reports out.

A descriptor looks like::

    {"command": "validate",
     "params": {"p": 2, "r": 1, "N": 6, "M": 64},
     "P": [2, 1],
     "h": 1,
     "A": [[[0, 1, 0]]],
     "options": {}}

Series are lists of coefficients (lowest degree first); each coefficient is
an integer or a list of r coordinates. Exit codes: 0 pass, 2 mathematical
failure, 3 precision failure, 4 schema error.
"""

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import matrix as mx
from .breuil import build_breuil, check_strong_divisibility, compute_N, griffiths_residual, transport_exactness
from .coeffs import CoeffParams
from .errors import BKError, HeightError, NonConvergence, ParamsError, PrecisionError, SchemaError
from .galois import modp_hom_count, rep_multiplicative, two_adic_discrepancy, unramified_rep
from .phimod import (
    ModuleMap,
    PhiModule,
    classify,
    connected_etale,
    dual,
    mult_unipotent,
    sum_form,
    trivialize_etale,
    validate_height,
)
from .series import EisensteinP, series_ring

COMMANDS = (
    "validate",
    "classify",
    "dual",
    "conn-et",
    "mult-unip",
    "trivialize",
    "breuil",
    "galois-etale",
    "galois-mult",
    "homcount",
    "demo-2adic",
    "transport-exact",
)
DEFAULT_PARAMS = {"p": 2, "r": 1, "N": 6, "M": 64}
DEFAULT_P = [2, 1]
KNOWN_FIELDS = {"command", "params", "P", "h", "A", "exponents", "options", "sub", "quotient", "inclusion", "projection", "seed"}
EXIT_OK, EXIT_MATH, EXIT_PRECISION, EXIT_SCHEMA = 0, 2, 3, 4


@dataclass
class JobDescriptor:
    command: str
    params: dict
    P: list
    h: int = 1
    A: list = None
    exponents: list = None
    options: dict = field(default_factory=dict)
    sub: list = None
    quotient: list = None
    inclusion: list = None
    projection: list = None
    seed: int = None
    warnings: list = field(default_factory=list)

    def to_dict(self):
        out = {"command": self.command, "params": dict(self.params), "P": self.P, "h": self.h, "options": dict(self.options)}
        for key in ("A", "exponents", "sub", "quotient", "inclusion", "projection", "seed"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out


# -- parsing -------------------------------------------------------------------------


def _require_int(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"field '{name}' must be an integer", field=name)
    if minimum is not None and value < minimum:
        raise SchemaError(f"field '{name}' must be >= {minimum}", field=name)
    return value


def _check_coeff(c, r, name):
    if isinstance(c, bool):
        raise SchemaError(f"field '{name}' has a boolean coefficient", field=name)
    if isinstance(c, int):
        return
    if isinstance(c, list) and len(c) == r and all(isinstance(x, int) and not isinstance(x, bool) for x in c):
        return
    raise SchemaError(f"field '{name}' needs integer coefficients or length-{r} coordinate lists", field=name)


def _check_series(s, r, name):
    if isinstance(s, dict):
        if "coeffs" not in s:
            raise SchemaError(f"field '{name}' is an object without 'coeffs'", field=name)
        s = s["coeffs"]
    if isinstance(s, int) and not isinstance(s, bool):
        return
    if not isinstance(s, list):
        raise SchemaError(f"field '{name}' must be a list of coefficients", field=name)
    for c in s:
        _check_coeff(c, r, name)


def _check_matrix(A, r, name, square=True):
    if not isinstance(A, list) or not A or not all(isinstance(row, list) and row for row in A):
        raise SchemaError(f"field '{name}' must be a non-empty list of rows", field=name)
    width = len(A[0])
    if any(len(row) != width for row in A) or (square and width != len(A)):
        raise SchemaError(f"field '{name}' has inconsistent dimensions", field=name)
    for row in A:
        for s in row:
            _check_series(s, r, name)


def parse(text):
    """Validate a descriptor given as JSON text (or an already decoded dict)."""
    if isinstance(text, (str, bytes)):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", field=None)
    else:
        data = text
    if not isinstance(data, dict):
        raise SchemaError("descriptor must be a JSON object", field=None)
    warnings = [f"unknown field '{k}' ignored" for k in sorted(data) if k not in KNOWN_FIELDS]
    if "command" not in data:
        raise SchemaError("missing field 'command'", field="command")
    command = data["command"]
    if command not in COMMANDS:
        raise SchemaError(f"unknown command {command!r}", field="command")
    params = dict(DEFAULT_PARAMS)
    raw = data.get("params", {})
    if not isinstance(raw, dict):
        raise SchemaError("field 'params' must be an object", field="params")
    for key, value in raw.items():
        if key == "f":
            if not isinstance(value, list) or not all(isinstance(x, int) for x in value):
                raise SchemaError("field 'params.f' must be a list of integers", field="params.f")
            params["f"] = value
        elif key in DEFAULT_PARAMS:
            params[key] = _require_int(value, f"params.{key}", 1)
        else:
            warnings.append(f"unknown field 'params.{key}' ignored")
    r = params["r"]
    needs_module = command not in ("demo-2adic",)
    if "P" in data:
        P = data["P"]
        if not isinstance(P, list) or len(P) < 2:
            raise SchemaError("field 'P' must list at least two coefficients", field="P")
        for c in P:
            _check_coeff(c, r, "P")
    elif needs_module:
        raise SchemaError("missing field 'P'", field="P")
    else:
        P = list(DEFAULT_P)
    h = _require_int(data.get("h", 1), "h", 1)
    options = data.get("options", {})
    if not isinstance(options, dict):
        raise SchemaError("field 'options' must be an object", field="options")
    job = JobDescriptor(command, params, P, h, options=dict(options), warnings=warnings)
    if "seed" in data:
        job.seed = _require_int(data["seed"], "seed", 0)
    if needs_module:
        if "A" not in data:
            raise SchemaError("missing field 'A'", field="A")
        _check_matrix(data["A"], r, "A")
        job.A = data["A"]
    if command == "homcount" and "exponents" in data:
        exps = data["exponents"]
        if not isinstance(exps, list) or not all(isinstance(x, int) for x in exps):
            raise SchemaError("field 'exponents' must be a list of integers", field="exponents")
        job.exponents = exps
    if command == "transport-exact":
        for key in ("sub", "quotient"):
            if key not in data:
                raise SchemaError(f"missing field '{key}'", field=key)
            _check_matrix(data[key], r, key)
        for key in ("inclusion", "projection"):
            if key not in data:
                raise SchemaError(f"missing field '{key}'", field=key)
            _check_matrix(data[key], r, key, square=False)
        job.sub, job.quotient = data["sub"], data["quotient"]
        job.inclusion, job.projection = data["inclusion"], data["projection"]
    if command == "demo-2adic":
        e = len(P) - 1
        if params["p"] != 2:
            raise SchemaError("demo-2adic needs p = 2", field="params.p")
        if params["N"] < 2:
            raise SchemaError("demo-2adic needs N >= 2", field="params.N")
        if params["M"] < 2 * e + 1:
            raise SchemaError(f"demo-2adic needs M >= 2e + 1 = {2 * e + 1}", field="params.M")
    return job


def serialize(job):
    return json.dumps(job.to_dict(), sort_keys=True, indent=2)


# -- building library objects ------------------------------------------------------------


def _series(ring, s):
    if isinstance(s, dict):
        s = s["coeffs"]
    if isinstance(s, int):
        s = [s]
    return ring(s)


def _matrix(ring, A):
    return [[_series(ring, s) for s in row] for row in A]


def _setup(job):
    pr = job.params
    try:
        params = CoeffParams(pr["p"], pr["r"], pr["N"], pr.get("f"))
        P = EisensteinP(params, job.P)
    except ParamsError as exc:
        raise SchemaError(str(exc), field="P" if "P" in str(exc) else "params")
    return params, P, series_ring(params, pr["M"])


def _module(job, ring, P, A=None):
    return PhiModule(_matrix(ring, job.A if A is None else A), P, job.h)


def _mat_json(A):
    return [[a.to_json()["coeffs"] for a in row] for row in A]


# -- commands ------------------------------------------------------------------------------


def _cmd_validate(job, ring, P):
    M = _module(job, ring, P)
    try:
        chk = validate_height(M)
    except HeightError as exc:
        return {"ok": False, "error": str(exc), "witness": _witness(exc.entry)}, EXIT_MATH
    return {"ok": True, "V": _mat_json(chk.V), "det_exponent": chk.det_exponent, "uprec": chk.uprec}, EXIT_OK


def _witness(entry):
    return list(entry) if isinstance(entry, tuple) else entry


def _cmd_classify(job, ring, P):
    return classify(_module(job, ring, P).validated()).as_dict(), EXIT_OK


def _cmd_dual(job, ring, P):
    D = dual(_module(job, ring, P))
    return {"A": _mat_json(D.A), "V": _mat_json(D.V), "classification": classify(D).as_dict()}, EXIT_OK


def _decomposition_json(dec):
    return {
        "sub": _mat_json(dec.sub.A) if dec.sub.n else [],
        "quotient": _mat_json(dec.quotient.A) if dec.quotient.n else [],
        "sub_rank": dec.sub.n,
        "quotient_rank": dec.quotient.n,
        "basis": _mat_json(dec.basis),
        "iterations": dec.iterations,
    }


def _cmd_conn_et(job, ring, P):
    return _decomposition_json(connected_etale(_module(job, ring, P).validated())), EXIT_OK


def _cmd_mult_unip(job, ring, P):
    return _decomposition_json(mult_unipotent(_module(job, ring, P).validated())), EXIT_OK


def _cmd_trivialize(job, ring, P):
    budget = int(job.options.get("budget", 6))
    triv = trivialize_etale(_module(job, ring, P).validated(), budget)
    return {
        "U": _mat_json(triv.U),
        "U0": [[x.to_json() for x in row] for row in triv.U0],
        "field_degree": triv.params.r,
        "extension_degree": triv.degree,
        "iterations": triv.iterations,
    }, EXIT_OK


def _cmd_breuil(job, ring, P):
    M = _module(job, ring, P).validated()
    B = build_breuil(M, job.options.get("M_S"))
    report = check_strong_divisibility(B)
    out = {"strong_divisibility": report.as_dict(), "kernel_rank": B.kernel_rank}
    M_N = int(job.options.get("M_N", min(32, B.S.M)))
    if job.seed is not None:
        # a second run from a random start in u S must land on the same operator
        rng = np.random.default_rng(job.seed)
        start = [[B.S.embed(ring.u(1) * ring.random(rng, degree=8)) for _ in range(M.n)] for _ in range(M.n)]
        seeded = compute_N(B, M_N, seed=start)
    compute_N(B, M_N)
    if job.seed is not None:
        out["seed_agreement"] = all(
            not ((a.c[:M_N] - b.c[:M_N]) % B.S.params.q).any()
            for ra, rb in zip(seeded, B.N_values)
            for a, b in zip(ra, rb)
        )
    out["N"] = [[[[int(x) for x in c] for c in v.c[:M_N]] for v in row] for row in B.N_values]
    out["N_iterations"] = B.N_iterations
    residual = griffiths_residual(B, M_N)
    out["griffiths_clean_below"] = residual
    ok = report.passed and residual == M_N and out.get("seed_agreement", True)
    return out, EXIT_OK if ok else EXIT_MATH


def _cmd_galois_etale(job, ring, P):
    rep = unramified_rep(_module(job, ring, P).validated(), int(job.options.get("budget", 6)))
    return rep.to_json(), EXIT_OK


def _cmd_galois_mult(job, ring, P):
    rep, twist = rep_multiplicative(_module(job, ring, P).validated(), int(job.options.get("budget", 6)))
    out = rep.to_json()
    out.update(twist.to_json())
    return out, EXIT_OK


def _cmd_homcount(job, ring, P):
    A = _matrix(ring, job.A)
    exps = job.exponents or [1] * len(A)
    ring_spec = job.options.get("ring")
    if ring_spec and "as_w" in ring_spec:
        ring_spec = dict(ring_spec, as_w={int(k): v for k, v in ring_spec["as_w"].items()})
    count, report = modp_hom_count(sum_form(exps, A, P, job.h), ring_spec, int(job.options.get("window", 8)))
    out = report.as_dict()
    if out["ring"].get("as_w") is not None:
        out["ring"]["as_w"] = {str(k): v for k, v in out["ring"]["as_w"].items()}
    return out, EXIT_OK


def _cmd_demo_2adic(job, ring, P):
    cert = two_adic_discrepancy(P, ring.M)
    return cert, EXIT_OK if cert["passed"] else EXIT_MATH


def _cmd_transport(job, ring, P):
    Mp = _module(job, ring, P, job.sub).validated()
    M = _module(job, ring, P).validated()
    Mpp = _module(job, ring, P, job.quotient).validated()
    inc = ModuleMap(Mp, M, _matrix(ring, job.inclusion))
    proj = ModuleMap(M, Mpp, _matrix(ring, job.projection))
    rep = transport_exactness(inc, proj)
    return rep.as_dict(), EXIT_OK if rep.passed else EXIT_MATH


HANDLERS = {
    "validate": _cmd_validate,
    "classify": _cmd_classify,
    "dual": _cmd_dual,
    "conn-et": _cmd_conn_et,
    "mult-unip": _cmd_mult_unip,
    "trivialize": _cmd_trivialize,
    "breuil": _cmd_breuil,
    "galois-etale": _cmd_galois_etale,
    "galois-mult": _cmd_galois_mult,
    "homcount": _cmd_homcount,
    "demo-2adic": _cmd_demo_2adic,
    "transport-exact": _cmd_transport,
}


def _eff_N(command, N):
    if command == "demo-2adic":
        return 2
    if command == "breuil":
        return N - 1
    return N


def run(job):
    """Execute a parsed descriptor. Returns (report dict, exit code)."""
    report = {"command": job.command, "version": __version__, "warnings": list(job.warnings), "params": dict(job.params)}
    try:
        params, P, ring = _setup(job)
        result, code = HANDLERS[job.command](job, ring, P)
        report["result"] = result
        report["eff_N_used"] = min(_eff_N(job.command, params.N), params.N)
        if job.seed is not None:
            report["seed"] = job.seed
    except SchemaError as exc:
        report["error"] = {"kind": "SchemaError", "message": str(exc), "field": exc.field}
        code = EXIT_SCHEMA
    except (PrecisionError, NonConvergence) as exc:
        report["error"] = {"kind": type(exc).__name__, "message": str(exc)}
        code = EXIT_PRECISION
    except BKError as exc:
        report["error"] = {"kind": type(exc).__name__, "message": str(exc)}
        for attr in ("entry", "suggested_degree", "budget"):
            if getattr(exc, attr, None) is not None:
                report["error"][attr] = _witness(getattr(exc, attr))
        code = EXIT_MATH
    report["exit_code"] = code
    report["status"] = {EXIT_OK: "pass", EXIT_MATH: "fail", EXIT_PRECISION: "precision", EXIT_SCHEMA: "schema"}[code]
    return report, code


def run_text(text):
    """Parse and run one descriptor; schema failures become reports too."""
    try:
        job = parse(text)
    except SchemaError as exc:
        report = {
            "version": __version__,
            "error": {"kind": "SchemaError", "message": str(exc), "field": exc.field},
            "exit_code": EXIT_SCHEMA,
            "status": "schema",
        }
        return report, EXIT_SCHEMA
    return run(job)


def _run_item(item):
    return run_text(item)


def _write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".bkmod-", suffix=".json")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def dumps(report):
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def main(argv=None):
    parser = argparse.ArgumentParser(prog="bkmod", description="Finite-precision Breuil-Kisin module computations.")
    parser.add_argument("--input", required=True, help="JSON descriptor, or a list of descriptors")
    parser.add_argument("--output", help="write the JSON report here instead of stdout")
    parser.add_argument("--jobs", type=int, default=1, help="run a list of descriptors in parallel")
    parser.add_argument("--seed", type=int, default=None, help="seed recorded in descriptors without one")
    args = parser.parse_args(argv)

    try:
        with open(args.input) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = None
    batch = isinstance(data, list)
    items = data if batch else [data if data is not None else text]
    if args.seed is not None:
        items = [dict(it, seed=it.get("seed", args.seed)) if isinstance(it, dict) else it for it in items]
    if args.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_item, items))
    else:
        results = [_run_item(it) for it in items]
    reports = [r for r, _ in results]
    code = max(c for _, c in results) if results else EXIT_OK
    text_out = dumps(reports if batch else reports[0])
    if args.output:
        _write_atomic(args.output, text_out)
    else:
        sys.stdout.write(text_out)
    return code


if __name__ == "__main__":
    sys.exit(main())
