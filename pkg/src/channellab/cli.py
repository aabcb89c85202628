"""Command-line front end.

Commands: ``validate``, ``classify``, ``orbit``, ``dilation``, ``cesaro``,
``zoo-list``, ``zoo-emit``.  Envelope-producing commands print one
canonical-JSON object to stdout; ``orbit`` streams JSON lines; ``zoo-emit``
prints a raw input document that the other commands accept.

Exit codes: 0 success, 1 usage or parse error, 2 validation or hypothesis
failure, 3 numerical failure.  Output is byte-deterministic for a given
input and seed (floats at 17 significant digits, keys sorted, no
timestamps); the default seed comes from ``CHANNELLAB_SEED`` when set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channel import (
    DensityMatrix,
    KrausChannel,
    channel_from_document,
    channel_to_document,
    stinespring_to_document,
    to_superoperator,
    validate_cpt,
)
from .dilation import (
    conservation_audit,
    cross_validate,
    find_factorizing_eigenstates,
    instance_from_document,
    instance_to_document,
    validate_conserved,
)
from .errors import HypothesisViolation, InternalInconsistencyError
from .jsonutil import canonical_json, input_digest, json_to_matrix, matrix_to_json, vector_to_json
from .lyapunov import (
    FUNCTIONALS,
    cesaro_average,
    orbit,
    orbit_oracle,
    trivial_lyapunov,
)
from .spectral import VERDICT_MIXING, VERDICT_NOT_ERGODIC, analyze, report_to_payload
from .zoo import build, build_named, catalog, dilation_instance, find_spec


class UsageError(Exception):
    """Bad command line, unreadable file, or malformed JSON (exit code 1)."""


def _default_seed() -> int:
    raw = os.environ.get("CHANNELLAB_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        return 0


def _load_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(
            f"malformed JSON in {path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc


def _load_channel(path: str) -> tuple[KrausChannel, dict]:
    doc = _load_json(path)
    return channel_from_document(doc), doc


def _envelope(command: str, doc, report, warnings=()) -> dict:
    return {
        "tool_version": __version__,
        "input_digest": input_digest(doc),
        "command": command,
        "report": report,
        "warnings": list(warnings),
    }


def _emit(envelope: dict) -> None:
    sys.stdout.write(canonical_json(envelope) + "\n")


def _parse_state(spec: str, dim: int) -> DensityMatrix:
    """State argument: "basis:k", "mixed", or an inline JSON matrix."""
    if spec == "mixed":
        return DensityMatrix.maximally_mixed(dim)
    if spec.startswith("basis:"):
        try:
            k = int(spec.split(":", 1)[1])
        except ValueError as exc:
            raise UsageError(f"bad basis state spec {spec!r}") from exc
        if not 0 <= k < dim:
            raise UsageError(f"basis index {k} out of range for dimension {dim}")
        return DensityMatrix.basis_state(dim, k)
    if spec.lstrip().startswith("["):
        try:
            rows = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise UsageError(f"inline state is not valid JSON: {exc.msg}") from exc
        return DensityMatrix(json_to_matrix(rows, what="state"))
    raise UsageError(f'unrecognized state spec {spec!r}: use "basis:k", "mixed", or a JSON matrix')


def _validation_payload(c: KrausChannel) -> dict:
    report = validate_cpt(c)
    return {
        "dim": c.dim,
        "label": c.label,
        "completeness_defect": report.completeness_defect,
        "min_choi_eigenvalue": report.min_choi_eigenvalue,
        "checks": dict(report.checks),
        "messages": list(report.messages),
        "passed": report.passed,
    }


def _require_valid(c: KrausChannel) -> None:
    report = validate_cpt(c)
    if not report.passed:
        raise ValueError("channel failed validation: " + "; ".join(report.messages))


def _cmd_validate(args) -> int:
    c, doc = _load_channel(args.file)
    payload = _validation_payload(c)
    _emit(_envelope("validate", doc, payload, warnings=() if payload["passed"] else payload["messages"]))
    return 0 if payload["passed"] else 2


def _cmd_classify(args) -> int:
    c, doc = _load_channel(args.file)
    _require_valid(c)
    report = analyze(to_superoperator(c))
    payload = report_to_payload(report)
    warnings = []
    if report.near_cluster_boundary:
        warnings.append(
            "eigenvalues lie near the peripheral/cluster tolerance boundary; "
            "the verdict is sensitive to the clustering tolerances"
        )
    if args.oracle:
        oracle = orbit_oracle(c, n_max=args.nmax, tol_distance=args.tol, seed=args.seed)
        agrees = (report.verdict == VERDICT_MIXING) == (oracle.verdict == "mixing")
        payload["oracle"] = {
            "verdict": oracle.verdict,
            "final_max_distance": oracle.final_max_distance,
            "trailing_max_distance": oracle.trailing_max_distance,
            "n_max": oracle.n_max,
            "tol": oracle.tol,
            "n_probes": oracle.n_probes,
            "trailing_window": oracle.trailing_window,
        }
        payload["oracle_agrees"] = agrees
        if not agrees:
            warnings.append("orbit oracle disagrees with the spectral verdict")
    _emit(_envelope("classify", doc, payload, warnings))
    return 0


def _cmd_orbit(args) -> int:
    c, _doc = _load_channel(args.file)
    _require_valid(c)
    rho0 = _parse_state(args.state, c.dim)
    if args.n < 0:
        raise UsageError("--n must be >= 0")
    functionals = []
    if args.functionals:
        functionals = [name.strip() for name in args.functionals.split(",") if name.strip()]
        for name in functionals:
            if name not in FUNCTIONALS:
                raise UsageError(f"unknown functional {name!r}; expected one of {FUNCTIONALS}")
    report = analyze(to_superoperator(c))
    fixed_point = report.fixed_points[0] if report.verdict != VERDICT_NOT_ERGODIC else None
    if args.n == 0:
        states = [rho0]
        values = {}
        if functionals:
            trace = orbit(c, rho0, 1, tuple(functionals))
            values = {name: series[:1] for name, series in trace.functional_values.items()}
    else:
        trace = orbit(c, rho0, args.n, tuple(functionals))
        states = list(trace.states)
        values = trace.functional_values
    for k, state in enumerate(states):
        record = {
            "n": k,
            "distance_to_fixed_point": (
                trivial_lyapunov(state, fixed_point) if fixed_point is not None else None
            ),
            "functionals": {name: values[name][k] for name in functionals},
        }
        sys.stdout.write(canonical_json(record) + "\n")
    return 0


def _cmd_dilation(args) -> int:
    doc = _load_json(args.file)
    cd = instance_from_document(doc)
    report = validate_conserved(cd)
    if not report.passed:
        raise HypothesisViolation("; ".join(report.messages))
    fact = find_factorizing_eigenstates(cd)
    cross = cross_validate(cd)
    payload = {
        "validation": {
            "commutator_defect": report.commutator_defect,
            "bath_eigen_residual": report.bath_eigen_residual,
            "extremal_gap": report.extremal_gap,
            "extremal_eigenvalue": report.extremal_eigenvalue,
            "checks": dict(report.checks),
            "passed": report.passed,
        },
        "factorizing": {
            "count": fact.count,
            "verdict": fact.verdict,
            "states": [vector_to_json(nu) for nu in fact.states],
            "unitary_eigenvalues": [[z.real, z.imag] for z in fact.unitary_eigenvalues],
            "residuals": list(fact.residuals),
            "n_clusters": fact.n_clusters,
            "has_degenerate_cluster": fact.has_degenerate_cluster,
        },
        "cross_validation": {
            "factorizing_verdict": cross.factorizing_verdict,
            "spectral_verdict": cross.spectral_verdict,
            "agree": cross.agree,
            "count": cross.count,
            "fixed_point_distance": cross.fixed_point_distance,
        },
    }
    warnings = [] if cross.agree else ["factorizing and spectral verdicts disagree"]
    _emit(_envelope("dilation", doc, payload, warnings))
    return 0


def _cmd_cesaro(args) -> int:
    c, doc = _load_channel(args.file)
    _require_valid(c)
    rho0 = _parse_state(args.state, c.dim)
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    report = analyze(to_superoperator(c))
    fixed_point = report.fixed_points[0] if report.verdict != VERDICT_NOT_ERGODIC else None
    warnings = []
    if fixed_point is None:
        warnings.append("channel has no unique fixed point; distances are omitted")
    checkpoints = sorted({10**k for k in range(0, 5) if 10**k <= args.n} | {args.n})
    rate_table = []
    for n in checkpoints:
        avg = cesaro_average(c, rho0, n)
        distance = trivial_lyapunov(avg, fixed_point) if fixed_point is not None else None
        rate_table.append(
            {
                "n": n,
                "distance": distance,
                "n_scaled_distance": (n + 1) * distance if distance is not None else None,
            }
        )
    final_avg = cesaro_average(c, rho0, args.n)
    payload = {
        "n": args.n,
        "average": matrix_to_json(final_avg.matrix),
        "distance_to_fixed_point": (
            trivial_lyapunov(final_avg, fixed_point) if fixed_point is not None else None
        ),
        "rate_table": rate_table,
    }
    _emit(_envelope("cesaro", doc, payload, warnings))
    return 0


def _cmd_zoo_list(args) -> int:
    entries = [
        {
            "name": spec.name,
            "label": spec.label,
            "dim": spec.dim,
            "parameters": dict(spec.parameters),
            "expected_verdict": spec.expected_verdict,
            "provenance": spec.provenance,
            "description": spec.description,
        }
        for spec in catalog()
    ]
    _emit(_envelope("zoo-list", {}, {"channels": entries}))
    return 0


def _parse_params(raw_params) -> dict:
    params = {}
    for item in raw_params or ():
        if "=" not in item:
            raise UsageError(f"--param expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        try:
            params[key] = float(value)
        except ValueError as exc:
            raise UsageError(f"--param {key}: {value!r} is not a number") from exc
    return params


def _cmd_zoo_emit(args) -> int:
    params = _parse_params(args.param)
    name = args.name
    try:
        if args.instance:
            if name not in ("partial-swap-dilation", "cz-dilation"):
                raise UsageError(f"{name!r} has no conserved-dilation instance")
            theta = params.pop("theta", None)
            if params:
                raise UsageError(f"unexpected parameters for {name!r}: {sorted(params)}")
            doc = instance_to_document(dilation_instance(name, theta=theta))
        elif name in ("partial-swap-dilation", "cz-dilation"):
            try:
                spec = find_spec(name, **params)
                label = spec.label
            except ValueError:
                label = None
            channel = build_named(name, **params)
            cd = dilation_instance(name, theta=params.get("theta"))
            doc = stinespring_to_document(cd.dilation, label=label or channel.label)
        else:
            try:
                spec = find_spec(name, **params)
                channel = build(spec)
            except ValueError:
                if name == "random":
                    if args.dim is None:
                        raise UsageError("random channels need --dim")
                    channel = build_named(name, dim=args.dim, **params)
                else:
                    channel = build_named(name, dim=args.dim, **params)
            doc = channel_to_document(channel)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    sys.stdout.write(canonical_json(doc) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="channellab",
        description="Decide whether finite-dimensional quantum channels are ergodic and/or mixing.",
    )
    parser.add_argument("--seed", type=int, default=_default_seed(),
                        help="seed for all randomized probes (default: CHANNELLAB_SEED or 0)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a channel document for complete positivity and trace preservation")
    p.add_argument("file", help="channel JSON document")
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("classify", help="spectral verdict: mixing / ergodic_not_mixing / not_ergodic")
    p.add_argument("file", help="channel JSON document")
    p.add_argument("--oracle", action="store_true", help="cross-check with the brute-force orbit oracle")
    p.add_argument("--nmax", type=int, default=2000, help="oracle horizon (default 2000)")
    p.add_argument("--tol", type=float, default=1e-8, help="oracle convergence tolerance (default 1e-8)")
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("orbit", help="stream the orbit of a state as JSON lines")
    p.add_argument("file", help="channel JSON document")
    p.add_argument("--state", required=True, help='initial state: "basis:k", "mixed", or a JSON matrix')
    p.add_argument("--n", type=int, required=True, help="number of steps (>= 0)")
    p.add_argument("--functionals", default="",
                   help=f"comma-separated subset of {', '.join(FUNCTIONALS)}")
    p.set_defaults(handler=_cmd_orbit)

    p = sub.add_parser("dilation", help="analyze a conserved-observable dilation instance")
    p.add_argument("file", help="dilation instance JSON document")
    p.set_defaults(handler=_cmd_dilation)

    p = sub.add_parser("cesaro", help="Cesaro time average and its distance to the fixed point")
    p.add_argument("file", help="channel JSON document")
    p.add_argument("--state", required=True, help='initial state: "basis:k", "mixed", or a JSON matrix')
    p.add_argument("--n", type=int, required=True, help="number of steps (>= 1)")
    p.set_defaults(handler=_cmd_cesaro)

    p = sub.add_parser("zoo-list", help="list the channel catalog")
    p.set_defaults(handler=_cmd_zoo_list)

    p = sub.add_parser("zoo-emit", help="emit a catalog channel (or dilation instance) as JSON")
    p.add_argument("name", help="channel name, e.g. depolarizing")
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="channel parameter (repeatable), e.g. --param p=0.25")
    p.add_argument("--dim", type=int, default=None, help="dimension for random channels")
    p.add_argument("--instance", action="store_true",
                   help="emit the conserved-dilation instance document instead of the channel")
    p.set_defaults(handler=_cmd_zoo_emit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except HypothesisViolation as exc:
        print(f"hypothesis violation: {exc}", file=sys.stderr)
        return 2
    except InternalInconsistencyError as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return 3
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
