"""Batch command-line front end.

A thin client of the service handlers: every subcommand builds the same
request model the HTTP route accepts, calls the shared handler, and formats
the response as text or CSV. Exit codes: 0 success, 1 selftest failure,
2 usage or invalid-input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import FermionicError
from .service import handlers, schemas

CSV_HEADERS = {
    "compress": "n,epsilon,target_modes,rate,typical_mass,fidelity,delta,dense_checked",
    "converse": "n,rate,best_mass,fidelity_bound",
}


def fmt(value) -> str:
    """Fixed six-figure formatting so CSV output is byte-stable."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if value == 0:
        return "0.000000"
    if 1e-4 <= abs(value) < 1e7:
        return f"{value:.6f}"
    return f"{value:.6e}"


def parse_n_grid(text: str) -> list[int]:
    """Either a comma list '2,4,8' or an inclusive range 'A:B:STEP'."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("range must look like A:B:STEP")
        start, stop, step = (int(p) for p in parts)
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError("need A <= B and STEP > 0")
        return list(range(start, stop + 1, step))
    try:
        values = [int(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if not values:
        raise argparse.ArgumentTypeError("empty N grid")
    return values


def _load_state_payload(path: str) -> schemas.StatePayload:
    with open(path) as fh:
        return schemas.StatePayload.model_validate(json.load(fh))


def _emit(lines: list[str], out_path: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_entropy(args) -> int:
    request = schemas.EntropyRequest(state=_load_state_payload(args.state))
    response = handlers.run_entropy(request)
    lines = [f"S = {response.entropy_bits:.6f} bits"]
    for i, (p, par) in enumerate(zip(response.spectrum, response.parities)):
        lines.append(f"p[{i}] = {fmt(p)} ({par})")
    _emit(lines, None)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(response.model_dump(), fh, indent=2)
    return 0


def cmd_compress(args) -> int:
    request = schemas.CompressRequest(
        state=_load_state_payload(args.state),
        epsilon=args.epsilon,
        n_grid=args.n,
        seed=args.seed,
        dense_cap=args.dense_cap,
    )
    response = handlers.run_compress(request)
    lines = [f"# fermicomp compress seed={response.seed}", CSV_HEADERS["compress"]]
    for r in response.rows:
        lines.append(",".join([
            fmt(r.n), fmt(r.epsilon), fmt(r.target_modes), fmt(r.rate),
            fmt(r.typical_mass), fmt(r.fidelity), fmt(r.delta), fmt(r.dense_checked),
        ]))
    _emit(lines, args.out)
    return 0


def cmd_converse(args) -> int:
    request = schemas.ConverseRequest(
        state=_load_state_payload(args.state),
        rate=args.rate,
        n_grid=args.n,
        seed=args.seed,
    )
    response = handlers.run_converse(request)
    lines = [f"# fermicomp converse seed={response.seed}", CSV_HEADERS["converse"]]
    for r in response.rows:
        lines.append(",".join([fmt(r.n), fmt(r.rate), fmt(r.best_mass), fmt(r.fidelity_bound)]))
    _emit(lines, args.out)
    return 0


def cmd_parity_demo(args) -> int:
    response = handlers.run_parity_demo()
    lines = [
        f"local action residual over {response.grid_points}-point grid = "
        f"{fmt(response.local_residual)}",
        f"extended trace distance = {fmt(response.extended_trace_distance)}",
        f"entanglement fidelity (uniform 1-mode state) = {fmt(response.entanglement_fidelity)}",
        f"verdict: {response.verdict}",
    ]
    _emit(lines, None)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(response.model_dump(), fh, indent=2)
    return 0


def cmd_selftest(args) -> int:
    request = schemas.SelftestRequest(dense_cap=args.dense_cap, seed=args.seed)
    response = handlers.run_selftest_request(request)
    lines = [f"# fermicomp selftest seed={response.seed} dense_cap={args.dense_cap}"]
    for suite in response.suites:
        tag = "PASS" if suite.passed else "FAIL"
        lines.append(f"{tag} {suite.name}: {suite.detail}")
    lines.append("all suites passed" if response.passed else "selftest FAILED")
    _emit(lines, None)
    return 0 if response.passed else 1


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("fermicomp.service.app:app", host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermicomp",
        description="Fermionic information compression at desk scale.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="spectrum and von Neumann entropy of a state file")
    p.add_argument("--state", required=True)
    p.add_argument("--out", default=None, help="also write the JSON response here")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("compress", help="achievability sweep over an N grid")
    p.add_argument("--state", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--n", type=parse_n_grid, required=True, metavar="LIST|A:B:STEP")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dense-cap", type=int, default=10, dest="dense_cap")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("converse", help="best rank-limited scheme below the entropy rate")
    p.add_argument("--state", required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--n", type=parse_n_grid, required=True, metavar="LIST|A:B:STEP")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_converse)

    p = sub.add_parser("parity-demo", help="local-tomography failure of the parity channel")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_parity_demo)

    p = sub.add_parser("selftest", help="run every invariant suite")
    p.add_argument("--dense-cap", type=int, default=10, dest="dense_cap")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FermionicError as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
