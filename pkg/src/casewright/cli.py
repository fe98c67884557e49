"""Operator tool: validate models, run scenario scripts, serve the HTTP API.

    casewright validate <model.json>
    casewright run <model.json> <scenario.scn> [--snapshot-every N] [--store DIR]
    casewright serve <config.json>

Exit codes: 0 success, 1 validation/expect failure, 2 parse or engine error.
The CASEWRIGHT_STORE environment variable overrides the store path.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import socket
import sys
import tempfile
from pathlib import Path

from .engine import Runtime
from .errors import CasewrightError, ModelSyntaxError
from .model import has_errors, parse_model, validate_model
from .persistence import Store
from .scenarios import ExpectFailure, ScenarioSyntaxError, parse_scenario, run_scenario


def _store_path(explicit: str | None) -> str | None:
    return explicit or os.environ.get("CASEWRIGHT_STORE")


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        text = Path(args.model).read_text()
        model = parse_model(text)
    except (OSError, CasewrightError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    diagnostics = validate_model(model)
    for d in diagnostics:
        print(f"{d.severity} {d.rule} {d.element_id}: {d.message}")
    if has_errors(diagnostics):
        return 1
    print(f"{model.id}: ok ({len(diagnostics)} warnings)" if diagnostics else f"{model.id}: ok")
    return 0


def cmd_run(args: argparse.Namespace) -> int:
    try:
        model = parse_model(Path(args.model).read_text())
        diagnostics = validate_model(model)
        if has_errors(diagnostics):
            for d in diagnostics:
                print(f"{d.severity} {d.rule} {d.element_id}: {d.message}", file=sys.stderr)
            return 2
        steps = parse_scenario(Path(args.scenario).read_text())
    except (OSError, ModelSyntaxError, ScenarioSyntaxError, json.JSONDecodeError, CasewrightError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    store = None
    store_path = _store_path(args.store)
    if store_path or args.snapshot_every:
        store = Store(store_path or tempfile.mkdtemp(prefix="casewright-"))
        store.save_model(model)
    runtime = Runtime(model_resolver=store.resolver() if store else None)
    _register_sibling_models(runtime, Path(args.model).parent, model.id)

    try:
        result = run_scenario(model, steps, runtime=runtime, store=store,
                              snapshot_every=args.snapshot_every)
    except ExpectFailure as exc:
        print(f"expect failed: {exc}", file=sys.stderr)
        return 1
    except (CasewrightError, ValueError) as exc:
        print(f"engine error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(result.transcript_text())
    return 0


def _register_sibling_models(runtime: Runtime, directory: Path, skip: str) -> None:
    """Case tasks may reference other models; pick up fixtures next to the model."""
    for path in sorted(directory.glob("*.json")):
        try:
            sibling = parse_model(path.read_text())
        except CasewrightError:
            continue
        if sibling.id != skip:
            runtime.register_model(sibling)


def cmd_serve(args: argparse.Namespace) -> int:
    try:
        config = json.loads(Path(args.config).read_text())
        host = config.get("host", "127.0.0.1")
        port = int(config["port"])
        store_path = _store_path(None) or config["store"]
        tokens = config.get("tokens", {})
    except (OSError, KeyError, ValueError) as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return 2

    # bind before announcing readiness so connections queue from that moment
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        sock.bind((host, port))
        sock.listen(128)
    except OSError as exc:
        sock.close()
        print(f"cannot bind {host}:{port}: {exc}", file=sys.stderr)
        return 2

    import uvicorn

    from .api import create_app

    store = Store(store_path)
    app = create_app(store, tokens)
    print(f"casewright service ready on http://{host}:{port}", flush=True)
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    server.run(sockets=[sock])
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("CASEWRIGHT_LOG", "WARNING"))
    parser = argparse.ArgumentParser(prog="casewright", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="validate a model file")
    p_validate.add_argument("model")
    p_validate.set_defaults(func=cmd_validate)

    p_run = sub.add_parser("run", help="run a scenario script against a model")
    p_run.add_argument("model")
    p_run.add_argument("scenario")
    p_run.add_argument("--snapshot-every", type=int, default=None, metavar="N")
    p_run.add_argument("--store", default=None)
    p_run.set_defaults(func=cmd_run)

    p_serve = sub.add_parser("serve", help="serve the HTTP API")
    p_serve.add_argument("config")
    p_serve.set_defaults(func=cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
