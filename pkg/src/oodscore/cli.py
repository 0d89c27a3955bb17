"""Command-line client for the scoring pipeline.

Subcommands score, eval, mixture, synth, and validate call the same handler
functions the HTTP service exposes; pass ``--server URL`` to send the
request to a running service instead (the server shares the filesystem, so
outputs land in the same paths either way). ``serve`` starts the service.

Exit codes: 0 success, 2 usage or config error, 3 data error. Every
successful run writes a ``<output>.manifest.json`` beside its primary
output recording the invocation; manifests carry wall time and are not
byte-stable, the data outputs are.
"""

import argparse
import os
import sys
import time

from . import __version__, serialize
from .errors import ConfigError, DataError
from .service import handlers, models

FORMAT_VERSION = handlers.FORMAT_VERSION
VERSION_LINE = f"oodscore {__version__} (oceb format v{FORMAT_VERSION})"

_ENDPOINTS = {
    "score": "/v1/score",
    "eval": "/v1/eval",
    "mixture": "/v1/mixture",
    "synth": "/v1/synth",
    "validate": "/v1/labels/validate",
}

_HANDLERS = {
    "score": handlers.score,
    "eval": handlers.evaluate,
    "mixture": handlers.mixture_run,
    "synth": handlers.synth_run,
    "validate": handlers.validate,
}


def _threads_default() -> int:
    return os.cpu_count() or 1


def resolve_threads(flag_value: int | None) -> int:
    """OCA_THREADS wins over --threads; default is available parallelism."""
    env = os.environ.get("OCA_THREADS")
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise ConfigError(f"OCA_THREADS must be an integer, got {env!r}")
        if value < 1:
            raise ConfigError(f"OCA_THREADS must be >= 1, got {value}")
        return value
    if flag_value is None:
        return _threads_default()
    if flag_value < 1:
        raise ConfigError(f"--threads must be >= 1, got {flag_value}")
    return flag_value


def _dispatch(subcommand: str, request, server: str | None):
    """Run locally through the handler, or POST to a server."""
    if server is None:
        return _HANDLERS[subcommand](request).model_dump()
    import httpx

    url = server.rstrip("/") + _ENDPOINTS[subcommand]
    try:
        resp = httpx.post(url, json=request.model_dump(), timeout=300.0)
    except httpx.HTTPError as exc:
        print(f"error (transport): {exc}", file=sys.stderr)
        raise SystemExit(1)
    if resp.status_code >= 400:
        try:
            err = resp.json()["error"]
            category, message = err["category"], err["message"]
        except Exception:
            category, message = "unknown", resp.text
        print(f"error ({category}): {message}", file=sys.stderr)
        raise SystemExit(2 if resp.status_code == 400 else 3)
    return resp.json()


def _write_manifest(subcommand: str, request, primary_out: str, elapsed: float):
    manifest = {
        "subcommand": subcommand,
        "config": request.model_dump(),
        "outputs": [primary_out],
        "version": VERSION_LINE,
        "wall_time_s": round(elapsed, 6),
    }
    path = (
        os.path.join(primary_out, "run.manifest.json")
        if os.path.isdir(primary_out)
        else primary_out + ".manifest.json"
    )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize.dumps(manifest))
        fh.write("\n")


def _run(subcommand: str, request, server: str | None, primary_out: str) -> dict:
    start = time.monotonic()
    response = _dispatch(subcommand, request, server)
    _write_manifest(subcommand, request, primary_out, time.monotonic() - start)
    print(serialize.dumps(response))
    return response


def cmd_score(args) -> int:
    methods = [m for m in (args.methods or "").split(",") if m]
    request = models.ScoreRequest(
        images=args.images, texts=args.texts, labels=args.labels,
        methods=methods, temperature=args.temperature, out=args.out,
        threads=resolve_threads(args.threads),
    )
    _run("score", request, args.server, args.out)
    return 0


def cmd_eval(args) -> int:
    request = models.EvalRequest(
        scores=args.scores, tasks=args.tasks, out=args.out,
        markdown=args.markdown,
    )
    _run("eval", request, args.server, args.out)
    return 0


def cmd_mixture(args) -> int:
    request = models.MixtureRequest(
        boxes=args.boxes, labels=args.labels, method=args.method,
        temperature=args.temperature, out=args.out,
        truth=args.truth, report_out=args.report_out,
    )
    _run("mixture", request, args.server, args.out)
    return 0


def cmd_synth(args) -> int:
    request = models.SynthRequest(config=args.config, out_dir=args.out_dir)
    os.makedirs(args.out_dir, exist_ok=True)
    _run("synth", request, args.server, args.out_dir)
    return 0


def cmd_validate(args) -> int:
    request = models.ValidateRequest(labels=args.labels)
    response = _dispatch("validate", request, args.server)
    print(serialize.dumps(response))
    return 0 if response["ok"] else 3


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oodscore",
        description="Zero-shot one-class OOD scoring and evaluation",
    )
    parser.add_argument("--version", action="version", version=VERSION_LINE)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_server(p):
        p.add_argument("--server", default=None,
                       help="base URL of a running service; local by default")

    p = sub.add_parser("score", help="score an image store against a label set")
    p.add_argument("--images", required=True)
    p.add_argument("--texts", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--methods", default=",".join(
        ("neg_max_prob", "sum_out_prob", "max_out_prob", "neg_max_in_prob",
         "max_logit_diff")))
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.add_argument("--threads", type=int, default=None)
    add_server(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", help="AUROC report from a scores file")
    p.add_argument("--scores", required=True)
    p.add_argument("--tasks", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--markdown", action="store_true")
    add_server(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("mixture", help="per-box scores and spread per image")
    p.add_argument("--boxes", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--method", default="max_logit_diff")
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.add_argument("--truth", default=None)
    p.add_argument("--report-out", default=None)
    add_server(p)
    p.set_defaults(func=cmd_mixture)

    p = sub.add_parser("synth", help="generate synthetic stores and corpora")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    add_server(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("validate", help="check a label-config file")
    p.add_argument("--labels", required=True)
    add_server(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8639)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error (config): {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error (data): {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error (data): {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
