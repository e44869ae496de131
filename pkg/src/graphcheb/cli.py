"""``graphcheb`` command line entry point.

Usage::

    graphcheb <tikhonov|lasso|inverse|ssl|compare|verify> --config path.json
              [--seed U64] [--trials N] [--out DIR] [--audit-messages]

Results go to ``<out>/<command>.json`` (default ``results/``); ``compare``
also writes one CSV of error curves per matrix.  Exit status is 0 on
success, 1 when ``verify`` finds a failing suite and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import COMMANDS, ConfigError, merge_config, write_results


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="graphcheb",
                                description="Distributed graph filtering experiments.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="JSON object with experiment parameters")
    p.add_argument("--seed", type=int, help="override the config seed (unsigned 64-bit)")
    p.add_argument("--trials", type=int, help="override the number of connected trials")
    p.add_argument("--out", default="results", help="output directory")
    p.add_argument("--audit-messages", action="store_true",
                   help="record every message, not only the counts")
    return p


def _load_config(path: str) -> dict:
    text = Path(path).read_text()
    if not text.strip():
        raise ConfigError(f"{path}: empty config")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    if not cfg:
        raise ConfigError(f"{path}: empty config (use {{\"preset\": \"paper\"}} for the defaults)")
    return cfg


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("seed must be an unsigned 64-bit integer")
            cfg["seed"] = args.seed
        if args.trials is not None:
            if args.command in ("compare", "verify"):
                raise ConfigError(f"--trials does not apply to {args.command}")
            cfg["trials"] = args.trials
        merge_config(args.command, cfg)
    except (ConfigError, OSError) as exc:
        parser.print_usage(sys.stderr)
        print(f"graphcheb: error: {exc}", file=sys.stderr)
        return 2

    out = Path(args.out)
    cmd = COMMANDS[args.command]
    if args.command == "compare":
        res = cmd(cfg, out_dir=out)
    elif args.command == "verify":
        res = cmd(cfg)
    else:
        res = cmd(cfg, audit=args.audit_messages)
    write_results(res, out / f"{args.command}.json")
    _summarize(res, sys.stdout)
    if args.command == "verify" and not res["passed"]:
        return 1
    return 0


def _summarize(res: dict, fh) -> None:
    kind = res["experiment"]
    if kind == "verify":
        for s in res["suites"]:
            print(f"{'PASS' if s['passed'] else 'FAIL'}  {s['name']:<22s} worst={s['worst']:.3g}", file=fh)
        return
    if kind == "compare":
        for name, c in res["cases"].items():
            print(f"{name:<12s} rho={c['rho']:.4f}  err_cheb[K_max]={c['err_cheb'][-1]:.3e}  "
                  f"err_jacobi[K_max]={c['err_jacobi'][-1]:.3e}", file=fh)
        return
    for key, val in res.items():
        if key.startswith("mse_") or key in ("trials", "skipped_disconnected", "accuracy",
                                              "agreement_centralized"):
            print(f"{key:<24s} {val}", file=fh)


if __name__ == "__main__":
    sys.exit(main())
