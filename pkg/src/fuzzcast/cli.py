"""Command line front end.

The CLI is a thin client of the HTTP service: it parses local files into
small snapshot payloads and POSTs them.  Without ``--server`` it talks to
an in-process copy of the app, so no server needs to be running; with
``--server URL`` the same requests go to a remote instance.

Exit codes: 0 success, 1 usage problems, 2 unreadable or malformed input
files, 3 estimates that are undefined for the given data.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import io
import json
import os
import sys
import time

import httpx

from . import __version__, ingest
from .errors import (
    EffortError,
    FuzzcastError,
    InsufficientReplicationError,
    ModeViolationError,
    ParseError,
    UndefinedEstimateError,
)
from .species import MULTINOMIAL

_USAGE_EXIT = 1
_PARSE_EXIT = 2
_UNDEFINED_EXIT = 3

_PARSE_CODES = {"parse", "schema", "monotonicity", "mode_violation"}


class ServiceFailure(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code

    @property
    def exit_code(self) -> int:
        if self.code in _PARSE_CODES:
            return _PARSE_EXIT
        if self.code in ("usage", "argument"):
            return _USAGE_EXIT
        return _UNDEFINED_EXIT


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(_USAGE_EXIT)


class Client:
    """POSTs to a remote server or to an in-process app."""

    def __init__(self, server: str | None = None):
        self.server = server

    def post(self, path: str, payload: dict) -> dict:
        if self.server:
            with httpx.Client(base_url=self.server, timeout=600.0) as c:
                resp = c.post(path, json=payload)
        else:
            from .service import create_app

            async def go():
                transport = httpx.ASGITransport(app=create_app())
                async with httpx.AsyncClient(
                    transport=transport, base_url="http://fuzzcast.internal", timeout=None
                ) as c:
                    return await c.post(path, json=payload)

            resp = asyncio.run(go())
        if resp.status_code < 400:
            return resp.json()
        try:
            body = resp.json()
        except ValueError:
            body = {}
        if isinstance(body, dict) and "error" in body:
            raise ServiceFailure(body["error"], body.get("message", ""))
        detail = body.get("detail") if isinstance(body, dict) else None
        raise ServiceFailure("usage", json.dumps(detail) if detail else resp.text)


# -- input plumbing -------------------------------------------------------


def _parse_method(text: str) -> tuple[str, int | None]:
    if text.startswith("known:"):
        try:
            return "known", int(text.split(":", 1)[1])
        except ValueError:
            raise ServiceFailure("usage", f"bad known species count in {text!r}") from None
    return text, None


def _snapshot_payload(args) -> tuple[dict, float | None, list]:
    """Build the snapshot payload from --snapshots, --events or stdin.

    Returns (payload, observed input rate or None, parsed snapshot rows).
    """
    rows: list = []
    if getattr(args, "snapshots", None):
        rows = ingest.parse_snapshots(args.snapshots)
        if not rows:
            raise UndefinedEstimateError(f"{args.snapshots} holds no snapshot rows")
        row = rows[-1]
        rate = row.n / row.time_s if row.time_s > 0 else None
        if row.model == MULTINOMIAL:
            payload = {
                "model": "multinomial",
                "n": row.n,
                "species": row.species,
                "f1": row.f1,
                "f2": row.f2,
                "f3": row.f3,
                "f4": row.f4,
            }
        else:
            payload = {
                "model": "incidence",
                "n": row.n,
                "species": row.species,
                "q1": row.f1,
                "q2": row.f2,
                "q3": row.f3,
                "q4": row.f4,
                "v": row.v or 0,
            }
        return payload, rate, rows
    source = args.events if getattr(args, "events", None) and args.events != "-" else sys.stdin
    acc = ingest.parse_events(source, args.model)
    freq = acc.snapshot()
    if args.model == MULTINOMIAL:
        payload = {
            "model": "multinomial",
            "n": freq.n,
            "species": freq.s_obs,
            "f1": freq.f1,
            "f2": freq.f2,
            "f3": freq.f3,
            "f4": freq.f4,
        }
    else:
        payload = {
            "model": "incidence",
            "n": freq.n,
            "species": freq.s_obs,
            "q1": freq.q1,
            "q2": freq.q2,
            "q3": freq.q3,
            "q4": freq.q4,
            "v": freq.v,
        }
    return payload, None, rows


def _bootstrap_payload(args) -> dict | None:
    if not getattr(args, "ci", False):
        return None
    return {
        "replicates": args.replicates,
        "level": args.level,
        "seed": args.seed,
    }


# -- output plumbing ------------------------------------------------------


def _num(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        if x == int(x) and abs(x) < 1e15:
            return str(int(x))
        return f"{x:.6g}"
    return str(x)


def _print_kv(pairs: list[tuple[str, str]], out) -> None:
    width = max(len(k) for k, _ in pairs)
    for k, v in pairs:
        print(f"{k.ljust(width)}  {v}", file=out)


def _print_rows(columns: list[str], rows: list[dict], fmt: str, out) -> None:
    if fmt == "json-lines":
        for row in rows:
            print(json.dumps(row, sort_keys=True), file=out)
        return
    if fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_num(row.get(c)) for c in columns])
        return
    cells = [[_num(row.get(c)) for c in columns] for row in rows]
    widths = [
        max(len(col), *(len(r[i]) for r in cells)) if cells else len(col)
        for i, col in enumerate(columns)
    ]
    print("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip(), file=out)
    for r in cells:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip(), file=out)


def _fmt_ci(ci: dict | None) -> str:
    if not ci:
        return ""
    tag = " (degraded)" if ci.get("degraded") else ""
    return f"[{_num(ci['lower'])}, {_num(ci['upper'])}] @{ci['level']:g}{tag}"


# -- subcommands ----------------------------------------------------------


def _render_estimate(resp: dict, args, out) -> None:
    if args.format == "json-lines":
        print(json.dumps(resp, sort_keys=True), file=out)
        return
    if args.format == "csv":
        columns = [
            "model", "n", "species", "method", "s_hat", "ci_lower", "ci_upper",
            "coverage", "discovery", "inputs_to_next", "seconds_to_next",
        ]
        flat = dict(resp)
        ci = resp.get("ci") or {}
        flat["ci_lower"] = ci.get("lower")
        flat["ci_upper"] = ci.get("upper")
        _print_rows(columns, [flat], "csv", out)
        return
    method = resp["method"] + (" (degraded)" if resp["degraded"] else "")
    pairs = [
        ("model", resp["model"]),
        ("inputs (n)", _num(resp["n"])),
        ("species (S)", _num(resp["species"])),
        (f"richness ({method})", _num(resp["s_hat"]) + (" " + _fmt_ci(resp.get("ci")) if resp.get("ci") else "")),
        ("undiscovered", _num(resp["f0_hat"])),
        ("species coverage", _num(resp["coverage"])),
        ("residual risk", _num(resp["discovery"])),
        ("singletons", _num(resp["singletons"])),
        ("doubletons", _num(resp["doubletons"])),
    ]
    if resp.get("discovery_naive") is not None:
        pairs.append(("discovery prob (naive)", _num(resp["discovery_naive"])))
    pairs.append(("inputs to next", _num(resp.get("inputs_to_next"))))
    if resp.get("seconds_to_next") is not None:
        pairs.append(("time to next", f"{resp['seconds_to_next']:.6g} s"))
    _print_kv(pairs, out)


def cmd_estimate(args) -> int:
    payload, rate, _rows = _snapshot_payload(args)
    method, s_known = _parse_method(args.method)
    body = {
        "snapshot": payload,
        "method": method,
        "s_known": s_known,
        "bootstrap": _bootstrap_payload(args),
        "rate": args.rate if args.rate is not None else rate,
    }
    resp = Client(args.server).post("/estimate", body)
    _render_estimate(resp, args, sys.stdout)
    return 0


def cmd_extrapolate(args) -> int:
    payload, _rate, rows = _snapshot_payload(args)
    method, s_known = _parse_method(args.method)
    horizons: list[int] = []
    if args.inputs:
        for part in args.inputs.split(","):
            horizons.append(int(part.strip()))
    if args.time:
        for part in args.time.split(","):
            seconds = ingest.parse_duration(part.strip())
            if not rows:
                raise UndefinedEstimateError(
                    "time horizons need snapshot input with a time_s column"
                )
            horizons.append(ingest.inputs_for_horizon(rows, seconds))
    if not horizons:
        raise ServiceFailure("usage", "give at least one horizon via --inputs or --time")
    body = {
        "snapshot": payload,
        "method": method,
        "s_known": s_known,
        "horizons": horizons,
        "bootstrap": _bootstrap_payload(args),
    }
    resp = Client(args.server).post("/extrapolate", body)
    rows_out = []
    for pt in resp["points"]:
        row = {
            "m_star": pt["m_star"],
            "s_pred": pt["s_pred"],
            "u_pred": pt["u_pred"],
            "coverage_pred": pt["coverage_pred"],
        }
        if pt.get("ci"):
            row["ci_lower"] = pt["ci"]["lower"]
            row["ci_upper"] = pt["ci"]["upper"]
        rows_out.append(row)
    columns = ["m_star", "s_pred", "u_pred", "coverage_pred"]
    if any("ci_lower" in r for r in rows_out):
        columns += ["ci_lower", "ci_upper"]
    _print_rows(columns, rows_out, args.format, sys.stdout)
    return 0


def cmd_effort(args) -> int:
    payload, _rate, _rows = _snapshot_payload(args)
    method, s_known = _parse_method(args.method)
    body = {
        "snapshot": payload,
        "method": method,
        "s_known": s_known,
        "target": args.target,
    }
    resp = Client(args.server).post("/effort", body)
    if args.format == "json-lines":
        print(json.dumps(resp, sort_keys=True))
        return 0
    if args.format == "csv":
        _print_rows(
            ["model", "target", "coverage_now", "s_hat", "m_exact", "m_formula"],
            [resp],
            "csv",
            sys.stdout,
        )
        return 0
    pairs = [
        ("model", resp["model"]),
        ("coverage now", _num(resp["coverage_now"])),
        ("coverage target", _num(resp["target"])),
        ("additional inputs", _num(resp["m_exact"])),
        ("closed-form approximation", _num(resp.get("m_formula"))),
    ]
    _print_kv(pairs, sys.stdout)
    if resp.get("note"):
        print(f"note: {resp['note']}", file=sys.stderr)
    return 0


def cmd_simulate(args) -> int:
    body = {
        "species": args.species,
        "dist": args.dist,
        "ratio": args.ratio,
        "exponent": args.exponent,
        "model": args.model,
        "inputs": args.inputs,
        "seed": args.seed,
        "detection_rate": args.detection_rate,
        "checkpoint_every": args.checkpoint_every,
        "rate": args.rate,
        "bias_boost": args.bias_boost,
        "bias_degree": args.bias_degree,
        "include_events": not args.no_events,
    }
    resp = Client(args.server).post("/simulate", body)
    if args.trajectory:
        with open(args.trajectory, "w", encoding="utf-8") as fh:
            fh.write(resp["trajectory_csv"])
    if resp.get("events"):
        sys.stdout.write(resp["events"])
        sys.stdout.flush()
    return 0


def cmd_evaluate(args) -> int:
    body = {
        "species": args.species,
        "dist": args.dist,
        "ratio": args.ratio,
        "exponent": args.exponent,
        "model": args.model,
        "inputs": args.inputs,
        "runs": args.runs,
        "seed": args.seed,
        "estimator": _parse_method(args.estimator)[0],
        "reference": args.reference,
        "checkpoints": args.checkpoints,
        "horizons": [int(p) for p in args.horizons.split(",")] if args.horizons else None,
        "detection_rate": args.detection_rate,
    }
    resp = Client(args.server).post("/evaluate", body)
    _print_rows(
        ["checkpoint", "estimator", "mean_bias", "imprecision", "runs"],
        resp["rows"],
        args.format,
        sys.stdout,
    )
    return 0


def cmd_watch(args) -> int:
    last_stat = None
    updates = 0
    while True:
        try:
            st = os.stat(args.snapshots)
            stamp = (st.st_mtime_ns, st.st_size)
        except OSError:
            stamp = None
        if stamp is not None and stamp != last_stat:
            last_stat = stamp
            if updates:
                print("", file=sys.stdout)
            cmd_estimate(args)
            sys.stdout.flush()
            updates += 1
            if args.max_updates and updates >= args.max_updates:
                return 0
        time.sleep(args.interval)


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


# -- wiring ---------------------------------------------------------------


def _add_common(p: _Parser) -> None:
    p.add_argument("--server", help="URL of a running service; default is in-process")
    p.add_argument(
        "--format",
        choices=["table", "csv", "json-lines"],
        default="table",
        help="output format (default table)",
    )


def _add_snapshot_inputs(p: _Parser) -> None:
    p.add_argument("--events", help="event file, '-' for stdin (default stdin)")
    p.add_argument("--snapshots", help="snapshot CSV; its last row is used")
    p.add_argument(
        "--model",
        choices=["multinomial", "incidence"],
        default="multinomial",
        help="sampling model for event input (snapshot CSVs declare their own)",
    )
    p.add_argument(
        "--method",
        default="chao",
        help="richness estimator: chao, ichao, jk1, jk2 or known:<S> (default chao)",
    )


def _add_bootstrap(p: _Parser) -> None:
    p.add_argument("--ci", action="store_true", help="attach a bootstrap confidence interval")
    p.add_argument("--replicates", type=int, default=200, help="bootstrap resamples (default 200)")
    p.add_argument("--level", type=float, default=0.95, help="confidence level (default 0.95)")
    p.add_argument("--seed", type=int, default=0, help="bootstrap seed (default 0)")


def build_parser() -> _Parser:
    parser = _Parser(prog="fuzzcast", description="Species-discovery statistics for fuzzing campaigns")
    parser.add_argument("--version", action="version", version=f"fuzzcast {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", parents=[], help="richness, coverage and residual risk now")
    _add_common(p)
    _add_snapshot_inputs(p)
    _add_bootstrap(p)
    p.add_argument("--rate", type=float, help="inputs per second, for the time-to-next figure")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("extrapolate", help="predicted discovery after additional effort")
    _add_common(p)
    _add_snapshot_inputs(p)
    _add_bootstrap(p)
    p.add_argument("--inputs", help="comma separated additional-input horizons, e.g. 10000,100000")
    p.add_argument("--time", help="comma separated additional-time horizons, e.g. 30m,1h,4h")
    p.set_defaults(func=cmd_extrapolate)

    p = sub.add_parser("effort", help="additional inputs needed for a coverage target")
    _add_common(p)
    _add_snapshot_inputs(p)
    p.add_argument("--target", type=float, required=True, help="species coverage target in (0,1)")
    p.set_defaults(func=cmd_effort)

    p = sub.add_parser("simulate", help="draw a synthetic campaign with known ground truth")
    _add_common(p)
    p.add_argument("--species", type=int, required=True, help="true number of species")
    p.add_argument("--dist", choices=["uniform", "geometric", "zipf"], default="uniform")
    p.add_argument("--ratio", type=float, help="decay ratio for --dist geometric")
    p.add_argument("--exponent", type=float, help="exponent for --dist zipf")
    p.add_argument("--model", choices=["multinomial", "incidence"], default="multinomial")
    p.add_argument("--inputs", type=int, required=True, help="number of inputs to generate")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--detection-rate", type=float, default=0.01, dest="detection_rate",
                   help="peak per-input detection rate (incidence model)")
    p.add_argument("--checkpoint-every", type=int, dest="checkpoint_every",
                   help="trajectory row every this many inputs")
    p.add_argument("--rate", type=float, default=1000.0,
                   help="synthetic inputs per second for trajectory time_s (default 1000)")
    p.add_argument("--bias-boost", type=float, dest="bias_boost",
                   help="enable adaptive bias with this boost factor")
    p.add_argument("--bias-degree", type=int, default=2, dest="bias_degree",
                   help="neighbourhood half-width for adaptive bias (default 2)")
    p.add_argument("--trajectory", help="write the snapshot CSV trajectory to this file")
    p.add_argument("--no-events", action="store_true", help="skip the event stream output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="score estimators against simulated ground truth")
    _add_common(p)
    p.add_argument("--species", type=int, required=True)
    p.add_argument("--dist", choices=["uniform", "geometric", "zipf"], default="uniform")
    p.add_argument("--ratio", type=float)
    p.add_argument("--exponent", type=float)
    p.add_argument("--model", choices=["multinomial", "incidence"], default="multinomial")
    p.add_argument("--inputs", type=int, required=True, help="inputs per campaign")
    p.add_argument("--runs", type=int, default=10, help="independent campaigns (default 10)")
    p.add_argument("--seed", type=int, default=0, help="base seed; run i uses seed+i")
    p.add_argument("--estimator", default="chao")
    p.add_argument("--reference", choices=["simulator-truth", "final-empirical"],
                   default="simulator-truth")
    p.add_argument("--checkpoints", type=int, default=8,
                   help="number of geometric checkpoints (default 8)")
    p.add_argument("--horizons", help="score extrapolation at these m* values instead")
    p.add_argument("--detection-rate", type=float, default=0.01, dest="detection_rate")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("watch", help="follow a snapshot file and reprint estimates on change")
    _add_common(p)
    _add_snapshot_inputs(p)
    _add_bootstrap(p)
    p.add_argument("--rate", type=float, help="inputs per second, for the time-to-next figure")
    p.add_argument("--interval", type=float, default=5.0, help="poll interval in seconds (default 5)")
    p.add_argument("--max-updates", type=int, default=0, dest="max_updates",
                   help="stop after this many reprints (0 = run until interrupted)")
    p.set_defaults(func=cmd_watch)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8440)
    p.set_defaults(func=cmd_serve)

    return parser


def _emit_error(code: str, message: str, fmt: str) -> None:
    if fmt == "json-lines":
        print(json.dumps({"error": code, "message": message}, sort_keys=True), file=sys.stderr)
    else:
        print(f"fuzzcast: {message}", file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fmt = getattr(args, "format", "table")
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 0
    except BrokenPipeError:
        return 0
    except ServiceFailure as exc:
        _emit_error(exc.code, str(exc), fmt)
        return exc.exit_code
    except (ParseError, ModeViolationError) as exc:
        _emit_error(exc.code, str(exc), fmt)
        return _PARSE_EXIT
    except (UndefinedEstimateError, EffortError, InsufficientReplicationError) as exc:
        _emit_error(exc.code, str(exc), fmt)
        return _UNDEFINED_EXIT
    except FuzzcastError as exc:
        _emit_error(exc.code, str(exc), fmt)
        return _UNDEFINED_EXIT
    except OSError as exc:
        _emit_error("parse", str(exc), fmt)
        return _PARSE_EXIT
    except ValueError as exc:
        _emit_error("argument", str(exc), fmt)
        return _USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
