"""Command-line entry point: validate KBs, run scripted fusion pipelines,
benchmark, and launch the HTTP service.

Exit codes: 0 success, 1 domain error (invalid KB content, fusion
failures), 2 I/O or usage errors.  Output ordering and number formatting
are fixed, so identical inputs produce byte-identical output; human tables
print 4 decimal places and ``--json`` emits full-precision machine output.
"""

from __future__ import annotations

import argparse
import json
import os
import socket
import sys
from pathlib import Path

from . import engine
from .bench import BenchConfig, run_bench
from .core import ConclusionReport
from .errors import HorizonError
from .fusion import AutoDiscountConfig, FusionRule
from .kb import KnowledgeBase, load_kb, sample_kb_path

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2


def _read_file(path: str) -> bytes:
    return Path(path).read_bytes()


def _load_kb_file(path: str) -> KnowledgeBase:
    return load_kb(_read_file(path))


def _print_conclusion(session: engine.Session, node_id: str, out) -> None:
    node = session.node(node_id)
    frame = session.kb.frame(node.boe.frame_id)
    report: ConclusionReport = engine.conclusion_of(session, node_id)
    rule = node.op.rule.value if node.op.rule else "-"
    print(f"conclusion {node_id} (rule {rule}, frame {node.boe.frame_id})", file=out)
    print(f"{'statement':<40} {'support':>9} {'uncertain':>9} {'against':>9}", file=out)
    for row in report.rows:
        label = "{" + ", ".join(row.statement.labels(frame)) + "}"
        if len(label) > 40:
            label = label[:37] + "..."
        print(
            f"{label:<40} {row.support:>9.4f} {row.uncertainty:>9.4f} {row.against:>9.4f}",
            file=out,
        )
    print(f"conflict: {report.conflict:.4f}", file=out)
    print(f"unknown: {report.unknown_mass:.4f}", file=out)
    if node.op.kind == "fused" and engine.is_inconclusive(session, node_id):
        print("note: result is inconclusive (top statements are within the margin)", file=out)


def _print_explanation(session: engine.Session, node_id: str, out) -> None:
    from .explain import explanation_text

    report = engine.explanation_of(session, node_id)
    names = engine.source_names(session, node_id)
    print("influence ranking:", file=out)
    for i, entry in enumerate(report.entries, start=1):
        name = names.get(entry.boe_id, entry.boe_id)
        print(
            f"  {i}. {name} ({entry.boe_id})  {entry.influence:.4f} bits  "
            f"share {entry.share:.4f}",
            file=out,
        )
    print(explanation_text(report, names), file=out)


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        kb = _load_kb_file(args.kb)
    except OSError as exc:
        print(f"error: cannot read {args.kb}: {exc}", file=sys.stderr)
        return EXIT_IO
    except HorizonError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    print(
        f"ok: {len(kb.gallery.frames)} frames, {len(kb.gallery.relations)} relations, "
        f"{len(kb.static_boes)} static BOEs"
    )
    return EXIT_OK


def _cmd_fuse(args: argparse.Namespace) -> int:
    try:
        kb = _load_kb_file(args.kb)
        script_raw = _read_file(args.script)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        records = json.loads(script_raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        print(f"error: script is not valid JSON: {exc}", file=sys.stderr)
        return EXIT_IO
    if not isinstance(records, list):
        print("error: script must be a JSON list of operation records", file=sys.stderr)
        return EXIT_IO

    cfg = AutoDiscountConfig(enabled=args.auto_discount == "on")
    session = engine.new_session(kb, auto_discount=cfg)
    try:
        if args.include_static:
            # static KB evidence participates like entered evidence
            for boe in kb.static_boes:
                engine.submit_boe(
                    session,
                    boe.frame_id,
                    list(boe.masses.items()),
                    boe.source,
                )
        for record in records:
            engine.apply_record(session, record)
        fused = [n for n in session.nodes.values() if n.op.kind == "fused"]
        if not fused:
            entered = [
                n.node_id
                for n in session.nodes.values()
                if n.op.kind == "entered" and not n.disabled
            ]
            target = args.target
            if target is None:
                frames = {session.node(n).boe.frame_id for n in entered}
                if len(frames) != 1:
                    print(
                        "error: inputs span several frames; pass --target",
                        file=sys.stderr,
                    )
                    return EXIT_IO
                target = frames.pop()
            node_id = engine.run_fusion(session, entered, args.rule, target)
        else:
            node_id = fused[-1].node_id
    except HorizonError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

    if args.json:
        from .api import _conclusion_json, _explanation_json

        payload = {"node_id": node_id, "conclusion": _conclusion_json(session, node_id)}
        if args.explain:
            payload["explanation"] = _explanation_json(
                session, node_id, engine.explanation_of(session, node_id)
            )
        print(json.dumps(payload, sort_keys=True, ensure_ascii=False))
    else:
        _print_conclusion(session, node_id, sys.stdout)
        if args.explain:
            _print_explanation(session, node_id, sys.stdout)
    return EXIT_OK


def _parse_range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition("-")
    return int(lo), int(hi or lo)


def _cmd_bench(args: argparse.Namespace) -> int:
    lo, hi = _parse_range(args.frames)
    d, t, f = (int(x) for x in args.ops.split(","))
    cfg = BenchConfig(
        boes=args.boes,
        frame_min=lo,
        frame_max=hi,
        discounts=d,
        translations=t,
        fusions=f,
        seed=args.seed,
    )
    try:
        result = run_bench(cfg)
    except HorizonError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if args.json:
        print(
            json.dumps(
                {
                    "frame_sizes": result.frame_sizes,
                    "mean_frame_size": result.mean_frame_size,
                    "phase_seconds": result.phase_seconds,
                    "total_seconds": result.total_seconds,
                    "node_count": result.node_count,
                    "digest": result.digest,
                },
                sort_keys=True,
            )
        )
        return EXIT_OK
    print(
        f"workload: {cfg.boes} boes, frames {lo}..{hi} "
        f"(mean {result.mean_frame_size:.1f}), {d} discounts, "
        f"{t} translations, {f} fusions, seed {cfg.seed}"
    )
    for phase, seconds in result.phase_seconds.items():
        print(f"{phase:<10} {seconds:8.3f} s")
    print(f"{'total':<10} {result.total_seconds:8.3f} s")
    print(f"nodes: {result.node_count}")
    print(f"digest: {result.digest}")
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    kb_path = args.kb if args.kb is not None else str(sample_kb_path())
    try:
        kb = _load_kb_file(kb_path)
    except OSError as exc:
        print(f"error: cannot read {kb_path}: {exc}", file=sys.stderr)
        return EXIT_IO
    except HorizonError as exc:
        print(f"invalid KB: {exc}", file=sys.stderr)
        return EXIT_DOMAIN

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((args.host, args.port))
    except OSError as exc:
        print(
            f"error: cannot listen on {args.host}:{args.port} "
            f"(address in use or unavailable): {exc}",
            file=sys.stderr,
        )
        return EXIT_IO
    finally:
        probe.close()

    from .api import create_app

    ui_dir = args.ui_dir if args.ui_dir and Path(args.ui_dir).is_dir() else None
    session = engine.new_session(kb)
    app = create_app(session, ui_dir=ui_dir)

    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="horizon",
        description="Evidential-reasoning decision aid: discount, translate and fuse bodies of evidence.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="validate a knowledge-base file")
    p_validate.add_argument("kb", help="path of the .horizon.json KB file")
    p_validate.set_defaults(func=_cmd_validate)

    p_fuse = sub.add_parser("fuse", help="replay an evidence script and print the conclusion")
    p_fuse.add_argument("kb", help="knowledge-base file")
    p_fuse.add_argument("script", help="JSON list of operation records (session-log schema)")
    p_fuse.add_argument("--rule", choices=[r.value for r in FusionRule], default="dempster")
    p_fuse.add_argument("--auto-discount", choices=["on", "off"], default="on")
    p_fuse.add_argument("--target", help="frame id for the conclusion")
    p_fuse.add_argument(
        "--include-static",
        action="store_true",
        help="enter the KB's static BOEs into the session before the script",
    )
    p_fuse.add_argument("--explain", action="store_true", help="print the influence ranking")
    p_fuse.add_argument("--json", action="store_true", help="full-precision machine output")
    p_fuse.set_defaults(func=_cmd_fuse)

    p_bench = sub.add_parser("bench", help="run the synthetic timing workload")
    p_bench.add_argument("--boes", type=int, default=35)
    p_bench.add_argument("--frames", default="8-352", help="frame size range MIN-MAX")
    p_bench.add_argument("--ops", default="25,29,35", help="discounts,translations,fusions")
    p_bench.add_argument("--seed", type=int, default=1)
    p_bench.add_argument("--json", action="store_true")
    p_bench.set_defaults(func=_cmd_bench)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--kb", help="knowledge-base file (defaults to the shipped sample)")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument(
        "--port",
        type=int,
        default=int(os.environ.get("HORIZON_PORT", "8700")),
        help="listen port (env HORIZON_PORT)",
    )
    p_serve.add_argument("--ui-dir", help="built frontend directory to serve at /")
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
