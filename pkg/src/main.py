from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence

from src.services.config import (
    OUTPUT_FORMATS,
    SWEEPABLE,
    Config,
    ConfigError,
    load_config,
    resolve_config_path,
    with_value,
)
from src.services.profile import Mode, build_node, estimate, fold, template_defs
from src.services.report import (
    render,
    report_rows,
    report_to_json,
    rows_to_csv,
    vector_frame,
)
from src.services.reversibilizer import (
    compile_tf,
    load_bool_circuit,
    make_uf,
    resource_vector,
)
from src.services.sizing import resolve_params
from src.services.oracles import OracleSet
from src.services.template_file import serialize_template
from src.services.templates import template_library
from src.services.verifier import SUITES, run_suite

logger = logging.getLogger(__name__)

SMALL_PROBLEM = Path(__file__).resolve().parent / "data" / "small_problem.json"
TEMPLATE_ARGS = ("n", "b", "f", "w")


def _modes(args: argparse.Namespace) -> list[Mode]:
    if args.include_oracles:
        return [Mode.INCL]
    if args.exclude_oracles:
        return [Mode.EXCL]
    return [Mode.INCL, Mode.EXCL]


def _config(args: argparse.Namespace) -> Config:
    if getattr(args, "small", False):
        return load_config(SMALL_PROBLEM)
    return load_config(resolve_config_path(args.config))


def _format(args: argparse.Namespace, config: Config) -> str:
    return args.format or config.output.format


def _emit(text: str, out: str | None) -> None:
    if out is None:
        print(text)
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text + "\n", encoding="utf-8")
    print(f"Saved report: {path}")


def cmd_estimate(args: argparse.Namespace) -> int:
    config = _config(args)
    report = estimate(config, parallel_ampest=args.parallel_ampest)
    _emit(render(report, _format(args, config), _modes(args)), args.output)
    return 0


def _sweep_value(raw: str) -> int | float | None:
    if raw.lower() in ("none", "null"):
        return None
    try:
        return int(raw)
    except ValueError:
        return float(raw)


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.param not in SWEEPABLE:
        raise ConfigError(
            f"Parameter {args.param} is not sweepable (expected one of {sorted(SWEEPABLE)})"
        )
    key = SWEEPABLE[args.param]
    config = _config(args)
    try:
        values = [_sweep_value(v) for v in args.values]
    except ValueError as e:
        raise ConfigError(f"{key}: {e}") from e
    configs = [with_value(config, key, v) for v in values]

    def run(item: tuple[int, Config]):
        i, cfg = item
        report = estimate(cfg, parallel_ampest=args.parallel_ampest)
        logger.info("[%d/%d] %s = %s", i + 1, len(configs), args.param, values[i])
        return report

    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        reports = list(pool.map(run, enumerate(configs)))

    modes = _modes(args)
    if _format(args, config) == "json":
        payload = [
            {args.param: v, **report_to_json(r, modes)} for v, r in zip(values, reports)
        ]
        text = json.dumps(payload, indent=2, sort_keys=True)
    else:
        rows = []
        for v, r in zip(values, reports):
            rows.extend(report_rows(r, modes, extra={args.param: v}))
        text = rows_to_csv(rows).rstrip("\n")
    _emit(text, args.output)
    return 0


def cmd_template(args: argparse.Namespace) -> int:
    config = _config(args)
    policy = config.rotation.policy()
    fmt = _format(args, config)
    library = template_library()
    defs = template_defs(config.templates.overrides)

    if args.name in defs:
        # call-tree block: fold it under the configured problem
        params = resolve_params(config)
        node = build_node(
            args.name,
            params,
            policy,
            OracleSet.from_config(config.oracles),
            config.templates.overrides,
        )
        vector = fold(node, _modes(args)[0])
        text = serialize_template(defs[args.name])
    elif args.name in library:
        d = library[args.name]
        missing = [p for p in d.params if getattr(args, p) is None]
        if missing:
            raise ConfigError(
                f"template {d.name} needs " + ", ".join(f"--{p}" for p in missing)
            )
        vector = d.evaluate(*(getattr(args, p) for p in d.params), policy=policy)
        text = f"{d.name}: {d.formula}" if d.formula else d.name
    else:
        raise ConfigError(f"Unknown template: {args.name}")

    if fmt == "json":
        print(json.dumps({"template": args.name, "resources": vector.to_json()}, indent=2))
    else:
        print(text)
        print()
        print(vector_frame(vector, args.name).to_string())
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    suites = SUITES if args.suite == "all" else (args.suite,)
    failed = 0
    for suite in suites:
        for result in run_suite(suite):
            print(result)
            failed += not result.ok
    print(f"{failed} failed" if failed else "all checks passed")
    return 1 if failed else 0


def cmd_reversibilize(args: argparse.Namespace) -> int:
    tf = compile_tf(load_bool_circuit(args.file))
    circuit = make_uf(tf) if args.uf else tf
    vector = resource_vector(circuit)
    if args.format == "json":
        payload = {"gates": [str(g) for g in circuit.gates], "resources": vector.to_json()}
        print(json.dumps(payload, indent=2))
    else:
        print(circuit.describe())
        print()
        print(vector_frame(vector, "U_f" if args.uf else "T_f").to_string())
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config (default: $QLRE_CONFIG)")
    common.add_argument("--format", choices=OUTPUT_FORMATS, default=None)
    oracles = common.add_mutually_exclusive_group()
    oracles.add_argument("--include-oracles", action="store_true", help="only the incl. oracles column")
    oracles.add_argument("--exclude-oracles", action="store_true", help="only the excl. oracles column")
    common.add_argument("--parallel-ampest", action="store_true", help="run the amplitude estimations side by side")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="qlre", description="Logical resource estimates for the quantum linear system algorithm"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", parents=[common], help="estimate resources for one configuration")
    p.add_argument("--small", action="store_true", help="use the bundled N = 24 problem")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sweep", parents=[common], help="estimate over a list of parameter values")
    p.add_argument("param", metavar="PARAM", help=f"one of {', '.join(SWEEPABLE)}")
    p.add_argument("values", metavar="VALUE", nargs="+")
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("template", parents=[common], help="resources of a single template")
    p.add_argument("name", metavar="NAME")
    for a in TEMPLATE_ARGS:
        p.add_argument(f"--{a}", type=int, default=None)
    p.set_defaults(func=cmd_template)

    p = sub.add_parser("verify", parents=[common], help="run the verification suites")
    p.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reversibilize", parents=[common], help="compile a boolean circuit")
    p.add_argument("file", metavar="FILE")
    p.add_argument("--uf", action="store_true", help="emit the clean U_f instead of T_f")
    p.set_defaults(func=cmd_reversibilize)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
