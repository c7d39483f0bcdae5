"""Command-line front end: ``condenselab <subcommand> ...``.

Results go to stdout (JSON unless ``--format`` says otherwise); logs go to
stderr.  Exit codes: 0 everything passed, 1 a claim failed, 2 usage or
configuration error, 3 capacity skips under ``--strict``.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import re
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from condenselab.claims import SUITES, parse_params, run_claim_suite
from condenselab.condense import CondensationQuery, Exhaustive, Sample, max_measure_over_restrictions
from condenselab.config import Config, load_config
from condenselab.constructions import cheat_sheet_spec, parse_family, tribes
from condenselab.errors import CondenseLabError, UsageError
from condenselab.fnrep import (
    Restriction,
    classify,
    materialize,
    parse_bits,
    restrict_table,
    write_table,
)
from condenselab.games import (
    CellSweepQuerier,
    CheatsheetAdversary,
    CopyFirstQuerier,
    OptimalQuerier,
    TruthfulResponder,
    adversary_game_value,
    analyze_cheatsheet_transcript,
    exhaustive_cheatsheet_search,
    play,
    tribes_adversary,
    tribes_and_strategy,
)
from condenselab.measures import compute_measure, measure_at, parse_measure
from condenselab.paths import ensure_directories, get_output_root
from condenselab.reports import export, load_reports, overall_exit_code, to_jsonable

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class _Parser(argparse.ArgumentParser):
    """argparse exits on its own; route its complaints through UsageError instead."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _emit(document: Any) -> None:
    sys.stdout.write(json.dumps(to_jsonable(document), sort_keys=True, indent=2) + "\n")


def _write_json(path: Path, document: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(to_jsonable(document), sort_keys=True, indent=2) + "\n", encoding="utf-8")
    logger.info("wrote %s", path)


def _slug(literal: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", literal).strip("_") or "table"


def _parse_sample(text: str) -> Sample:
    seed, sep, trials = text.partition(":")
    if not sep:
        raise UsageError(f"--sample expects <seed>:<trials>, got {text!r}")
    try:
        return Sample(int(seed), int(trials))
    except ValueError as exc:
        raise UsageError(f"--sample expects integers, got {text!r}") from exc


# --- subcommands ----------------------------------------------------------------------


def cmd_measure(args: argparse.Namespace, config: Config) -> int:
    f = parse_family(args.fn, config)
    spec = parse_measure(args.kind, args.tag)
    document: Dict[str, Any] = {"kind": spec.label, "function": f.descriptor()}
    if args.at is not None:
        value, witness = measure_at(f, spec, parse_bits(args.at, f.arity), config)
        document["at"] = args.at
    else:
        value, witness = compute_measure(f, spec, config), None
    document["value"] = value
    if args.witness and witness is not None:
        document["witness"] = witness
    _emit(document)
    return EXIT_OK


def cmd_build(args: argparse.Namespace, config: Config) -> int:
    table = materialize(parse_family(args.fn, config), config)
    if args.out is not None:
        path = Path(args.out)
    else:
        path = ensure_directories(get_output_root(config))["tables"] / f"{_slug(args.fn)}.tbl"
    path.parent.mkdir(parents=True, exist_ok=True)
    write_table(path, table)
    _emit({"function": args.fn, "arity": table.arity, "ones": table.count_ones(), "path": str(path)})
    return EXIT_OK


def cmd_restrict(args: argparse.Namespace, config: Config) -> int:
    table = materialize(parse_family(args.fn, config), config)
    rho = Restriction.parse(args.rho)
    sub = restrict_table(table, rho)
    if args.out is not None:
        write_table(Path(args.out), sub)
    _emit(
        {
            "function": args.fn,
            "restriction": rho,
            "arity": sub.arity,
            "constancy": classify(sub).value,
            "table": sub.to_hex(),
        }
    )
    return EXIT_OK


def cmd_condense(args: argparse.Namespace, config: Config) -> int:
    f = parse_family(args.fn, config)
    spec = parse_measure(args.measure, args.tag)
    mode = Exhaustive() if args.exhaustive or args.sample is None else _parse_sample(args.sample)
    result = max_measure_over_restrictions(CondensationQuery(f, spec, args.free, mode), config, args.jobs)
    document = {"function": args.fn, "measure": spec.label, "free": args.free}
    document.update(result.to_dict())
    _emit(document)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: Config) -> int:
    params = parse_params(args.params)
    suite_ids = list(SUITES) if args.claim.upper() == "ALL" else [args.claim]
    reports = []
    for suite_id in suite_ids:
        reports.extend(run_claim_suite(suite_id, params, config, args.jobs))
    text = export(reports, args.format, config=config.as_dict(), include_runtime=not args.no_runtime)
    if args.out is not None:
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info("wrote %d reports to %s", len(reports), path)
    else:
        sys.stdout.write(text)
    return overall_exit_code(reports, strict=args.strict)


def _tribes_game(args: argparse.Namespace, config: Config) -> Dict[str, Any]:
    n = args.n
    if args.querier == "exhaustive":
        return {"game": "tribes", "n": n, "value": adversary_game_value(n, args.jobs)}
    if args.querier == "constructive":
        querier = tribes_and_strategy(n)
    else:
        querier = OptimalQuerier(tribes(n), config=config)
    responder = TruthfulResponder(parse_bits(args.input, n * n)) if args.input else tribes_adversary(n)
    transcript = play(querier, responder, n * n)
    return {"game": "tribes", "n": n, "transcript": transcript}


def _cheatsheet_game(args: argparse.Namespace, config: Config) -> Dict[str, Any]:
    n, c = args.n, args.c
    if c is None:
        raise UsageError("--c is required for the cheat-sheet game")
    if args.querier == "exhaustive":
        return {"game": "cheatsheet", "n": n, "c": c, "search": exhaustive_cheatsheet_search(n, c, config=config)}
    spec = cheat_sheet_spec(tribes(n), c, config)
    budget = spec.base_arity - 1
    querier = CopyFirstQuerier(spec, budget) if args.querier == "constructive" else CellSweepQuerier(spec, budget)
    if args.input:
        responder = TruthfulResponder(parse_bits(args.input, spec.arity))
    else:
        responder = CheatsheetAdversary(spec)
    transcript = play(querier, responder, max(1, budget))
    return {
        "game": "cheatsheet",
        "n": n,
        "c": c,
        "transcript": transcript,
        "outcome": analyze_cheatsheet_transcript(spec, transcript, config),
    }


def cmd_game(args: argparse.Namespace, config: Config) -> int:
    if args.kind == "tribes":
        document = _tribes_game(args, config)
    else:
        document = _cheatsheet_game(args, config)
    if args.emit is not None:
        target = document.get("transcript", document)
        _write_json(Path(args.emit), target)
    _emit(document)
    return EXIT_OK


def cmd_export(args: argparse.Namespace, config: Config) -> int:
    path = Path(args.report)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    reports = load_reports(text)
    document = json.loads(text)
    echoed = document.get("config") if isinstance(document, dict) else None
    sys.stdout.write(export(reports, args.format, config=echoed or config.as_dict()))
    return overall_exit_code(reports, strict=args.strict)


# --- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="condenselab", description=__doc__.splitlines()[0])
    parser.add_argument("--config", type=Path, default=None, help="YAML config file")
    parser.add_argument("--seed", type=int, default=None, help="override default_seed")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes for exhaustive searches")
    parser.add_argument("--format", choices=("json", "csv", "markdown"), default="json")
    parser.add_argument("--strict", action="store_true", help="exit 3 when any claim was skipped")
    parser.add_argument("--log-level", default="WARNING")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    measure = sub.add_parser("measure", help="compute one complexity measure")
    measure.add_argument("--fn", required=True)
    measure.add_argument("--kind", required=True)
    measure.add_argument("--tag", choices=("zeros", "ones"), default=None)
    measure.add_argument("--at", default=None, help="input bitstring for the pointwise value")
    measure.add_argument("--witness", action="store_true")
    measure.set_defaults(handler=cmd_measure)

    build = sub.add_parser("build", help="materialize a function into a table file")
    build.add_argument("--fn", required=True)
    build.add_argument("--out", default=None)
    build.set_defaults(handler=cmd_build)

    restrict = sub.add_parser("restrict", help="apply a restriction literal such as 1*0*")
    restrict.add_argument("--fn", required=True)
    restrict.add_argument("--rho", required=True)
    restrict.add_argument("--out", default=None)
    restrict.set_defaults(handler=cmd_restrict)

    condense = sub.add_parser("condense", help="maximize a measure over restrictions")
    condense.add_argument("--fn", required=True)
    condense.add_argument("--measure", required=True)
    condense.add_argument("--tag", choices=("zeros", "ones"), default=None)
    condense.add_argument("--free", type=int, required=True)
    search = condense.add_mutually_exclusive_group()
    search.add_argument("--exhaustive", action="store_true")
    search.add_argument("--sample", default=None, metavar="SEED:TRIALS")
    condense.set_defaults(handler=cmd_condense)

    verify = sub.add_parser("verify", help="run a claim suite")
    verify.add_argument("--claim", required=True, help=f"ALL or one of {', '.join(SUITES)}")
    verify.add_argument("--params", default=None, help="k=2,n=3,step=1/2")
    verify.add_argument("--out", default=None)
    verify.add_argument("--no-runtime", action="store_true", help="drop runtime_ms for byte-stable output")
    verify.set_defaults(handler=cmd_verify)

    game = sub.add_parser("game", help="play a querier against an adversary or an input")
    game.add_argument("--kind", choices=("tribes", "cheatsheet"), required=True)
    game.add_argument("--n", type=int, required=True)
    game.add_argument("--c", type=int, default=None)
    game.add_argument("--querier", choices=("greedy", "constructive", "exhaustive"), default="constructive")
    game.add_argument("--input", default=None)
    game.add_argument("--emit", default=None, help="write the transcript JSON here")
    game.set_defaults(handler=cmd_game)

    exporter = sub.add_parser("export", help="re-render a JSON report document")
    exporter.add_argument("report")
    exporter.set_defaults(handler=cmd_export)
    return parser


def _configure_logging(level: str) -> None:
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        raise UsageError(f"unknown log level {level!r}")
    logging.basicConfig(level=numeric, format=LOG_FORMAT, stream=sys.stderr, force=True)


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _configure_logging(args.log_level)
        if args.jobs < 1:
            raise UsageError("--jobs must be >= 1")
        config = load_config(args.config)
        if args.seed is not None:
            config = dataclasses.replace(config, default_seed=args.seed)
        return args.handler(args, config)
    except CondenseLabError as exc:
        sys.stderr.write(f"condenselab: {exc}\n")
        return EXIT_USAGE


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(run(argv))
