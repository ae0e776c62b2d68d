"""Command-line entry point: learn, gen-sample, bench, check and serve.

Exit codes: 0 success, 1 error, 2 a learner ran out of time and returned its
best-so-far model.
"""

import argparse
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from config import settings
from core import Alphabet, Sample, parse_sample, serialize_sample
from dfa import Dfa, emit_dot, format_table, parse_dot
from errors import LearnerError
from ltlf import LtlfFormula, formula_dot, parse_formula, print_formula
from models import LearnConfig
from services.bench import (
    format_summary,
    load_manifest,
    run_bench,
    summarize,
    write_csv,
    write_stats_csv,
)
from services.dfalearn import learn_dfa
from services.ltlflearn import learn_ltlf
from services.oracle import check_dfa, check_formula
from services.plots import plot_comparison
from services.sampling import (
    UAV_EVENTS,
    sample_from_dfa,
    sample_from_pattern,
    sample_from_text,
    sample_uav,
)

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_TIMEOUT = 2


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1; 2 is reserved for timeouts."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _write_text(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read_sample(path: str) -> Sample:
    if path == "-":
        return parse_sample(sys.stdin.read())
    return parse_sample(Path(path).read_bytes())


def render_model(model: Dfa | LtlfFormula, fmt: str) -> str:
    if isinstance(model, Dfa):
        if fmt == "json":
            return model.model_dump_json(indent=2) + "\n"
        return emit_dot(model) if fmt == "dot" else format_table(model)
    if fmt == "json":
        return model.model_dump_json(indent=2) + "\n"
    return formula_dot(model) if fmt == "dot" else print_formula(model) + "\n"


def load_model(text: str, mode: str, alphabet: Alphabet) -> Dfa | LtlfFormula:
    """DFAs are read as JSON or DOT; formulas as JSON or infix text over the sample alphabet."""
    stripped = text.strip()
    try:
        if mode == "dfa":
            if stripped.startswith("{"):
                return Dfa.model_validate_json(stripped)
            return parse_dot(stripped)
        if stripped.startswith("{"):
            return LtlfFormula.model_validate_json(stripped)
        return parse_formula(stripped, alphabet)
    except (ValidationError, ValueError) as exc:
        raise LearnerError(f"cannot read model: {exc}") from exc


def cmd_learn(args: argparse.Namespace) -> int:
    if args.mode == "ltlf" and args.algo == "sym":
        raise LearnerError(
            "--algo sym is DFA-only; the fully symbolic LTLf algorithm is not implemented, "
            "use --algo ssym or --algo ceg"
        )
    if args.mode == "dfa" and args.horizon is not None:
        raise LearnerError("--horizon applies to --mode ltlf only")

    sample = _read_sample(args.sample)
    overrides = {
        "size_bound": args.size_bound,
        "horizon": args.horizon,
        "total_timeout": args.timeout,
        "solver_timeout": args.solver_timeout,
        "seed": args.seed,
        "dump_dir": args.dump_dir,
    }
    config = LearnConfig(
        algorithm=args.algo,
        debug=args.debug or settings.debug,
        **{k: v for k, v in overrides.items() if v is not None},
    )
    if args.mode == "dfa":
        model, stats = learn_dfa(sample, config)
    else:
        model, stats = learn_ltlf(sample, config)

    fmt = args.format or ("dot" if args.mode == "dfa" else "text")
    _write_text(render_model(model, fmt), args.out)
    if args.stats:
        with open(args.stats, "w", newline="") as f:
            write_stats_csv(stats, f)
    else:
        write_stats_csv(stats, sys.stderr)

    if stats.termination == "size-exhausted":
        logger.warning("no formula of size <= %d describes the sample; returned true",
                       config.size_bound)
    if stats.termination == "timeout":
        logger.warning("time budget exhausted after %d iterations; model is best-so-far",
                       stats.iterations)
        return EXIT_TIMEOUT
    return EXIT_OK


def cmd_gen_sample(args: argparse.Namespace) -> int:
    seed = settings.seed if args.seed is None else args.seed
    alphabet = Alphabet.of(args.alphabet)
    if args.from_random_dfa is not None:
        sample, target = sample_from_dfa(args.from_random_dfa, alphabet, args.count,
                                         args.min_len, args.max_len, seed)
        if args.target:
            Path(args.target).write_text(emit_dot(target))
    elif args.from_formula is not None:
        sample = sample_from_text(args.from_formula, alphabet, args.count,
                                  args.min_len, args.max_len, seed)
    elif args.pattern is not None:
        sample = sample_from_pattern(args.pattern, args.count, args.min_len, args.max_len, seed)
    else:
        logger.info("synthetic UAV events: %s",
                    ", ".join(f"{k}={v}" for k, v in UAV_EVENTS.items()))
        sample = sample_uav(args.count, args.min_len, args.max_len, seed)

    if len(sample.positives) < args.count:
        logger.warning("emitting %d distinct words, %d requested",
                       len(sample.positives), args.count)
    _write_text(serialize_sample(sample), args.out)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    manifest_path = Path(args.manifest)
    manifest = load_manifest(manifest_path)
    if args.oracle_max_size is not None:
        manifest = manifest.model_copy(update={"oracle_max_size": args.oracle_max_size})
    jobs = args.jobs or settings.jobs
    rows = run_bench(manifest, manifest_path.parent, jobs=jobs)

    if args.out and args.out != "-":
        with open(args.out, "w", newline="") as f:
            write_csv(rows, f, omit_timings=args.omit_timings)
    else:
        write_csv(rows, sys.stdout, omit_timings=args.omit_timings)

    algorithms = args.compare.split(",") if args.compare else manifest.algorithms[:2]
    if len(algorithms) == 2:
        first, second = algorithms
        summary = summarize(rows, first, second)
        print(format_summary(summary, first, second, omit_timings=args.omit_timings),
              file=sys.stderr)
        if args.plots:
            for path in plot_comparison(rows, first, second, Path(args.plots),
                                        include_time=not args.omit_timings):
                logger.info("wrote %s", path)

    failed = [r for r in rows if r.verdict == "fail"]
    for row in failed:
        logger.warning("oracle rejected %s/%s", row.instance, row.algorithm)
    if any(r.termination == "timeout" for r in rows):
        return EXIT_TIMEOUT
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    sample = _read_sample(args.sample)
    model = load_model(_read_text(args.model), args.mode, sample.alphabet)
    oracle_max_size = settings.oracle_max_size if args.oracle_max_size is None else args.oracle_max_size
    if isinstance(model, Dfa):
        size_bound = args.size_bound or model.num_states
        verdict = check_dfa(model, sample, size_bound, oracle_max_size)
    else:
        size_bound = args.size_bound or model.size
        verdict = check_formula(model, sample, size_bound, oracle_max_size, horizon=args.horizon)

    print(f"description: {'yes' if verdict.is_description else 'no'} (n={size_bound})")
    print(f"verdict: {verdict.verdict}")
    if verdict.detail:
        print(f"detail: {verdict.detail}")
    if verdict.witness:
        print(f"witness: {verdict.witness}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("main:app", host=args.host or settings.host, port=args.port or settings.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="occ-learn",
                     description="Learn language-minimal DFAs and LTLf formulas from positive words.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    learn = sub.add_parser("learn", help="learn a model from a sample file")
    learn.add_argument("--mode", choices=["dfa", "ltlf"], default="dfa")
    learn.add_argument("--algo", choices=["sym", "ceg", "ssym"], default="sym")
    learn.add_argument("--size-bound", type=int, help="largest model size n")
    learn.add_argument("--horizon", type=int, help="longest separating word for ssym (ltlf only)")
    learn.add_argument("--timeout", type=float, help="total time budget in seconds")
    learn.add_argument("--solver-timeout", type=float, help="per-call solver budget in seconds")
    learn.add_argument("--seed", type=int, help="seed for the solver's initial polarities")
    learn.add_argument("--sample", required=True, help="sample file, - for stdin")
    learn.add_argument("--out", help="model output path (default stdout)")
    learn.add_argument("--format", choices=["text", "dot", "json"])
    learn.add_argument("--stats", help="stats CSV path (default stderr)")
    learn.add_argument("--debug", action="store_true", help="audit every iteration")
    learn.add_argument("--dump-dir", type=Path, help="write DIMACS queries and hypotheses here")
    learn.set_defaults(func=cmd_learn)

    gen = sub.add_parser("gen-sample", help="generate a positive sample")
    source = gen.add_mutually_exclusive_group(required=True)
    source.add_argument("--from-random-dfa", type=int, metavar="N")
    source.add_argument("--from-formula", metavar="LTLF")
    source.add_argument("--pattern", metavar="NAME", help="bundled ground-truth pattern")
    source.add_argument("--from-uav", action="store_true", help="synthetic flight-log traces")
    gen.add_argument("--alphabet", default="a,b", help="comma-separated symbol names")
    gen.add_argument("--count", type=int, default=100)
    gen.add_argument("--min-len", type=int, default=1)
    gen.add_argument("--max-len", type=int, default=10)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--out")
    gen.add_argument("--target", help="write the random target DFA as DOT here")
    gen.set_defaults(func=cmd_gen_sample)

    bench = sub.add_parser("bench", help="run a benchmark manifest")
    bench.add_argument("manifest")
    bench.add_argument("--out", help="CSV path (default stdout)")
    bench.add_argument("--jobs", type=int)
    bench.add_argument("--omit-timings", action="store_true",
                       help="drop wall times so repeated runs give identical CSVs")
    bench.add_argument("--plots", metavar="DIR", help="write SVG scatter plots here")
    bench.add_argument("--compare", metavar="A,B", help="algorithm pair for the summary")
    bench.add_argument("--oracle-max-size", type=int)
    bench.set_defaults(func=cmd_bench)

    check = sub.add_parser("check", help="check a model against a sample")
    check.add_argument("--mode", choices=["dfa", "ltlf"], default="dfa")
    check.add_argument("--model", required=True)
    check.add_argument("--sample", required=True)
    check.add_argument("--size-bound", type=int, help="n (default: the model's own size)")
    check.add_argument("--oracle-max-size", type=int)
    check.add_argument("--horizon", type=int, help="ignore stronger formulas separated only beyond K")
    check.set_defaults(func=cmd_check)

    serve = sub.add_parser("serve", help="start the HTTP API")
    serve.add_argument("--host")
    serve.add_argument("--port", type=int)
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else settings.log_level.upper()
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (LearnerError, OSError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
