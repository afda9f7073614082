"""
Main entry point for the WFSM repertoire engine.
Builds and scores repertoires, runs the experiment studies and inspects machines.
"""

import argparse
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Callable, List, Optional

import config
from wfsm_ais import rational
from wfsm_ais.benchmark import merge_benchmark
from wfsm_ais.errors import WfsmAisError
from wfsm_ais.experiment import write_csv
from wfsm_ais.fsm_io import dumps, inspect, read_wfsm
from wfsm_ais.language import LanguageConfig, read_corpus, run_language
from wfsm_ais.matching import MatchingRule, parse_rule, read_bias_csv
from wfsm_ais.noisy import BITS, NoisyConfig, run_noisy
from wfsm_ais.selection import (Mode, Polarity, load_repertoire, negative_select, positive_select,
                                save_repertoire, score_batch)
from wfsm_ais.wfsm import enumerate_strings, stats

logger = logging.getLogger("wfsm_ais.cli")


def setup_logging(verbose: bool = False):
    """Configure the root logger from config, with an optional rotating log file."""
    level = logging.DEBUG if verbose else getattr(logging, config.LOG_LEVEL.upper(), logging.INFO)
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if config.ENABLE_FILE_LOGGING:
        os.makedirs(config.LOGS_DIR, exist_ok=True)
        handlers.append(RotatingFileHandler(os.path.join(config.LOGS_DIR, "wfsm_ais.log"),
                                            maxBytes=config.LOG_FILE_MAX_SIZE,
                                            backupCount=config.LOG_BACKUP_COUNT))
    logging.basicConfig(level=level, format=config.LOG_FORMAT, handlers=handlers, force=True)
    rational.DIGITS_WARNING = config.RATIONAL_DIGITS_WARNING


# -- argument types ----------------------------------------------------------------

def _list_of(kind: Callable, name: str) -> Callable[[str], list]:
    def parse(text: str) -> list:
        try:
            values = [kind(item) for item in text.split(",") if item.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a comma-separated list, got {text!r}")
        if not values:
            raise argparse.ArgumentTypeError(f"{name} must not be empty")
        return values
    return parse


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return value


def _modes(text: str) -> List[Mode]:
    try:
        return [Mode(item) for item in _list_of(str, "modes")(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"modes must be weighted and/or unweighted, got {text!r}")


def _existing_file(text: str) -> Path:
    path = Path(text)
    if not path.is_file():
        raise argparse.ArgumentTypeError(f"file not found: {path}")
    return path


# -- output handling ------------------------------------------------------------------

class Outputs:
    """
    Output files are written to ``<name>.partial`` and renamed once the command
    succeeds; on failure the partial files are removed.
    """

    def __init__(self):
        self._pending: List[Path] = []

    def reserve(self, path: Path) -> Path:
        path = Path(path)
        if path.parent and not path.parent.exists():
            raise FileNotFoundError(f"output directory not found: {path.parent}")
        partial = path.with_name(path.name + ".partial")
        self._pending.append(partial)
        return partial

    def commit(self):
        for partial in self._pending:
            os.replace(partial, partial.with_name(partial.name[:-len(".partial")]))
        self._pending.clear()

    def discard(self):
        for partial in self._pending:
            if partial.exists():
                partial.unlink()
        self._pending.clear()


def read_strings(path: Path) -> List[str]:
    """One string per line, line endings removed."""
    return path.read_text(encoding="utf-8").splitlines()


def _summary_path(path: Path) -> Path:
    return path.with_name(f"{path.stem}_summary{path.suffix or '.csv'}")


# -- commands --------------------------------------------------------------------------

def cmd_build(args, outputs: Outputs):
    rule = parse_rule(args.rule, wildcard=config.WILDCARD_SYMBOL)
    polarity, mode = Polarity(args.polarity), Mode(args.mode)
    if (args.bias or args.bias_fsm) and polarity is not Polarity.NEGATIVE:
        raise WfsmAisError("a bias applies to negative selection only")
    bias = read_bias_csv(args.bias) if args.bias else read_wfsm(args.bias_fsm) if args.bias_fsm else None
    out = outputs.reserve(args.out)
    strings = read_strings(args.train)
    if polarity is Polarity.POSITIVE:
        rep = positive_select(strings, rule, mode)
    else:
        rep = negative_select(strings, rule, bias, mode)
    save_repertoire(rep, out)
    size = rep.stats
    print(f"states={size.num_states} transitions={size.num_transitions} strings={rep.size}")


def cmd_score(args, outputs: Outputs):
    rep = load_repertoire(args.repertoire)
    out = outputs.reserve(args.out)
    report = score_batch(rep, read_strings(args.test), jobs=args.jobs)
    write_csv(report.to_frame(config.DECIMAL_DIGITS), out)
    print(f"✅ scored {len(report)} string(s) into {args.out}")


def _rules(descriptors: List[str], length: int, alphabet: str) -> List[MatchingRule]:
    return [parse_rule(text, length=length, alphabet=alphabet, wildcard=config.WILDCARD_SYMBOL) for text in descriptors]


def cmd_noisy(args, outputs: Outputs):
    cfg = NoisyConfig(length=args.len, mutation_rates=args.mu, train_sizes=args.train_sizes,
                      test_size=args.test_size, rules=_rules(args.rule, args.len, BITS),
                      modes=args.modes, runs=args.runs, seed=args.seed, jobs=args.jobs).validate()
    runs_out, summary_out = outputs.reserve(args.out), outputs.reserve(_summary_path(args.out))
    result = run_noisy(cfg)
    result.write(runs_out, summary_out)
    print(f"✅ {len(result.runs)} run records in {args.out}, summary in {_summary_path(args.out)}")


def cmd_language(args, outputs: Outputs):
    cfg = LanguageConfig(train_path=args.train, normal_path=args.normal, anomalous_path=args.anomalous,
                         n=args.n, rules=_rules(args.rule, args.n, args.alphabet), modes=args.modes,
                         train_sizes=args.train_sizes, runs=args.runs, seed=args.seed,
                         aggregation=args.aggregation, alphabet=args.alphabet, jobs=args.jobs)
    cfg.validate(len([line for line in read_corpus(args.train) if line.strip()]))
    runs_out, summary_out = outputs.reserve(args.out), outputs.reserve(_summary_path(args.out))
    result = run_language(cfg)
    result.write(runs_out, summary_out)
    print(f"✅ {len(result.runs)} run records in {args.out}, summary in {_summary_path(args.out)}")


def cmd_merge_bench(args, outputs: Outputs):
    out = outputs.reserve(args.out)
    result = merge_benchmark(args.alphabet, args.len, args.weights, args.order,
                             growth_warning=config.INTERMEDIATE_GROWTH_WARNING)
    write_csv(result.trace, out)
    print(f"✅ {len(result.trace)} merge steps in {args.out}; largest growth over support {result.max_growth:.2f}x")
    print(str(result.final))


def cmd_fsm(args, outputs: Outputs):
    if args.action == "check":
        _, problems = inspect(args.path.read_text(encoding="utf-8"))
        if problems:
            for problem in problems:
                print(f"❌ {problem}", file=sys.stderr)
            return 1
        print("✅ all invariants hold")
        return 0
    machine = read_wfsm(args.path)
    if args.action == "stats":
        print(str(stats(machine)))
    elif args.action == "print":
        for s, weight in enumerate_strings(machine, args.limit):
            print(f"{s} {rational.format_rational(weight)}")
    else:
        print(dumps(machine), end="")
    return 0


# -- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Weighted FSM repertoires for string anomaly detection")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log debug messages")
    commands = parser.add_subparsers(dest="command", required=True)

    build = commands.add_parser("build", help="Select a repertoire from training strings")
    build.add_argument("--train", type=_existing_file, required=True, help="Training strings, one per line")
    build.add_argument("--rule", required=True, help="Rule descriptor, e.g. contiguous:r=3,len=8,alphabet=01")
    build.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.WEIGHTED.value)
    build.add_argument("--polarity", choices=[p.value for p in Polarity], default=Polarity.POSITIVE.value)
    bias = build.add_mutually_exclusive_group()
    bias.add_argument("--bias", type=_existing_file, help="Bias table CSV (negative selection)")
    bias.add_argument("--bias-fsm", type=_existing_file, help="Bias machine file (negative selection)")
    build.add_argument("--out", type=Path, required=True, help="Repertoire file to write")
    build.set_defaults(handler=cmd_build)

    score = commands.add_parser("score", help="Score test strings against a repertoire")
    score.add_argument("--repertoire", type=_existing_file, required=True)
    score.add_argument("--test", type=_existing_file, required=True, help="Test strings, one per line")
    score.add_argument("--out", type=Path, required=True, help="CSV to write")
    score.add_argument("--jobs", type=_positive, default=config.DEFAULT_JOBS)
    score.set_defaults(handler=cmd_score)

    experiment = commands.add_parser("experiment", help="Run an experiment study")
    studies = experiment.add_subparsers(dest="study", required=True)

    noisy = studies.add_parser("noisy", help="Noisy bitstring problem")
    noisy.add_argument("--len", type=_positive, default=8)
    noisy.add_argument("--mu", type=_list_of(float, "--mu"), default=[0.6])
    noisy.add_argument("--rule", action="append", help="Rule descriptor; len and alphabet are filled in")
    noisy.add_argument("--train-sizes", type=_list_of(int, "--train-sizes"), default=[10, 50, 250, 1000, 2000])
    noisy.add_argument("--test-size", type=_positive, default=config.DEFAULT_TEST_SIZE)
    noisy.add_argument("--modes", type=_modes, default=[Mode.WEIGHTED, Mode.UNWEIGHTED])
    noisy.add_argument("--out", type=Path, default=Path(config.RESULTS_DIR) / "noisy.csv")
    noisy.set_defaults(handler=cmd_noisy, default_rule="contiguous:r=5")

    language = studies.add_parser("language", help="Language anomaly detection on n-grams")
    language.add_argument("--train", type=_existing_file, required=True)
    language.add_argument("--normal", type=_existing_file, required=True)
    language.add_argument("--anomalous", type=_existing_file, required=True)
    language.add_argument("--n", type=_positive, default=3)
    language.add_argument("--rule", action="append", help="Rule descriptor; len and alphabet are filled in")
    language.add_argument("--train-sizes", type=_list_of(int, "--train-sizes"), default=[1000])
    language.add_argument("--modes", type=_modes, default=[Mode.WEIGHTED, Mode.UNWEIGHTED])
    language.add_argument("--aggregation", choices=["mean", "sum"], default="mean")
    language.add_argument("--alphabet", default=config.LANGUAGE_ALPHABET)
    language.add_argument("--out", type=Path, default=Path(config.RESULTS_DIR) / "language.csv")
    language.set_defaults(handler=cmd_language, default_rule="contiguous:r=3")

    for study in (noisy, language):
        study.add_argument("--runs", type=_positive, default=config.DEFAULT_RUNS)
        study.add_argument("--seed", type=_seed, default=config.DEFAULT_SEED)
        study.add_argument("--jobs", type=_positive, default=config.DEFAULT_JOBS)

    bench = studies.add_parser("merge-bench", help="Merge all singletons over an alphabet")
    bench.add_argument("--alphabet", default="012")
    bench.add_argument("--len", type=int, default=6)
    bench.add_argument("--weights", choices=["exact", "float64"], default="exact")
    bench.add_argument("--order", choices=["tree", "sequential"], default="tree")
    bench.add_argument("--out", type=Path, default=Path(config.RESULTS_DIR) / "merge_bench.csv")
    bench.set_defaults(handler=cmd_merge_bench)

    fsm = commands.add_parser("fsm", help="Inspect a machine or repertoire file")
    fsm.add_argument("action", choices=["stats", "print", "check", "dump"])
    fsm.add_argument("path", type=_existing_file)
    fsm.add_argument("--limit", type=_positive, default=config.ENUMERATE_LIMIT,
                     help="Largest language 'print' enumerates")
    fsm.set_defaults(handler=cmd_fsm)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    validation = config.validate_config()
    for warning in validation["warnings"]:
        logger.warning(warning)
    if not validation["valid"]:
        for error in validation["errors"]:
            print(f"❌ {error}", file=sys.stderr)
        return 1
    logger.debug("configuration: %s", config.get_config_dict())
    if getattr(args, "rule", None) is None and hasattr(args, "default_rule"):
        args.rule = [args.default_rule]

    outputs = Outputs()
    try:
        status = args.handler(args, outputs) or 0
        if status == 0:
            outputs.commit()
        return status
    except (WfsmAisError, OSError, ZeroDivisionError) as e:
        print(f"❌ {e}", file=sys.stderr)
        return 1
    finally:
        outputs.discard()


if __name__ == "__main__":
    sys.exit(main())
