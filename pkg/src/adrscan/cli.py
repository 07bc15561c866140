"""Command line interface: ``adrscan detect`` and ``adrscan synth``.

Exit codes: 0 success, 1 invalid input or flags, 2 internal error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import traceback
from pathlib import Path

from .detect import DetectionConfig, RankMode
from .errors import ValidationError
from .featmat import dump_triplets
from .pipeline import run_files
from .readcode import LevelMode
from .report import Format, render
from .stats import TestMode
from . import synth

EXIT_OK, EXIT_INVALID, EXIT_INTERNAL = 0, 1, 2

log = logging.getLogger("adrscan")


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(flag):
    def conv(value):
        try:
            v = int(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} must be an integer, got {value!r}")
        if v < 1:
            raise argparse.ArgumentTypeError(f"{flag} must be >= 1, got {v}")
        return v

    return conv


def _nonneg_int(flag):
    def conv(value):
        try:
            v = int(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} must be an integer, got {value!r}")
        if v < 0:
            raise argparse.ArgumentTypeError(f"{flag} must be >= 0, got {v}")
        return v

    return conv


def _fraction(flag, lo_open=True):
    def conv(value):
        try:
            v = float(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} must be a number, got {value!r}")
        if not (0.0 < v < 1.0 if lo_open else 0.0 <= v <= 1.0):
            bounds = "in (0, 1)" if lo_open else "in [0, 1]"
            raise argparse.ArgumentTypeError(f"{flag} must be {bounds}, got {v}")
        return v

    return conv


def _nonneg_float(flag):
    def conv(value):
        try:
            v = float(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} must be a number, got {value!r}")
        if not v >= 0.0:
            raise argparse.ArgumentTypeError(f"{flag} must be >= 0, got {v}")
        return v

    return conv


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="adrscan", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("detect", help="run signal detection on THIN-like tables")
    d.add_argument("--patients", help="patients table (patient_id)")
    d.add_argument("--prescriptions", required=True, help="prescriptions table")
    d.add_argument("--events", required=True, help="medical events table")
    d.add_argument("--dictionary", help="code,description table")
    d.add_argument("--drug", required=True, help="study drug code (exact match)")
    d.add_argument("--window-days", type=_positive_int("--window-days"), default=60)
    d.add_argument("--group-size", type=_positive_int("--group-size"), default=100)
    d.add_argument("--level", type=int, choices=(5, 3), default=5,
                   help="5: full codes, 3: aggregate to 3-character stems")
    d.add_argument("--alpha", type=_fraction("--alpha"), default=0.05)
    d.add_argument("--rank-by", choices=[m.value for m in RankMode], default="p")
    d.add_argument("--prefix", default=None, help="keep only keys starting with this")
    d.add_argument("--top", type=_positive_int("--top"), default=30)
    d.add_argument("--test", choices=[m.value for m in TestMode], default="pooled")
    d.add_argument("--min-na", type=_nonneg_int("--min-na"), default=0)
    d.add_argument("--shuffle-seed", type=int, default=None)
    d.add_argument("--include-decreases", action="store_true",
                   help="also report events that became less frequent")
    d.add_argument("--format", choices=[f.value for f in Format], default="text")
    d.add_argument("--out", help="write the table here instead of stdout")
    d.add_argument("--dump-dir", help="write X/Y as sparse group,key,count CSV")
    d.set_defaults(func=run_detect)

    s = sub.add_parser("synth", help="generate a synthetic cohort with planted effects")
    s.add_argument("--spec", help="key = value file; explicit flags override it")
    s.add_argument("--out-dir", default=None, help="output directory")
    s.add_argument("--n-patients", type=_positive_int("--n-patients"), default=15000)
    s.add_argument("--n-codes", type=_nonneg_int("--n-codes"), default=2000)
    s.add_argument("--n-planted", type=_nonneg_int("--n-planted"), default=20)
    s.add_argument("--multiplier", type=_nonneg_float("--multiplier"), default=5.0)
    s.add_argument("--baseline-min", type=_fraction("--baseline-min"), default=0.001)
    s.add_argument("--baseline-max", type=_fraction("--baseline-max"), default=0.02)
    s.add_argument("--planted-baseline-min", type=_fraction("--planted-baseline-min"), default=0.01)
    s.add_argument("--planted-baseline-max", type=_fraction("--planted-baseline-max"), default=0.03)
    s.add_argument("--vocabulary", help="code,prevalence table (replaces the random vocabulary)")
    s.add_argument("--effects", help="code,multiplier table (used with --vocabulary)")
    s.add_argument("--window-days", type=_positive_int("--window-days"), default=60)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--drug", default=synth.DEFAULT_DRUG)
    s.set_defaults(func=run_synth)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "spec", None):
        # re-parse with file values as defaults so explicit flags still win
        synth_parser = _subparser(parser, "synth")
        values = synth.read_spec_file(args.spec)
        actions = {a.dest: a for a in synth_parser._actions}
        defaults = {}
        for key, raw in values.items():
            action = actions.get(key)
            if action is None or key in ("spec", "help"):
                raise UsageError(f"--spec {args.spec}: unknown key {key!r}")
            try:
                defaults[key] = action.type(raw) if action.type else raw
            except argparse.ArgumentTypeError as exc:
                raise UsageError(f"--spec {args.spec}: {exc}") from None
        synth_parser.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def _subparser(parser, name):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def run_detect(args) -> int:
    cfg = DetectionConfig(
        window_days=args.window_days,
        group_size=args.group_size,
        level_mode=LevelMode.from_level(args.level),
        alpha=args.alpha,
        rank_mode=RankMode(args.rank_by),
        prefix_filter=args.prefix,
        top_k=args.top,
        test_mode=TestMode(args.test),
        min_NA=args.min_na,
        shuffle_seed=args.shuffle_seed,
        include_decreases=args.include_decreases,
    )
    result = run_files(
        args.prescriptions, args.events, args.drug, cfg,
        patients=args.patients, dictionary=args.dictionary,
    )
    if args.dump_dir:
        dump = Path(args.dump_dir)
        dump.mkdir(parents=True, exist_ok=True)
        for name, m in (("X_before.csv", result.X), ("Y_after.csv", result.Y)):
            with open(dump / name, "w", encoding="utf-8", newline="") as fh:
                dump_triplets(m, fh)
    _emit(render(result.rows, args.format), args.out)
    return EXIT_OK


def _read_pairs(path, value_name):
    from .readcode import read_table

    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        for line, row in read_table(fh, ("code", value_name)):
            try:
                out.append((row["code"], float(row[value_name])))
            except ValueError:
                raise ValidationError(f"{path}:{line}: {value_name} is not a number") from None
    return out


def spec_from_args(args) -> synth.SynthSpec:
    if args.vocabulary:
        vocab = _read_pairs(args.vocabulary, "prevalence")
        effects = _read_pairs(args.effects, "multiplier") if args.effects else []
        return synth.SynthSpec(
            args.n_patients, vocab, effects, args.window_days, args.seed, args.drug
        )
    if args.baseline_min > args.baseline_max:
        raise UsageError("--baseline-min must be <= --baseline-max")
    if args.planted_baseline_min > args.planted_baseline_max:
        raise UsageError("--planted-baseline-min must be <= --planted-baseline-max")
    if args.n_planted > args.n_codes:
        raise UsageError("--n-planted must be <= --n-codes")
    return synth.random_spec(
        n_patients=args.n_patients,
        n_codes=args.n_codes,
        n_planted=args.n_planted,
        multiplier=args.multiplier,
        baseline_range=(args.baseline_min, args.baseline_max),
        planted_baseline_range=(args.planted_baseline_min, args.planted_baseline_max),
        window_days=args.window_days,
        seed=args.seed,
        drug_code=args.drug,
    )


def run_synth(args) -> int:
    if not args.out_dir:
        raise UsageError("--out-dir is required")
    data = synth.generate(spec_from_args(args))
    paths = synth.write_tables(data, args.out_dir)
    for name, path in paths.items():
        log.info("wrote %s: %s", name, path)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ValidationError, FileNotFoundError, UnicodeDecodeError, csv.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
