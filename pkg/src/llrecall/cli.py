"""``llr`` command-line entry point.

Exit status: 0 success, 1 usage error, 2 data/validation error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .corpus import ARTIFACTS_FILE, JUDGMENTS_FILE, LESSONS_FILE, CorpusError, load_corpus, save_corpus
from .evaluation import DEFAULT_K, EvalConfig, individual_results, run_experiment, run_grid
from .fusion import FusionMethod, fuse
from .grid import BuildOptions, ClassifierBuildError, ClassifierConfig, run_classifier
from .report import write_individuals, write_report
from .synthetic import (
    DEFAULT_ARTIFACTS,
    DEFAULT_LESSONS,
    DEFAULT_PROJECTS,
    DEFAULT_THEMES,
    generate_synthetic_corpus,
)
from .textprep import load_stopwords

DEFAULT_SEED = 0

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3

log = logging.getLogger("llrecall")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --config keys that differ from argparse destinations
_CONFIG_ALIASES = {
    "master_seed": "seed",
    "lda.alpha": "lda_alpha",
    "lda.beta": "lda_beta",
    "lda.train_sweeps": "lda_train_sweeps",
    "lda.infer_sweeps": "lda_infer_sweeps",
}


def _common_parent() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    g = p.add_argument_group("run options")
    g.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"master RNG seed (default {DEFAULT_SEED})")
    g.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes (default: logical cores)")
    g.add_argument("--cache-dir", help="directory for built-model cache")
    g.add_argument("--stopwords", help="stopword list, one word per line (default: bundled list)")
    g.add_argument("--config", help="JSON file whose keys override flags (e.g. k, master_seed, lda.alpha)")
    g.add_argument("--lda-alpha", type=float, default=None, help="LDA document-topic prior (default 50/k)")
    g.add_argument("--lda-beta", type=float, default=0.01, help="LDA topic-word prior")
    g.add_argument("--lda-train-sweeps", type=int, default=500)
    g.add_argument("--lda-infer-sweeps", type=int, default=100)
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def _corpus_parent() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    g = p.add_argument_group("corpus")
    g.add_argument("--corpus", help=f"directory holding {LESSONS_FILE}, {ARTIFACTS_FILE}, {JUDGMENTS_FILE}")
    g.add_argument("--lessons", help="lessons JSONL (overrides --corpus)")
    g.add_argument("--artifacts", help="artifacts JSONL (overrides --corpus)")
    g.add_argument("--judgments", help="judgments TSV (overrides --corpus)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common, corpus = _common_parent(), _corpus_parent()
    parser = _Parser(prog="llr", description="Lessons-learned retrieval experiments.")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    sp = sub.add_parser("ingest", parents=[common, corpus], help="validate corpus files")
    sp.set_defaults(func=cmd_ingest)

    for name, helptext in (("query", "rank lessons for one artifact"), ("fuse", "rank with a hybrid of configs")):
        sp = sub.add_parser(name, parents=[common, corpus], help=helptext)
        sp.add_argument("--artifact", required=True, help="artifact id to use as the query")
        if name == "query":
            sp.add_argument("--config-id", "--classifier", dest="config_id", help="single classifier config id")
        sp.add_argument("--members", help="comma-separated config ids to fuse")
        sp.add_argument("--method", default="scoreadd", choices=["borda", "scoreadd"])
        sp.add_argument("--k", type=int, default=DEFAULT_K, help="items to print")
        sp.set_defaults(func=cmd_query, require_members=name == "fuse")

    sp = sub.add_parser("grid", parents=[common, corpus], help="evaluate all 88 configs")
    sp.add_argument("--k", type=int, default=DEFAULT_K)
    sp.add_argument("--out", required=True)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.set_defaults(func=cmd_grid)

    sp = sub.add_parser("experiment", parents=[common, corpus], help="full individual + hybrid experiment")
    sp.add_argument("--k", type=int, default=DEFAULT_K)
    sp.add_argument("--out", required=True)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("gen-synthetic", parents=[common], help="write a planted-relevance corpus")
    sp.add_argument("--out", required=True)
    sp.add_argument("--lessons", dest="n_lessons", type=int, default=DEFAULT_LESSONS)
    sp.add_argument("--artifacts", dest="n_artifacts", type=int, default=DEFAULT_ARTIFACTS)
    sp.add_argument("--themes", dest="n_themes", type=int, default=DEFAULT_THEMES)
    sp.add_argument("--projects", dest="n_projects", type=int, default=DEFAULT_PROJECTS)
    sp.set_defaults(func=cmd_gen_synthetic)
    return parser


@dataclass
class RunConfig:
    args: argparse.Namespace

    @property
    def eval_config(self) -> EvalConfig:
        return EvalConfig(k=self.args.k, master_seed=self.args.seed)

    def build_options(self) -> BuildOptions:
        a = self.args
        stopwords = load_stopwords(a.stopwords) if a.stopwords else None
        return BuildOptions(
            master_seed=a.seed,
            lda_alpha=a.lda_alpha,
            lda_beta=a.lda_beta,
            lda_train_sweeps=a.lda_train_sweeps,
            lda_infer_sweeps=a.lda_infer_sweeps,
            stopwords=stopwords,
        )

    def corpus_paths(self) -> tuple[Path, Path, Path]:
        a = self.args
        base = Path(a.corpus) if a.corpus else None
        paths = []
        for explicit, default in ((a.lessons, LESSONS_FILE), (a.artifacts, ARTIFACTS_FILE), (a.judgments, JUDGMENTS_FILE)):
            if explicit:
                paths.append(Path(explicit))
            elif base is not None:
                paths.append(base / default)
            else:
                raise UsageError("give --corpus DIR or all of --lessons/--artifacts/--judgments")
        return tuple(paths)


def _apply_config_file(args: argparse.Namespace) -> None:
    if not args.config:
        return
    path = Path(args.config)
    if not path.is_file():
        raise DataError(f"config file not found: {path}")
    try:
        overrides = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: malformed JSON ({exc.msg})") from None
    if not isinstance(overrides, dict):
        raise DataError(f"{path}: expected a JSON object")
    for key, value in overrides.items():
        dest = _CONFIG_ALIASES.get(key, key.replace("-", "_").replace(".", "_"))
        if not hasattr(args, dest) or dest in ("func", "command", "config"):
            raise UsageError(f"unknown config key {key!r}")
        setattr(args, dest, value)


def _validate_paths(args: argparse.Namespace, run: RunConfig) -> None:
    if getattr(args, "corpus", None) is not None or getattr(args, "lessons", None) is not None:
        for p in run.corpus_paths():
            if not p.is_file():
                raise DataError(f"corpus file not found: {p}")
    elif hasattr(args, "judgments"):
        run.corpus_paths()
    if args.stopwords and not Path(args.stopwords).is_file():
        raise DataError(f"stopword file not found: {args.stopwords}")
    for attr in ("out", "cache_dir"):
        value = getattr(args, attr, None)
        if value and Path(value).exists() and not Path(value).is_dir():
            raise DataError(f"--{attr.replace('_', '-')} is not a directory: {value}")
    if hasattr(args, "k") and args.k < 1:
        raise UsageError("--k must be >= 1")
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")


def _load(run: RunConfig):
    return load_corpus(*run.corpus_paths())


def cmd_ingest(run: RunConfig) -> int:
    corpus = _load(run)
    pairs = sum(len(v) for v in corpus.judgments.values())
    print(f"lessons={len(corpus.lessons)} artifacts={len(corpus.artifacts)} judgments={pairs}")
    print(f"corpus_hash={corpus.content_hash}")
    return EXIT_OK


def _parse_ids(text: str) -> list[ClassifierConfig]:
    try:
        return [ClassifierConfig.parse(cid) for cid in text.split(",") if cid.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_query(run: RunConfig) -> int:
    a = run.args
    single = getattr(a, "config_id", None)
    if a.require_members or not single:
        if not a.members:
            raise UsageError("give --members (comma-separated config ids)" + ("" if a.require_members else " or --config-id"))
        configs = _parse_ids(a.members)
        if len(configs) < 2 or len({c.id for c in configs}) != len(configs):
            raise UsageError("--members needs at least 2 distinct config ids")
    else:
        configs = _parse_ids(single)
    corpus = _load(run)
    try:
        artifact = corpus.artifact(a.artifact)
    except KeyError:
        raise DataError(f"unknown artifact id {a.artifact!r}") from None
    options = run.build_options()
    lists = [run_classifier(cfg, corpus, artifact, options, a.cache_dir) for cfg in configs]
    ranked = lists[0] if len(lists) == 1 else fuse(lists, FusionMethod.parse(a.method))
    relevant = corpus.judgments[artifact.id]
    for item in ranked.items[: a.k]:
        mark = "*" if item.doc_id in relevant else ""
        print(f"{item.rank}\t{item.doc_id}\t{item.score:.6f}\t{mark}".rstrip("\t"))
    return EXIT_OK


def cmd_grid(run: RunConfig) -> int:
    a = run.args
    corpus = _load(run)
    runs = run_grid(corpus, run.build_options(), jobs=a.jobs, cache_dir=a.cache_dir)
    path = write_individuals(individual_results(runs, corpus, a.k), a.out, a.format)
    print(path)
    return EXIT_OK


def cmd_experiment(run: RunConfig) -> int:
    a = run.args
    corpus = _load(run)
    report = run_experiment(corpus, run.eval_config, run.build_options(), jobs=a.jobs, cache_dir=a.cache_dir)
    for path in write_report(report, a.out, a.format):
        print(path)
    return EXIT_OK


def cmd_gen_synthetic(run: RunConfig) -> int:
    a = run.args
    try:
        corpus = generate_synthetic_corpus(a.seed, a.n_lessons, a.n_artifacts, a.n_themes, a.n_projects)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    save_corpus(corpus, a.out)
    print(a.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config_file(args)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        run = RunConfig(args)
        _validate_paths(args, run)
        return args.func(run)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        print(parser.format_usage(), file=sys.stderr, end="")
        return EXIT_USAGE
    except (DataError, CorpusError, ClassifierBuildError, OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
