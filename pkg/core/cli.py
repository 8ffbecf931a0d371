"""
Command Line.

Batch workflows over BIO files: profiling, perturbation, suite building,
scoring, slicing, prediction, correlation, agreement and the composite
report.

Exit codes: 0 success, 1 usage error, 2 data or validation error.
Diagnostics go to stderr; data goes to the output file or stdout.
"""

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from core.config_manager import config
from core.corpus_model import Dataset, load_bio, serialize_bio
from core.diagnostics import KAPPA_ALPHABETS, agreement, slice_scores
from core.errors import DataError, SpandiagError, UsageError
from core.file_utils import dump_json, ensure_directory_exists, file_exists, write_text_to_file
from core.metrics import AVERAGES, score_dataset
from core.perturbation import (
    CasingTransform,
    QuoteMode,
    apply_casing,
    apply_quotes,
    build_suite,
)
from core.prediction import POLICIES, correlate, median_correlation, predict_from_datasets, system_ranks
from core.span_attributes import (
    ComplianceRules,
    Lexicon,
    load_rules,
    profile_span,
    validate_dims,
)
from integrations.reports import envelope, render_slice_table, render_text, slice_report_payload
from integrations.score_pairs import read_score_pairs
from integrations.suite_files import load_seeds, write_suite

logger = logging.getLogger(__name__)


FORMATS = ("json", "text")
DEFAULT_REPORT_DIMS = "type,length,position,quoted"
CONFIGURATION_DIMS = ("casing", "quoted")


# =============================================================================
# Run Configuration
# =============================================================================

@dataclass
class RunConfig:
    """Everything a subcommand needs, resolved from argv and config."""
    command: str
    inputs: Dict[str, Path] = field(default_factory=dict)
    extra_inputs: List[Path] = field(default_factory=list)
    rules_path: Optional[Path] = None
    dims: List[str] = field(default_factory=list)
    policy: str = "backoff"
    out: Optional[Path] = None
    fmt: str = "json"
    strict: bool = False
    average: str = "micro"
    alphabet: str = "binary"
    casing: Optional[CasingTransform] = None
    quotes: Optional[QuoteMode] = None

    def check_paths(self) -> None:
        """Referenced inputs must exist; missing ones are usage errors."""
        for option, path in self.inputs.items():
            if not file_exists(path):
                raise UsageError(f"file not found: {path} (given as --{option})")
        for path in self.extra_inputs:
            if not file_exists(path):
                raise UsageError(f"file not found: {path} (given as --input)")
        if self.rules_path is not None and not file_exists(self.rules_path):
            raise UsageError(f"rules file not found: {self.rules_path} (given as --rules)")

    def rules(self) -> Tuple[ComplianceRules, Lexicon]:
        return load_rules(self.rules_path or config.rules_path)

    def load(self, option: str) -> Dataset:
        return load_bio(self.inputs[option], strict=self.strict)


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting, so exit codes stay ours."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _parse_dims(raw: str) -> List[str]:
    dims = [d.strip() for d in raw.split(",") if d.strip()]
    try:
        return validate_dims(dims)
    except ValueError as e:
        raise UsageError(str(e)) from e


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spandiag", description="Diagnostic evaluation of span identification systems.")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=FORMATS, default="json", dest="fmt")
        p.add_argument("--strict", action="store_true", default=None,
                       help="reject orphan I- tags instead of repairing them")

    p = sub.add_parser("tag", help="profile every gold span")
    p.add_argument("--gold", required=True)
    p.add_argument("--rules")
    common(p)

    p = sub.add_parser("perturb", help="apply one casing/quotation configuration")
    p.add_argument("--input", required=True)
    p.add_argument("--casing", choices=[c.value for c in CasingTransform], default="standard")
    p.add_argument("--quotes", choices=[q.value for q in QuoteMode], required=True)
    common(p)

    p = sub.add_parser("build-suite", help="expand seeds into the twelve configurations")
    p.add_argument("--seeds", required=True)
    p.add_argument("--meta")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--rules")
    p.add_argument("--strict", action="store_true", default=None)

    p = sub.add_parser("score", help="span, token and typology scores")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--average", choices=AVERAGES)
    common(p)

    p = sub.add_parser("slice", help="recall per attribute bucket")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--dims", default=DEFAULT_REPORT_DIMS)
    p.add_argument("--rules")
    common(p)

    p = sub.add_parser("predict", help="extrapolate recall onto a target dataset")
    p.add_argument("--benchmark-gold", required=True)
    p.add_argument("--benchmark-pred", required=True)
    p.add_argument("--target-gold", required=True)
    p.add_argument("--dims", required=True)
    p.add_argument("--policy", choices=POLICIES)
    p.add_argument("--rules")
    common(p)

    p = sub.add_parser("correlate", help="Pearson and Spearman over score pairs")
    p.add_argument("--input", required=True, action="append")
    common(p)

    p = sub.add_parser("agree", help="inter-annotator agreement")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--alphabet", choices=KAPPA_ALPHABETS)
    common(p)

    p = sub.add_parser("report", help="overall, per-configuration and per-type report")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--dims", default=DEFAULT_REPORT_DIMS)
    p.add_argument("--rules")
    common(p)

    return parser


def resolve_run_config(argv: Sequence[str]) -> RunConfig:
    """Parse argv into a RunConfig, filling gaps from the config file."""
    args = build_parser().parse_args(list(argv))
    run_config = RunConfig(command=args.command)

    for option in ("gold", "pred", "seeds", "meta", "a", "b", "benchmark_gold", "benchmark_pred", "target_gold"):
        value = getattr(args, option, None)
        if value:
            run_config.inputs[option.replace("_", "-")] = Path(value)
    if args.command == "perturb":
        run_config.inputs["input"] = Path(args.input)
    elif args.command == "correlate":
        run_config.extra_inputs = [Path(p) for p in args.input]

    if getattr(args, "rules", None):
        run_config.rules_path = Path(args.rules)
    if getattr(args, "dims", None):
        run_config.dims = _parse_dims(args.dims)
    run_config.out = Path(args.out) if getattr(args, "out", None) else None
    run_config.fmt = getattr(args, "fmt", "json")
    strict = getattr(args, "strict", None)
    run_config.strict = config.strict_parsing if strict is None else strict
    run_config.policy = getattr(args, "policy", None) or config.prediction_policy
    run_config.average = getattr(args, "average", None) or config.average
    run_config.alphabet = getattr(args, "alphabet", None) or config.kappa_alphabet
    if args.command == "perturb":
        run_config.casing = CasingTransform(args.casing)
        run_config.quotes = QuoteMode(args.quotes)

    if run_config.policy not in POLICIES:
        raise UsageError(f"unknown prediction policy {run_config.policy!r} in config")
    if run_config.average not in AVERAGES:
        raise UsageError(f"unknown average {run_config.average!r} in config")
    if run_config.alphabet not in KAPPA_ALPHABETS:
        raise UsageError(f"unknown kappa alphabet {run_config.alphabet!r} in config")
    return run_config


# =============================================================================
# Output
# =============================================================================

def _emit(run_config: RunConfig, text: str, out: Optional[Path] = None) -> None:
    target = out or run_config.out
    if target is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        write_text_to_file(target, text)
        logger.info(f"Wrote {run_config.command} output to {target}")


def table_path(out: Path) -> Path:
    """Companion path for the plain-text table written beside a JSON report."""
    return out.with_name(out.stem + ".table.txt")


def _emit_payload(run_config: RunConfig, body: Dict[str, Any]) -> None:
    payload = envelope(run_config.command, body)
    _emit(run_config, render_text(payload) if run_config.fmt == "text" else dump_json(payload))


# =============================================================================
# Commands
# =============================================================================

def cmd_tag(rc: RunConfig) -> None:
    gold = rc.load("gold")
    rules, lex = rc.rules()
    sentences = []
    for i, sentence in enumerate(gold.sentences):
        spans = []
        for span in sentence.spans:
            profile = profile_span(sentence, span, rules, lex)
            spans.append({
                "start": span.start,
                "end": span.end,
                "label": span.label,
                "text": " ".join(sentence.span_texts(span)),
                "profile": profile.as_dict(),
            })
        sentences.append({"index": i, "meta": dict(sentence.meta), "spans": spans})
    _emit_payload(rc, {"dataset": gold.name, "spans": gold.span_count, "sentences": sentences})


def cmd_perturb(rc: RunConfig) -> None:
    data = rc.load("input")
    config_id = f"{rc.casing.value}+{rc.quotes.value}"
    sentences = []
    for sentence in data.sentences:
        sentence = apply_quotes(apply_casing(sentence, rc.casing), rc.quotes)
        sentences.append(sentence.with_meta(config=config_id))
    perturbed = Dataset(tuple(sentences), f"{data.name}.{config_id}")
    _emit(rc, "".join(f"{line}\n" for line in serialize_bio(perturbed)))


def cmd_build_suite(rc: RunConfig) -> None:
    rules, lex = rc.rules()
    seeds = load_seeds(rc.inputs["seeds"], rc.inputs.get("meta"), strict=rc.strict)
    suite = build_suite(seeds, rules, lex, name=rc.inputs["seeds"].stem, threads=config.threads)
    ensure_directory_exists(rc.out)
    manifest = write_suite(suite, rc.out, len(seeds))
    logger.info(f"Suite manifest: {manifest['sentences']} sentences, {manifest['spans']} spans")


def cmd_score(rc: RunConfig) -> None:
    gold, pred = rc.load("gold"), rc.load("pred")
    scores = score_dataset(gold, pred, rc.average)
    body = {"gold": gold.name, "pred": pred.name, "sentences": len(gold), "average": rc.average}
    body.update(scores.as_dict())
    _emit_payload(rc, body)


def cmd_slice(rc: RunConfig) -> None:
    gold, pred = rc.load("gold"), rc.load("pred")
    rules, lex = rc.rules()
    report = slice_scores(gold, pred, rc.dims, rules, lex)
    payload = envelope(rc.command, {"gold": gold.name, "pred": pred.name, **slice_report_payload(report)})
    table = render_slice_table(report)
    _emit(rc, table if rc.fmt == "text" else dump_json(payload))
    if rc.out is not None and rc.fmt == "json":
        _emit(rc, table, table_path(rc.out))


def cmd_predict(rc: RunConfig) -> None:
    rules, lex = rc.rules()
    report = predict_from_datasets(
        rc.load("benchmark-gold"), rc.load("benchmark-pred"), rc.load("target-gold"),
        rc.dims, rules, lex, rc.policy,
    )
    _emit_payload(rc, {"dims": rc.dims, **report.as_dict()})


def cmd_correlate(rc: RunConfig) -> None:
    reports = []
    files = []
    for path in rc.extra_inputs:
        scores = read_score_pairs(path)
        report = correlate(scores.pairs)
        entry = report.as_dict()
        if scores.systems is not None:
            entry["ranks"] = system_ranks(scores.systems, scores.predicted, scores.true)
        reports.append(report)
        files.append({"file": path.name, **entry})
    if len(reports) == 1:
        body = dict(files[0])
        del body["file"]
    else:
        body = {"files": files, "median": median_correlation(reports)}
    _emit_payload(rc, body)


def cmd_agree(rc: RunConfig) -> None:
    report = agreement(rc.load("a"), rc.load("b"), rc.alphabet)
    _emit_payload(rc, report.as_dict())


def cmd_report(rc: RunConfig) -> None:
    gold, pred = rc.load("gold"), rc.load("pred")
    rules, lex = rc.rules()
    overall = score_dataset(gold, pred, rc.average)
    # one profiling pass, then both views
    fine = slice_scores(gold, pred, rc.dims + [d for d in CONFIGURATION_DIMS if d not in rc.dims], rules, lex)
    configurations = fine.coarsen(CONFIGURATION_DIMS)
    types = fine.coarsen(rc.dims)
    body = {
        "gold": gold.name,
        "pred": pred.name,
        "overall": overall.as_dict(),
        "per_configuration": slice_report_payload(configurations),
        "per_type": slice_report_payload(types),
    }
    if rc.fmt == "text":
        text = (
            render_text(envelope(rc.command, {"overall": overall.as_dict()}))
            + "\nper configuration\n" + render_slice_table(configurations)
            + "\nper type\n" + render_slice_table(types)
        )
        _emit(rc, text)
    else:
        _emit_payload(rc, body)


HANDLERS: Dict[str, Callable[[RunConfig], None]] = {
    "tag": cmd_tag,
    "perturb": cmd_perturb,
    "build-suite": cmd_build_suite,
    "score": cmd_score,
    "slice": cmd_slice,
    "predict": cmd_predict,
    "correlate": cmd_correlate,
    "agree": cmd_agree,
    "report": cmd_report,
}


# =============================================================================
# Entry Point
# =============================================================================

def run(argv: Sequence[str]) -> int:
    """Run one subcommand.

    Returns:
        0 on success, 1 on usage error, 2 on data or validation error
    """
    try:
        rc = resolve_run_config(argv)
        rc.check_paths()
        HANDLERS[rc.command](rc)
    except SystemExit as e:  # --help
        return int(e.code or 0)
    except UsageError as e:
        sys.stderr.write(f"error: {e}\n")
        return 1
    except DataError as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    except (SpandiagError, OSError) as e:
        logger.debug("Command failed", exc_info=True)
        sys.stderr.write(f"error: {e}\n")
        return 2
    return 0
