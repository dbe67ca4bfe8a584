"""Command-line entry point wiring all pipeline stages together.

Exit codes: 0 success, 2 validation error, 3 consistency error, 4 I/O error.
A flat key=value config file (via --config or $SAAD_CONFIG) supplies
defaults; any key can be overridden by the CLI flag of the same name.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

from . import extract, refine, report
from .classify import tally
from .detect import (
    Detection,
    detect_saad,
    read_detections,
    write_detections,
)
from .extrapolate import (
    EmptySeed,
    OracleUnavailable,
    VectorFileOracle,
    Verdict,
    run_to_completion,
)
from .lexicon import (
    DuplicateTerm,
    InvalidPattern,
    Lexicon,
    ParseError,
    UnknownTaxonomyType,
    load_lexicon,
    save_lexicon,
    seed_lexicon_path,
)
from .stats import (
    AllZeroDifferences,
    CorpusSummary,
    DomainError,
    LengthMismatch,
    UnknownProject,
    cohens_kappa,
    sample_size,
    wilcoxon_signed_rank,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CONSISTENCY = 3
EXIT_IO = 4

DEFAULT_EXTENSIONS = (
    ".java,.c,.h,.cc,.cpp,.hpp,.cxx,.go,.rs,.js,.jsx,.ts,.tsx,.cs,.kt,.scala,.swift"
)


class ConsistencyError(Exception):
    """Inputs disagree (e.g. detections referencing unknown comments)."""


@dataclass
class RunConfig:
    corpus: str | None = None
    lexicon: str | None = None
    detections: str | None = None
    annotations: str | None = None
    history: str | None = None
    fp_threshold: float = 0.25
    f1_target: float = 0.95
    consistency: int = 2
    z: float = 1.96
    E: float = 0.05
    p: float = 0.5
    rng_seed: int = 20240901
    k_context: int = 5
    format: str = "markdown"

    def refine_config(self) -> refine.RefineConfig:
        if not 0.0 < self.fp_threshold <= 1.0 or not 0.0 < self.f1_target <= 1.0:
            raise DomainError("thresholds must be in (0, 1]")
        return refine.RefineConfig(
            fp_threshold=self.fp_threshold,
            f1_target=self.f1_target,
            consistency=self.consistency,
            sample_z=self.z,
            sample_p=self.p,
            sample_E=self.E,
            rng_seed=self.rng_seed,
        )


def load_config_file(path: str | Path) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParseError(line_no, f"expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    """CLI flag > config file > default, per key."""
    config_path = getattr(args, "config", None) or os.environ.get("SAAD_CONFIG")
    file_values = load_config_file(config_path) if config_path else {}
    cfg = RunConfig()
    for f in fields(RunConfig):
        file_value = file_values.get(f.name)
        arg_value = getattr(args, f.name, None)
        if arg_value is not None:
            setattr(cfg, f.name, arg_value)
        elif file_value is not None:
            caster = type(getattr(cfg, f.name)) if getattr(cfg, f.name) is not None else str
            if caster is bool:
                setattr(cfg, f.name, file_value.lower() in ("1", "true", "yes"))
            else:
                setattr(cfg, f.name, caster(file_value))
    return cfg


def _load_lexicon_arg(cfg: RunConfig) -> Lexicon:
    path = cfg.lexicon or str(seed_lexicon_path())
    return load_lexicon(path)


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------

def cmd_scan(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    extensions = {e if e.startswith(".") else "." + e for e in args.ext.split(",")}
    out_path = args.out or cfg.corpus
    if not out_path:
        print("scan: --out (or corpus= in config) is required", file=sys.stderr)
        return EXIT_VALIDATION

    all_records: list[extract.CommentRecord] = []
    stats_rows: list[tuple[str, int, int, int]] = []
    files_processed = 0
    for root in args.roots:
        root_path = Path(root)
        if not root_path.is_dir():
            print(f"scan: not a directory: {root}", file=sys.stderr)
            return EXIT_VALIDATION
        project_id = root_path.resolve().name
        files = sorted(
            p for p in root_path.rglob("*") if p.is_file() and p.suffix in extensions
        )

        def extract_file(path: Path) -> list[extract.CommentRecord] | None:
            try:
                source = path.read_text(encoding="utf-8")
            except (OSError, UnicodeDecodeError) as exc:
                print(f"scan: skipping {path}: {exc}", file=sys.stderr)
                return None
            rel = path.relative_to(root_path).as_posix()
            records, warnings = extract.extract_comments(
                source, rel, project_id, k_context=cfg.k_context
            )
            for w in warnings:
                print(f"scan: {path}: {w}", file=sys.stderr)
            return records

        if args.jobs > 1:
            with ThreadPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(extract_file, files))
        else:
            results = [extract_file(p) for p in files]

        project_records: list[extract.CommentRecord] = []
        for res in results:
            if res is not None:
                files_processed += 1
                project_records.extend(res)
        nl_count = sum(1 for r in project_records if r.is_natural_language)
        stats_rows.append((project_id, len(files), len(project_records), nl_count))
        all_records.extend(project_records)

    if files_processed == 0:
        print("scan: no source files processed", file=sys.stderr)
        return EXIT_IO
    extract.write_corpus(all_records, out_path)
    print(f"{'project':<30} {'files':>6} {'comments':>9} {'nl':>9}")
    for project, n_files, n_comments, n_nl in stats_rows:
        print(f"{project:<30} {n_files:>6} {n_comments:>9} {n_nl:>9}")
    print(f"wrote {len(all_records)} records to {out_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# detect / classify / report / sample
# ---------------------------------------------------------------------------

def cmd_detect(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    lexicon = _load_lexicon_arg(cfg)
    corpus = list(extract.read_corpus(args.corpus or cfg.corpus))
    detections = detect_saad(corpus, lexicon)
    write_detections(detections, args.out or cfg.detections)
    print(f"{len(detections)} detections from {len(corpus)} comments")
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    lexicon = _load_lexicon_arg(cfg)
    from .classify import classify as classify_detection

    detections = list(read_detections(args.detections or cfg.detections))
    for det in detections:
        det.taxonomy_types = classify_detection(det, lexicon)
    out = args.out or args.detections or cfg.detections
    write_detections(detections, out)
    if args.tally:
        Path(args.tally).write_text(
            report.render_tally_csv(tally(detections)), encoding="utf-8"
        )
    print(f"classified {len(detections)} detections")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    corpus = list(extract.read_corpus(args.corpus or cfg.corpus))
    detections = list(read_detections(args.detections or cfg.detections))
    known = {r.id for r in corpus}
    orphans = [d.comment_id for d in detections if d.comment_id not in known]
    if orphans:
        raise ConsistencyError(
            f"{len(orphans)} detections reference unknown comments: "
            + ", ".join(orphans[:5])
        )
    out_format = (args.format or cfg.format).lower()
    if out_format == "markdown":
        summary = CorpusSummary.from_records(corpus)
        text = report.render_report(detections, summary)
    elif out_format == "csv":
        text = report.render_tally_csv(tally(detections))
    else:
        raise DomainError(f"report format must be markdown or csv, got {out_format!r}")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        print(text)
    return EXIT_OK


def cmd_sample(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    detections = list(read_detections(args.detections or cfg.detections))
    strata = (
        refine.StrataKey.PATTERN
        if args.strata == "pattern"
        else refine.StrataKey.FEATURE_FREQUENCY_QUARTILE
    )
    n = args.n if args.n is not None else min(
        sample_size(cfg.z, cfg.p, cfg.E), len(detections)
    )
    ids = refine.sample_stratified(detections, strata, n, rng_seed=cfg.rng_seed)
    text = "\n".join(ids) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# refine
# ---------------------------------------------------------------------------

def cmd_refine_run(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    lexicon_path = cfg.lexicon or str(seed_lexicon_path())
    lexicon = load_lexicon(lexicon_path)
    corpus = list(extract.read_corpus(args.corpus or cfg.corpus))
    store = refine.AnnotationStore(args.annotations or cfg.annotations)
    history_path = args.history or cfg.history
    history = refine.read_history(history_path) if history_path else []
    with refine.iteration_lock(history_path or lexicon_path):
        iteration, new_lexicon = refine.run_iteration(
            corpus,
            lexicon,
            store.load_all(),
            config=cfg.refine_config(),
            history=history,
        )
    history.append(iteration)
    if history_path:
        refine.write_history(history, history_path)
    lexicon_out = args.lexicon_out or (cfg.lexicon if cfg.lexicon else None)
    if lexicon_out and new_lexicon is not lexicon:
        save_lexicon(new_lexicon, lexicon_out)
    print(
        f"iteration {iteration.iteration_no}: patterns={iteration.active_pattern_count} "
        f"detected={iteration.total_saad_detected} precision={iteration.precision:.3f} "
        f"f1={iteration.f1:.3f} excluded={len(iteration.excluded_patterns)} "
        f"stopped={iteration.stopped}"
    )
    return EXIT_OK


def cmd_refine_status(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    history = refine.read_history(args.history or cfg.history or "")
    sys.stdout.write(report.render_iteration_table(history))
    return EXIT_OK


# ---------------------------------------------------------------------------
# stats
# ---------------------------------------------------------------------------

def _read_pairs_csv(path: str) -> list[tuple[float, float]]:
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            try:
                pairs.append((float(parts[0]), float(parts[1])))
            except (ValueError, IndexError):
                if pairs:
                    raise DomainError(f"bad pair row: {line!r}")
                # else: header row, skip
    return pairs


def cmd_stats_wilcoxon(args: argparse.Namespace) -> int:
    pairs = _read_pairs_csv(args.pairs)
    result = wilcoxon_signed_rank(pairs, method=args.method)
    w = result.w_statistic
    w_text = str(int(w)) if float(w).is_integer() else f"{w:.1f}"
    print(
        f"N={result.n_nonzero} W={w_text} p={report.format_p_value(result.p_value)} "
        f"r={result.r:.3f} ({result.magnitude.value})"
    )
    return EXIT_OK


def cmd_stats_kappa(args: argparse.Namespace) -> int:
    labels_a: list[str] = []
    labels_b: list[str] = []
    with open(args.labels, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            a, _, b = line.partition(",")
            labels_a.append(a.strip())
            labels_b.append(b.strip())
    print(f"kappa={cohens_kappa(labels_a, labels_b):.4f}")
    return EXIT_OK


def cmd_stats_sample_size(args: argparse.Namespace) -> int:
    print(sample_size(args.z, args.p, args.E))
    return EXIT_OK


# ---------------------------------------------------------------------------
# extrapolate / serve
# ---------------------------------------------------------------------------

def cmd_extrapolate(args: argparse.Namespace) -> int:
    oracle = VectorFileOracle(args.vectors)
    seeds = []
    with open(args.seeds, "r", encoding="utf-8") as fh:
        for line in fh:
            term = line.split("\t")[0].strip()
            if term and not term.startswith("#"):
                seeds.append(term)
    if not seeds:
        print("extrapolate: no seed terms", file=sys.stderr)
        return EXIT_VALIDATION

    if args.auto_accept:
        tag = Verdict.DIRECT if args.auto_accept == "direct" else Verdict.INDIRECT

        def verify(term: str) -> Verdict:
            return tag
    else:
        def verify(term: str) -> Verdict:
            while True:
                answer = input(f"{term!r}: [d]irect / [i]ndirect / [r]eject > ").strip().lower()
                if answer in ("d", "direct"):
                    return Verdict.DIRECT
                if answer in ("i", "indirect"):
                    return Verdict.INDIRECT
                if answer in ("r", "reject"):
                    return Verdict.REJECT

    from .extrapolate import ExtrapolationSession, step

    session = ExtrapolationSession.start(seeds, k=args.k)
    while session.seed:
        step(session, oracle, verify)
    lines = [
        f"F\t{term}\t{directness.value}"
        for term, directness in sorted(session.expanded.items())
    ]
    text = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        with open(args.out, "a", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"accepted {len(session.expanded)} terms", file=sys.stderr)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import ServiceState, create_app

    cfg = build_config(args)
    lexicon = _load_lexicon_arg(cfg)
    corpus = {r.id: r for r in extract.read_corpus(args.corpus or cfg.corpus)}
    detections = list(read_detections(args.detections or cfg.detections))
    ui_dir = Path(args.ui) if args.ui else None
    if ui_dir is None and Path("frontend/dist/index.html").is_file():
        ui_dir = Path("frontend/dist")
    history = args.history or cfg.history
    state = ServiceState(
        corpus=corpus,
        detections=detections,
        lexicon=lexicon,
        store=refine.AnnotationStore(args.annotations or cfg.annotations),
        history_path=Path(history) if history else None,
        fp_threshold=cfg.fp_threshold,
        ui_dir=ui_dir,
    )
    uvicorn.run(create_app(state), host=args.host, port=args.port)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file (default: $SAAD_CONFIG)")
    p.add_argument("--lexicon", help="lexicon TSV (default: bundled seed lexicon)")
    p.add_argument("--fp-threshold", dest="fp_threshold", type=float)
    p.add_argument("--f1-target", dest="f1_target", type=float)
    p.add_argument("--consistency", type=int)
    p.add_argument("--z", type=float)
    p.add_argument("--E", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--rng-seed", dest="rng_seed", type=int)
    p.add_argument("--k-context", dest="k_context", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="saad", description="Self-admitted aging debt toolkit"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", help="extract comments from source trees")
    p.add_argument("roots", nargs="+")
    p.add_argument("--out", help="corpus JSONL output")
    p.add_argument("--ext", default=DEFAULT_EXTENSIONS)
    p.add_argument("--jobs", type=int, default=1)
    _add_config_args(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("detect", help="run pattern detection over a corpus")
    p.add_argument("--corpus")
    p.add_argument("--out")
    _add_config_args(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("classify", help="(re)assign taxonomy types to detections")
    p.add_argument("--detections")
    p.add_argument("--out")
    p.add_argument("--tally", help="write the type tally CSV here")
    _add_config_args(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("report", help="render the markdown report")
    p.add_argument("--corpus")
    p.add_argument("--detections")
    p.add_argument("--out")
    p.add_argument("--format", choices=["markdown", "csv"])
    _add_config_args(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("sample", help="draw a stratified annotation sample")
    p.add_argument("--detections")
    p.add_argument("--n", type=int)
    p.add_argument("--strata", choices=["pattern", "quartile"], default="pattern")
    p.add_argument("--out")
    _add_config_args(p)
    p.set_defaults(func=cmd_sample)

    p_refine = sub.add_parser("refine", help="refinement loop")
    refine_sub = p_refine.add_subparsers(dest="refine_command", required=True)
    p = refine_sub.add_parser("run", help="run one refinement iteration")
    p.add_argument("--corpus")
    p.add_argument("--annotations")
    p.add_argument("--history")
    p.add_argument("--lexicon-out", dest="lexicon_out")
    _add_config_args(p)
    p.set_defaults(func=cmd_refine_run)
    p = refine_sub.add_parser("status", help="print the iteration history")
    p.add_argument("--history")
    _add_config_args(p)
    p.set_defaults(func=cmd_refine_status)

    p_stats = sub.add_parser("stats", help="statistics utilities")
    stats_sub = p_stats.add_subparsers(dest="stats_command", required=True)
    p = stats_sub.add_parser("wilcoxon")
    p.add_argument("--pairs", required=True, help="CSV of x,y pairs")
    p.add_argument("--method", choices=["auto", "exact", "approx"], default="auto")
    p.set_defaults(func=cmd_stats_wilcoxon)
    p = stats_sub.add_parser("kappa")
    p.add_argument("--labels", required=True, help="CSV of label_a,label_b rows")
    p.set_defaults(func=cmd_stats_kappa)
    p = stats_sub.add_parser("sample-size")
    p.add_argument("--z", type=float, default=1.96)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--E", type=float, default=0.05)
    p.set_defaults(func=cmd_stats_sample_size)

    p = sub.add_parser("extrapolate", help="expand the aging vocabulary")
    p.add_argument("--seeds", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--k", type=int, default=30)
    p.add_argument("--out", help="lexicon fragment file to append to")
    p.add_argument(
        "--auto-accept",
        choices=["direct", "indirect"],
        help="accept every candidate without prompting",
    )
    p.set_defaults(func=cmd_extrapolate)

    p = sub.add_parser("serve", help="start the triage HTTP service")
    p.add_argument("--corpus")
    p.add_argument("--detections")
    p.add_argument("--annotations")
    p.add_argument("--history")
    p.add_argument("--ui", help="directory with the built web UI")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    _add_config_args(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConsistencyError as exc:
        print(f"consistency error: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except UnknownProject as exc:
        print(f"consistency error: unknown project for {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except (
        ParseError,
        DuplicateTerm,
        UnknownTaxonomyType,
        InvalidPattern,
        DomainError,
        LengthMismatch,
        AllZeroDifferences,
        EmptySeed,
        refine.InsufficientPopulation,
        refine.IncompleteAnnotations,
        refine.NoAnnotatedMatches,
        OracleUnavailable,
        json.JSONDecodeError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
