"""Command-line interface.

Each pipeline stage is exposed as a subcommand operating on the file
formats documented in treebank.py, so a full experiment can be reproduced
either with `run --config ...` or by chaining the individual stages.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import collapse as collapsing
from . import evaluation, parser, pipeline, recognition, treebank


def _add_split(sub):
    cmd = sub.add_parser("split", help="split a treebank by sentence-id ranges")
    cmd.add_argument("--treebank", required=True)
    cmd.add_argument("--train", required=True, help="id ranges, e.g. 1-40")
    cmd.add_argument("--dev", default="")
    cmd.add_argument("--test", required=True)
    cmd.add_argument("--output-dir", required=True)


def _run_split(args):
    records = treebank.read_treebank(args.treebank)
    config = pipeline.ExperimentConfig(train=args.train, dev=args.dev,
                                       test=args.test)
    splits = pipeline.split_records(records, config)
    os.makedirs(args.output_dir, exist_ok=True)
    for name in ("train", "dev", "test"):
        if splits[name]:
            treebank.write_treebank(
                os.path.join(args.output_dir, "treebank_%s.txt" % name),
                splits[name])


def _add_recognize(sub):
    cmd = sub.add_parser("recognize", help="detect MWE occurrences")
    cmd.add_argument("--treebank", help="treebank whose leaves are scanned")
    cmd.add_argument("--tokens", help="token file to scan instead")
    cmd.add_argument("--lexicon", required=True)
    cmd.add_argument("--preset", choices=sorted(recognition.PRESETS),
                     help="one of the five recognizer presets")
    cmd.add_argument("--detector", default="exhaustive",
                     choices=recognition.DETECTORS)
    cmd.add_argument("--filters", default="continuous",
                     help="comma-separated filter list")
    cmd.add_argument("--resolver", default="longest",
                     choices=recognition.RESOLVERS)
    cmd.add_argument("--output", required=True)


def _recognizer_from_args(args):
    if args.preset:
        return recognition.PRESETS[args.preset]
    filters = tuple(p.strip() for p in args.filters.split(",") if p.strip())
    return recognition.RecognizerConfig(args.detector, filters, args.resolver)


def _sentences_from_args(args):
    if args.treebank:
        return [(r.sid, r.tokens) for r in treebank.read_treebank(args.treebank)]
    if args.tokens:
        return [(str(i), tokens) for i, tokens
                in enumerate(treebank.read_tokens(args.tokens), 1)]
    raise SystemExit("recognize: provide --treebank or --tokens")


def _run_recognize(args):
    lexicon = treebank.read_lexicon(args.lexicon)
    config = _recognizer_from_args(args)
    items = []
    for sid, tokens in _sentences_from_args(args):
        items.append((sid, recognition.recognize(lexicon, tokens, config)))
    treebank.write_occurrences(args.output, items)


def _add_collapse(sub):
    cmd = sub.add_parser("collapse", help="collapse MWEs in trees and dependencies")
    cmd.add_argument("--treebank", required=True)
    cmd.add_argument("--dependencies", help="gold dependencies to collapse; "
                     "extracted from the trees when omitted")
    cmd.add_argument("--occurrences", required=True)
    cmd.add_argument("--output-dir", required=True)


def _run_collapse(args):
    records = treebank.read_treebank(args.treebank)
    occurrences = treebank.read_occurrences(args.occurrences)
    if args.dependencies:
        deps_by_id = dict(treebank.read_dependencies(args.dependencies))
    else:
        deps_by_id = {r.sid: parser.extract_dependencies(r.tree)
                      for r in records}
    os.makedirs(args.output_dir, exist_ok=True)
    collapsed_records = []
    collapsed_deps = []
    tokens = []
    stats = []
    for record in records:
        occs = recognition.rebind_tokens(occurrences.get(record.sid, []),
                                         record.tokens)
        outcome = collapsing.collapse_tree(record.tree, occs)
        deps = collapsing.collapse_dependencies(
            deps_by_id.get(record.sid, []), outcome)
        collapsed_records.append(treebank.SentenceRecord(
            record.sid, outcome.tree,
            [t for _, t in treebank.leaves(outcome.tree)]))
        collapsed_deps.append((record.sid, deps))
        tokens.append(collapsed_records[-1].tokens)
        stats.append((record.sid, len(outcome.kept), len(outcome.discarded),
                      collapsing.detect_cycles(deps)))
    treebank.write_treebank(os.path.join(args.output_dir, "treebank_b.txt"),
                            collapsed_records)
    treebank.write_dependencies(os.path.join(args.output_dir, "deps_b.deps"),
                                collapsed_deps)
    treebank.write_tokens(os.path.join(args.output_dir, "tokens_b.txt"), tokens)
    with open(os.path.join(args.output_dir, "collapse_stats.tsv"), "w",
              encoding="utf-8") as handle:
        handle.write("# id\tkept\tdiscarded\tcycles\n")
        for sid, kept, discarded, cycles in stats:
            handle.write("%s\t%d\t%d\t%d\n" % (sid, kept, discarded, cycles))


def _add_train(sub):
    cmd = sub.add_parser("train", help="train the generative parser")
    cmd.add_argument("--treebank", required=True)
    cmd.add_argument("--smoothing", type=float, default=0.1)
    cmd.add_argument("--output", required=True)


def _run_train(args):
    records = treebank.read_treebank(args.treebank)
    model = parser.train(records, args.smoothing)
    parser.save_model(args.output, model)


def _add_parse(sub):
    cmd = sub.add_parser("parse", help="parse a token file")
    cmd.add_argument("--model", required=True)
    cmd.add_argument("--tokens", required=True)
    cmd.add_argument("--ids", help="file with one sentence id per line; "
                     "defaults to 1..n")
    cmd.add_argument("--output", required=True, help="dependency output")
    cmd.add_argument("--trees", help="also write the derivations here")


def _run_parse(args):
    model = parser.load_model(args.model)
    sentences = treebank.read_tokens(args.tokens)
    if args.ids:
        with open(args.ids, encoding="utf-8") as handle:
            ids = [line.strip() for line in handle if line.strip()]
        if len(ids) != len(sentences):
            raise SystemExit("parse: %d ids for %d sentences"
                             % (len(ids), len(sentences)))
    else:
        ids = [str(i) for i in range(1, len(sentences) + 1)]
    deps = []
    records = []
    for sid, tokens in zip(ids, sentences):
        result = parser.parse(model, tokens)
        if result.tree is None:
            deps.append((sid, []))
        else:
            deps.append((sid, parser.extract_dependencies(result.tree)))
            records.append(treebank.SentenceRecord(sid, result.tree, tokens))
    treebank.write_dependencies(args.output, deps)
    if args.trees:
        treebank.write_treebank(args.trees, records)


def _add_extract(sub):
    cmd = sub.add_parser("extract-deps", help="extract dependencies from trees")
    cmd.add_argument("--treebank", required=True)
    cmd.add_argument("--output", required=True)


def _run_extract(args):
    records = treebank.read_treebank(args.treebank)
    treebank.write_dependencies(
        args.output,
        [(r.sid, parser.extract_dependencies(r.tree)) for r in records])


def _add_combine(sub):
    cmd = sub.add_parser("combine", help="combine baseline and collapsed-model output")
    cmd.add_argument("--out-a", required=True, help="dependencies on original tokens")
    cmd.add_argument("--out-b", required=True, help="dependencies on collapsed tokens")
    cmd.add_argument("--occurrences", required=True)
    cmd.add_argument("--tokens", required=True,
                     help="original token file (restores unit tokens)")
    cmd.add_argument("--scheme", required=True, choices=evaluation.SCHEMES)
    cmd.add_argument("--output", required=True)


def _run_combine(args):
    out_a = treebank.read_dependencies(args.out_a)
    out_b = dict(treebank.read_dependencies(args.out_b))
    occurrences = treebank.read_occurrences(args.occurrences)
    sentences = treebank.read_tokens(args.tokens)
    tokens_by_id = {sid: tokens for (sid, _), tokens in zip(out_a, sentences)}
    combined = []
    for sid, deps_a in out_a:
        occs = recognition.rebind_tokens(occurrences.get(sid, []),
                                         tokens_by_id[sid])
        combined.append((sid, evaluation.combine_models(
            deps_a, out_b.get(sid, []), occs, args.scheme)))
    treebank.write_dependencies(args.output, combined)


def _add_eval(sub):
    cmd = sub.add_parser("eval", help="score dependencies against gold")
    cmd.add_argument("--system", required=True)
    cmd.add_argument("--gold", required=True)
    cmd.add_argument("--labeled", action="store_true")
    cmd.add_argument("--output", help="write a TSV report here")
    cmd.add_argument("--per-sentence", help="write per-sentence counts here")


def _run_eval(args):
    system = dict(treebank.read_dependencies(args.system))
    gold = dict(treebank.read_dependencies(args.gold))
    report = evaluation.score(system, gold, labeled=args.labeled)
    line = ("P\t%.4f\nR\t%.4f\nF1\t%.4f\ncorrect\t%d\nattempted\t%d\n"
            "gold\t%d\nP_undefined\t%d\n"
            % (report.precision, report.recall, report.f1, report.correct,
               report.attempted, report.gold, int(report.undefined_precision)))
    sys.stdout.write(line)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(line)
    if args.per_sentence:
        with open(args.per_sentence, "w", encoding="utf-8") as handle:
            for sid in sorted(report.per_sentence):
                handle.write("%s\t%d\t%d\t%d\n"
                             % ((sid,) + report.per_sentence[sid]))


def _add_sigtest(sub):
    cmd = sub.add_parser("sigtest", help="one-tailed randomized shuffling test")
    cmd.add_argument("--x", required=True, help="per-sentence counts of system X")
    cmd.add_argument("--y", required=True, help="per-sentence counts of system Y")
    cmd.add_argument("--iterations", type=int, default=10000)
    cmd.add_argument("--seed", type=int, default=0)


def _read_counts(path):
    counts = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.strip()
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise SystemExit("%s line %d: expected id, correct, attempted, "
                                 "gold" % (path, lineno))
            counts[fields[0]] = tuple(int(f) for f in fields[1:])
    return counts


def _run_sigtest(args):
    result = evaluation.sig_test(_read_counts(args.x), _read_counts(args.y),
                                 iterations=args.iterations, seed=args.seed)
    sys.stdout.write("p\t%.4f\nobserved_diff\t%.4f\niterations\t%d\n"
                     "exhaustive\t%d\n"
                     % (result.p_value, result.observed_diff,
                        result.iterations, int(result.exhaustive)))


def _add_run(sub):
    cmd = sub.add_parser("run", help="run a full experiment from a config file")
    cmd.add_argument("--config", action="append", required=True,
                     help="flat key=value file; repeat to layer presets")


def _run_run(args):
    config = pipeline.read_config(args.config)
    result = pipeline.run_pipeline(config)
    with open(os.path.join(config.output, "summary.txt"), encoding="utf-8") as handle:
        sys.stdout.write(handle.read())
    return result


def main(argv=None):
    root = argparse.ArgumentParser(
        prog="ccgmwe",
        description="MWE collapsing and evaluation toolkit for CCG parsing")
    sub = root.add_subparsers(dest="command", required=True)
    for add in (_add_split, _add_recognize, _add_collapse, _add_train,
                _add_parse, _add_extract, _add_combine, _add_eval,
                _add_sigtest, _add_run):
        add(sub)
    args = root.parse_args(argv)
    handlers = {
        "split": _run_split,
        "recognize": _run_recognize,
        "collapse": _run_collapse,
        "train": _run_train,
        "parse": _run_parse,
        "extract-deps": _run_extract,
        "combine": _run_combine,
        "eval": _run_eval,
        "sigtest": _run_sigtest,
        "run": _run_run,
    }
    try:
        handlers[args.command](args)
    except pipeline.PipelineError as exc:
        sys.stderr.write("error %s\n" % exc)
        return 1
    except (OSError, ValueError) as exc:
        sys.stderr.write("error [%s] %s\n" % (args.command, exc))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
