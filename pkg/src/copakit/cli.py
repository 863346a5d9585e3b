"""Command line entry point wiring the modules into one pipeline.

Exit codes: 0 success, 1 failed validation or bad data, 2 usage error.
One global ``--seed`` drives every random choice; each subcommand
derives its own stream from it by name, so runs are reproducible end
to end.
"""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
from pathlib import Path

from . import augment, combine, data, prompts, rules, scoring, translit
from .errors import CopaKitError
from .seeding import derive_seed

CATALOG_ENV = "COPAKIT_CATALOG"

_SPLIT_SUFFIXES = (
    ("-train", "train"),
    ("-validation", "validation"),
    ("-val", "validation"),
    ("-test", "test"),
)


def infer_lang_split(path: str | Path) -> tuple[str, str]:
    """Language and split from a file name.

    ``<lang>-<split>.jsonl`` names win; anything else is treated as a
    catalog block id (training data).
    """
    stem = Path(path).stem
    for suffix, split in _SPLIT_SUFFIXES:
        if stem.endswith(suffix):
            return stem[: -len(suffix)], split
    return data.lang_for_id(stem), "train"


def _load(path: str) -> data.Dataset:
    lang, split = infer_lang_split(path)
    return data.load_dataset(path, lang=lang, split=split)


def _write_json(obj, path: str | None) -> None:
    text = json.dumps(obj, ensure_ascii=False, indent=2) + "\n"
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _report_validate(report: data.ValidationReport, fmt: str) -> None:
    if fmt == "json":
        _write_json(
            {
                "counts": {f"{lang}/{split}": n for (lang, split), n in report.counts.items()},
                "violations": [vars(v) for v in report.violations],
                "warnings": [vars(w) for w in report.warnings],
                "ok": report.ok,
            },
            None,
        )
        return
    for (lang, split), n in sorted(report.counts.items()):
        print(f"{lang:16} {split:12} {n:6d}")
    for v in report.violations:
        where = f" idx={v.idx}" if v.idx is not None else ""
        print(f"VIOLATION [{v.source_id}]{where} {v.field}: {v.message}")
    for w in report.warnings:
        print(f"warning [{w.source_id}] idx={w.idx} {w.field}: {w.message}")
    print("OK" if report.ok else f"{len(report.violations)} violations")


def _report_scores(report: scoring.AccuracyReport, fmt: str, output: str | None) -> None:
    obj = report.to_json_obj()
    if fmt == "json" or output:
        _write_json(obj, output)
        if output:
            print(output)
        return
    for entry in obj["languages"]:
        print(
            f"{entry['lang']:16} {entry['correct']}/{entry['total']}"
            f"  accuracy={entry['accuracy']}"
        )
    print(f"macro average: {obj['macro_average']}")


def _expected_counts(spec_text: str):
    if spec_text == "table1":
        return data.EXPECTED_COUNTS
    if spec_text == "none":
        return None
    with open(spec_text, encoding="utf-8") as handle:
        return json.load(handle)


def _cmd_validate(args) -> int:
    datasets = [_load(p) for p in args.paths]
    report = data.validate(datasets, expected=_expected_counts(args.expected))
    _report_validate(report, args.format)
    return 0 if report.ok else 1


def _cmd_transliterate(args) -> int:
    table = translit.get_table(args.table)
    dataset = _load(args.input)
    result = translit.transliterate_dataset(dataset, table)
    out = Path(args.output_dir) / f"{result.source_id}.jsonl"
    data.write_dataset(result, out)
    print(out)
    return 0


def _cmd_dialect_convert(args) -> int:
    ruleset = rules.get_ruleset(args.rules)
    if args.self_test:
        vectors = (
            rules.load_vectors(args.vectors)
            if args.vectors
            else rules.builtin_vectors(ruleset.name)
        )
        results = rules.run_vectors(ruleset, vectors)
        failed = [r for r in results if not r.ok]
        for r in results:
            status = "ok" if r.ok else f"FAIL (got {r.actual!r})"
            print(f"{r.input!r} -> {r.expected!r}: {status}")
        print(f"{len(results) - len(failed)}/{len(results)} vectors passed")
        return 0 if not failed else 1
    dataset = _load(args.input)
    converted = rules.convert_dataset(dataset, ruleset, lang=args.tag)
    out = Path(args.output_dir) / f"{converted.source_id}.jsonl"
    data.write_dataset(converted, out)
    print(out)
    return 0


def _cmd_reverse(args) -> int:
    dataset = _load(args.input)
    result = augment.reverse_dataset(dataset)
    out = Path(args.output_dir) / f"{result.source_id}.jsonl"
    data.write_dataset(result, out)
    print(out)
    return 0


def _cmd_mix(args) -> int:
    datasets = [_load(p) for p in args.inputs]
    seed = derive_seed(args.seed, "mix")
    mixed, provenance = augment.mix_crosslingual(datasets, seed, name=args.name)
    out = Path(args.output_dir) / f"{args.name}.jsonl"
    data.write_dataset(mixed, out)
    print(out)
    if args.provenance:
        sidecar = Path(args.output_dir) / f"{args.name}.provenance.json"
        _write_json({str(idx): list(provenance[idx]) for idx in sorted(provenance)}, str(sidecar))
        print(sidecar)
    return 0


def _cmd_upsample(args) -> int:
    dataset = _load(args.input)
    result = augment.upsample(dataset, args.factor)
    out = Path(args.output_dir) / f"{Path(args.input).stem}.jsonl"
    data.write_dataset(result, out)
    print(out)
    return 0


def _cmd_combine(args) -> int:
    recipe = combine.get_recipe(args.recipe)
    catalog = combine.Catalog.from_dir(args.catalog)
    result = combine.resolve(recipe, catalog)
    out = Path(args.output_dir) / f"{recipe.name}.jsonl"
    data.write_dataset(result, out)
    print(out)
    return 0


def _cmd_prompt(args) -> int:
    dataset = _load(args.input)
    pool = _load(args.pool)
    template = prompts.load_template(args.template) if args.template else None
    rendered = prompts.render_dataset(
        dataset,
        pool,
        k=args.k,
        seed=derive_seed(args.seed, "prompt"),
        template=template,
        mixed_class=args.mixed_class,
    )
    out = Path(args.output_dir) / f"{Path(args.input).stem}.prompts.jsonl"
    prompts.write_prompts(rendered, out)
    print(out)
    return 0


def _cmd_score(args) -> int:
    gold = _load(args.gold)
    if args.preds:
        predictions = scoring.load_predictions(args.preds)
    elif args.baseline == "random":
        predictions = scoring.random_baseline(gold, derive_seed(args.seed, "score"))
    else:
        predictions = scoring.overlap_baseline(gold)
    if args.predictions_out:
        scoring.write_predictions(predictions, args.predictions_out)
    report = scoring.score(gold, predictions)
    _report_scores(report, args.format, args.output)
    return 0


def _cmd_run_external(args) -> int:
    gold = _load(args.gold)
    try:
        prompts_text = Path(args.prompts).read_text(encoding="utf-8")
    except OSError as exc:
        raise CopaKitError(f"cannot read prompts {args.prompts}: {exc}") from exc
    command = shlex.split(args.predictor)
    report, predictions = scoring.run_external(command, prompts_text, gold)
    if args.predictions_out:
        scoring.write_predictions(predictions, args.predictions_out)
    _report_scores(report, args.format, args.output)
    return 0


def _cmd_generation_prompt(args) -> int:
    try:
        sentences = [
            line
            for line in Path(args.sentences).read_text(encoding="utf-8").split("\n")
            if line.strip()
        ]
    except OSError as exc:
        raise CopaKitError(f"cannot read sentences {args.sentences}: {exc}") from exc
    text = rules.emit_generation_prompt(
        args.rules, args.source_lyrics, args.target_lyrics, sentences
    )
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        print(args.output)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="copakit",
        description="Build, augment, combine, prompt, and score two-choice commonsense datasets.",
    )
    parser.add_argument(
        "--seed", type=int, default=42, help="master seed; per-command streams derive from it"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output_dir(p):
        p.add_argument("--output-dir", default=".", help="directory for output files")

    p = sub.add_parser("validate", help="check dataset files against the layout rules")
    p.add_argument("paths", nargs="+")
    p.add_argument(
        "--expected",
        default="table1",
        help="'table1' (standard sizes), 'none', or a JSON file of expected counts",
    )
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("transliterate", help="convert Cyrillic data to Latin script")
    p.add_argument("--input", required=True)
    p.add_argument("--table", required=True, help="serbian, macedonian, or a table file path")
    add_output_dir(p)
    p.set_defaults(func=_cmd_transliterate)

    p = sub.add_parser("dialect-convert", help="rewrite data with a dialect ruleset")
    p.add_argument("--input")
    p.add_argument("--rules", default="hr-ckm", help="ruleset name or file path")
    p.add_argument("--tag", default=None, help="language tag and file stem for the output")
    p.add_argument("--self-test", action="store_true", help="run the conversion vectors and exit")
    p.add_argument("--vectors", default=None, help="vector file for --self-test")
    add_output_dir(p)
    p.set_defaults(func=_cmd_dialect_convert)

    p = sub.add_parser("reverse", help="swap premises with correct choices")
    p.add_argument("--input", required=True)
    add_output_dir(p)
    p.set_defaults(func=_cmd_reverse)

    p = sub.add_parser("mix", help="blend three or more parallel datasets cross-lingually")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--name", default="mix", help="output name and language tag")
    p.add_argument("--provenance", action="store_true", help="write a language-origin sidecar")
    add_output_dir(p)
    p.set_defaults(func=_cmd_mix)

    p = sub.add_parser("upsample", help="repeat a dataset a whole number of times")
    p.add_argument("--input", required=True)
    p.add_argument("--factor", type=int, required=True)
    add_output_dir(p)
    p.set_defaults(func=_cmd_upsample)

    p = sub.add_parser("combine", help="resolve a training-mix recipe against a catalog")
    p.add_argument("--recipe", required=True, help="shipped recipe name or recipe file path")
    p.add_argument(
        "--catalog",
        default=os.environ.get(CATALOG_ENV),
        help=f"catalog directory (default: ${CATALOG_ENV})",
    )
    add_output_dir(p)
    p.set_defaults(func=_cmd_combine)

    p = sub.add_parser("prompt", help="render few-shot prompts for a dataset")
    p.add_argument("--input", required=True, help="targets to render prompts for")
    p.add_argument("--pool", required=True, help="dataset exemplars are drawn from")
    p.add_argument("--k", type=int, default=4, help="exemplars per prompt")
    p.add_argument("--template", default=None, help="custom block template file")
    p.add_argument(
        "--mixed-class",
        action="store_true",
        help="alternate cause and effect exemplars instead of matching the target",
    )
    add_output_dir(p)
    p.set_defaults(func=_cmd_prompt)

    p = sub.add_parser("score", help="accuracy of predictions or a built-in baseline")
    p.add_argument("--gold", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--preds", help="prediction JSONL file")
    group.add_argument("--baseline", choices=("random", "overlap"))
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--output", default=None, help="write the report JSON here")
    p.add_argument("--predictions-out", default=None, help="write the predictions here")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("run-external", help="pipe prompts to a predictor command and score it")
    p.add_argument("--predictor", required=True, help="predictor command line")
    p.add_argument("--prompts", required=True, help="prompt JSONL file")
    p.add_argument("--gold", required=True)
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.add_argument("--output", default=None)
    p.add_argument("--predictions-out", default=None)
    p.set_defaults(func=_cmd_run_external)

    p = sub.add_parser(
        "generation-prompt", help="render the dialect-translation request for a generative model"
    )
    p.add_argument("--rules", required=True, help="rule file to splice in")
    p.add_argument("--source-lyrics", required=True)
    p.add_argument("--target-lyrics", required=True)
    p.add_argument("--sentences", required=True, help="file with one sentence per line")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_generation_prompt)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "dialect-convert" and not args.self_test and not args.input:
        parser.error("dialect-convert needs --input unless --self-test is given")
    if args.command == "combine" and not args.catalog:
        parser.error(f"combine needs --catalog or the {CATALOG_ENV} environment variable")
    try:
        return args.func(args)
    except CopaKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
