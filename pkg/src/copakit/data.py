"""Instance model, JSONL serialization, and layout validation.

A choice-of-plausible-alternatives instance is a premise, two candidate
continuations, a question direction (``cause`` or ``effect``), a gold
label picking the correct candidate, and a corpus-unique ``idx``. Files
carry one JSON object per line, UTF-8, LF endings. Serialization is
canonical: a fixed key order, label as a JSON number, and any extra
keys preserved verbatim after the canonical ones, so writing a loaded
file back reproduces it byte for byte.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import DataError

QUESTIONS = ("cause", "effect")
SPLITS = ("train", "validation", "test")
CANONICAL_KEYS = ("premise", "choice1", "choice2", "question", "label", "idx")

#: Dataset identifier suffixes, one per provenance kind.
ID_KINDS = ("train", "trans", "claude", "gpt4", "reverse", "nllb")

#: Language tags with fixed expected split sizes. Derived tags
#: (rule-converted output, cross-lingual mixes, recipe outputs) are
#: open-ended and carry no expectations.
EXPECTED_COUNTS: dict[str, dict[str, int]] = {
    "en": {"train": 400, "validation": 100},
    "sl": {"train": 400, "validation": 100},
    "sl-cer": {"train": 400, "validation": 100, "test": 500},
    "hr": {"train": 400, "validation": 100},
    "hr-ckm": {"test": 500},
    "sr": {"train": 400, "validation": 100},
    "sr-trans": {"train": 400, "validation": 100},
    "sr-tor": {"train": 400, "validation": 100},
    "sr-tor-trans": {"train": 400, "validation": 100, "test": 500},
    "mk": {"train": 400, "validation": 100},
    "mk-trans": {"train": 400, "validation": 100},
}


@dataclass(frozen=True)
class CopaInstance:
    """One premise/two-choice instance.

    ``label`` is ``None`` only for unlabeled test records. ``extra``
    holds any non-canonical keys found in the source JSON, in their
    original order, and is written back untouched.
    """

    premise: str
    choice1: str
    choice2: str
    question: str
    label: int | None
    idx: int
    extra: dict = field(default_factory=dict)

    def correct_choice(self) -> str:
        if self.label == 0:
            return self.choice1
        if self.label == 1:
            return self.choice2
        raise DataError(f"instance idx={self.idx} has no gold label")

    def wrong_choice(self) -> str:
        if self.label == 0:
            return self.choice2
        if self.label == 1:
            return self.choice1
        raise DataError(f"instance idx={self.idx} has no gold label")


@dataclass(frozen=True)
class Dataset:
    """An ordered collection of instances with provenance metadata.

    ``lines`` maps instance positions to source file line numbers when
    the dataset came from disk; it is diagnostic only and excluded
    from equality.
    """

    lang: str
    split: str
    source_id: str
    instances: tuple[CopaInstance, ...]
    lines: tuple[int, ...] | None = field(default=None, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    def by_idx(self) -> dict[int, CopaInstance]:
        return {inst.idx: inst for inst in self.instances}

    def idx_set(self) -> frozenset[int]:
        return frozenset(inst.idx for inst in self.instances)

    def line_of(self, position: int) -> int:
        """1-based source line for an instance position, best effort."""
        if self.lines is not None and position < len(self.lines):
            return self.lines[position]
        return position + 1


@dataclass(frozen=True)
class DatasetId:
    """Structured form of a catalog identifier like ``sr-tor-trans``.

    The kind is the final dash-separated token; everything before it is
    the base. Identifiers compose, so the transliteration of ``sr-nllb``
    is ``sr-nllb-trans`` with base ``sr-nllb`` and kind ``trans``.
    """

    base: str
    kind: str

    def __str__(self) -> str:
        return f"{self.base}-{self.kind}"

    @classmethod
    def parse(cls, text: str) -> "DatasetId":
        base, sep, kind = text.rpartition("-")
        if not sep or not base or kind not in ID_KINDS:
            raise DataError(
                f"malformed dataset id {text!r}: expected <base>-<kind> "
                f"with kind one of {', '.join(ID_KINDS)}"
            )
        return cls(base=base, kind=kind)


def lang_for_id(dataset_id: str) -> str:
    """Language tag implied by a catalog identifier.

    Provenance tokens are dropped; ``trans`` is kept because the
    transliterated variants are language tags in their own right.
    Examples: ``en-gpt4`` is ``en``, ``hr-ckm-claude`` is ``hr-ckm``,
    ``mk-nllb-trans`` is ``mk-trans``.
    """
    dropped = {"train", "claude", "gpt4", "nllb", "reverse"}
    parts = [p for p in dataset_id.split("-") if p not in dropped]
    return "-".join(parts) or dataset_id


def reversed_id(source_id: str) -> str:
    """Catalog id for the reverse-augmented form of a block."""
    if source_id.endswith("-train"):
        return source_id[: -len("-train")] + "-reverse"
    return source_id + "-reverse"


def transliterated_id(source_id: str, new_lang: str) -> str:
    """Catalog id for the transliterated form of a block.

    Plain training blocks adopt the derived language tag itself
    (``sr-train`` becomes ``sr-trans``); anything else appends
    ``-trans`` (``mk-nllb`` becomes ``mk-nllb-trans``).
    """
    if source_id.endswith("-train"):
        return new_lang
    return source_id + "-trans"


def _check_text(value, key: str, where: str) -> str:
    if not isinstance(value, str):
        raise DataError(f"{where}: {key} must be a string")
    if not value.strip():
        raise DataError(f"{where}: {key} is empty")
    return value


def parse_instance(record: Mapping, *, allow_missing_label: bool = False) -> CopaInstance:
    """Build an instance from a decoded JSON object, validating fields.

    Args:
        record: decoded JSON mapping.
        allow_missing_label: accept a record without ``label``; used for
            unlabeled test data only.

    Raises:
        DataError: naming the offending field and, when available, the
            record's idx.
    """
    if not isinstance(record, Mapping):
        raise DataError("record is not a JSON object")
    where = f"record idx={record.get('idx', '?')}"

    idx = record.get("idx")
    if isinstance(idx, bool) or not isinstance(idx, int) or idx < 0:
        raise DataError(f"{where}: idx must be a non-negative integer")

    premise = _check_text(record.get("premise"), "premise", where)
    choice1 = _check_text(record.get("choice1"), "choice1", where)
    choice2 = _check_text(record.get("choice2"), "choice2", where)

    question = record.get("question")
    if question not in QUESTIONS:
        raise DataError(f"{where}: question must be one of {QUESTIONS}")

    if "label" in record:
        label = record["label"]
        if isinstance(label, bool) or label not in (0, 1):
            raise DataError(f"{where}: label must be the number 0 or 1")
    elif allow_missing_label:
        label = None
    else:
        raise DataError(f"{where}: label is missing")

    extra = {k: record[k] for k in record if k not in CANONICAL_KEYS}
    return CopaInstance(
        premise=premise,
        choice1=choice1,
        choice2=choice2,
        question=question,
        label=label,
        idx=idx,
        extra=extra,
    )


def instance_to_record(inst: CopaInstance) -> dict:
    """Canonically ordered plain-dict form of an instance."""
    record: dict = {
        "premise": inst.premise,
        "choice1": inst.choice1,
        "choice2": inst.choice2,
        "question": inst.question,
    }
    if inst.label is not None:
        record["label"] = inst.label
    record["idx"] = inst.idx
    record.update(inst.extra)
    return record


def instance_to_json(inst: CopaInstance) -> str:
    return json.dumps(instance_to_record(inst), ensure_ascii=False)


def load_dataset(
    path: str | Path,
    lang: str,
    split: str,
    source_id: str | None = None,
) -> Dataset:
    """Read a JSONL file into a dataset.

    Blank lines are skipped. No text normalization is applied; bytes on
    disk survive a load/write round trip unchanged. Records without a
    ``label`` are accepted only when ``split`` is ``test``.

    Raises:
        DataError: unreadable file, or a malformed line (the message
            carries the file path and 1-based line number).
    """
    path = Path(path)
    if split not in SPLITS:
        raise DataError(f"unknown split {split!r}: expected one of {SPLITS}")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    instances: list[CopaInstance] = []
    lines: list[int] = []
    allow_missing = split == "test"
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{lineno}: invalid JSON: {exc.msg}") from exc
        try:
            instances.append(parse_instance(record, allow_missing_label=allow_missing))
        except DataError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from exc
        lines.append(lineno)

    return Dataset(
        lang=lang,
        split=split,
        source_id=source_id if source_id is not None else path.stem,
        instances=tuple(instances),
        lines=tuple(lines),
    )


def write_dataset(dataset: Dataset, path: str | Path) -> None:
    """Write a dataset as canonical JSONL with LF line endings."""
    path = Path(path)
    body = "".join(instance_to_json(inst) + "\n" for inst in dataset)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(body)
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc


@dataclass(frozen=True)
class Finding:
    """One validation finding, tied to a dataset and usually an idx."""

    source_id: str
    field: str
    idx: int | None
    message: str


@dataclass
class ValidationReport:
    counts: dict[tuple[str, str], int] = field(default_factory=dict)
    violations: list[Finding] = field(default_factory=list)
    warnings: list[Finding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _validate_instance(ds: Dataset, pos: int, inst: CopaInstance, report: ValidationReport) -> None:
    def violation(fieldname: str, message: str) -> None:
        report.violations.append(Finding(ds.source_id, fieldname, inst.idx, message))

    for key in ("premise", "choice1", "choice2"):
        value = getattr(inst, key)
        if not isinstance(value, str) or not value.strip():
            violation(key, f"{key} is empty")
        elif unicodedata.normalize("NFC", value) != value:
            report.warnings.append(
                Finding(ds.source_id, key, inst.idx, f"{key} is not NFC-normalized")
            )
    if inst.question not in QUESTIONS:
        violation("question", f"question {inst.question!r} not in {QUESTIONS}")
    if inst.label is None:
        if ds.split != "test":
            violation("label", "label missing outside the test split")
    elif isinstance(inst.label, bool) or inst.label not in (0, 1):
        violation("label", f"label {inst.label!r} is not 0 or 1")
    if isinstance(inst.idx, bool) or not isinstance(inst.idx, int) or inst.idx < 0:
        violation("idx", f"idx {inst.idx!r} is not a non-negative integer")


def validate(
    datasets: Iterable[Dataset],
    expected: Mapping[str, Mapping[str, int]] | None = EXPECTED_COUNTS,
) -> ValidationReport:
    """Check datasets against the type invariants and expected sizes.

    Args:
        datasets: datasets to check together.
        expected: per-language per-split size expectations. Defaults to
            the standard shared-task layout; pass ``None`` to skip size
            checking entirely.

    Returns:
        A report with per-dataset counts, violations (empty iff every
        invariant holds), and warnings (normalization differences that
        do not make the data invalid).
    """
    report = ValidationReport()
    for ds in datasets:
        report.counts[(ds.lang, ds.split)] = len(ds)
        seen: dict[int, int] = {}
        for pos, inst in enumerate(ds):
            _validate_instance(ds, pos, inst, report)
            if inst.idx in seen:
                report.violations.append(
                    Finding(
                        ds.source_id,
                        "idx",
                        inst.idx,
                        f"duplicate idx {inst.idx}: lines "
                        f"{ds.line_of(seen[inst.idx])} and {ds.line_of(pos)}",
                    )
                )
            else:
                seen[inst.idx] = pos
        if expected is not None:
            want = expected.get(ds.lang, {}).get(ds.split)
            if want is not None and len(ds) != want:
                report.violations.append(
                    Finding(
                        ds.source_id,
                        "count",
                        None,
                        f"{ds.lang}/{ds.split} has {len(ds)} instances, expected {want}",
                    )
                )
    return report
