"""Accuracy scoring, trivial baselines, and external predictors.

Accuracy is the exact fraction of correct predictions, kept as a
rational number internally; formatted output rounds to three decimals
with banker's rounding (round half to even). A macro average over
languages is the plain arithmetic mean of the per-language fractions.
"""

from __future__ import annotations

import json
import re
import subprocess
import warnings
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from .data import Dataset
from .errors import ScoringError
from .seeding import rng_for

_TOKEN_RE = re.compile(r"\w+", re.UNICODE)


def format_accuracy(value: Fraction) -> str:
    """Three decimal places, half-to-even, computed from the exact ratio."""
    dec = Decimal(value.numerator) / Decimal(value.denominator)
    return str(dec.quantize(Decimal("0.001"), rounding=ROUND_HALF_EVEN))


@dataclass(frozen=True)
class LanguageScore:
    lang: str
    correct: int
    total: int
    skipped_unlabeled: int = 0

    @property
    def accuracy(self) -> Fraction:
        if self.total == 0:
            raise ScoringError(f"no labeled instances to score for {self.lang}")
        return Fraction(self.correct, self.total)


@dataclass(frozen=True)
class AccuracyReport:
    scores: tuple[LanguageScore, ...]

    @property
    def macro_average(self) -> Fraction:
        if not self.scores:
            raise ScoringError("empty report has no macro average")
        return sum((s.accuracy for s in self.scores), Fraction(0)) / len(self.scores)

    def to_json_obj(self) -> dict:
        return {
            "languages": [
                {
                    "lang": s.lang,
                    "correct": s.correct,
                    "total": s.total,
                    "skipped_unlabeled": s.skipped_unlabeled,
                    "accuracy": format_accuracy(s.accuracy),
                }
                for s in self.scores
            ],
            "macro_average": format_accuracy(self.macro_average),
        }


def _check_coverage(gold: Dataset, predictions: Mapping[int, int]) -> None:
    gold_idx = gold.idx_set()
    pred_idx = set(predictions)
    missing = sorted(gold_idx - pred_idx)
    surplus = sorted(pred_idx - gold_idx)
    if missing or surplus:
        parts = []
        if missing:
            parts.append(f"missing predictions for idx {missing[:10]}")
        if surplus:
            parts.append(f"predictions for unknown idx {surplus[:10]}")
        raise ScoringError(f"{gold.lang}: " + "; ".join(parts))


def score(gold: Dataset, predictions: Mapping[int, int]) -> AccuracyReport:
    """Exact accuracy of predictions against one gold dataset.

    Predictions must cover exactly the gold idx set. Gold records
    without a label (unlabeled test data) are excluded from the count
    with a warning.
    """
    _check_coverage(gold, predictions)
    correct = 0
    total = 0
    skipped = 0
    for inst in gold:
        if inst.label is None:
            skipped += 1
            continue
        total += 1
        if predictions[inst.idx] == inst.label:
            correct += 1
    if skipped:
        warnings.warn(
            f"{gold.lang}: skipped {skipped} unlabeled instances", stacklevel=2
        )
    return AccuracyReport(
        scores=(
            LanguageScore(
                lang=gold.lang, correct=correct, total=total, skipped_unlabeled=skipped
            ),
        )
    )


def score_pairs(pairs: Sequence[tuple[Dataset, Mapping[int, int]]]) -> AccuracyReport:
    """Score several languages together; macro average spans them all."""
    scores: list[LanguageScore] = []
    for gold, predictions in pairs:
        scores.extend(score(gold, predictions).scores)
    return AccuracyReport(scores=tuple(scores))


def random_baseline(gold: Dataset, seed: int) -> dict[int, int]:
    """A fair coin per instance, keyed by (seed, idx)."""
    return {inst.idx: rng_for(seed, f"coin:{inst.idx}").getrandbits(1) for inst in gold}


def overlap_baseline(gold: Dataset) -> dict[int, int]:
    """Pick the choice sharing more case-folded word tokens with the
    premise; ties go to choice1."""
    out: dict[int, int] = {}
    for inst in gold:
        premise = set(_TOKEN_RE.findall(inst.premise.casefold()))
        overlap1 = len(premise & set(_TOKEN_RE.findall(inst.choice1.casefold())))
        overlap2 = len(premise & set(_TOKEN_RE.findall(inst.choice2.casefold())))
        out[inst.idx] = 1 if overlap2 > overlap1 else 0
    return out


def parse_predictions(text: str, where: str = "predictions") -> dict[int, int]:
    """Parse prediction JSONL: one {"idx": ..., "predicted": ...} per line."""
    out: dict[int, int] = {}
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ScoringError(f"{where}:{lineno}: invalid JSON: {exc.msg}") from exc
        if not isinstance(record, dict):
            raise ScoringError(f"{where}:{lineno}: prediction is not an object")
        idx = record.get("idx")
        predicted = record.get("predicted")
        if isinstance(idx, bool) or not isinstance(idx, int):
            raise ScoringError(f"{where}:{lineno}: idx must be an integer")
        if isinstance(predicted, bool) or predicted not in (0, 1):
            raise ScoringError(f"{where}:{lineno}: predicted must be 0 or 1")
        if idx in out:
            raise ScoringError(f"{where}:{lineno}: duplicate prediction for idx {idx}")
        out[idx] = predicted
    return out


def load_predictions(path: str | Path) -> dict[int, int]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScoringError(f"cannot read predictions {path}: {exc}") from exc
    return parse_predictions(text, where=str(path))


def write_predictions(predictions: Mapping[int, int], path: str | Path) -> None:
    body = "".join(
        json.dumps({"idx": idx, "predicted": predictions[idx]}) + "\n"
        for idx in predictions
    )
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(body)


def run_external(
    command: Sequence[str],
    prompts_jsonl: str,
    gold: Dataset,
) -> tuple[AccuracyReport, dict[int, int]]:
    """Run a predictor process and score its output.

    The predictor receives prompt JSONL on stdin and must write one
    {"idx": ..., "predicted": 0 or 1} JSON object per line to stdout,
    covering exactly the gold idx set.

    Raises:
        ScoringError: nonzero exit status (the status and stderr are
            reported), malformed output (with its line number), or
            incomplete coverage.
    """
    try:
        proc = subprocess.run(
            list(command),
            input=prompts_jsonl.encode("utf-8"),
            capture_output=True,
            check=False,
        )
    except OSError as exc:
        raise ScoringError(f"cannot run predictor {command!r}: {exc}") from exc
    if proc.returncode != 0:
        stderr = proc.stderr.decode("utf-8", errors="replace").strip()
        raise ScoringError(
            f"predictor exited with status {proc.returncode}"
            + (f": {stderr}" if stderr else "")
        )
    predictions = parse_predictions(
        proc.stdout.decode("utf-8"), where="predictor output"
    )
    return score(gold, predictions), predictions
