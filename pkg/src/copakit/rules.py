"""Ordered rewrite rules for dialect conversion.

A ruleset is a data file of ``phase<TAB>pattern<TAB>replacement`` lines
applied word by word in four fixed phases:

``lexicon``
    whole-word swap; at most one fires per word, and a hit suppresses
    the suffix and final phases for that word.
``suffix``
    word-ending swap, first matching rule only.
``final``
    trailing-letter swap, first matching rule only.
``substring``
    applies anywhere in the word, leftmost first, repeatedly until no
    pattern remains.

Matching is case insensitive by default and the case of a rewritten
word's first letter is preserved. Words are maximal runs of letters,
so hyphens and any punctuation act as boundaries.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ._resources import resource_text
from .data import CopaInstance, Dataset
from .errors import RulesetError

PHASES = ("lexicon", "suffix", "final", "substring")
BUILTIN_RULESETS = ("hr-ckm", "hr-ckm-no-final-t")

_WORD_RE = re.compile(r"[^\W\d_]+", re.UNICODE)

# A substring phase that keeps matching past this many rewrites on one
# word cannot terminate (shipped rules converge in one or two steps).
_SUBSTRING_STEP_LIMIT = 1000


def _lower(text: str) -> str:
    # Position-stable lowering: skip the rare codepoints whose
    # lowercase form changes length, so match offsets stay aligned.
    return "".join(c.lower() if len(c.lower()) == 1 else c for c in text)


@dataclass(frozen=True)
class Rule:
    kind: str
    pattern: str
    replacement: str
    case_insensitive: bool = True

    def __post_init__(self):
        if self.kind not in PHASES:
            raise RulesetError(f"unknown phase {self.kind!r}: expected one of {PHASES}")
        if not self.pattern:
            raise RulesetError("rule pattern is empty")
        if self.kind == "lexicon" and any(c.isspace() for c in self.pattern):
            raise RulesetError(f"lexicon pattern {self.pattern!r} contains whitespace")


@dataclass(frozen=True)
class RuleSet:
    name: str
    rules: tuple[Rule, ...]

    def phase(self, kind: str) -> tuple[Rule, ...]:
        return tuple(r for r in self.rules if r.kind == kind)


@dataclass(frozen=True)
class TraceStep:
    """One rule application on one word."""

    kind: str
    pattern: str
    replacement: str
    before: str
    after: str


@dataclass(frozen=True)
class WordTrace:
    token_index: int
    original: str
    result: str
    steps: tuple[TraceStep, ...]


@dataclass(frozen=True)
class RuleTrace:
    """Which rule touched which word, in application order.

    ``replay`` re-applies the recorded rewrites to an input and must
    reproduce the engine's output exactly.
    """

    words: tuple[WordTrace, ...]

    def replay(self, text: str) -> str:
        by_index = {w.token_index: w for w in self.words}
        out: list[str] = []
        last = 0
        for token_index, match in enumerate(_WORD_RE.finditer(text)):
            out.append(text[last : match.start()])
            word = match.group(0)
            entry = by_index.get(token_index)
            if entry is None:
                out.append(word)
            else:
                current = word
                for step in entry.steps:
                    if current != step.before:
                        raise RulesetError(
                            f"trace does not fit input: expected {step.before!r}, "
                            f"found {current!r}"
                        )
                    current = step.after
                out.append(current)
            last = match.end()
        out.append(text[last:])
        return "".join(out)


def parse_ruleset(text: str, name: str) -> RuleSet:
    """Parse rule lines, rejecting malformed or duplicate entries."""
    rules: list[Rule] = []
    lexicon_seen: dict[str, int] = {}
    phase_names = {"lexicon": "lexicon", "suffix": "suffix", "final": "final", "substring": "substring"}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise RulesetError(
                f"ruleset {name}:{lineno}: expected phase<TAB>pattern<TAB>replacement"
            )
        phase, pattern, replacement = parts
        kind = phase_names.get(phase)
        if kind is None:
            raise RulesetError(
                f"ruleset {name}:{lineno}: unknown phase {phase!r}"
            )
        try:
            rule = Rule(kind=kind, pattern=pattern, replacement=replacement)
        except RulesetError as exc:
            raise RulesetError(f"ruleset {name}:{lineno}: {exc}") from exc
        if kind == "lexicon":
            key = _lower(pattern)
            if key in lexicon_seen:
                raise RulesetError(
                    f"ruleset {name}:{lineno}: duplicate lexicon pattern {pattern!r} "
                    f"(first seen on line {lexicon_seen[key]})"
                )
            lexicon_seen[key] = lineno
        rules.append(rule)
    return RuleSet(name=name, rules=tuple(rules))


def load_ruleset(path: str | Path) -> RuleSet:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise RulesetError(f"cannot read ruleset {path}: {exc}") from exc
    return parse_ruleset(text, name=path.stem)


def builtin_ruleset(name: str) -> RuleSet:
    if name not in BUILTIN_RULESETS:
        raise RulesetError(f"unknown ruleset {name!r}: expected one of {BUILTIN_RULESETS}")
    return parse_ruleset(resource_text(f"rulesets/{name}.rules"), name=name)


def get_ruleset(name_or_path: str) -> RuleSet:
    if name_or_path in BUILTIN_RULESETS:
        return builtin_ruleset(name_or_path)
    return load_ruleset(name_or_path)


def _matches_whole(word: str, rule: Rule) -> bool:
    if rule.case_insensitive:
        return _lower(word) == _lower(rule.pattern)
    return word == rule.pattern


def _matches_end(word: str, rule: Rule) -> bool:
    # Proper suffix only: whole-word rewrites belong to the lexicon.
    if len(word) <= len(rule.pattern):
        return False
    if rule.case_insensitive:
        return _lower(word).endswith(_lower(rule.pattern))
    return word.endswith(rule.pattern)


def _find(word: str, rule: Rule) -> int:
    if rule.case_insensitive:
        return _lower(word).find(_lower(rule.pattern))
    return word.find(rule.pattern)


def _rewrite_word(word: str, ruleset: RuleSet) -> tuple[str, list[TraceStep]]:
    steps: list[TraceStep] = []
    first_upper = word[:1].isupper()

    def fix_caps(text: str) -> str:
        if first_upper and text and text[:1].islower():
            return text[0].upper() + text[1:]
        return text

    def apply(rule: Rule, after: str) -> str:
        after = fix_caps(after)
        steps.append(
            TraceStep(rule.kind, rule.pattern, rule.replacement, before=current, after=after)
        )
        return after

    current = word
    lexicon_hit = False
    for rule in ruleset.phase("lexicon"):
        if _matches_whole(current, rule):
            current = apply(rule, rule.replacement)
            lexicon_hit = True
            break

    if not lexicon_hit:
        for phase in ("suffix", "final"):
            for rule in ruleset.phase(phase):
                if _matches_end(current, rule):
                    current = apply(rule, current[: -len(rule.pattern)] + rule.replacement)
                    break

    substring_rules = ruleset.phase("substring")
    for _ in range(_SUBSTRING_STEP_LIMIT):
        best: tuple[int, int, Rule] | None = None
        for order, rule in enumerate(substring_rules):
            pos = _find(current, rule)
            if pos >= 0 and (best is None or (pos, order) < best[:2]):
                best = (pos, order, rule)
        if best is None:
            break
        pos, _, rule = best
        current = apply(rule, current[:pos] + rule.replacement + current[pos + len(rule.pattern) :])
    else:
        raise RulesetError(
            f"substring rules do not terminate on {word!r} in ruleset {ruleset.name}"
        )

    return current, steps


def apply_rules_traced(text: str, ruleset: RuleSet) -> tuple[str, RuleTrace]:
    """Rewrite a text and record every rule application."""
    out: list[str] = []
    words: list[WordTrace] = []
    last = 0
    for token_index, match in enumerate(_WORD_RE.finditer(text)):
        out.append(text[last : match.start()])
        word = match.group(0)
        rewritten, steps = _rewrite_word(word, ruleset)
        if steps:
            words.append(
                WordTrace(
                    token_index=token_index,
                    original=word,
                    result=rewritten,
                    steps=tuple(steps),
                )
            )
        out.append(rewritten)
        last = match.end()
    out.append(text[last:])
    return "".join(out), RuleTrace(words=tuple(words))


def apply_rules(text: str, ruleset: RuleSet) -> str:
    return apply_rules_traced(text, ruleset)[0]


def convert_dataset(dataset: Dataset, ruleset: RuleSet, lang: str | None = None) -> Dataset:
    """Rewrite all text fields; question, label, and idx are untouched.

    The derived language tag defaults to the ruleset name plus
    ``-rules``, marking the data as mechanically converted.
    """
    tag = lang if lang is not None else f"{ruleset.name}-rules"
    return Dataset(
        lang=tag,
        split=dataset.split,
        source_id=tag,
        instances=tuple(
            CopaInstance(
                premise=apply_rules(inst.premise, ruleset),
                choice1=apply_rules(inst.choice1, ruleset),
                choice2=apply_rules(inst.choice2, ruleset),
                question=inst.question,
                label=inst.label,
                idx=inst.idx,
                extra=dict(inst.extra),
            )
            for inst in dataset
        ),
    )


@dataclass(frozen=True)
class VectorResult:
    input: str
    expected: str
    actual: str

    @property
    def ok(self) -> bool:
        return self.actual == self.expected


def parse_vectors(text: str, name: str) -> tuple[tuple[str, str], ...]:
    """Parse ``input<TAB>expected`` self-test lines."""
    pairs: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise RulesetError(f"vectors {name}:{lineno}: expected input<TAB>expected")
        pairs.append((parts[0], parts[1]))
    return tuple(pairs)


def load_vectors(path: str | Path) -> tuple[tuple[str, str], ...]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise RulesetError(f"cannot read vectors {path}: {exc}") from exc
    return parse_vectors(text, name=path.stem)


def builtin_vectors(name: str) -> tuple[tuple[str, str], ...]:
    if name not in BUILTIN_RULESETS:
        raise RulesetError(f"no shipped vectors for {name!r}")
    return parse_vectors(resource_text(f"vectors/{name}-examples.tsv"), name=name)


def run_vectors(ruleset: RuleSet, vectors: Iterable[tuple[str, str]]) -> list[VectorResult]:
    """Run conversion vectors; used by the command line self test."""
    return [
        VectorResult(input=src, expected=expected, actual=apply_rules(src, ruleset))
        for src, expected in vectors
    ]


def emit_generation_prompt(
    rules_path: str | Path,
    source_lyrics_path: str | Path,
    target_lyrics_path: str | Path,
    sentences: Sequence[str],
) -> str:
    """Render the dialect-translation request sent to a generative model.

    The rule file and the two parallel lyric files are spliced in whole,
    followed by the sentences to translate, one per line.
    """

    def read(path: str | Path) -> str:
        try:
            return Path(path).read_text(encoding="utf-8").rstrip("\n")
        except OSError as exc:
            raise RulesetError(f"cannot read {path}: {exc}") from exc

    template = resource_text("templates/generation_prompt.txt")
    return template.format(
        rules=read(rules_path),
        source_lyrics=read(source_lyrics_path),
        target_lyrics=read(target_lyrics_path),
        sentences="\n".join(sentences),
    )
