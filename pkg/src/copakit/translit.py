"""Cyrillic to Latin transliteration with digraph-aware casing.

Tables are data: one ``source<TAB>target`` pair per line, ``#`` for
comments. Shipped tables cover the Serbian and Macedonian alphabets in
lowercase; uppercase input is handled by the engine. An uppercase
letter with a digraph target becomes title case (``Lj``) unless the
next source letter is itself uppercase, in which case the whole target
is uppercased (``LJ``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ._resources import resource_text
from .data import CopaInstance, Dataset, transliterated_id
from .errors import TableError

# Unicode blocks that count as Cyrillic. Membership here is the only
# script test the engine performs.
_CYRILLIC_RANGES = (
    (0x0400, 0x04FF),
    (0x0500, 0x052F),
    (0x1C80, 0x1C8F),
    (0x2DE0, 0x2DFF),
    (0xA640, 0xA69F),
    (0x1E030, 0x1E08F),
)

BUILTIN_TABLES = ("serbian", "macedonian")


def is_cyrillic(char: str) -> bool:
    code = ord(char)
    return any(lo <= code <= hi for lo, hi in _CYRILLIC_RANGES)


def has_cyrillic(text: str) -> bool:
    return any(is_cyrillic(c) for c in text)


@dataclass(frozen=True)
class TransliterationTable:
    """An ordered set of source/target pairs plus derived lookups."""

    name: str
    entries: tuple[tuple[str, str], ...]
    _by_source: dict = field(init=False, repr=False, compare=False, default_factory=dict)
    _max_len: int = field(init=False, repr=False, compare=False, default=1)

    def __post_init__(self):
        lookup: dict[str, str] = {}
        max_len = 1
        for source, target in self.entries:
            if not (1 <= len(source) <= 2) or not all(is_cyrillic(c) for c in source):
                raise TableError(
                    f"table {self.name}: source {source!r} must be 1-2 Cyrillic codepoints"
                )
            if not (1 <= len(target) <= 2) or has_cyrillic(target):
                raise TableError(
                    f"table {self.name}: target {target!r} must be 1-2 non-Cyrillic codepoints"
                )
            if source in lookup:
                raise TableError(f"table {self.name}: duplicate source {source!r}")
            lookup[source] = target
            max_len = max(max_len, len(source))
        object.__setattr__(self, "_by_source", lookup)
        object.__setattr__(self, "_max_len", max_len)

    def alphabet(self) -> frozenset[str]:
        """Declared sources plus their uppercase counterparts."""
        letters = set()
        for source, _ in self.entries:
            letters.add(source)
            letters.add(source.upper())
        return frozenset(letters)


def parse_table(text: str, name: str) -> TransliterationTable:
    entries: list[tuple[str, str]] = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        stripped = line.rstrip("\r")
        if not stripped.strip() or stripped.lstrip().startswith("#"):
            continue
        parts = stripped.split("\t")
        if len(parts) != 2:
            raise TableError(f"table {name}:{lineno}: expected source<TAB>target")
        entries.append((parts[0], parts[1]))
    if not entries:
        raise TableError(f"table {name}: no entries")
    # Longer sources first so two-codepoint sources win over prefixes.
    entries.sort(key=lambda pair: -len(pair[0]))
    return TransliterationTable(name=name, entries=tuple(entries))


def load_table(path: str | Path) -> TransliterationTable:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TableError(f"cannot read table {path}: {exc}") from exc
    return parse_table(text, name=path.stem)


def builtin_table(name: str) -> TransliterationTable:
    if name not in BUILTIN_TABLES:
        raise TableError(f"unknown table {name!r}: expected one of {BUILTIN_TABLES}")
    return parse_table(resource_text(f"tables/{name}.tsv"), name=name)


def get_table(name_or_path: str) -> TransliterationTable:
    """Resolve a built-in table name, else treat the value as a path."""
    if name_or_path in BUILTIN_TABLES:
        return builtin_table(name_or_path)
    return load_table(name_or_path)


def _cased_target(target: str, source: str, following: str | None) -> str:
    if source.islower() or not source.isupper():
        return target
    if len(target) == 1:
        return target.upper()
    # Digraph target after an uppercase source: full caps only when the
    # next source letter is uppercase too, title case otherwise.
    if following is not None and following.isupper():
        return target.upper()
    return target[0].upper() + target[1:]


def transliterate_text(text: str, table: TransliterationTable) -> str:
    """Replace every mapped Cyrillic grapheme, pass the rest through."""
    out: list[str] = []
    i = 0
    n = len(text)
    while i < n:
        matched = False
        for width in range(table._max_len, 0, -1):
            chunk = text[i : i + width]
            if len(chunk) < width:
                continue
            target = table._by_source.get(chunk)
            if target is None and chunk != chunk.lower():
                lowered = chunk.lower()
                if len(lowered) == len(chunk):
                    target = table._by_source.get(lowered)
                    if target is not None:
                        target = _cased_target(target, chunk, text[i + width] if i + width < n else None)
            if target is not None:
                out.append(target)
                i += width
                matched = True
                break
        if not matched:
            out.append(text[i])
            i += 1
    return "".join(out)


def transliterate_instance(inst: CopaInstance, table: TransliterationTable) -> CopaInstance:
    return CopaInstance(
        premise=transliterate_text(inst.premise, table),
        choice1=transliterate_text(inst.choice1, table),
        choice2=transliterate_text(inst.choice2, table),
        question=inst.question,
        label=inst.label,
        idx=inst.idx,
        extra=dict(inst.extra),
    )


def transliterate_dataset(dataset: Dataset, table: TransliterationTable) -> Dataset:
    """Transliterate all text fields; questions, labels, idx untouched.

    The result carries the derived ``-trans`` language tag and a
    catalog id following the same convention.
    """
    new_lang = dataset.lang + "-trans"
    return Dataset(
        lang=new_lang,
        split=dataset.split,
        source_id=transliterated_id(dataset.source_id, new_lang),
        instances=tuple(transliterate_instance(inst, table) for inst in dataset),
    )
