"""Shared fixture builders for synthetic parallel datasets."""

from __future__ import annotations

import pytest

from copakit import augment
from copakit.combine import Catalog
from copakit.data import CopaInstance, Dataset

# Language tags of the parallel training blocks, keyed by catalog id.
TRAIN_SPACE = {
    "en-train": "en",
    "hr-train": "hr",
    "mk-train": "mk",
    "sl-train": "sl",
    "sl-cer-train": "sl-cer",
    "sr-train": "sr",
    "sr-tor-train": "sr-tor",
    "mk-trans": "mk-trans",
    "sr-trans": "sr-trans",
    "sr-tor-trans": "sr-tor-trans",
    "hr-ckm-claude": "hr-ckm",
}

# Generated English data and its machine translations, a separate
# aligned space.
SYNTH_SPACE = {
    "en-gpt4": "en",
    "hr-nllb": "hr",
    "mk-nllb": "mk",
    "sl-nllb": "sl",
    "sr-nllb": "sr",
    "mk-nllb-trans": "mk-trans",
    "sr-nllb-trans": "sr-trans",
}


def make_instance(
    idx: int,
    question: str = "cause",
    label: int = 0,
    prefix: str = "x",
    **overrides,
) -> CopaInstance:
    fields = dict(
        premise=f"{prefix} premise {idx}.",
        choice1=f"{prefix} first choice {idx}.",
        choice2=f"{prefix} second choice {idx}.",
        question=question,
        label=label,
        idx=idx,
    )
    fields.update(overrides)
    return CopaInstance(**fields)


def make_dataset(
    lang: str,
    n: int,
    split: str = "train",
    source_id: str | None = None,
    start: int = 0,
    prefix: str | None = None,
) -> Dataset:
    instances = tuple(
        make_instance(
            idx=start + i,
            question="cause" if i % 2 == 0 else "effect",
            label=(i // 2) % 2,
            prefix=prefix if prefix is not None else lang,
        )
        for i in range(n)
    )
    return Dataset(
        lang=lang,
        split=split,
        source_id=source_id if source_id is not None else f"{lang}-{split}",
        instances=instances,
    )


def build_catalog(n: int) -> Catalog:
    """Every block id the shipped recipes mention, sized n each.

    Reverse blocks are produced by the real reversal, so they stay
    aligned with each other the same way real derived data would.
    """
    blocks: dict[str, Dataset] = {}
    for block_id, lang in TRAIN_SPACE.items():
        blocks[block_id] = make_dataset(lang, n, source_id=block_id)
    for block_id in list(TRAIN_SPACE):
        reverse = augment.reverse_dataset(blocks[block_id])
        blocks[reverse.source_id] = reverse
    for block_id, lang in SYNTH_SPACE.items():
        blocks[block_id] = make_dataset(lang, n, source_id=block_id)
    return Catalog(blocks=blocks)


@pytest.fixture
def small_catalog() -> Catalog:
    return build_catalog(6)
