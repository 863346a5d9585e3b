"""Dataset augmentation: reversal, cross-lingual mixing, upsampling.

Reversal turns the correct choice into the premise and keeps the old
premise as the correct answer, flipping cause and effect. Mixing draws
each text field of an instance from a different language of a parallel
corpus. Upsampling repeats a dataset whole. All three are pure
functions of their inputs (and a seed where one applies).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .data import CopaInstance, Dataset, reversed_id
from .errors import AlignmentError, AugmentError
from .seeding import rng_for

_FLIP = {"cause": "effect", "effect": "cause"}


def reverse_instance(inst: CopaInstance, new_idx: int) -> CopaInstance:
    """Swap the premise with the correct choice and flip the question.

    The wrong choice stays in place and the label does not move, so the
    correct answer sits in the same slot as before.
    """
    if inst.label is None:
        raise AugmentError(f"cannot reverse unlabeled instance idx={inst.idx}")
    if inst.label == 0:
        choice1, choice2 = inst.premise, inst.choice2
        new_premise = inst.choice1
    else:
        choice1, choice2 = inst.choice1, inst.premise
        new_premise = inst.choice2
    return CopaInstance(
        premise=new_premise,
        choice1=choice1,
        choice2=choice2,
        question=_FLIP[inst.question],
        label=inst.label,
        idx=new_idx,
        extra=dict(inst.extra),
    )


def reverse_dataset(dataset: Dataset) -> Dataset:
    """Reverse every instance, assigning fresh idx values.

    New idx values start one past the largest original idx, in dataset
    order, so a reversed block can sit next to its source without
    collisions.
    """
    base = max((inst.idx for inst in dataset), default=-1) + 1
    return Dataset(
        lang=dataset.lang,
        split=dataset.split,
        source_id=reversed_id(dataset.source_id),
        instances=tuple(
            reverse_instance(inst, base + pos) for pos, inst in enumerate(dataset)
        ),
    )


@dataclass(frozen=True)
class AlignedCorpus:
    """Parallel datasets: same idx set, same question and label per idx.

    Mixing needs at least three member datasets with pairwise-distinct
    language tags, checked on construction.
    """

    datasets: tuple[Dataset, ...]

    def __post_init__(self):
        if len(self.datasets) < 3:
            raise AlignmentError(
                f"need at least 3 aligned datasets, got {len(self.datasets)}"
            )
        tags = [ds.lang for ds in self.datasets]
        if len(set(tags)) != len(tags):
            raise AlignmentError(f"language tags are not distinct: {tags}")
        head = self.datasets[0]
        head_map = head.by_idx()
        for ds in self.datasets[1:]:
            if ds.idx_set() != head.idx_set():
                missing = sorted(head.idx_set() ^ ds.idx_set())[:5]
                raise AlignmentError(
                    f"{ds.lang} and {head.lang} disagree on idx set "
                    f"(first differences: {missing})"
                )
            for inst in ds:
                ref = head_map[inst.idx]
                if inst.question != ref.question or inst.label != ref.label:
                    raise AlignmentError(
                        f"idx {inst.idx}: {ds.lang} has "
                        f"({inst.question}, {inst.label}) but {head.lang} has "
                        f"({ref.question}, {ref.label})"
                    )

    def languages(self) -> tuple[str, ...]:
        return tuple(ds.lang for ds in self.datasets)


def mix_crosslingual(
    datasets: Sequence[Dataset] | AlignedCorpus,
    seed: int,
    name: str = "mix",
) -> tuple[Dataset, dict[int, tuple[str, str, str]]]:
    """Recombine a parallel corpus so each field speaks a different language.

    For every idx, three pairwise-distinct languages are drawn from a
    stream keyed by (seed, idx): one contributes the premise, the others
    choice1 and choice2. Question and label come from the alignment and
    idx is preserved, so the gold answer is untouched.

    Returns the mixed dataset (language tag ``mix``) and a provenance
    map idx -> (premise language, choice1 language, choice2 language).
    """
    corpus = datasets if isinstance(datasets, AlignedCorpus) else AlignedCorpus(tuple(datasets))
    langs = corpus.languages()
    maps = {ds.lang: ds.by_idx() for ds in corpus.datasets}

    instances: list[CopaInstance] = []
    provenance: dict[int, tuple[str, str, str]] = {}
    for inst in corpus.datasets[0]:
        rng = rng_for(seed, f"mix:{inst.idx}")
        premise_lang, choice1_lang, choice2_lang = rng.sample(langs, 3)
        instances.append(
            CopaInstance(
                premise=maps[premise_lang][inst.idx].premise,
                choice1=maps[choice1_lang][inst.idx].choice1,
                choice2=maps[choice2_lang][inst.idx].choice2,
                question=inst.question,
                label=inst.label,
                idx=inst.idx,
            )
        )
        provenance[inst.idx] = (premise_lang, choice1_lang, choice2_lang)

    mixed = Dataset(
        lang="mix",
        split=corpus.datasets[0].split,
        source_id=name,
        instances=tuple(instances),
    )
    return mixed, provenance


def upsample(dataset: Dataset, factor: int) -> Dataset:
    """Repeat a dataset ``factor`` times, block after block.

    The first copy keeps its idx values; later copies get fresh ones so
    the result stays collision free. Factor 1 returns the dataset
    unchanged.
    """
    if factor < 1:
        raise AugmentError(f"upsample factor must be >= 1, got {factor}")
    if factor == 1:
        return dataset
    base = max((inst.idx for inst in dataset), default=-1) + 1
    size = len(dataset)
    instances = list(dataset.instances)
    for copy in range(1, factor):
        offset = base + (copy - 1) * size
        for pos, inst in enumerate(dataset):
            instances.append(
                CopaInstance(
                    premise=inst.premise,
                    choice1=inst.choice1,
                    choice2=inst.choice2,
                    question=inst.question,
                    label=inst.label,
                    idx=offset + pos,
                    extra=dict(inst.extra),
                )
            )
    return Dataset(
        lang=dataset.lang,
        split=dataset.split,
        source_id=dataset.source_id,
        instances=tuple(instances),
    )
