"""Few-shot prompt construction.

Each prompt is a run of solved exemplar blocks followed by the target
block with its answer slot left open. Exemplars share the target's
question type unless mixed-class selection is explicitly requested.
A ``cause`` question asks what happened before, an ``effect`` question
what happened after.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from ._resources import resource_text
from .data import CopaInstance, Dataset
from .errors import PromptError
from .seeding import derive_seed, rng_for

_BEFORE_AFTER = {"cause": "before", "effect": "after"}

PLACEHOLDERS = ("premise", "question", "before_after", "choice1", "choice2", "correct_answer")


@dataclass(frozen=True)
class PromptTemplate:
    """Block template with the six placeholders.

    The default asks the question, lists both choices, and closes with
    an answer line; any text file using the same placeholder names can
    replace it.
    """

    text: str

    def render_block(self, inst: CopaInstance, answer: str | None) -> str:
        try:
            rendered = self.text.format(
                premise=inst.premise,
                question=inst.question,
                before_after=_BEFORE_AFTER[inst.question],
                choice1=inst.choice1,
                choice2=inst.choice2,
                correct_answer=answer if answer is not None else "",
            )
        except (KeyError, IndexError, ValueError) as exc:
            raise PromptError(f"template has an unknown or malformed placeholder: {exc}") from exc
        # An open answer slot leaves the closing line bare, without a
        # dangling space.
        return rendered.rstrip("\n").rstrip(" ") if answer is None else rendered.rstrip("\n")


def default_template() -> PromptTemplate:
    return PromptTemplate(text=resource_text("templates/few_shot.txt"))


def load_template(path: str | Path) -> PromptTemplate:
    path = Path(path)
    try:
        return PromptTemplate(text=path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise PromptError(f"cannot read template {path}: {exc}") from exc


@dataclass(frozen=True)
class RenderedPrompt:
    text: str
    target_idx: int
    exemplar_idxs: tuple[int, ...]
    gold_label: int | None


def select_exemplars(
    pool: Dataset,
    question: str,
    k: int,
    seed: int,
    exclude_idx: int | None = None,
) -> list[CopaInstance]:
    """Draw k labeled exemplars of one question type, without replacement."""
    candidates = [
        inst
        for inst in pool
        if inst.question == question and inst.idx != exclude_idx and inst.label is not None
    ]
    if len(candidates) < k:
        raise PromptError(
            f"pool has only {len(candidates)} usable {question} exemplars, need {k}"
        )
    return rng_for(seed, f"exemplars:{question}").sample(candidates, k)


def select_mixed_exemplars(
    pool: Dataset,
    k: int,
    seed: int,
    exclude_idx: int | None = None,
) -> list[CopaInstance]:
    """Draw exemplars alternating cause, effect, cause, effect."""
    need_cause = (k + 1) // 2
    need_effect = k // 2
    causes = select_exemplars(pool, "cause", need_cause, seed, exclude_idx)
    effects = select_exemplars(pool, "effect", need_effect, seed, exclude_idx)
    out: list[CopaInstance] = []
    for pos in range(k):
        out.append(causes[pos // 2] if pos % 2 == 0 else effects[pos // 2])
    return out


def render_prompt(
    target: CopaInstance,
    exemplars: Sequence[CopaInstance],
    template: PromptTemplate | None = None,
    allow_mixed: bool = False,
) -> RenderedPrompt:
    """Assemble exemplar blocks plus the open target block.

    Blocks are separated by one blank line. Every exemplar must carry a
    label; by default every exemplar must also share the target's
    question type.
    """
    template = template or default_template()
    blocks: list[str] = []
    for ex in exemplars:
        if not allow_mixed and ex.question != target.question:
            raise PromptError(
                f"exemplar idx={ex.idx} asks {ex.question}, target asks {target.question}"
            )
        if ex.label is None:
            raise PromptError(f"exemplar idx={ex.idx} has no gold label")
        if ex.idx == target.idx:
            raise PromptError(f"target idx={target.idx} appears among its own exemplars")
        blocks.append(template.render_block(ex, ex.correct_choice()))
    blocks.append(template.render_block(target, None))
    return RenderedPrompt(
        text="\n\n".join(blocks),
        target_idx=target.idx,
        exemplar_idxs=tuple(ex.idx for ex in exemplars),
        gold_label=target.label,
    )


def render_dataset(
    dataset: Dataset,
    pool: Dataset,
    k: int,
    seed: int,
    template: PromptTemplate | None = None,
    mixed_class: bool = False,
) -> list[RenderedPrompt]:
    """Render one prompt per instance.

    Exemplar draws are keyed by (seed, target idx), so rendering order
    and parallelism cannot change the output.
    """
    template = template or default_template()
    prompts: list[RenderedPrompt] = []
    for target in dataset:
        target_seed = derive_seed(seed, f"prompt:{target.idx}")
        if mixed_class:
            exemplars = select_mixed_exemplars(pool, k, target_seed, exclude_idx=target.idx)
        else:
            exemplars = select_exemplars(
                pool, target.question, k, target_seed, exclude_idx=target.idx
            )
        prompts.append(render_prompt(target, exemplars, template, allow_mixed=mixed_class))
    return prompts


def prompt_to_record(prompt: RenderedPrompt) -> dict:
    return {"idx": prompt.target_idx, "prompt": prompt.text, "gold_label": prompt.gold_label}


def write_prompts(prompts: Sequence[RenderedPrompt], path: str | Path) -> None:
    """Write prompts as JSONL records of idx, prompt, gold_label."""
    body = "".join(
        json.dumps(prompt_to_record(p), ensure_ascii=False) + "\n" for p in prompts
    )
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(body)
