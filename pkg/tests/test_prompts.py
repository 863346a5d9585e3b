import json

import pytest

from copakit.data import CopaInstance
from copakit.errors import PromptError
from copakit.prompts import (
    PromptTemplate,
    default_template,
    load_template,
    prompt_to_record,
    render_dataset,
    render_prompt,
    select_exemplars,
    select_mixed_exemplars,
    write_prompts,
)
from conftest import make_dataset, make_instance

SUN = CopaInstance(
    premise="The sun rose.",
    choice1="The sky brightened.",
    choice2="It got darker.",
    question="effect",
    label=0,
    idx=11,
)

RAIN = CopaInstance(
    premise="The ground was wet.",
    choice1="It had rained all night.",
    choice2="The fountain was off.",
    question="cause",
    label=0,
    idx=12,
)


def test_solved_block_golden():
    block = default_template().render_block(SUN, SUN.correct_choice())
    assert block == (
        "Instruction: Given the premise, The sun rose., "
        "What is the correct effect after this?\n"
        "A: The sky brightened.\n"
        "B: It got darker.\n"
        "Correct effect: The sky brightened."
    )


def test_open_block_golden():
    block = default_template().render_block(RAIN, None)
    assert block == (
        "Instruction: Given the premise, The ground was wet., "
        "What is the correct cause before this?\n"
        "A: It had rained all night.\n"
        "B: The fountain was off.\n"
        "Correct cause:"
    )
    assert not block.endswith(" ")


def test_full_prompt_golden():
    exemplar = CopaInstance(
        premise="The vase fell.",
        choice1="The cat was asleep.",
        choice2="The cat pushed it.",
        question="cause",
        label=1,
        idx=3,
    )
    prompt = render_prompt(RAIN, [exemplar])
    assert prompt.text == (
        "Instruction: Given the premise, The vase fell., "
        "What is the correct cause before this?\n"
        "A: The cat was asleep.\n"
        "B: The cat pushed it.\n"
        "Correct cause: The cat pushed it.\n"
        "\n"
        "Instruction: Given the premise, The ground was wet., "
        "What is the correct cause before this?\n"
        "A: It had rained all night.\n"
        "B: The fountain was off.\n"
        "Correct cause:"
    )
    assert prompt.target_idx == 12
    assert prompt.exemplar_idxs == (3,)
    assert prompt.gold_label == 0


def test_zero_shot_prompt_is_just_the_open_block():
    prompt = render_prompt(RAIN, [])
    assert prompt.text == default_template().render_block(RAIN, None)
    assert prompt.exemplar_idxs == ()


def test_exemplars_must_match_target_class():
    with pytest.raises(PromptError) as err:
        render_prompt(RAIN, [SUN])
    assert "effect" in str(err.value) and "cause" in str(err.value)
    # explicitly mixed prompts are allowed through
    mixed = render_prompt(RAIN, [SUN], allow_mixed=True)
    assert "effect after" in mixed.text and "cause before" in mixed.text


def test_exemplars_must_be_labeled_and_not_the_target():
    bare = make_instance(5, question="cause", label=None)
    with pytest.raises(PromptError):
        render_prompt(RAIN, [bare])
    with pytest.raises(PromptError) as err:
        render_prompt(RAIN, [make_instance(RAIN.idx, question="cause")])
    assert "own exemplars" in str(err.value)


def test_unlabeled_target_renders_with_open_gold():
    target = make_instance(9, question="cause", label=None)
    prompt = render_prompt(target, [RAIN])
    assert prompt.gold_label is None
    assert prompt_to_record(prompt)["gold_label"] is None


# --- selection ---


def test_select_exemplars_filters_and_is_deterministic():
    pool = make_dataset("en", 24)  # even idx asks cause, odd asks effect
    chosen = select_exemplars(pool, "cause", 5, seed=3, exclude_idx=0)
    again = select_exemplars(pool, "cause", 5, seed=3, exclude_idx=0)
    assert chosen == again
    assert all(inst.question == "cause" for inst in chosen)
    assert all(inst.idx != 0 for inst in chosen)
    assert len({inst.idx for inst in chosen}) == 5
    assert select_exemplars(pool, "cause", 5, seed=4, exclude_idx=0) != chosen
    assert select_exemplars(pool, "cause", 0, seed=3) == []


def test_select_exemplars_ignores_unlabeled_instances():
    pool = make_dataset("en", 6, split="test")
    import dataclasses

    stripped = tuple(dataclasses.replace(i, label=None) for i in pool.instances)
    from copakit.data import Dataset

    half = Dataset("en", "test", "en-test", pool.instances[:3] + stripped[3:])
    usable = select_exemplars(half, "cause", 2, seed=0)
    assert {i.idx for i in usable} <= {0, 2}


def test_select_exemplars_reports_small_pools():
    pool = make_dataset("en", 6)
    with pytest.raises(PromptError) as err:
        select_exemplars(pool, "effect", 4, seed=0)
    assert "only 3" in str(err.value)


def test_mixed_selection_interleaves_classes():
    pool = make_dataset("en", 24)
    four = select_mixed_exemplars(pool, 4, seed=1)
    assert [i.question for i in four] == ["cause", "effect", "cause", "effect"]
    three = select_mixed_exemplars(pool, 3, seed=1)
    assert [i.question for i in three] == ["cause", "effect", "cause"]
    assert len({i.idx for i in four}) == 4


# --- whole-dataset rendering ---


def test_render_dataset_is_keyed_by_target_idx():
    pool = make_dataset("en", 30)
    targets = make_dataset("sl", 8)
    full = {p.target_idx: p for p in render_dataset(targets, pool, k=3, seed=7)}
    from copakit.data import Dataset

    tail = Dataset("sl", "train", "sl-train", targets.instances[5:])
    for prompt in render_dataset(tail, pool, k=3, seed=7):
        assert prompt.exemplar_idxs == full[prompt.target_idx].exemplar_idxs
        assert prompt.text == full[prompt.target_idx].text


def test_render_dataset_respects_class_and_exclusion():
    pool = make_dataset("en", 30)
    prompts = render_dataset(pool, pool, k=4, seed=0)
    assert len(prompts) == 30
    by_idx = pool.by_idx()
    for prompt in prompts:
        assert prompt.target_idx not in prompt.exemplar_idxs
        target_question = by_idx[prompt.target_idx].question
        for ex_idx in prompt.exemplar_idxs:
            assert by_idx[ex_idx].question == target_question


def test_render_dataset_seed_changes_draws():
    pool = make_dataset("en", 30)
    targets = make_dataset("sl", 6)
    a = render_dataset(targets, pool, k=3, seed=0)
    b = render_dataset(targets, pool, k=3, seed=1)
    assert [p.exemplar_idxs for p in a] != [p.exemplar_idxs for p in b]


# --- templates and output ---


def test_custom_template(tmp_path):
    path = tmp_path / "mini.txt"
    path.write_text("{premise} [{before_after}] {choice1}/{choice2} => {correct_answer}\n", encoding="utf-8")
    template = load_template(path)
    block = template.render_block(SUN, SUN.correct_choice())
    assert block == "The sun rose. [after] The sky brightened./It got darker. => The sky brightened."
    with pytest.raises(PromptError):
        load_template(tmp_path / "missing.txt")


def test_unknown_placeholder_is_reported():
    template = PromptTemplate("{premise} {answer}")
    with pytest.raises(PromptError) as err:
        template.render_block(SUN, "x")
    assert "placeholder" in str(err.value)


def test_write_prompts_jsonl(tmp_path):
    pool = make_dataset("en", 12)
    prompts = render_dataset(make_dataset("sl", 3), pool, k=2, seed=5)
    out = tmp_path / "p.jsonl"
    write_prompts(prompts, out)
    lines = out.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 3
    first = json.loads(lines[0])
    assert set(first) == {"idx", "prompt", "gold_label"}
    assert first["idx"] == 0
    assert "Instruction: Given the premise," in first["prompt"]
