from collections import Counter

import pytest
from hypothesis import given, strategies as st

from copakit.augment import (
    AlignedCorpus,
    mix_crosslingual,
    reverse_dataset,
    reverse_instance,
    upsample,
)
from copakit.data import CopaInstance, Dataset
from copakit.errors import AlignmentError, AugmentError
from conftest import make_dataset, make_instance


def test_reverse_cause_label0_by_hand():
    original = CopaInstance(
        premise="My friend awoke.",
        choice1="I poured water on my sleeping friend.",
        choice2="My friend snored.",
        question="cause",
        label=0,
        idx=7,
    )
    out = reverse_instance(original, new_idx=107)
    assert out.premise == "I poured water on my sleeping friend."
    assert out.choice1 == "My friend awoke."
    assert out.choice2 == "My friend snored."
    assert out.question == "effect"
    assert out.label == 0
    assert out.idx == 107


def test_reverse_effect_label1_by_hand():
    original = CopaInstance(
        premise="It started to rain.",
        choice1="He kept walking.",
        choice2="He opened his umbrella.",
        question="effect",
        label=1,
        idx=0,
    )
    out = reverse_instance(original, new_idx=1)
    # correct choice2 becomes the premise; old premise takes its slot
    assert out.premise == "He opened his umbrella."
    assert out.choice1 == "He kept walking."
    assert out.choice2 == "It started to rain."
    assert out.question == "cause"
    assert out.label == 1


def test_reverse_requires_a_label():
    inst = make_instance(0, label=None)
    with pytest.raises(AugmentError):
        reverse_instance(inst, new_idx=1)


def test_reverse_dataset_idx_layout_and_naming():
    ds = make_dataset("en", 5)
    out = reverse_dataset(ds)
    assert out.source_id == "en-reverse"
    assert out.lang == "en"
    assert [i.idx for i in out.instances] == [5, 6, 7, 8, 9]
    combined = ds.instances + out.instances
    assert len({i.idx for i in combined}) == len(combined)

    # idx continues past the maximum, not past the length
    sparse = Dataset("en", "train", "en-train", (make_instance(3), make_instance(41)))
    assert [i.idx for i in reverse_dataset(sparse)] == [42, 43]


def test_reverse_mirrors_question_histogram():
    ds = make_dataset("en", 20)
    out = reverse_dataset(ds)
    before = Counter(i.question for i in ds)
    after = Counter(i.question for i in out)
    assert after["cause"] == before["effect"]
    assert after["effect"] == before["cause"]
    assert Counter(i.label for i in out) == Counter(i.label for i in ds)


_labeled = st.builds(
    CopaInstance,
    premise=st.text(min_size=1, max_size=20).filter(str.strip),
    choice1=st.text(min_size=1, max_size=20).filter(str.strip),
    choice2=st.text(min_size=1, max_size=20).filter(str.strip),
    question=st.sampled_from(["cause", "effect"]),
    label=st.sampled_from([0, 1]),
    idx=st.integers(min_value=0, max_value=1000),
)


@given(_labeled)
def test_reversal_is_an_involution(inst):
    back = reverse_instance(reverse_instance(inst, new_idx=0), new_idx=inst.idx)
    assert back == inst


@given(_labeled)
def test_reversal_keeps_the_answer_correct(inst):
    out = reverse_instance(inst, new_idx=0)
    assert out.correct_choice() == inst.premise
    assert out.wrong_choice() == inst.wrong_choice()


# --- mixing ---


def aligned_trio(n=8):
    return [
        make_dataset("en", n, prefix="en"),
        make_dataset("sl", n, prefix="sl"),
        make_dataset("hr", n, prefix="hr"),
        make_dataset("mk", n, prefix="mk"),
    ]


def test_mix_is_deterministic_and_marks_provenance():
    first, prov_first = mix_crosslingual(aligned_trio(), seed=5)
    second, prov_second = mix_crosslingual(aligned_trio(), seed=5)
    assert first == second
    assert prov_first == prov_second
    assert first.lang == "mix"
    assert len(first) == 8

    shifted, _ = mix_crosslingual(aligned_trio(), seed=6)
    assert shifted != first


def test_mix_draws_three_distinct_languages_per_instance():
    mixed, provenance = mix_crosslingual(aligned_trio(), seed=0)
    assert set(provenance) == {inst.idx for inst in mixed}
    for idx, langs in provenance.items():
        assert len(set(langs)) == 3
    # fields actually come from the recorded languages
    by_idx = {ds.lang: ds.by_idx() for ds in aligned_trio()}
    for inst in mixed:
        p, c1, c2 = provenance[inst.idx]
        assert inst.premise == by_idx[p][inst.idx].premise
        assert inst.choice1 == by_idx[c1][inst.idx].choice1
        assert inst.choice2 == by_idx[c2][inst.idx].choice2


def test_mix_keeps_question_label_idx():
    [head, *_] = aligned_trio()
    mixed, _ = mix_crosslingual(aligned_trio(), seed=3)
    for ref, inst in zip(head, mixed):
        assert (inst.idx, inst.question, inst.label) == (ref.idx, ref.question, ref.label)


def test_mix_seed_is_per_instance_not_positional():
    # dropping an early instance must not reshuffle the draws of later ones
    full = aligned_trio()
    _, prov_full = mix_crosslingual(full, seed=9)
    trimmed = [
        Dataset(ds.lang, ds.split, ds.source_id, ds.instances[1:]) for ds in full
    ]
    _, prov_trimmed = mix_crosslingual(trimmed, seed=9)
    for idx in prov_trimmed:
        assert prov_trimmed[idx] == prov_full[idx]


def test_alignment_rejects_thin_or_clashing_corpora():
    en, sl, hr, _ = aligned_trio()
    with pytest.raises(AlignmentError):
        AlignedCorpus((en, sl))
    with pytest.raises(AlignmentError):
        AlignedCorpus((en, sl, make_dataset("sl", 8, prefix="dup")))


def test_alignment_rejects_idx_mismatch():
    en, sl, hr, _ = aligned_trio()
    short = Dataset(hr.lang, hr.split, hr.source_id, hr.instances[:-1])
    with pytest.raises(AlignmentError) as err:
        AlignedCorpus((en, sl, short))
    assert "idx set" in str(err.value)


def test_alignment_rejects_label_disagreement():
    import dataclasses

    en, sl, hr, _ = aligned_trio()
    twisted = dataclasses.replace(hr.instances[2], label=1 - hr.instances[2].label)
    bad = Dataset(hr.lang, hr.split, hr.source_id, hr.instances[:2] + (twisted,) + hr.instances[3:])
    with pytest.raises(AlignmentError) as err:
        AlignedCorpus((en, sl, bad))
    assert "idx 2" in str(err.value)


# --- upsampling ---


def test_upsample_factor_one_is_the_same_object():
    ds = make_dataset("en", 4)
    assert upsample(ds, 1) is ds


def test_upsample_counts_and_idx_are_fresh():
    ds = make_dataset("en", 4)  # idx 0..3
    out = upsample(ds, 3)
    assert len(out) == 12
    assert [i.idx for i in out] == list(range(12))
    texts = [i.premise for i in out.instances]
    assert texts[0:4] == texts[4:8] == texts[8:12]


def test_upsample_rejects_nonpositive_factor():
    with pytest.raises(AugmentError):
        upsample(make_dataset("en", 2), 0)
