"""Training-mix recipes: declarative combination of catalog blocks.

A recipe is a JSON file naming the data blocks to concatenate. Include
steps repeat a block a whole number of times; mix steps build a
cross-lingual blend from parallel blocks. Resolution never edits
instance text, applies one optional seeded shuffle, and renumbers idx
sequentially from zero. Twelve ready-made recipes ship as data files
and go through the same parser as user recipes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from ._resources import resource_names, resource_text
from .augment import mix_crosslingual
from .data import CopaInstance, Dataset, DatasetId, lang_for_id, load_dataset
from .errors import RecipeError
from .seeding import rng_for


@dataclass(frozen=True)
class IncludeStep:
    dataset_id: str
    repeat: int = 1


@dataclass(frozen=True)
class MixStep:
    dataset_ids: tuple[str, ...]
    seed: int = 0


Step = IncludeStep | MixStep


@dataclass(frozen=True)
class Recipe:
    name: str
    steps: tuple[Step, ...]
    shuffle_seed: int | None = None

    def block_ids(self) -> tuple[str, ...]:
        ids: list[str] = []
        for step in self.steps:
            if isinstance(step, IncludeStep):
                ids.append(step.dataset_id)
            else:
                ids.extend(step.dataset_ids)
        return tuple(ids)


def _check_id(text, where: str) -> str:
    if not isinstance(text, str):
        raise RecipeError(f"{where}: dataset id must be a string")
    try:
        DatasetId.parse(text)
    except Exception as exc:
        raise RecipeError(f"{where}: {exc}") from exc
    return text


def parse_recipe(obj: Mapping, name_hint: str = "recipe") -> Recipe:
    """Validate a decoded recipe object and build the typed form."""
    if not isinstance(obj, Mapping):
        raise RecipeError(f"{name_hint}: recipe must be a JSON object")
    name = obj.get("name")
    if not isinstance(name, str) or not name:
        raise RecipeError(f"{name_hint}: missing recipe name")
    raw_steps = obj.get("steps")
    if not isinstance(raw_steps, list):
        raise RecipeError(f"{name}: recipe needs a steps list")

    steps: list[Step] = []
    for pos, raw in enumerate(raw_steps):
        where = f"{name} step {pos}"
        if not isinstance(raw, Mapping):
            raise RecipeError(f"{where}: step must be a JSON object")
        if "include" in raw:
            unknown = set(raw) - {"include", "repeat"}
            if unknown:
                raise RecipeError(f"{where}: unknown keys {sorted(unknown)}")
            repeat = raw.get("repeat", 1)
            if isinstance(repeat, bool) or not isinstance(repeat, int) or repeat < 1:
                raise RecipeError(f"{where}: repeat must be an integer >= 1")
            steps.append(IncludeStep(_check_id(raw["include"], where), repeat))
        elif "mix" in raw:
            unknown = set(raw) - {"mix", "seed"}
            if unknown:
                raise RecipeError(f"{where}: unknown keys {sorted(unknown)}")
            ids = raw["mix"]
            if not isinstance(ids, list) or len(ids) < 3:
                raise RecipeError(f"{where}: mix needs a list of at least 3 dataset ids")
            seed = raw.get("seed", 0)
            if isinstance(seed, bool) or not isinstance(seed, int):
                raise RecipeError(f"{where}: seed must be an integer")
            steps.append(MixStep(tuple(_check_id(i, where) for i in ids), seed))
        else:
            raise RecipeError(f"{where}: expected an include or mix step")

    shuffle_seed = obj.get("shuffle_seed")
    if shuffle_seed is not None and (
        isinstance(shuffle_seed, bool) or not isinstance(shuffle_seed, int)
    ):
        raise RecipeError(f"{name}: shuffle_seed must be an integer")
    return Recipe(name=name, steps=tuple(steps), shuffle_seed=shuffle_seed)


def load_recipe(path: str | Path) -> Recipe:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise RecipeError(f"cannot read recipe {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RecipeError(f"{path}: invalid JSON: {exc.msg}") from exc
    return parse_recipe(obj, name_hint=path.stem)


def builtin_recipe_names() -> tuple[str, ...]:
    return tuple(
        name[: -len(".json")] for name in resource_names("recipes") if name.endswith(".json")
    )


def builtin_recipe(name: str) -> Recipe:
    if name not in builtin_recipe_names():
        raise RecipeError(
            f"unknown recipe {name!r}: shipped recipes are {', '.join(builtin_recipe_names())}"
        )
    obj = json.loads(resource_text(f"recipes/{name}.json"))
    recipe = parse_recipe(obj, name_hint=name)
    if recipe.name != name:
        raise RecipeError(f"shipped recipe {name} declares mismatched name {recipe.name}")
    return recipe


def get_recipe(name_or_path: str) -> Recipe:
    if name_or_path in builtin_recipe_names():
        return builtin_recipe(name_or_path)
    return load_recipe(name_or_path)


@dataclass
class Catalog:
    """Named data blocks a recipe can draw from."""

    blocks: dict[str, Dataset] = field(default_factory=dict)

    @classmethod
    def from_dir(cls, path: str | Path) -> "Catalog":
        """Load ``<id>.jsonl`` files whose stem is a well-formed block id.

        Other files are ignored, so a directory can hold sidecar output
        next to its blocks.
        """
        path = Path(path)
        if not path.is_dir():
            raise RecipeError(f"catalog directory {path} does not exist")
        blocks: dict[str, Dataset] = {}
        for file in sorted(path.glob("*.jsonl")):
            try:
                DatasetId.parse(file.stem)
            except Exception:
                continue
            blocks[file.stem] = load_dataset(
                file, lang=lang_for_id(file.stem), split="train", source_id=file.stem
            )
        return cls(blocks=blocks)

    def get(self, dataset_id: str) -> Dataset:
        try:
            return self.blocks[dataset_id]
        except KeyError:
            known = ", ".join(sorted(self.blocks)) or "none"
            raise RecipeError(
                f"catalog has no block {dataset_id!r} (available: {known})"
            ) from None


def resolve(recipe: Recipe, catalog: Catalog) -> Dataset:
    """Execute a recipe against a catalog.

    Step outputs are concatenated in order, optionally shuffled with
    the recipe's seed, then renumbered so idx runs sequentially from 0.
    """
    gathered: list[CopaInstance] = []
    for pos, step in enumerate(recipe.steps):
        if isinstance(step, IncludeStep):
            block = catalog.get(step.dataset_id)
            for _ in range(step.repeat):
                gathered.extend(block.instances)
        else:
            datasets = [catalog.get(i) for i in step.dataset_ids]
            mixed, _ = mix_crosslingual(datasets, step.seed, name=f"{recipe.name}:{pos}")
            gathered.extend(mixed.instances)

    if recipe.shuffle_seed is not None:
        rng_for(recipe.shuffle_seed, f"shuffle:{recipe.name}").shuffle(gathered)

    instances = tuple(
        CopaInstance(
            premise=inst.premise,
            choice1=inst.choice1,
            choice2=inst.choice2,
            question=inst.question,
            label=inst.label,
            idx=pos,
            extra=dict(inst.extra),
        )
        for pos, inst in enumerate(gathered)
    )
    return Dataset(lang=recipe.name, split="train", source_id=recipe.name, instances=instances)
