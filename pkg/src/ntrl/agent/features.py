"""Party state encoding for the encounter policy.

A party becomes a fixed-shape bundle of per-member numeric rows (scaled by
constants recorded in the architecture config, never by batch statistics),
categorical indices and multi-hot sets, padded to eight members with a
presence mask.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ntrl.content.models import ABILITY_TAGS, ContentPack
from ntrl.sim.combat import Party

MAX_MEMBERS = 8


class UnknownClassError(Exception):
    """A party member's template is not part of the content pack."""


@dataclass(frozen=True)
class FeatureVocab:
    """Category vocabularies and scaling constants; part of the checkpoint
    so encodings stay stable across pack edits."""

    pc_class_ids: tuple[str, ...]
    damage_types: tuple[str, ...]
    spell_ids: tuple[str, ...]
    ability_tags: tuple[str, ...]
    n_slot_levels: int
    hp_scale: float = 100.0
    ac_scale: float = 20.0
    score_scale: float = 20.0
    prof_scale: float = 10.0
    slot_scale: float = 4.0
    level_scale: float = 20.0

    @staticmethod
    def from_pack(pack: ContentPack) -> "FeatureVocab":
        damage_types: set[str] = set()
        ability_tags: set[str] = set()
        n_slots = 1
        for sb in list(pack.monsters.values()) + list(pack.pc_templates.values()):
            damage_types.update(a.damage_type for a in sb.attacks)
            damage_types.update(sb.resistances)
            damage_types.update(sb.immunities)
            ability_tags.update(sb.special_abilities)
            n_slots = max(n_slots, len(sb.spell_slots))
        for spell in pack.spells.values():
            if spell.damage_type:
                damage_types.add(spell.damage_type)
        return FeatureVocab(
            pc_class_ids=tuple(pack.pc_template_ids()),
            damage_types=tuple(sorted(damage_types)),
            spell_ids=tuple(sorted(pack.spells)),
            ability_tags=tuple(sorted(ability_tags)),
            n_slot_levels=n_slots,
        )

    @property
    def numeric_dim(self) -> int:
        # hp_current, hp_max, ac, six scores, proficiency, slots, level
        return 11 + self.n_slot_levels

    def to_json(self) -> dict:
        return {
            "pc_class_ids": list(self.pc_class_ids),
            "damage_types": list(self.damage_types),
            "spell_ids": list(self.spell_ids),
            "ability_tags": list(self.ability_tags),
            "n_slot_levels": self.n_slot_levels,
            "hp_scale": self.hp_scale,
            "ac_scale": self.ac_scale,
            "score_scale": self.score_scale,
            "prof_scale": self.prof_scale,
            "slot_scale": self.slot_scale,
            "level_scale": self.level_scale,
        }

    @staticmethod
    def from_json(d: dict) -> "FeatureVocab":
        return FeatureVocab(
            pc_class_ids=tuple(d["pc_class_ids"]),
            damage_types=tuple(d["damage_types"]),
            spell_ids=tuple(d["spell_ids"]),
            ability_tags=tuple(d["ability_tags"]),
            n_slot_levels=d["n_slot_levels"],
            hp_scale=d["hp_scale"],
            ac_scale=d["ac_scale"],
            score_scale=d["score_scale"],
            prof_scale=d["prof_scale"],
            slot_scale=d["slot_scale"],
            level_scale=d["level_scale"],
        )


@dataclass(frozen=True)
class PartyFeatures:
    """Fixed-shape encoding of one party; padded rows are all zero."""

    numeric: np.ndarray        # (MAX_MEMBERS, numeric_dim) float32
    mask: np.ndarray           # (MAX_MEMBERS,) float32, 1 = present
    class_ids: np.ndarray      # (MAX_MEMBERS,) int32; padded entries 0
    saves: np.ndarray          # (MAX_MEMBERS, 6) float32 multi-hot
    resistances: np.ndarray    # (MAX_MEMBERS, len(damage_types)) float32
    spell_lists: np.ndarray    # (MAX_MEMBERS, len(spell_ids)) float32
    abilities: np.ndarray      # (MAX_MEMBERS, len(ability_tags)) float32


def encode_party(party: Party, vocab: FeatureVocab) -> PartyFeatures:
    """Pure function of the party: same party, same arrays."""
    n = len(party.members)
    numeric = np.zeros((MAX_MEMBERS, vocab.numeric_dim), dtype=np.float32)
    mask = np.zeros(MAX_MEMBERS, dtype=np.float32)
    class_ids = np.zeros(MAX_MEMBERS, dtype=np.int32)
    saves = np.zeros((MAX_MEMBERS, len(ABILITY_TAGS)), dtype=np.float32)
    resist = np.zeros((MAX_MEMBERS, len(vocab.damage_types)), dtype=np.float32)
    spell_lists = np.zeros((MAX_MEMBERS, len(vocab.spell_ids)), dtype=np.float32)
    abilities = np.zeros((MAX_MEMBERS, len(vocab.ability_tags)), dtype=np.float32)

    class_index = {cid: i for i, cid in enumerate(vocab.pc_class_ids)}
    damage_index = {t: i for i, t in enumerate(vocab.damage_types)}
    spell_index = {s: i for i, s in enumerate(vocab.spell_ids)}
    ability_index = {a: i for i, a in enumerate(vocab.ability_tags)}

    for i, member in enumerate(party.members):
        sb = member.base
        if sb.id not in class_index:
            raise UnknownClassError(f"UNKNOWN_CLASS: {sb.id!r} not in the content pack")
        mask[i] = 1.0
        class_ids[i] = class_index[sb.id]
        slots = [0] * vocab.n_slot_levels
        for lvl, count in enumerate(sb.spell_slots):
            slots[lvl] = count
        numeric[i] = [
            member.hp_current / vocab.hp_scale,
            sb.hp_max / vocab.hp_scale,
            sb.ac / vocab.ac_scale,
            *(sb.abilities.score(tag) / vocab.score_scale for tag in ABILITY_TAGS),
            sb.proficiency_bonus / vocab.prof_scale,
            *(c / vocab.slot_scale for c in slots),
            sb.level_or_cr / vocab.level_scale,
        ]
        for j, tag in enumerate(ABILITY_TAGS):
            if tag in sb.save_proficiencies:
                saves[i, j] = 1.0
        for t in sb.resistances:
            if t in damage_index:
                resist[i, damage_index[t]] = 1.0
        for s in sb.spells:
            if s in spell_index:
                spell_lists[i, spell_index[s]] = 1.0
        for a in sb.special_abilities:
            if a in ability_index:
                abilities[i, ability_index[a]] = 1.0

    return PartyFeatures(numeric=numeric, mask=mask, class_ids=class_ids,
                         saves=saves, resistances=resist,
                         spell_lists=spell_lists, abilities=abilities)
