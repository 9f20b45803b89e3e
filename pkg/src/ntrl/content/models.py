"""Data model for combatant stat blocks, spells and the content pack."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ntrl.sim.dice import DiceExpr

ABILITY_TAGS = ("str", "dex", "con", "int", "wis", "cha")

POOL_SIZE = 26  # enemy action space is fixed; see ContentPack validation


class Kind(str, Enum):
    PC = "PC"
    MONSTER = "MONSTER"


class RangeKind(str, Enum):
    MELEE = "MELEE"
    RANGED = "RANGED"


class Tier(str, Enum):
    EASY = "EASY"
    MEDIUM = "MEDIUM"
    HARD = "HARD"
    DEADLY = "DEADLY"


class SpellKind(str, Enum):
    DAMAGE_SAVE = "DAMAGE_SAVE"   # targets save against the caster's DC
    DAMAGE_AUTO = "DAMAGE_AUTO"   # always hits (magic missile style)
    HEAL = "HEAL"
    BUFF = "BUFF"
    SUMMON = "SUMMON"


@dataclass(frozen=True)
class AbilityScores:
    """The six core scores, each in [1, 30]."""

    strength: int
    dexterity: int
    constitution: int
    intelligence: int
    wisdom: int
    charisma: int

    def score(self, tag: str) -> int:
        return getattr(self, _TAG_TO_FIELD[tag])

    def modifier(self, tag: str) -> int:
        return (self.score(tag) - 10) // 2

    def as_dict(self) -> dict[str, int]:
        return {tag: self.score(tag) for tag in ABILITY_TAGS}


_TAG_TO_FIELD = {
    "str": "strength",
    "dex": "dexterity",
    "con": "constitution",
    "int": "intelligence",
    "wis": "wisdom",
    "cha": "charisma",
}


@dataclass(frozen=True)
class AttackSpec:
    """A single attack routine entry (weapons and at-will cantrips alike)."""

    name: str
    to_hit_bonus: int
    damage_dice: DiceExpr
    damage_type: str
    range_kind: RangeKind
    uses_per_combat: int | None = None         # None = unlimited

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "to_hit_bonus": self.to_hit_bonus,
            "damage_dice": str(self.damage_dice),
            "damage_type": self.damage_type,
            "range_kind": self.range_kind.value,
            "uses_per_combat": self.uses_per_combat,
        }


@dataclass(frozen=True)
class SpellSpec:
    """A castable spell. Mechanics are deliberately coarse: save/auto damage,
    healing, a named buff, or a summon."""

    id: str
    name: str
    level: int                                 # slot level, 1..9
    kind: SpellKind
    cast_slot: str = "action"                  # "action" | "bonus"
    dice: DiceExpr | None = None
    damage_type: str | None = None
    save_ability: str | None = None
    half_on_save: bool = False
    n_targets: int = 1
    buff_tag: str | None = None                # for BUFF: "bless" | "haste"
    summon_monster: str | None = None          # for SUMMON: monster id
    summon_count: int = 0

    def as_dict(self) -> dict:
        d: dict = {
            "id": self.id,
            "name": self.name,
            "level": self.level,
            "kind": self.kind.value,
            "cast_slot": self.cast_slot,
            "n_targets": self.n_targets,
        }
        if self.dice is not None:
            d["dice"] = str(self.dice)
        if self.damage_type is not None:
            d["damage_type"] = self.damage_type
        if self.save_ability is not None:
            d["save_ability"] = self.save_ability
            d["half_on_save"] = self.half_on_save
        if self.buff_tag is not None:
            d["buff_tag"] = self.buff_tag
        if self.summon_monster is not None:
            d["summon_monster"] = self.summon_monster
            d["summon_count"] = self.summon_count
        return d


@dataclass(frozen=True)
class StatBlock:
    """One combatant's full mechanical description (PC template or monster)."""

    id: str
    name: str
    kind: Kind
    level_or_cr: int | str                     # int level for PCs, CR tag for monsters
    hp_max: int
    ac: int
    abilities: AbilityScores
    proficiency_bonus: int
    save_proficiencies: frozenset[str] = frozenset()
    resistances: frozenset[str] = frozenset()
    immunities: frozenset[str] = frozenset()
    attacks: tuple[AttackSpec, ...] = ()
    spells: tuple[str, ...] = ()               # spell ids, resolved via the pack
    spell_slots: tuple[int, ...] = ()          # counts for slot levels 1..len
    special_abilities: tuple[str, ...] = ()
    xp_value: int = 0                          # monsters only; PCs are 0
    initiative_bonus: int = 0
    attacks_per_action: int = 1
    spell_save_dc: int | None = None

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "kind": self.kind.value,
            "level_or_cr": self.level_or_cr,
            "hp_max": self.hp_max,
            "ac": self.ac,
            "abilities": self.abilities.as_dict(),
            "proficiency_bonus": self.proficiency_bonus,
            "save_proficiencies": sorted(self.save_proficiencies),
            "resistances": sorted(self.resistances),
            "immunities": sorted(self.immunities),
            "attacks": [a.as_dict() for a in self.attacks],
            "spells": list(self.spells),
            "spell_slots": list(self.spell_slots),
            "special_abilities": list(self.special_abilities),
            "xp_value": self.xp_value,
            "initiative_bonus": self.initiative_bonus,
            "attacks_per_action": self.attacks_per_action,
            "spell_save_dc": self.spell_save_dc,
        }


@dataclass(frozen=True)
class ContentPack:
    """Immutable, fully cross-referenced content: safe to share between
    concurrent simulations."""

    schema_version: int
    monsters: dict[str, StatBlock]             # exactly POOL_SIZE entries
    pc_templates: dict[str, StatBlock]
    spells: dict[str, SpellSpec]
    xp_budget_table: dict[int, dict[Tier, int]]   # level -> tier -> XP per character
    multiplier_table: tuple[tuple[int, float], ...]  # (max enemy count, multiplier)

    def monster_ids(self) -> list[str]:
        """Pool class ids in canonical (sorted) order; index = policy action id."""
        return sorted(self.monsters)

    def pc_template_ids(self) -> list[str]:
        return sorted(self.pc_templates)

    def multiplier(self, enemy_count: int) -> float:
        for max_count, mult in self.multiplier_table:
            if enemy_count <= max_count:
                return mult
        return self.multiplier_table[-1][1]


@dataclass(frozen=True)
class XpBudget:
    """DMG XP allowance for a party at a difficulty tier."""

    per_character: int
    total: int
    difficulty_tier: Tier
