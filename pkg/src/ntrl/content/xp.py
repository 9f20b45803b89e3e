"""DMG XP economy: party budgets and encounter XP (raw and adjusted)."""

from __future__ import annotations

from ntrl.content.models import ContentPack, StatBlock, Tier, XpBudget


class XpError(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(f"{code}: {message}")


def party_xp_budget(party_levels: list[int], tier: Tier, pack: ContentPack) -> XpBudget:
    """Total XP allowance: the per-character table value times party size.

    `party_levels` is one entry per member; levels must all be in the table.
    """
    if not party_levels:
        raise XpError("EMPTY_PARTY", "budget needs at least one member")
    total = 0
    per_char = 0
    for level in party_levels:
        if level not in pack.xp_budget_table:
            raise XpError("UNSUPPORTED_LEVEL", f"no XP budget row for level {level}")
        per_char = pack.xp_budget_table[level][tier]
        total += per_char
    return XpBudget(per_character=per_char, total=total, difficulty_tier=tier)


def raw_encounter_xp(enemies: list[StatBlock]) -> int:
    """Plain sum of monster XP values, no multiplier."""
    if not enemies:
        raise XpError("EMPTY_ENCOUNTER", "encounter has no enemies")
    return sum(m.xp_value for m in enemies)


def adjusted_encounter_xp(enemies: list[StatBlock], pack: ContentPack) -> int:
    """Encounter XP scaled by the enemy-count multiplier. A single enemy
    keeps its base XP; larger groups scale up per the pack's table."""
    raw = raw_encounter_xp(enemies)
    return int(raw * pack.multiplier(len(enemies)))


def adjusted_xp_for_ids(monster_ids: list[str], pack: ContentPack) -> tuple[int, int]:
    """(raw, adjusted) XP for a list of monster ids."""
    enemies = [pack.monsters[mid] for mid in monster_ids]
    return raw_encounter_xp(enemies), adjusted_encounter_xp(enemies, pack)
