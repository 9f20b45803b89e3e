#!/usr/bin/env python3
"""Regenerate the bundled content pack in canonical serialized form.

Stat lines follow the SRD 5.1 (CC-BY); a few monster riders are abstracted
into engine tags (poisons_on_hit, regeneration) and save-based cantrips are
modeled as at-will attack entries. Edit the tables below, then run:

    python tools/build_default_pack.py
"""

import json
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from ntrl.content.loader import load_content_pack, serialize_content_pack  # noqa: E402

OUT = ROOT / "src" / "ntrl" / "content" / "data"


def atk(name, to_hit, dice, dtype, rng="MELEE", uses=None):
    return {"name": name, "to_hit_bonus": to_hit, "damage_dice": dice,
            "damage_type": dtype, "range_kind": rng, "uses_per_combat": uses}


def ab(s, d, c, i, w, ch):
    return {"str": s, "dex": d, "con": c, "int": i, "wis": w, "cha": ch}


def monster(id, name, cr, xp, hp, ac, abilities, prof, attacks, *, init=None,
            saves=(), resist=(), immune=(), special=(), apa=1):
    return {
        "id": id, "name": name, "kind": "MONSTER", "level_or_cr": cr,
        "hp_max": hp, "ac": ac, "abilities": abilities, "proficiency_bonus": prof,
        "save_proficiencies": list(saves), "resistances": list(resist),
        "immunities": list(immune), "attacks": attacks, "spells": [],
        "spell_slots": [], "special_abilities": list(special), "xp_value": xp,
        "initiative_bonus": init if init is not None else (abilities["dex"] - 10) // 2,
        "attacks_per_action": apa,
    }


def pc(id, name, hp, ac, abilities, attacks, *, saves=(), resist=(), spells=(),
       slots=(), dc=None, apa=1):
    return {
        "id": id, "name": name, "kind": "PC", "level_or_cr": 5,
        "hp_max": hp, "ac": ac, "abilities": abilities, "proficiency_bonus": 3,
        "save_proficiencies": list(saves), "resistances": list(resist),
        "immunities": [], "attacks": attacks, "spells": list(spells),
        "spell_slots": list(slots), "special_abilities": [], "xp_value": 0,
        "initiative_bonus": (abilities["dex"] - 10) // 2,
        "attacks_per_action": apa, "spell_save_dc": dc,
    }


NONMAGIC = ["bludgeoning", "piercing", "slashing"]

MONSTERS = [
    monster("kobold", "Kobold", "1/8", 25, 5, 12, ab(7, 15, 9, 8, 7, 8), 2,
            [atk("dagger", 4, "1d4+2", "piercing")], special=["pack_tactics"]),
    monster("goblin", "Goblin", "1/4", 50, 7, 15, ab(8, 14, 10, 10, 8, 8), 2,
            [atk("scimitar", 4, "1d6+2", "slashing"),
             atk("shortbow", 4, "1d6+2", "piercing", "RANGED")]),
    monster("skeleton", "Skeleton", "1/4", 50, 13, 13, ab(10, 14, 15, 6, 8, 5), 2,
            [atk("shortsword", 4, "1d6+2", "piercing")], immune=["poison"]),
    monster("wolf", "Wolf", "1/4", 50, 11, 13, ab(12, 15, 12, 3, 12, 6), 2,
            [atk("bite", 4, "2d4+2", "piercing")], special=["pack_tactics"]),
    monster("zombie", "Zombie", "1/4", 50, 22, 8, ab(13, 6, 16, 3, 6, 5), 2,
            [atk("slam", 3, "1d6+1", "bludgeoning")], immune=["poison"]),
    monster("orc", "Orc", "1/2", 100, 15, 13, ab(16, 12, 16, 7, 11, 10), 2,
            [atk("greataxe", 5, "1d12+3", "slashing")]),
    monster("hobgoblin", "Hobgoblin", "1/2", 100, 11, 18, ab(13, 12, 12, 10, 10, 9), 2,
            [atk("longsword", 3, "2d8+1", "slashing")]),
    monster("gnoll", "Gnoll", "1/2", 100, 22, 15, ab(14, 12, 11, 6, 10, 7), 2,
            [atk("spear", 4, "1d6+2", "piercing")]),
    monster("lizardfolk", "Lizardfolk", "1/2", 100, 22, 15, ab(15, 10, 13, 7, 12, 7), 2,
            [atk("heavy_club", 4, "1d6+2", "bludgeoning")], apa=2),
    monster("ghoul", "Ghoul", "1", 200, 22, 12, ab(13, 15, 10, 7, 10, 6), 2,
            [atk("claws", 4, "2d4+2", "slashing")], immune=["poison"],
            special=["poisons_on_hit"]),
    monster("dire_wolf", "Dire Wolf", "1", 200, 37, 14, ab(17, 15, 15, 3, 12, 7), 2,
            [atk("bite", 5, "2d6+3", "piercing")], special=["pack_tactics"]),
    monster("bugbear", "Bugbear", "1", 200, 27, 16, ab(15, 14, 13, 8, 11, 9), 2,
            [atk("morningstar", 4, "2d8+2", "piercing")]),
    monster("berserker", "Berserker", "2", 450, 67, 13, ab(16, 12, 17, 9, 11, 9), 2,
            [atk("greataxe", 5, "1d12+3", "slashing")]),
    monster("ogre", "Ogre", "2", 450, 59, 11, ab(19, 8, 16, 5, 7, 7), 2,
            [atk("greatclub", 6, "2d8+4", "bludgeoning")]),
    monster("bandit_captain", "Bandit Captain", "2", 450, 65, 15, ab(15, 16, 14, 14, 11, 14), 2,
            [atk("scimitar", 5, "1d6+3", "slashing")], saves=["str", "dex", "wis"], apa=2),
    monster("gargoyle", "Gargoyle", "2", 450, 52, 15, ab(15, 11, 16, 6, 11, 7), 2,
            [atk("claws", 4, "1d6+2", "slashing")], resist=NONMAGIC,
            immune=["poison"], apa=2),
    monster("ghast", "Ghast", "2", 450, 36, 13, ab(16, 17, 10, 11, 10, 8), 2,
            [atk("claws", 5, "2d6+3", "slashing")], immune=["poison"],
            special=["poisons_on_hit"]),
    monster("owlbear", "Owlbear", "3", 700, 59, 13, ab(20, 12, 17, 3, 12, 7), 2,
            [atk("claws", 7, "2d8+5", "slashing"), atk("beak", 7, "1d10+5", "piercing")],
            apa=2),
    monster("mummy", "Mummy", "3", 700, 58, 11, ab(16, 8, 15, 6, 10, 12), 2,
            [atk("rotting_fist", 5, "2d6+3", "bludgeoning")], resist=NONMAGIC,
            immune=["necrotic", "poison"], special=["frightens_on_hit"]),
    monster("basilisk", "Basilisk", "3", 700, 52, 15, ab(16, 8, 15, 2, 8, 7), 2,
            [atk("bite", 5, "2d6+3", "piercing")], special=["restrains_on_hit"]),
    monster("manticore", "Manticore", "3", 700, 68, 14, ab(17, 16, 17, 7, 12, 8), 2,
            [atk("claw", 5, "1d6+3", "slashing"),
             atk("tail_spike", 5, "1d8+3", "piercing", "RANGED")],
            special=["frightens_on_hit"], apa=3),
    monster("veteran", "Veteran", "3", 700, 58, 17, ab(16, 13, 14, 10, 11, 10), 2,
            [atk("longsword", 5, "1d8+3", "slashing"),
             atk("crossbow", 3, "1d10+1", "piercing", "RANGED")], apa=2),
    monster("knight", "Knight", "3", 700, 52, 18, ab(16, 11, 14, 11, 11, 15), 2,
            [atk("greatsword", 5, "2d6+3", "slashing")], saves=["con", "wis"], apa=2),
    monster("ettin", "Ettin", "4", 1100, 85, 12, ab(21, 8, 17, 6, 10, 8), 2,
            [atk("battleaxe", 7, "2d8+5", "slashing"),
             atk("morningstar", 7, "2d8+5", "piercing")], apa=2),
    monster("troll", "Troll", "5", 1800, 84, 15, ab(18, 13, 20, 7, 9, 7), 3,
            [atk("claws", 7, "2d6+4", "slashing"), atk("bite", 7, "1d6+4", "piercing")],
            special=["regeneration"], apa=3),
    monster("hill_giant", "Hill Giant", "5", 1800, 105, 13, ab(21, 8, 19, 5, 9, 6), 3,
            [atk("greatclub", 8, "3d8+5", "bludgeoning")], apa=2),
]

PC_TEMPLATES = [
    pc("barbarian", "Barbarian", 66, 17, ab(18, 14, 16, 8, 10, 10),
       [atk("greataxe", 7, "1d12+6", "slashing")], saves=["str", "con"],
       resist=NONMAGIC, apa=2),
    pc("bard", "Bard", 44, 17, ab(10, 16, 14, 12, 10, 16),
       [atk("vicious_mockery", 6, "2d4", "psychic", "RANGED"),
        atk("rapier", 6, "1d8+3", "piercing")],
       saves=["dex", "cha"], spells=["healing_word", "cure_wounds", "dissonant_whispers"],
       slots=[4, 3, 2], dc=14),
    pc("cleric", "Cleric", 44, 20, ab(14, 10, 14, 10, 16, 12),
       [atk("sacred_flame", 6, "2d8", "radiant", "RANGED"),
        atk("mace", 5, "1d6+2", "bludgeoning")],
       saves=["wis", "cha"], spells=["cure_wounds", "healing_word", "bless"],
       slots=[4, 3, 2], dc=14),
    pc("druid", "Druid", 44, 18, ab(10, 12, 14, 12, 16, 10),
       [atk("produce_flame", 6, "2d8", "fire", "RANGED")],
       saves=["int", "wis"], spells=["cure_wounds", "conjure_wolves"],
       slots=[4, 3, 2], dc=14),
    pc("fighter", "Fighter", 58, 20, ab(18, 12, 16, 10, 12, 10),
       [atk("longsword", 7, "1d8+4", "slashing"),
        atk("javelin", 7, "1d6+4", "piercing", "RANGED")],
       saves=["str", "con"], apa=2),
    pc("monk", "Monk", 44, 19, ab(12, 18, 14, 10, 16, 8),
       [atk("unarmed_strike", 7, "1d6+4", "bludgeoning")],
       saves=["str", "dex"], apa=3),
    pc("paladin", "Paladin", 52, 20, ab(18, 10, 14, 10, 12, 16),
       [atk("longsword", 7, "1d8+4", "slashing")],
       saves=["wis", "cha"], spells=["cure_wounds", "bless"], slots=[4, 2], dc=14,
       apa=2),
    pc("ranger", "Ranger", 52, 18, ab(12, 18, 14, 10, 14, 8),
       [atk("longbow", 7, "1d8+4", "piercing", "RANGED"),
        atk("shortsword", 7, "1d6+4", "piercing")],
       saves=["str", "dex"], spells=["cure_wounds"], slots=[4, 2], dc=13, apa=2),
    pc("rogue", "Rogue", 44, 18, ab(10, 16, 14, 12, 12, 12),
       [atk("sneak_shortsword", 6, "4d6+3", "piercing"),
        atk("sneak_shortbow", 6, "4d6+3", "piercing", "RANGED")],
       saves=["dex", "int"]),
    pc("sorcerer", "Sorcerer", 38, 16, ab(8, 14, 14, 10, 10, 16),
       [atk("fire_bolt", 6, "2d10", "fire", "RANGED")],
       saves=["con", "cha"], spells=["fireball", "magic_missile"], slots=[4, 3, 2],
       dc=14),
    pc("warlock", "Warlock", 44, 16, ab(8, 14, 14, 12, 10, 16),
       [atk("eldritch_blast", 6, "1d10+3", "force", "RANGED")],
       saves=["wis", "cha"], apa=2),
    pc("wizard", "Wizard", 38, 17, ab(8, 14, 14, 16, 12, 10),
       [atk("fire_bolt", 6, "2d10", "fire", "RANGED")],
       saves=["int", "wis"], spells=["fireball", "magic_missile", "haste"],
       slots=[4, 3, 2], dc=14),
]

SPELLS = [
    {"id": "bless", "name": "Bless", "level": 1, "kind": "BUFF", "cast_slot": "action",
     "n_targets": 3, "buff_tag": "bless"},
    {"id": "conjure_wolves", "name": "Conjure Wolves", "level": 3, "kind": "SUMMON",
     "cast_slot": "action", "n_targets": 1, "summon_monster": "wolf", "summon_count": 2},
    {"id": "cure_wounds", "name": "Cure Wounds", "level": 1, "kind": "HEAL",
     "cast_slot": "action", "n_targets": 1, "dice": "2d8+4"},
    {"id": "dissonant_whispers", "name": "Dissonant Whispers", "level": 1,
     "kind": "DAMAGE_SAVE", "cast_slot": "action", "n_targets": 1, "dice": "3d6",
     "damage_type": "psychic", "save_ability": "wis", "half_on_save": True},
    {"id": "fireball", "name": "Fireball", "level": 3, "kind": "DAMAGE_SAVE",
     "cast_slot": "action", "n_targets": 4, "dice": "8d6", "damage_type": "fire",
     "save_ability": "dex", "half_on_save": True},
    {"id": "haste", "name": "Haste", "level": 3, "kind": "BUFF", "cast_slot": "action",
     "n_targets": 1, "buff_tag": "haste"},
    {"id": "healing_word", "name": "Healing Word", "level": 1, "kind": "HEAL",
     "cast_slot": "bonus", "n_targets": 1, "dice": "1d4+4"},
    {"id": "magic_missile", "name": "Magic Missile", "level": 1, "kind": "DAMAGE_AUTO",
     "cast_slot": "action", "n_targets": 1, "dice": "3d4+3", "damage_type": "force"},
]

# DMG "XP Thresholds by Character Level", per character
XP_BUDGET = {
    1: [25, 50, 75, 100], 2: [50, 100, 150, 200], 3: [75, 150, 225, 400],
    4: [125, 250, 375, 500], 5: [250, 500, 750, 1100], 6: [300, 600, 900, 1400],
    7: [350, 750, 1100, 1700], 8: [450, 900, 1400, 2100], 9: [550, 1100, 1600, 2400],
    10: [600, 1200, 1900, 2800], 11: [800, 1600, 2400, 3600], 12: [1000, 2000, 3000, 4500],
    13: [1100, 2200, 3400, 5100], 14: [1250, 2500, 3800, 5700], 15: [1400, 2800, 4300, 6400],
    16: [1600, 3200, 4800, 7200], 17: [2000, 3900, 5900, 8800], 18: [2100, 4200, 6300, 9500],
    19: [2400, 4900, 7300, 10900], 20: [2800, 5700, 8500, 12700],
}

# DMG encounter multipliers: up to N enemies -> multiplier
MULTIPLIERS = [[1, 1.0], [2, 1.5], [6, 2.0], [10, 2.5], [14, 3.0], [1000, 4.0]]


def main():
    draft = {
        "monsters.json": {"schema_version": 1, "monsters": MONSTERS},
        "pc_templates.json": {"schema_version": 1, "pc_templates": PC_TEMPLATES},
        "spells.json": {"schema_version": 1, "spells": SPELLS},
        "xp_tables.json": {
            "schema_version": 1,
            "xp_budget_per_character": {
                str(level): dict(zip(("EASY", "MEDIUM", "HARD", "DEADLY"), row))
                for level, row in XP_BUDGET.items()
            },
            "encounter_multipliers": MULTIPLIERS,
        },
    }
    with tempfile.TemporaryDirectory() as tmp:
        for name, doc in draft.items():
            (Path(tmp) / name).write_text(json.dumps(doc))
        pack = load_content_pack(tmp)

    OUT.mkdir(parents=True, exist_ok=True)
    for name, doc in serialize_content_pack(pack).items():
        (OUT / name).write_text(json.dumps(doc, indent=2) + "\n")
        print(f"wrote {OUT / name}")


if __name__ == "__main__":
    main()
