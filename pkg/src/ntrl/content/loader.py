"""Content pack loading, validation and canonical serialization.

A pack is a directory of four JSON files: monsters.json, pc_templates.json,
spells.json, xp_tables.json, each carrying a schema_version field.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from ntrl.content.models import (
    POOL_SIZE,
    AbilityScores,
    AttackSpec,
    ContentPack,
    Kind,
    RangeKind,
    SpellKind,
    SpellSpec,
    StatBlock,
    Tier,
    ABILITY_TAGS,
)
from ntrl.sim.dice import DiceParseError, parse_dice

SCHEMA_VERSION = 1

PACK_FILES = ("monsters.json", "pc_templates.json", "spells.json", "xp_tables.json")


class PackError(Exception):
    """Raised on any content-pack problem; `code` is machine-readable."""

    def __init__(self, code: str, message: str, field: str | None = None):
        self.code = code
        self.field = field
        super().__init__(f"{code}: {message}" + (f" (at {field})" if field else ""))


def _need(obj: dict, key: str, typ, where: str):
    if key not in obj:
        raise PackError("SCHEMA_VIOLATION", f"missing field {key!r}", where)
    val = obj[key]
    if typ is int and isinstance(val, bool):
        raise PackError("SCHEMA_VIOLATION", f"field {key!r} must be {typ.__name__}", f"{where}.{key}")
    if not isinstance(val, typ):
        raise PackError("SCHEMA_VIOLATION", f"field {key!r} must be {typ.__name__}", f"{where}.{key}")
    return val


def _parse_abilities(obj: dict, where: str) -> AbilityScores:
    scores = {}
    for tag in ABILITY_TAGS:
        v = _need(obj, tag, int, where)
        if not 1 <= v <= 30:
            raise PackError("SCHEMA_VIOLATION", f"ability {tag}={v} outside [1,30]", f"{where}.{tag}")
        scores[tag] = v
    return AbilityScores(
        strength=scores["str"], dexterity=scores["dex"], constitution=scores["con"],
        intelligence=scores["int"], wisdom=scores["wis"], charisma=scores["cha"],
    )


def _parse_dice_field(expr: str, where: str):
    try:
        return parse_dice(expr)
    except DiceParseError as e:
        raise PackError("SCHEMA_VIOLATION", str(e), where) from e


def _parse_attack(obj: dict, where: str) -> AttackSpec:
    rk = _need(obj, "range_kind", str, where)
    if rk not in (RangeKind.MELEE.value, RangeKind.RANGED.value):
        raise PackError("SCHEMA_VIOLATION", f"bad range_kind {rk!r}", f"{where}.range_kind")
    uses = obj.get("uses_per_combat")
    if uses is not None and (not isinstance(uses, int) or uses < 1):
        raise PackError("SCHEMA_VIOLATION", "uses_per_combat must be a positive int or null",
                        f"{where}.uses_per_combat")
    return AttackSpec(
        name=_need(obj, "name", str, where),
        to_hit_bonus=_need(obj, "to_hit_bonus", int, where),
        damage_dice=_parse_dice_field(_need(obj, "damage_dice", str, where), f"{where}.damage_dice"),
        damage_type=_need(obj, "damage_type", str, where),
        range_kind=RangeKind(rk),
        uses_per_combat=uses,
    )


def _parse_statblock(obj: dict, where: str) -> StatBlock:
    kind_s = _need(obj, "kind", str, where)
    if kind_s not in (Kind.PC.value, Kind.MONSTER.value):
        raise PackError("SCHEMA_VIOLATION", f"bad kind {kind_s!r}", f"{where}.kind")
    kind = Kind(kind_s)

    hp_max = _need(obj, "hp_max", int, where)
    if hp_max <= 0:
        raise PackError("SCHEMA_VIOLATION", "hp_max must be > 0", f"{where}.hp_max")
    ac = _need(obj, "ac", int, where)
    if ac < 1:
        raise PackError("SCHEMA_VIOLATION", "ac must be >= 1", f"{where}.ac")
    prof = _need(obj, "proficiency_bonus", int, where)
    if prof < 2:
        raise PackError("SCHEMA_VIOLATION", "proficiency_bonus must be >= 2", f"{where}.proficiency_bonus")

    xp = obj.get("xp_value", 0)
    if not isinstance(xp, int) or xp < 0:
        raise PackError("SCHEMA_VIOLATION", "xp_value must be a non-negative int", f"{where}.xp_value")
    if kind is Kind.PC and xp != 0:
        raise PackError("SCHEMA_VIOLATION", "PCs must have xp_value 0", f"{where}.xp_value")

    saves = obj.get("save_proficiencies", [])
    for tag in saves:
        if tag not in ABILITY_TAGS:
            raise PackError("SCHEMA_VIOLATION", f"unknown save tag {tag!r}", f"{where}.save_proficiencies")

    attacks = tuple(
        _parse_attack(a, f"{where}.attacks[{i}]") for i, a in enumerate(obj.get("attacks", []))
    )
    if kind is Kind.MONSTER and not attacks:
        raise PackError("SCHEMA_VIOLATION", "monsters need a non-empty attacks list", f"{where}.attacks")

    slots = tuple(obj.get("spell_slots", []))
    for i, n in enumerate(slots):
        if not isinstance(n, int) or n < 0:
            raise PackError("SCHEMA_VIOLATION", "spell slot counts must be >= 0", f"{where}.spell_slots[{i}]")

    apa = obj.get("attacks_per_action", 1)
    if not isinstance(apa, int) or apa < 1:
        raise PackError("SCHEMA_VIOLATION", "attacks_per_action must be >= 1", f"{where}.attacks_per_action")

    return StatBlock(
        id=_need(obj, "id", str, where),
        name=_need(obj, "name", str, where),
        kind=kind,
        level_or_cr=_need(obj, "level_or_cr", (int, str), where),
        hp_max=hp_max,
        ac=ac,
        abilities=_parse_abilities(_need(obj, "abilities", dict, where), f"{where}.abilities"),
        proficiency_bonus=prof,
        save_proficiencies=frozenset(saves),
        resistances=frozenset(obj.get("resistances", [])),
        immunities=frozenset(obj.get("immunities", [])),
        attacks=attacks,
        spells=tuple(obj.get("spells", [])),
        spell_slots=slots,
        special_abilities=tuple(obj.get("special_abilities", [])),
        xp_value=xp,
        initiative_bonus=_need(obj, "initiative_bonus", int, where),
        attacks_per_action=apa,
        spell_save_dc=obj.get("spell_save_dc"),
    )


def _parse_spell(obj: dict, where: str) -> SpellSpec:
    kind_s = _need(obj, "kind", str, where)
    try:
        kind = SpellKind(kind_s)
    except ValueError:
        raise PackError("SCHEMA_VIOLATION", f"bad spell kind {kind_s!r}", f"{where}.kind") from None
    level = _need(obj, "level", int, where)
    if not 1 <= level <= 9:
        raise PackError("SCHEMA_VIOLATION", "spell level must be in [1,9]", f"{where}.level")
    cast_slot = obj.get("cast_slot", "action")
    if cast_slot not in ("action", "bonus"):
        raise PackError("SCHEMA_VIOLATION", f"bad cast_slot {cast_slot!r}", f"{where}.cast_slot")

    dice = None
    if "dice" in obj:
        dice = _parse_dice_field(_need(obj, "dice", str, where), f"{where}.dice")
    if kind in (SpellKind.DAMAGE_SAVE, SpellKind.DAMAGE_AUTO, SpellKind.HEAL) and dice is None:
        raise PackError("SCHEMA_VIOLATION", f"{kind.value} spell needs dice", f"{where}.dice")

    save_ability = obj.get("save_ability")
    if kind is SpellKind.DAMAGE_SAVE:
        if save_ability not in ABILITY_TAGS:
            raise PackError("SCHEMA_VIOLATION", "DAMAGE_SAVE spell needs save_ability", f"{where}.save_ability")
    buff_tag = obj.get("buff_tag")
    if kind is SpellKind.BUFF and buff_tag not in ("bless", "haste"):
        raise PackError("SCHEMA_VIOLATION", "BUFF spell needs buff_tag bless|haste", f"{where}.buff_tag")
    summon_monster = obj.get("summon_monster")
    summon_count = obj.get("summon_count", 0)
    if kind is SpellKind.SUMMON and (not summon_monster or summon_count < 1):
        raise PackError("SCHEMA_VIOLATION", "SUMMON spell needs summon_monster and summon_count >= 1",
                        f"{where}.summon_monster")

    return SpellSpec(
        id=_need(obj, "id", str, where),
        name=_need(obj, "name", str, where),
        level=level,
        kind=kind,
        cast_slot=cast_slot,
        dice=dice,
        damage_type=obj.get("damage_type"),
        save_ability=save_ability,
        half_on_save=bool(obj.get("half_on_save", False)),
        n_targets=obj.get("n_targets", 1),
        buff_tag=buff_tag,
        summon_monster=summon_monster,
        summon_count=summon_count,
    )


def _read_json(root: Path, name: str) -> dict:
    path = root / name
    if not path.is_file():
        raise PackError("MISSING_FILE", f"pack file not found: {path}")
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    ver = data.get("schema_version")
    if ver != SCHEMA_VERSION:
        raise PackError("SCHEMA_VIOLATION", f"unsupported schema_version {ver!r}", name)
    return data


def load_content_pack(path: str | Path) -> ContentPack:
    """Load and fully validate a content pack directory.

    Raises PackError with codes MISSING_FILE, SCHEMA_VIOLATION,
    DANGLING_REFERENCE or POOL_SIZE_MISMATCH.
    """
    root = Path(path)
    if not root.is_dir():
        raise PackError("MISSING_FILE", f"pack directory not found: {root}")

    monsters_doc = _read_json(root, "monsters.json")
    pcs_doc = _read_json(root, "pc_templates.json")
    spells_doc = _read_json(root, "spells.json")
    xp_doc = _read_json(root, "xp_tables.json")

    spells: dict[str, SpellSpec] = {}
    for i, obj in enumerate(_need(spells_doc, "spells", list, "spells.json")):
        spell = _parse_spell(obj, f"spells[{i}]")
        if spell.id in spells:
            raise PackError("SCHEMA_VIOLATION", f"duplicate spell id {spell.id!r}", f"spells[{i}].id")
        spells[spell.id] = spell

    monsters: dict[str, StatBlock] = {}
    for i, obj in enumerate(_need(monsters_doc, "monsters", list, "monsters.json")):
        sb = _parse_statblock(obj, f"monsters[{i}]")
        if sb.kind is not Kind.MONSTER:
            raise PackError("SCHEMA_VIOLATION", "monsters.json entries must have kind MONSTER", f"monsters[{i}].kind")
        if sb.xp_value <= 0:
            raise PackError("SCHEMA_VIOLATION", "monster xp_value must be > 0", f"monsters[{i}].xp_value")
        if sb.id in monsters:
            raise PackError("SCHEMA_VIOLATION", f"duplicate monster id {sb.id!r}", f"monsters[{i}].id")
        monsters[sb.id] = sb
    if len(monsters) != POOL_SIZE:
        raise PackError("POOL_SIZE_MISMATCH",
                        f"monster pool must have exactly {POOL_SIZE} classes, got {len(monsters)}")

    pc_templates: dict[str, StatBlock] = {}
    for i, obj in enumerate(_need(pcs_doc, "pc_templates", list, "pc_templates.json")):
        sb = _parse_statblock(obj, f"pc_templates[{i}]")
        if sb.kind is not Kind.PC:
            raise PackError("SCHEMA_VIOLATION", "pc_templates.json entries must have kind PC",
                            f"pc_templates[{i}].kind")
        if sb.level_or_cr != 5:
            raise PackError("SCHEMA_VIOLATION", "all PC templates must be level 5",
                            f"pc_templates[{i}].level_or_cr")
        if sb.id in pc_templates:
            raise PackError("SCHEMA_VIOLATION", f"duplicate PC template id {sb.id!r}", f"pc_templates[{i}].id")
        pc_templates[sb.id] = sb
    if len(pc_templates) < 8:
        raise PackError("SCHEMA_VIOLATION",
                        f"need at least 8 PC templates, got {len(pc_templates)}", "pc_templates")

    # cross-references: spells on stat blocks, summon targets, caster DCs
    for group_name, group in (("monsters", monsters), ("pc_templates", pc_templates)):
        for sb in group.values():
            for spell_id in sb.spells:
                if spell_id not in spells:
                    raise PackError("DANGLING_REFERENCE",
                                    f"{sb.id} references undefined spell {spell_id!r}",
                                    f"{group_name}[{sb.id}].spells")
            if sb.spells and sb.spell_save_dc is None:
                needs_dc = any(spells[s].kind is SpellKind.DAMAGE_SAVE for s in sb.spells)
                if needs_dc:
                    raise PackError("SCHEMA_VIOLATION",
                                    f"{sb.id} casts save spells but has no spell_save_dc",
                                    f"{group_name}[{sb.id}].spell_save_dc")
    for spell in spells.values():
        if spell.kind is SpellKind.SUMMON and spell.summon_monster not in monsters:
            raise PackError("DANGLING_REFERENCE",
                            f"spell {spell.id} summons undefined monster {spell.summon_monster!r}",
                            f"spells[{spell.id}].summon_monster")

    budget_raw = _need(xp_doc, "xp_budget_per_character", dict, "xp_tables.json")
    budget_table: dict[int, dict[Tier, int]] = {}
    for level_s, tiers in budget_raw.items():
        try:
            level = int(level_s)
        except ValueError:
            raise PackError("SCHEMA_VIOLATION", f"bad level key {level_s!r}",
                            "xp_tables.json.xp_budget_per_character") from None
        row: dict[Tier, int] = {}
        for tier in Tier:
            if tier.value not in tiers:
                raise PackError("SCHEMA_VIOLATION", f"level {level} missing tier {tier.value}",
                                f"xp_tables.json.xp_budget_per_character.{level_s}")
            row[tier] = tiers[tier.value]
        budget_table[level] = row

    mult_raw = _need(xp_doc, "encounter_multipliers", list, "xp_tables.json")
    multipliers: list[tuple[int, float]] = []
    prev_count, prev_mult = 0, 0.0
    for i, pair in enumerate(mult_raw):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise PackError("SCHEMA_VIOLATION", "multiplier entries are [max_count, multiplier] pairs",
                            f"xp_tables.json.encounter_multipliers[{i}]")
        max_count, mult = int(pair[0]), float(pair[1])
        if max_count <= prev_count or mult < prev_mult:
            raise PackError("SCHEMA_VIOLATION", "multiplier table must be increasing in count "
                            "and non-decreasing in multiplier",
                            f"xp_tables.json.encounter_multipliers[{i}]")
        if mult < 1.0:
            raise PackError("SCHEMA_VIOLATION", "multipliers must be >= 1",
                            f"xp_tables.json.encounter_multipliers[{i}]")
        multipliers.append((max_count, mult))
        prev_count, prev_mult = max_count, mult
    if not multipliers:
        raise PackError("SCHEMA_VIOLATION", "multiplier table is empty", "xp_tables.json.encounter_multipliers")

    return ContentPack(
        schema_version=SCHEMA_VERSION,
        monsters=monsters,
        pc_templates=pc_templates,
        spells=spells,
        xp_budget_table=budget_table,
        multiplier_table=tuple(multipliers),
    )


def serialize_content_pack(pack: ContentPack) -> dict[str, dict]:
    """Canonical JSON form of a pack, keyed by file name. Field order is
    stable, entries sorted by id, so serialize(load(p)) round-trips."""
    return {
        "monsters.json": {
            "schema_version": pack.schema_version,
            "monsters": [pack.monsters[mid].as_dict() for mid in sorted(pack.monsters)],
        },
        "pc_templates.json": {
            "schema_version": pack.schema_version,
            "pc_templates": [pack.pc_templates[pid].as_dict() for pid in sorted(pack.pc_templates)],
        },
        "spells.json": {
            "schema_version": pack.schema_version,
            "spells": [pack.spells[sid].as_dict() for sid in sorted(pack.spells)],
        },
        "xp_tables.json": {
            "schema_version": pack.schema_version,
            "xp_budget_per_character": {
                str(level): {tier.value: pack.xp_budget_table[level][tier] for tier in Tier}
                for level in sorted(pack.xp_budget_table)
            },
            "encounter_multipliers": [[c, m] for c, m in pack.multiplier_table],
        },
    }


def default_pack_path() -> Path:
    """Location of the bundled content pack."""
    return Path(resources.files("ntrl.content") / "data")  # type: ignore[arg-type]


def load_default_pack() -> ContentPack:
    return load_content_pack(default_pack_path())
