"""Seeded turn-based combat: initiative order, utility-scored actions,
death saves, summons and status effects.

Everything random flows through one RngStream, so (party, encounter, seed)
fully determines the outcome and the event log.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ntrl.content.models import AttackSpec, ContentPack, Kind, SpellKind, SpellSpec, StatBlock
from ntrl.sim.dice import DiceExpr, roll, roll_dice_only
from ntrl.sim.rng import RngStream

ROUND_CAP = 50

# conditions that impose disadvantage on the bearer's attack rolls
_ATTACK_DISADVANTAGE = ("poisoned", "frightened", "restrained", "exhaustion")

# special-ability tags that apply a condition to targets damaged by the bearer
_ON_HIT_CONDITIONS = {
    "poisons_on_hit": ("poisoned", 2),
    "frightens_on_hit": ("frightened", 1),
    "restrains_on_hit": ("restrained", 1),
}

_BUFF_DURATION = 10  # rounds; concentration is abstracted away


class Side(str, Enum):
    PARTY = "PARTY"
    ENEMY = "ENEMY"


class LifeState(str, Enum):
    ACTIVE = "ACTIVE"
    UNCONSCIOUS = "UNCONSCIOUS"
    STABLE = "STABLE"
    DEAD = "DEAD"
    REMOVED = "REMOVED"


class Winner(str, Enum):
    PARTY = "PARTY"
    ENEMY = "ENEMY"
    DRAW = "DRAW"


@dataclass(frozen=True)
class PartyMember:
    """A PC entering combat, possibly below full HP."""

    base: StatBlock
    hp_current: int

    @staticmethod
    def fresh(base: StatBlock) -> "PartyMember":
        return PartyMember(base=base, hp_current=base.hp_max)


@dataclass(frozen=True)
class Party:
    members: tuple[PartyMember, ...]

    def __post_init__(self):
        if not 3 <= len(self.members) <= 8:
            raise ValueError(f"party size must be 3..8, got {len(self.members)}")
        for m in self.members:
            if m.base.kind is not Kind.PC:
                raise ValueError(f"party member {m.base.id} is not a PC")
            if m.base.level_or_cr != 5:
                raise ValueError(f"party member {m.base.id} is not level 5")
            if not 1 <= m.hp_current <= m.base.hp_max:
                raise ValueError(f"party member {m.base.id} hp_current out of range")

    def template_ids(self) -> list[str]:
        return [m.base.id for m in self.members]

    def hp_list(self) -> list[int]:
        return [m.hp_current for m in self.members]


@dataclass(frozen=True)
class Encounter:
    enemies: tuple[StatBlock, ...]

    def __post_init__(self):
        if not 1 <= len(self.enemies) <= 8:
            raise ValueError(f"encounter size must be 1..8, got {len(self.enemies)}")

    def ids(self) -> list[str]:
        return [e.id for e in self.enemies]


@dataclass(frozen=True)
class ScoringWeights:
    """The utility table driving combatant AI. Versioned: changing any value
    changes behaviour, so the version is recorded in combat logs."""

    version: int = 1
    kill_bonus: float = 5.0
    wounded_bonus: float = 3.0          # focus fire on already-hurt targets
    revive_bonus: float = 30.0
    heal_weight: float = 1.0
    buff_value: float = 6.0
    summon_value: float = 8.0
    slot_cost: float = 1.0
    jitter: float = 0.1


DEFAULT_WEIGHTS = ScoringWeights()


@dataclass
class CombatantState:
    """Mutable per-combat state wrapped around an immutable StatBlock."""

    cid: str
    base: StatBlock
    side: Side
    hp_current: int
    life_state: LifeState = LifeState.ACTIVE
    death_save_successes: int = 0
    death_save_failures: int = 0
    conditions: dict[str, int] = field(default_factory=dict)
    initiative_total: int = 0
    roster_index: int = 0
    summoned_by: str | None = None
    dodging: bool = False
    attack_uses: dict[str, int] = field(default_factory=dict)
    slots: list[int] = field(default_factory=list)
    damage_taken: int = 0
    healing_received: int = 0

    @property
    def hp_max(self) -> int:
        return self.base.hp_max

    @property
    def is_pc(self) -> bool:
        return self.side is Side.PARTY and self.summoned_by is None

    def effective_ac(self) -> int:
        return self.base.ac + (2 if "haste" in self.conditions else 0)


@dataclass(frozen=True)
class CombatResult:
    winner: Winner
    rounds: int
    party_deaths: int
    tpk: bool
    damage_to_party: int
    remaining_party_hp_fraction: float
    log: list[dict]


class _Combat:
    """One combat in progress. Use run_combat(); this class is internal."""

    def __init__(self, party: Party, encounter: Encounter, seed: int, pack: ContentPack,
                 weights: ScoringWeights, record_log: bool):
        self.pack = pack
        self.weights = weights
        self.rng = RngStream(seed)
        self.log: list[dict] = []
        self.record_log = record_log
        self.round = 0
        self.roster: list[CombatantState] = []
        self._summon_serial = 0

        for i, member in enumerate(party.members):
            self._add(member.base, Side.PARTY, member.hp_current, cid=f"{member.base.id}#{i + 1}")
        for j, mon in enumerate(encounter.enemies):
            self._add(mon, Side.ENEMY, mon.hp_max, cid=f"{mon.id}#{j + 1}")

        self.order = self._roll_initiative()

    # -- setup -------------------------------------------------------------

    def _add(self, base: StatBlock, side: Side, hp: int, cid: str,
             summoned_by: str | None = None) -> CombatantState:
        st = CombatantState(
            cid=cid, base=base, side=side, hp_current=hp,
            roster_index=len(self.roster), summoned_by=summoned_by,
            attack_uses={a.name: a.uses_per_combat for a in base.attacks
                         if a.uses_per_combat is not None},
            slots=list(base.spell_slots),
        )
        self.roster.append(st)
        return st

    def _roll_initiative(self) -> list[CombatantState]:
        for st in self.roster:
            st.initiative_total = self.rng.randint(1, 20) + st.base.initiative_bonus
            self._event(type="initiative", actor=st.cid, total=st.initiative_total)
        return sorted(self.roster,
                      key=lambda s: (-s.initiative_total, -s.base.abilities.dexterity, s.roster_index))

    # -- helpers -----------------------------------------------------------

    def _event(self, **kw):
        if self.record_log:
            kw.setdefault("round", self.round)
            self.log.append(kw)

    def _actives(self, side: Side) -> list[CombatantState]:
        return [s for s in self.order if s.side is side and s.life_state is LifeState.ACTIVE]

    def _side_defeated(self) -> Winner | None:
        if not self._actives(Side.ENEMY):
            return Winner.PARTY
        if not self._actives(Side.PARTY):
            return Winner.ENEMY
        return None

    def _resist_factor(self, target: CombatantState, damage_type: str) -> float:
        if damage_type in target.base.immunities:
            return 0.0
        if damage_type in target.base.resistances:
            return 0.5
        return 1.0

    def _advantage(self, attacker: CombatantState, target: CombatantState) -> int:
        """+1 advantage, -1 disadvantage, 0 normal (sources cancel)."""
        adv = False
        dis = any(c in attacker.conditions for c in _ATTACK_DISADVANTAGE)
        if "pack_tactics" in attacker.base.special_abilities:
            if any(s is not attacker and s.side is attacker.side
                   and s.life_state is LifeState.ACTIVE for s in self.order):
                adv = True
        if "restrained" in target.conditions:
            adv = True
        if target.dodging:
            dis = True
        return (1 if adv else 0) - (1 if dis else 0)

    def _hit_probability(self, attacker: CombatantState, atk: AttackSpec,
                         target: CombatantState) -> float:
        to_hit = atk.to_hit_bonus + (2 if "bless" in attacker.conditions else 0)
        p = (21.0 + to_hit - target.effective_ac()) / 20.0
        p = min(0.95, max(0.05, p))
        adv = self._advantage(attacker, target)
        if adv > 0:
            p = 1.0 - (1.0 - p) ** 2
        elif adv < 0:
            p = p * p
        return p

    def _jitter(self, score: float) -> float:
        return score * (1.0 + self.weights.jitter * (2.0 * self.rng.uniform() - 1.0))

    def _apply_damage(self, target: CombatantState, amount: int) -> int:
        if target.life_state is not LifeState.ACTIVE:
            return 0
        applied = min(amount, target.hp_current)
        target.hp_current -= applied
        target.damage_taken += applied
        if target.hp_current == 0:
            self._on_zero_hp(target)
        return applied

    def _on_zero_hp(self, target: CombatantState):
        if target.side is Side.ENEMY or target.summoned_by is not None:
            target.life_state = LifeState.REMOVED
            self._event(type="removed", actor=target.cid)
        else:
            target.life_state = LifeState.UNCONSCIOUS
            target.death_save_successes = 0
            target.death_save_failures = 0
            target.conditions.clear()
            self._event(type="drop", actor=target.cid)

    def _heal(self, target: CombatantState, amount: int):
        applied = min(amount, target.hp_max - target.hp_current)
        target.hp_current += applied
        target.healing_received += applied
        if target.life_state in (LifeState.UNCONSCIOUS, LifeState.STABLE) and target.hp_current > 0:
            target.life_state = LifeState.ACTIVE
            target.death_save_successes = 0
            target.death_save_failures = 0
            self._event(type="revive", actor=target.cid, hp=target.hp_current)
        return applied

    # -- death saves ---------------------------------------------------------

    def _death_save(self, pc: CombatantState, phase: str = "combat"):
        d20 = self.rng.randint(1, 20)
        if d20 == 20:
            pc.healing_received += 1
            pc.hp_current = 1
            pc.life_state = LifeState.ACTIVE
            pc.death_save_successes = 0
            pc.death_save_failures = 0
            self._event(type="death_save", actor=pc.cid, roll=20, outcome="revive", phase=phase)
            return
        if d20 == 1:
            pc.death_save_failures += 2
        elif d20 < 10:
            pc.death_save_failures += 1
        else:
            pc.death_save_successes += 1
        if pc.death_save_failures >= 3:
            pc.life_state = LifeState.DEAD
            outcome = "dead"
        elif pc.death_save_successes >= 3:
            pc.life_state = LifeState.STABLE
            outcome = "stable"
        else:
            outcome = "pending"
        self._event(type="death_save", actor=pc.cid, roll=d20, outcome=outcome,
                    successes=pc.death_save_successes, failures=pc.death_save_failures,
                    phase=phase)

    # -- action scoring ------------------------------------------------------

    def _strikes(self, actor: CombatantState) -> int:
        return actor.base.attacks_per_action + (1 if "haste" in actor.conditions else 0)

    def _score_attack(self, actor: CombatantState, atk: AttackSpec,
                      target: CombatantState) -> float:
        if target.life_state is not LifeState.ACTIVE:
            return 0.0
        f = self._resist_factor(target, atk.damage_type)
        if f == 0.0:
            return 0.0
        p = self._hit_probability(actor, atk, target)
        exp = self._strikes(actor) * p * atk.damage_dice.mean * f
        exp += self.weights.wounded_bonus * (1.0 - target.hp_current / target.hp_max)
        if atk.damage_dice.mean * f >= target.hp_current:
            exp += self.weights.kill_bonus * p
        return self._jitter(exp)

    def _save_fail_probability(self, target: CombatantState, dc: int, ability: str) -> float:
        mod = target.base.abilities.modifier(ability)
        if ability in target.base.save_proficiencies:
            mod += target.base.proficiency_bonus
        p_save = (21.0 + mod - dc) / 20.0
        p_save = min(0.95, max(0.05, p_save))
        return 1.0 - p_save

    def _spell_damage_targets(self, actor: CombatantState, spell: SpellSpec) -> list[tuple[float, CombatantState]]:
        """Expected damage per enemy target, best first."""
        foe = Side.ENEMY if actor.side is Side.PARTY else Side.PARTY
        scored = []
        for t in self._actives(foe):
            f = self._resist_factor(t, spell.damage_type or "force")
            if spell.kind is SpellKind.DAMAGE_SAVE:
                dc = actor.base.spell_save_dc or 10
                p_fail = self._save_fail_probability(t, dc, spell.save_ability or "dex")
                exp = spell.dice.mean * f * (p_fail + (0.5 * (1 - p_fail) if spell.half_on_save else 0.0))
            else:
                exp = spell.dice.mean * f
            scored.append((exp, t))
        scored.sort(key=lambda pair: (-pair[0], pair[1].roster_index))
        return scored[: spell.n_targets]

    def _score_spell(self, actor: CombatantState, spell: SpellSpec):
        """Returns (raw_score_jittered, chosen_targets) or None if pointless."""
        w = self.weights
        cost = w.slot_cost * spell.level
        if spell.kind is SpellKind.HEAL:
            best, best_key = None, None
            for t in self.order:
                if t.side is not actor.side or t.summoned_by is not None:
                    continue
                if t.life_state not in (LifeState.ACTIVE, LifeState.UNCONSCIOUS, LifeState.STABLE):
                    continue
                missing = t.hp_max - t.hp_current
                if missing <= 0:
                    continue
                value = min(spell.dice.mean, float(missing)) * w.heal_weight
                if t.life_state is LifeState.UNCONSCIOUS:
                    value += w.revive_bonus
                if best_key is None or value > best_key:
                    best, best_key = t, value
            if best is None:
                return None
            return self._jitter(best_key - cost), [best]
        if spell.kind in (SpellKind.DAMAGE_SAVE, SpellKind.DAMAGE_AUTO):
            targets = self._spell_damage_targets(actor, spell)
            if not targets:
                return None
            total = sum(exp for exp, _ in targets)
            return self._jitter(total - cost), [t for _, t in targets]
        if spell.kind is SpellKind.BUFF:
            targets = [t for t in self._actives(actor.side)
                       if spell.buff_tag not in t.conditions][: spell.n_targets]
            if not targets:
                return None
            return self._jitter(w.buff_value * len(targets) - cost), targets
        if spell.kind is SpellKind.SUMMON:
            return self._jitter(w.summon_value * spell.summon_count - cost), []
        return None

    # -- action resolution -----------------------------------------------------

    def _consume_slot(self, actor: CombatantState, level: int) -> bool:
        for lvl in range(level, len(actor.slots) + 1):
            if actor.slots[lvl - 1] > 0:
                actor.slots[lvl - 1] -= 1
                return True
        return False

    def _has_slot(self, actor: CombatantState, level: int) -> bool:
        return any(actor.slots[lvl - 1] > 0 for lvl in range(level, len(actor.slots) + 1))

    def _perform_attack(self, actor: CombatantState, atk: AttackSpec, target: CombatantState):
        if atk.name in actor.attack_uses:
            actor.attack_uses[atk.name] -= 1
        foe = Side.ENEMY if actor.side is Side.PARTY else Side.PARTY
        for _ in range(self._strikes(actor)):
            if target.life_state is not LifeState.ACTIVE:
                candidates = self._actives(foe)
                if not candidates:
                    return
                target = max(candidates,
                             key=lambda t: (self._hit_probability(actor, atk, t)
                                            * atk.damage_dice.mean
                                            * self._resist_factor(t, atk.damage_type),
                                            -t.roster_index))
            adv = self._advantage(actor, target)
            r1 = self.rng.randint(1, 20)
            rolls = [r1]
            if adv != 0:
                r2 = self.rng.randint(1, 20)
                rolls.append(r2)
                d20 = max(r1, r2) if adv > 0 else min(r1, r2)
            else:
                d20 = r1
            bless = roll(self.rng, DiceExpr(1, 4, 0)) if "bless" in actor.conditions else 0
            total = d20 + atk.to_hit_bonus + bless
            crit = d20 == 20
            hit = crit or (d20 != 1 and total >= target.effective_ac())
            damage = 0
            if hit:
                damage = roll(self.rng, atk.damage_dice)
                if crit:
                    damage += roll_dice_only(self.rng, atk.damage_dice)
                factor = self._resist_factor(target, atk.damage_type)
                damage = int(damage * factor)
                applied = self._apply_damage(target, damage)
                if applied > 0 and target.life_state is LifeState.ACTIVE:
                    for tag, (cond, dur) in _ON_HIT_CONDITIONS.items():
                        if tag in actor.base.special_abilities:
                            target.conditions[cond] = max(target.conditions.get(cond, 0), dur)
            self._event(type="attack", actor=actor.cid, attack=atk.name, target=target.cid,
                        d20=rolls, total=total, hit=hit, crit=crit, damage=damage,
                        target_hp=target.hp_current)
            if self._side_defeated() is not None:
                return

    def _perform_spell(self, actor: CombatantState, spell: SpellSpec,
                       targets: list[CombatantState]):
        self._consume_slot(actor, spell.level)
        if spell.kind is SpellKind.HEAL:
            t = targets[0]
            amount = roll(self.rng, spell.dice)
            applied = self._heal(t, amount)
            self._event(type="heal", actor=actor.cid, spell=spell.id, target=t.cid,
                        amount=applied, target_hp=t.hp_current)
            return
        if spell.kind is SpellKind.BUFF:
            for t in targets:
                t.conditions[spell.buff_tag] = _BUFF_DURATION
            self._event(type="buff", actor=actor.cid, spell=spell.id,
                        targets=[t.cid for t in targets], tag=spell.buff_tag)
            return
        if spell.kind is SpellKind.SUMMON:
            mon = self.pack.monsters[spell.summon_monster]
            created = []
            for _ in range(spell.summon_count):
                self._summon_serial += 1
                st = self._add(mon, actor.side, mon.hp_max,
                               cid=f"{mon.id}@{actor.cid}#{self._summon_serial}",
                               summoned_by=actor.cid)
                st.initiative_total = actor.initiative_total
                created.append(st)
            pos = self.order.index(actor) + 1
            self.order[pos:pos] = created
            self._event(type="summon", actor=actor.cid, spell=spell.id,
                        summoned=[s.cid for s in created])
            return
        # damage spells
        for t in targets:
            if t.life_state is not LifeState.ACTIVE:
                continue
            dmg = roll(self.rng, spell.dice)
            factor = self._resist_factor(t, spell.damage_type or "force")
            if spell.kind is SpellKind.DAMAGE_SAVE:
                dc = actor.base.spell_save_dc or 10
                mod = t.base.abilities.modifier(spell.save_ability)
                if spell.save_ability in t.base.save_proficiencies:
                    mod += t.base.proficiency_bonus
                save_roll = self.rng.randint(1, 20)
                bless = roll(self.rng, DiceExpr(1, 4, 0)) if "bless" in t.conditions else 0
                saved = save_roll + mod + bless >= dc
                if saved:
                    dmg = dmg // 2 if spell.half_on_save else 0
            else:
                saved = False
            dmg = int(dmg * factor)
            applied = self._apply_damage(t, dmg)
            self._event(type="spell", actor=actor.cid, spell=spell.id, target=t.cid,
                        saved=saved, damage=applied, target_hp=t.hp_current)
            if self._side_defeated() is not None:
                return

    # -- turns -------------------------------------------------------------

    def _take_turn(self, actor: CombatantState):
        actor.dodging = False
        if "regeneration" in actor.base.special_abilities and actor.hp_current < actor.hp_max:
            healed = self._heal(actor, 10)
            self._event(type="regen", actor=actor.cid, amount=healed, hp=actor.hp_current)

        foe = Side.ENEMY if actor.side is Side.PARTY else Side.PARTY
        action_left, bonus_left = True, True
        performed = False

        while action_left or bonus_left:
            best_score = 0.0
            best = None  # ("attack", atk, target) | ("spell", spell, targets, slot_kind)
            if action_left:
                enemies = self._actives(foe)
                for atk in actor.base.attacks:
                    if actor.attack_uses.get(atk.name, 1) <= 0:
                        continue
                    for target in enemies:
                        s = self._score_attack(actor, atk, target)
                        if s > best_score:
                            best_score, best = s, ("attack", atk, target)
            for spell_id in actor.base.spells:
                spell = self.pack.spells[spell_id]
                if spell.cast_slot == "bonus" and not bonus_left:
                    continue
                if spell.cast_slot == "action" and not action_left:
                    continue
                if not self._has_slot(actor, spell.level):
                    continue
                scored = self._score_spell(actor, spell)
                if scored is None:
                    continue
                s, targets = scored
                if s > best_score:
                    best_score, best = s, ("spell", spell, targets)
            if best is None:
                break
            performed = True
            if best[0] == "attack":
                action_left = False
                self._perform_attack(actor, best[1], best[2])
            else:
                spell = best[1]
                if spell.cast_slot == "bonus":
                    bonus_left = False
                else:
                    action_left = False
                self._perform_spell(actor, spell, best[2])
            if self._side_defeated() is not None:
                return

        if not performed:
            actor.dodging = True
            self._event(type="dodge", actor=actor.cid)

    def _tick_conditions(self, actor: CombatantState):
        expired = []
        for cond in actor.conditions:
            actor.conditions[cond] -= 1
            if actor.conditions[cond] <= 0:
                expired.append(cond)
        for cond in expired:
            del actor.conditions[cond]

    # -- main loop -----------------------------------------------------------

    def run(self) -> CombatResult:
        winner: Winner | None = None
        while self.round < ROUND_CAP and winner is None:
            self.round += 1
            for actor in list(self.order):
                if actor.life_state in (LifeState.DEAD, LifeState.REMOVED, LifeState.STABLE):
                    continue
                if actor.life_state is LifeState.UNCONSCIOUS:
                    self._death_save(actor)
                    continue
                self._take_turn(actor)
                self._tick_conditions(actor)
                winner = self._side_defeated()
                if winner is not None:
                    break
        if winner is None:
            winner = Winner.DRAW

        # aftermath: a winning or surviving party stabilizes its downed
        # members; when the enemy side wins, anyone still making death saves
        # is finished off, and only PCs who stabilized mid-combat survive
        for pc in self.roster:
            if not pc.is_pc or pc.life_state is not LifeState.UNCONSCIOUS:
                continue
            if winner is Winner.ENEMY:
                pc.life_state = LifeState.DEAD
                self._event(type="dead", actor=pc.cid, phase="aftermath")
            else:
                pc.life_state = LifeState.STABLE
                self._event(type="stable", actor=pc.cid, phase="aftermath")

        pcs = [s for s in self.roster if s.is_pc]
        deaths = sum(1 for s in pcs if s.life_state is LifeState.DEAD)
        tpk = deaths == len(pcs)
        hp_now = sum(s.hp_current for s in pcs)
        hp_max = sum(s.hp_max for s in pcs)
        result = CombatResult(
            winner=winner,
            rounds=self.round,
            party_deaths=deaths,
            tpk=tpk,
            damage_to_party=sum(s.damage_taken for s in pcs),
            remaining_party_hp_fraction=hp_now / hp_max,
            log=self.log,
        )
        self._event(type="end", winner=winner.value, rounds=self.round, tpk=tpk,
                    deaths=deaths, scoring_version=self.weights.version)
        return result


def run_combat(party: Party, encounter: Encounter, seed: int, pack: ContentPack,
               weights: ScoringWeights = DEFAULT_WEIGHTS,
               record_log: bool = True) -> CombatResult:
    """Simulate one combat to completion (bounded by the round cap)."""
    return _Combat(party, encounter, seed, pack, weights, record_log).run()
