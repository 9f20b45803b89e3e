"""Common surface for encounter generators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from ntrl.content.models import ContentPack, Tier, XpBudget
from ntrl.content.xp import adjusted_encounter_xp, party_xp_budget, raw_encounter_xp
from ntrl.sim.combat import Encounter, Party
from ntrl.sim.rng import RngStream


@dataclass(frozen=True)
class GenerationContext:
    """Everything a generator may condition on."""

    party: Party
    pack: ContentPack
    tier: Tier
    rng: RngStream

    def budget(self) -> XpBudget:
        return party_xp_budget([m.base.level_or_cr for m in self.party.members],
                               self.tier, self.pack)


@dataclass(frozen=True)
class EncounterProposal:
    encounter: Encounter
    raw_xp: int
    adjusted_xp: int
    budget: XpBudget
    provenance: str                     # DM | RND | NTRL | HUMAN

    def as_dict(self) -> dict:
        return {
            "enemies": self.encounter.ids(),
            "raw_xp": self.raw_xp,
            "adjusted_xp": self.adjusted_xp,
            "budget": {
                "per_character": self.budget.per_character,
                "total": self.budget.total,
                "difficulty_tier": self.budget.difficulty_tier.value,
            },
            "provenance": self.provenance,
        }


class EncounterPolicy(Protocol):
    name: str

    def generate(self, ctx: GenerationContext) -> EncounterProposal: ...


def make_proposal(monster_ids: list[str], ctx: GenerationContext, provenance: str) -> EncounterProposal:
    enemies = [ctx.pack.monsters[mid] for mid in monster_ids]
    return EncounterProposal(
        encounter=Encounter(tuple(enemies)),
        raw_xp=raw_encounter_xp(enemies),
        adjusted_xp=adjusted_encounter_xp(enemies, ctx.pack),
        budget=ctx.budget(),
        provenance=provenance,
    )
