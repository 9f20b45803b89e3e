"""Unstructured random encounter generator: the floor any policy must beat."""

from __future__ import annotations

from ntrl.policies.base import EncounterProposal, GenerationContext, make_proposal


class RndPolicy:
    """Uniform enemy count in 1..8, each enemy uniform over the pool,
    ignoring the XP budget entirely."""

    name = "RND"

    def generate(self, ctx: GenerationContext) -> EncounterProposal:
        ids = ctx.pack.monster_ids()
        count = ctx.rng.randint(1, 8)
        picks = [ids[ctx.rng.randint(0, len(ids) - 1)] for _ in range(count)]
        return make_proposal(picks, ctx, self.name)
