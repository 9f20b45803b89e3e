"""Paired policy evaluation: the same party sequence for every policy."""

from __future__ import annotations

from dataclasses import dataclass

from ntrl.content.models import ContentPack, Tier
from ntrl.policies.base import EncounterPolicy, EncounterProposal, GenerationContext
from ntrl.sim.batch import BatchMetrics, run_batch
from ntrl.sim.rng import RngStream
from ntrl.training.partygen import HpVariationConfig, apply_hp_variation, generate_party, party_digest


@dataclass(frozen=True)
class PartyEvaluation:
    party_digest: str
    party_size: int
    proposal: EncounterProposal
    metrics: BatchMetrics


@dataclass(frozen=True)
class PolicySummary:
    policy: str
    n_parties: int
    n_sims: int
    win_probability: float
    fight_longevity: float
    tpk_rate: float                      # mean TPKs per party batch
    team_xp_difference: float
    remaining_party_hp_pct: float
    total_damage_to_party: float
    deaths_per_batch: float

    def as_dict(self) -> dict:
        return {
            "policy": self.policy,
            "n_parties": self.n_parties,
            "n_sims": self.n_sims,
            "win_probability": self.win_probability,
            "fight_longevity": self.fight_longevity,
            "tpk_rate": self.tpk_rate,
            "team_xp_difference": self.team_xp_difference,
            "remaining_party_hp_pct": self.remaining_party_hp_pct,
            "total_damage_to_party": self.total_damage_to_party,
            "deaths_per_batch": self.deaths_per_batch,
        }


def evaluation_parties(pack: ContentPack, n_parties: int, base_seed: int,
                       hp_variation: HpVariationConfig | None = None):
    """The shared party sequence for a given base seed. Party i depends only
    on (base_seed, i), never on what any policy did with earlier parties."""
    root = RngStream(base_seed)
    for i in range(n_parties):
        rng = root.split(f"party/{i}")
        party = generate_party(pack, rng)
        if hp_variation is not None:
            party = apply_hp_variation(party, hp_variation, rng)
        yield i, party


def evaluate_policy(policy: EncounterPolicy, pack: ContentPack, n_parties: int,
                    n_sims: int, base_seed: int, tier: Tier = Tier.DEADLY,
                    hp_variation: HpVariationConfig | None = None
                    ) -> tuple[list[PartyEvaluation], PolicySummary]:
    """Generate one encounter per party and simulate it n_sims times.

    Simulation seeds are derived from (base_seed, party index) only, so two
    policies evaluated with the same base_seed are compared on identical
    parties and identical dice."""
    root = RngStream(base_seed)
    evaluations = []
    for i, party in evaluation_parties(pack, n_parties, base_seed, hp_variation):
        ctx = GenerationContext(party=party, pack=pack, tier=tier,
                                rng=root.split(f"policy/{i}"))
        proposal = policy.generate(ctx)
        sim_seed = root.split(f"sims/{i}").seed
        metrics = run_batch(party, proposal.encounter, n_sims, sim_seed, pack, tier)
        evaluations.append(PartyEvaluation(
            party_digest=party_digest(party), party_size=len(party.members),
            proposal=proposal, metrics=metrics,
        ))
    return evaluations, summarize(policy.name, evaluations)


def summarize(policy_name: str, evaluations: list[PartyEvaluation]) -> PolicySummary:
    n = len(evaluations)
    ms = [e.metrics for e in evaluations]
    return PolicySummary(
        policy=policy_name,
        n_parties=n,
        n_sims=ms[0].n_sims if ms else 0,
        win_probability=sum(m.win_probability for m in ms) / n,
        fight_longevity=sum(m.fight_longevity for m in ms) / n,
        tpk_rate=sum(m.tpk_count for m in ms) / n,
        team_xp_difference=sum(m.team_xp_difference for m in ms) / n,
        remaining_party_hp_pct=sum(m.remaining_party_hp_pct for m in ms) / n,
        total_damage_to_party=sum(m.total_damage_to_party for m in ms) / n,
        deaths_per_batch=sum(m.total_player_deaths for m in ms) / n,
    )
