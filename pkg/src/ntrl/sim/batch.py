"""Repeated combat simulation and metric aggregation."""

from __future__ import annotations

from dataclasses import dataclass

from ntrl.content.models import ContentPack, Tier
from ntrl.content.xp import party_xp_budget, raw_encounter_xp
from ntrl.sim.combat import CombatResult, Encounter, Party, ScoringWeights, DEFAULT_WEIGHTS, Winner, run_combat
from ntrl.sim.rng import mix_seed


@dataclass(frozen=True)
class BatchMetrics:
    """The six evaluation metrics aggregated over n_sims repeats."""

    win_probability: float
    fight_longevity: float              # mean rounds
    tpk_count: int
    team_xp_difference: int             # party budget minus raw encounter XP
    remaining_party_hp_pct: float       # mean, in [0, 100]
    total_damage_to_party: float        # mean HP lost per simulation
    total_player_deaths: int            # summed over simulations
    n_sims: int

    def as_dict(self) -> dict:
        return {
            "win_probability": self.win_probability,
            "fight_longevity": self.fight_longevity,
            "tpk_count": self.tpk_count,
            "team_xp_difference": self.team_xp_difference,
            "remaining_party_hp_pct": self.remaining_party_hp_pct,
            "total_damage_to_party": self.total_damage_to_party,
            "total_player_deaths": self.total_player_deaths,
            "n_sims": self.n_sims,
        }


def sim_seeds(base_seed: int, n_sims: int) -> list[int]:
    """Per-simulation seeds; pairwise distinct because the mix is a bijection
    applied to distinct counter offsets."""
    return [mix_seed(base_seed, i) for i in range(n_sims)]


def aggregate(results: list[CombatResult], xp_difference: int) -> BatchMetrics:
    """Deterministic reduction; independent of result production order as long
    as the list is in simulation-index order."""
    n = len(results)
    wins = sum(1 for r in results if r.winner is Winner.PARTY)
    return BatchMetrics(
        win_probability=wins / n,
        fight_longevity=sum(r.rounds for r in results) / n,
        tpk_count=sum(1 for r in results if r.tpk),
        team_xp_difference=xp_difference,
        remaining_party_hp_pct=100.0 * sum(r.remaining_party_hp_fraction for r in results) / n,
        total_damage_to_party=sum(r.damage_to_party for r in results) / n,
        total_player_deaths=sum(r.party_deaths for r in results),
        n_sims=n,
    )


def run_batch(party: Party, encounter: Encounter, n_sims: int, base_seed: int,
              pack: ContentPack, tier: Tier = Tier.DEADLY,
              weights: ScoringWeights = DEFAULT_WEIGHTS) -> BatchMetrics:
    """Run n_sims independent combats and aggregate.

    Each simulation gets its own derived seed, so a batch is reproducible
    from (party, encounter, n_sims, base_seed) alone.
    """
    if n_sims < 1:
        raise ValueError("n_sims must be >= 1")
    budget = party_xp_budget([m.base.level_or_cr for m in party.members], tier, pack)
    xp_diff = budget.total - raw_encounter_xp(list(encounter.enemies))
    results = [
        run_combat(party, encounter, seed, pack, weights, record_log=False)
        for seed in sim_seeds(base_seed, n_sims)
    ]
    return aggregate(results, xp_diff)
