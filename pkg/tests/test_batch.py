"""Batch execution and metric aggregation."""

import pytest

from ntrl.content.models import Tier
from ntrl.content.xp import party_xp_budget, raw_encounter_xp
from ntrl.sim.batch import aggregate, run_batch, sim_seeds
from ntrl.sim.combat import CombatResult, Encounter, Winner, run_combat


def test_single_sim_equals_combat_result(pack, party4):
    enc = Encounter((pack.monsters["ogre"],))
    metrics = run_batch(party4, enc, 1, 77, pack)
    result = run_combat(party4, enc, sim_seeds(77, 1)[0], pack, record_log=False)
    assert metrics.n_sims == 1
    assert metrics.win_probability == (1.0 if result.winner is Winner.PARTY else 0.0)
    assert metrics.fight_longevity == result.rounds
    assert metrics.total_damage_to_party == result.damage_to_party
    assert metrics.total_player_deaths == result.party_deaths
    assert metrics.remaining_party_hp_pct == pytest.approx(
        100 * result.remaining_party_hp_fraction)


def test_synthetic_aggregation():
    def res(winner, rounds=5, deaths=0, tpk=False, dmg=40, frac=0.5):
        return CombatResult(winner=winner, rounds=rounds, party_deaths=deaths,
                            tpk=tpk, damage_to_party=dmg,
                            remaining_party_hp_fraction=frac, log=[])

    results = [res(Winner.PARTY)] * 6 + [res(Winner.ENEMY, deaths=4, tpk=True, frac=0.0)] * 4
    metrics = aggregate(results, xp_difference=1234)
    assert metrics.win_probability == pytest.approx(0.6)
    assert metrics.tpk_count == 4
    assert metrics.total_player_deaths == 16
    assert metrics.team_xp_difference == 1234
    assert metrics.remaining_party_hp_pct == pytest.approx(30.0)


def test_all_tpk_degenerate():
    results = [CombatResult(winner=Winner.ENEMY, rounds=3, party_deaths=4, tpk=True,
                            damage_to_party=120, remaining_party_hp_fraction=0.0,
                            log=[])] * 100
    metrics = aggregate(results, 0)
    assert metrics.tpk_count == 100
    assert metrics.win_probability == 0.0
    assert metrics.remaining_party_hp_pct == 0.0


def test_batch_deterministic(pack, party4):
    enc = Encounter((pack.monsters["troll"],))
    a = run_batch(party4, enc, 50, 5, pack)
    b = run_batch(party4, enc, 50, 5, pack)
    assert a == b


def test_batch_seeds_pairwise_distinct():
    seeds = sim_seeds(123, 5000)
    assert len(set(seeds)) == 5000


def test_team_xp_difference_sign(pack, party4):
    enc = Encounter((pack.monsters["kobold"],))
    metrics = run_batch(party4, enc, 1, 0, pack, tier=Tier.DEADLY)
    budget = party_xp_budget([5] * 4, Tier.DEADLY, pack)
    assert metrics.team_xp_difference == budget.total - raw_encounter_xp(
        [pack.monsters["kobold"]])
    assert metrics.team_xp_difference == 4400 - 25


def test_adding_strongest_monster_never_helps_party(pack, party4):
    # paired 1000-sim batches: one extra hill giant cannot raise win rate
    # beyond sampling noise (3 sigma)
    base = Encounter((pack.monsters["ogre"], pack.monsters["ogre"]))
    harder = Encounter(base.enemies + (pack.monsters["hill_giant"],))
    m_base = run_batch(party4, base, 1000, 11, pack)
    m_hard = run_batch(party4, harder, 1000, 11, pack)
    noise = 3 * (0.25 / 1000) ** 0.5
    assert m_hard.win_probability <= m_base.win_probability + noise
