"""Desk-scale training experiment: the scaled-down evaluation protocol
(2,000 steps x 25 sims x 3 seeds) with a paired DM comparison over the
final 500 steps of each seed."""

from __future__ import annotations

from dataclasses import dataclass, field

from ntrl.content.models import ContentPack, Tier
from ntrl.policies.base import GenerationContext
from ntrl.policies.dm import DmPolicy
from ntrl.sim.batch import run_batch
from ntrl.sim.rng import RngStream
from ntrl.training.loop import TrainConfig, TrainStepRecord, rebuild_party, train_seed
from ntrl.training.reward import RewardConfig, compute_reward

# the TPK penalty scales with sims_per_step so an all-TPK batch keeps the
# same weight relative to the win-probability term as at the full-scale
# protocol (100 sims x -20 = -2000)
DESK_STEPS = 2000
DESK_SIMS = 25
DESK_SEEDS = (1, 2, 3)
DESK_LR = 2e-3
DESK_TPK_PENALTY = -80.0


def desk_scale_config(out_dir: str | None = None) -> TrainConfig:
    return TrainConfig(
        steps=DESK_STEPS,
        sims_per_step=DESK_SIMS,
        seeds=DESK_SEEDS,
        learning_rate=DESK_LR,
        reward=RewardConfig(tpk_penalty=DESK_TPK_PENALTY),
        out_dir=out_dir or "runs/desk",
        checkpoint_every=0,
    )


@dataclass
class PairedComparison:
    """Final-window means for the trained policy and the DM heuristic on
    identical parties and sim seeds."""

    seed: int
    window: int
    ntrl_reward: float
    dm_reward: float
    ntrl_longevity: float
    dm_longevity: float
    ntrl_hp_pct: float
    dm_hp_pct: float
    ntrl_wp: float
    dm_wp: float
    ntrl_tpk: float
    dm_tpk: float

    def criteria(self) -> dict[str, bool]:
        return {
            "a_reward": self.ntrl_reward > self.dm_reward,
            "b_longevity": self.ntrl_longevity >= 1.5 * self.dm_longevity,
            "c_remaining_hp": self.ntrl_hp_pct < self.dm_hp_pct,
            "d_winnable": self.ntrl_wp >= 0.5 and self.ntrl_tpk <= 2 * self.dm_tpk,
        }

    def passes(self) -> bool:
        return all(self.criteria().values())

    def as_dict(self) -> dict:
        return {
            "seed": self.seed, "window": self.window,
            "ntrl": {"reward": self.ntrl_reward, "fight_longevity": self.ntrl_longevity,
                     "remaining_party_hp_pct": self.ntrl_hp_pct,
                     "win_probability": self.ntrl_wp, "tpk_per_batch": self.ntrl_tpk},
            "dm": {"reward": self.dm_reward, "fight_longevity": self.dm_longevity,
                   "remaining_party_hp_pct": self.dm_hp_pct,
                   "win_probability": self.dm_wp, "tpk_per_batch": self.dm_tpk},
            "criteria": self.criteria(),
        }


def paired_dm_comparison(records: list[TrainStepRecord], cfg: TrainConfig,
                         pack: ContentPack, seed: int, window: int = 500) -> PairedComparison:
    """Replay the final-window training parties through the DM policy with
    the same per-step simulation seeds, then compare means."""
    tail = records[-window:]
    root = RngStream(seed)
    dm = DmPolicy()
    dm_rewards, dm_metrics = [], []
    for record in tail:
        party = rebuild_party(record, pack)
        ctx = GenerationContext(party=party, pack=pack, tier=cfg.tier,
                                rng=root.split(f"dm/{record.step}"))
        proposal = dm.generate(ctx)
        sim_seed = RngStream(seed).split(f"sims/{record.step}").seed
        metrics = run_batch(party, proposal.encounter, cfg.sims_per_step, sim_seed,
                            pack, cfg.tier)
        dm_metrics.append(metrics)
        dm_rewards.append(compute_reward(metrics, party, cfg.reward))

    def mean(xs):
        return sum(xs) / len(xs)

    return PairedComparison(
        seed=seed, window=len(tail),
        ntrl_reward=mean([r.reward for r in tail]),
        dm_reward=mean(dm_rewards),
        ntrl_longevity=mean([r.metrics.fight_longevity for r in tail]),
        dm_longevity=mean([m.fight_longevity for m in dm_metrics]),
        ntrl_hp_pct=mean([r.metrics.remaining_party_hp_pct for r in tail]),
        dm_hp_pct=mean([m.remaining_party_hp_pct for m in dm_metrics]),
        ntrl_wp=mean([r.metrics.win_probability for r in tail]),
        dm_wp=mean([m.win_probability for m in dm_metrics]),
        ntrl_tpk=mean([r.metrics.tpk_count for r in tail]),
        dm_tpk=mean([m.tpk_count for m in dm_metrics]),
    )


def run_desk_scale(pack: ContentPack, out_dir: str | None = None,
                   seeds: tuple[int, ...] | None = None) -> list[PairedComparison]:
    cfg = desk_scale_config(out_dir)
    comparisons = []
    for seed in (seeds or cfg.seeds):
        _, records = train_seed(cfg, seed, pack,
                                out_dir=None if out_dir is None else out_dir)
        comparisons.append(paired_dm_comparison(records, cfg, pack, seed))
    return comparisons
