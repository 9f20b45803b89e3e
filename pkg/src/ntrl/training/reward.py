"""Encounter reward: winnable, long, damaging, deadly-but-not-TPK."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass

from ntrl.sim.batch import BatchMetrics
from ntrl.sim.combat import Party


@dataclass(frozen=True)
class RewardConfig:
    """Coefficients for the five metric terms plus the explicit TPK penalty.

    Defaults put win probability in [0, 1000], the longevity and missing-HP
    terms in [0, 500] each, and the damage term in the thousands for typical
    level-5 parties. Deaths count positively (challenge short of a wipe is
    desirable); each TPK costs tpk_penalty.
    """

    alpha: float = 1000.0                # win probability in [0,1]
    beta: float = 25.0                   # mean rounds, capped
    gamma: float = 500.0                 # missing-HP fraction in [0,1]
    delta: float = 10.0                  # mean HP damage per simulation
    lam: float = 0.5                     # total player deaths across sims
    tpk_penalty: float = -20.0           # per TPK occurrence, <= 0
    longevity_cap: float = 20.0
    reward_scale: float = 1000.0         # divides the advantage in updates

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if self.tpk_penalty > 0:
            raise ValueError("tpk_penalty must be <= 0")
        if self.reward_scale <= 0:
            raise ValueError("reward_scale must be > 0")

    def digest(self) -> str:
        text = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def compute_reward(metrics: BatchMetrics, party: Party | None, cfg: RewardConfig) -> float:
    """R = a*wp + b*min(fl,cap) + g*mhp + d*dmg + l*dth + tpk_penalty*tpks.

    mhp is the party's missing-HP fraction at fight end, dmg the mean HP
    dealt to the party per simulation, dth the death count summed over the
    batch. The party argument is accepted for interface symmetry; every
    party-dependent quantity already lives in the metrics.
    """
    wp = metrics.win_probability
    fl = min(metrics.fight_longevity, cfg.longevity_cap)
    mhp = 1.0 - metrics.remaining_party_hp_pct / 100.0
    dmg = metrics.total_damage_to_party
    dth = metrics.total_player_deaths
    return (
        cfg.alpha * wp
        + cfg.beta * fl
        + cfg.gamma * mhp
        + cfg.delta * dmg
        + cfg.lam * dth
        + cfg.tpk_penalty * metrics.tpk_count
    )
