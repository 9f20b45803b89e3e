"""Procedural party generation and pre-combat HP variation."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from ntrl.content.models import ContentPack
from ntrl.sim.combat import Party, PartyMember
from ntrl.sim.rng import RngStream

HP_THRESHOLDS = (1.00, 0.75, 0.50, 0.40, 0.30, 0.20, 0.10)


@dataclass(frozen=True)
class HpVariationConfig:
    thresholds: tuple[float, ...] = HP_THRESHOLDS
    noise: float = 0.05                  # per-member multiplicative noise, +/-
    floor: int = 1                       # nobody enters combat dead

    def __post_init__(self):
        for t in self.thresholds:
            if t not in HP_THRESHOLDS:
                raise ValueError(f"threshold {t} not in the fixed set {HP_THRESHOLDS}")


def generate_party(pack: ContentPack, rng: RngStream) -> Party:
    """3..8 members, drawn uniformly (with repetition) from the templates."""
    ids = pack.pc_template_ids()
    size = rng.randint(3, 8)
    members = tuple(
        PartyMember.fresh(pack.pc_templates[ids[rng.randint(0, len(ids) - 1)]])
        for _ in range(size)
    )
    return Party(members)


def apply_hp_variation(party: Party, cfg: HpVariationConfig, rng: RngStream) -> Party:
    """Set each member's entering HP to one shared threshold of hp_max,
    individually perturbed by +/- noise and clamped to [floor, hp_max]."""
    threshold = cfg.thresholds[rng.randint(0, len(cfg.thresholds) - 1)]
    members = []
    for m in party.members:
        u = -cfg.noise + 2.0 * cfg.noise * rng.uniform()
        hp = round(m.base.hp_max * threshold * (1.0 + u))
        hp = max(cfg.floor, min(m.base.hp_max, hp))
        members.append(PartyMember(base=m.base, hp_current=hp))
    return Party(tuple(members))


def party_digest(party: Party) -> str:
    """Stable identity for pairing policies on the same party."""
    text = ";".join(f"{m.base.id}:{m.hp_current}" for m in party.members)
    return hashlib.sha256(text.encode()).hexdigest()[:16]
