"""The training loop: party -> HP variation -> sampled encounter ->
simulation batch -> reward -> policy update, logged step by step."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from ntrl.content.loader import load_content_pack, load_default_pack
from ntrl.content.models import ContentPack, Tier
from ntrl.agent.checkpoint import load_checkpoint, save_checkpoint
from ntrl.agent.network import ArchConfig, PolicyNetwork, sample_encounter
from ntrl.policies.evaluate import PolicySummary, evaluation_parties, summarize, PartyEvaluation
from ntrl.policies.base import GenerationContext, make_proposal
from ntrl.sim.batch import BatchMetrics, run_batch
from ntrl.sim.combat import Party, PartyMember
from ntrl.sim.rng import RngStream
from ntrl.training.partygen import HpVariationConfig, apply_hp_variation, generate_party, party_digest
from ntrl.training.reinforce import Adam, NonFiniteGradientError, make_baseline, reinforce_step
from ntrl.training.reward import RewardConfig, compute_reward


@dataclass(frozen=True)
class TrainConfig:
    steps: int = 10_000
    sims_per_step: int = 100
    seeds: tuple[int, ...] = (1, 2, 3, 4, 5)
    learning_rate: float = 1e-3
    optimizer: str = "adam"
    baseline: bool = True
    baseline_kind: str = "party"            # "party" (context-bucketed) | "mean"
    baseline_window: int = 100
    pack_path: str | None = None            # None = bundled pack
    out_dir: str = "runs"
    tier: Tier = Tier.DEADLY
    hp_variation: bool = True
    checkpoint_every: int = 500
    log_timings: bool = False               # off: log files are bit-reproducible
    reward: RewardConfig = field(default_factory=RewardConfig)
    hp_cfg: HpVariationConfig = field(default_factory=HpVariationConfig)

    def __post_init__(self):
        if self.steps < 1 or self.sims_per_step < 1 or len(self.seeds) < 1:
            raise ValueError("steps, sims_per_step and seeds must all be >= 1")

    def load_pack(self) -> ContentPack:
        if self.pack_path is None:
            return load_default_pack()
        return load_content_pack(self.pack_path)


@dataclass(frozen=True)
class TrainStepRecord:
    seed: int
    step: int
    party_digest: str
    party_templates: tuple[str, ...]
    party_hp: tuple[int, ...]
    encounter: tuple[str, ...]
    metrics: BatchMetrics
    reward: float
    baseline: float
    loss: float
    skipped: bool = False
    wall_clock_ms: float | None = None

    def to_json(self, include_timing: bool) -> str:
        d = {
            "seed": self.seed,
            "step": self.step,
            "party_digest": self.party_digest,
            "party_templates": list(self.party_templates),
            "party_hp": list(self.party_hp),
            "encounter": list(self.encounter),
            "metrics": self.metrics.as_dict(),
            "reward": self.reward,
            "baseline": self.baseline,
            "loss": self.loss,
            "skipped": self.skipped,
        }
        if include_timing and self.wall_clock_ms is not None:
            d["wall_clock_ms"] = self.wall_clock_ms
        return json.dumps(d, sort_keys=True)


def record_from_json(line: str) -> TrainStepRecord:
    d = json.loads(line)
    return TrainStepRecord(
        seed=d["seed"], step=d["step"], party_digest=d["party_digest"],
        party_templates=tuple(d["party_templates"]), party_hp=tuple(d["party_hp"]),
        encounter=tuple(d["encounter"]), metrics=BatchMetrics(**d["metrics"]),
        reward=d["reward"], baseline=d["baseline"], loss=d["loss"],
        skipped=d["skipped"], wall_clock_ms=d.get("wall_clock_ms"),
    )


def rebuild_party(record: TrainStepRecord, pack: ContentPack) -> Party:
    return Party(tuple(
        PartyMember(base=pack.pc_templates[tid], hp_current=hp)
        for tid, hp in zip(record.party_templates, record.party_hp)
    ))


def train_seed(cfg: TrainConfig, seed: int, pack: ContentPack | None = None,
               out_dir: Path | None = None) -> tuple[PolicyNetwork, list[TrainStepRecord]]:
    """Train one seed; returns the final network and the full step log.

    When out_dir is given, writes train_log.jsonl, periodic checkpoints and
    final.ntrl under out_dir/seed-<seed>/.
    """
    pack = pack or cfg.load_pack()
    arch = ArchConfig.from_pack(pack, init_seed=seed)
    net = PolicyNetwork.create(arch, seed=seed)
    net.reward_config_digest = cfg.reward.digest()
    optimizer = Adam(lr=cfg.learning_rate)
    baseline = make_baseline(cfg.baseline_kind, enabled=cfg.baseline, window=cfg.baseline_window)
    root = RngStream(seed)
    records: list[TrainStepRecord] = []

    run_dir = None
    log_file = None
    if out_dir is not None:
        run_dir = Path(out_dir) / f"seed-{seed}"
        run_dir.mkdir(parents=True, exist_ok=True)
        log_file = open(run_dir / "train_log.jsonl", "w", encoding="utf-8")

    try:
        for step in range(cfg.steps):
            t0 = time.perf_counter()
            party_rng = root.split(f"party/{step}")
            party = generate_party(pack, party_rng)
            if cfg.hp_variation:
                party = apply_hp_variation(party, cfg.hp_cfg, party_rng)
            sample_rng = root.split(f"sample/{step}")
            encounter, trace, feats = sample_encounter(net, party, pack, sample_rng)
            sim_seed = root.split(f"sims/{step}").seed
            metrics = run_batch(party, encounter, cfg.sims_per_step, sim_seed, pack, cfg.tier)
            reward = compute_reward(metrics, party, cfg.reward)
            b = baseline.value(party)
            skipped = False
            loss = 0.0
            try:
                loss = reinforce_step(net, [(feats, trace, reward)], optimizer,
                                      baseline, cfg.reward, parties=[party])
            except NonFiniteGradientError:
                skipped = True
                baseline.update(reward, party)
            net.training_step = step + 1
            record = TrainStepRecord(
                seed=seed, step=step, party_digest=party_digest(party),
                party_templates=tuple(party.template_ids()),
                party_hp=tuple(party.hp_list()),
                encounter=tuple(encounter.ids()), metrics=metrics, reward=reward,
                baseline=b, loss=loss, skipped=skipped,
                wall_clock_ms=(time.perf_counter() - t0) * 1e3,
            )
            records.append(record)
            if log_file is not None:
                log_file.write(record.to_json(cfg.log_timings) + "\n")
            if run_dir is not None and cfg.checkpoint_every > 0 \
                    and (step + 1) % cfg.checkpoint_every == 0:
                save_checkpoint(net, run_dir / f"ckpt-{step + 1:06d}.ntrl")
        if run_dir is not None:
            save_checkpoint(net, run_dir / "final.ntrl")
    finally:
        if log_file is not None:
            log_file.close()
    return net, records


def run_experiment(cfg: TrainConfig, pack: ContentPack | None = None
                   ) -> dict[int, tuple[PolicyNetwork, list[TrainStepRecord]]]:
    """Train every seed in the config; one output directory per seed."""
    pack = pack or cfg.load_pack()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = {}
    for seed in cfg.seeds:
        results[seed] = train_seed(cfg, seed, pack, out)
    return results


class NtrlPolicy:
    """EncounterPolicy adapter around a trained network."""

    name = "NTRL"

    def __init__(self, net: PolicyNetwork):
        self.net = net

    @staticmethod
    def from_checkpoint(path: str | Path) -> "NtrlPolicy":
        return NtrlPolicy(load_checkpoint(path))

    def generate(self, ctx: GenerationContext):
        encounter, _, _ = sample_encounter(self.net, ctx.party, ctx.pack, ctx.rng)
        return make_proposal(encounter.ids(), ctx, self.name)


def evaluate_final(checkpoint_paths: list[str | Path], n_parties: int, n_sims: int,
                   hp_variation: bool, base_seed: int,
                   pack: ContentPack | None = None, tier: Tier = Tier.DEADLY) -> dict:
    """Evaluate final checkpoints on a shared party sequence; returns
    per-checkpoint summaries plus their pooled mean."""
    pack = pack or load_default_pack()
    hv = HpVariationConfig() if hp_variation else None
    per_ckpt: list[PolicySummary] = []
    for ci, path in enumerate(checkpoint_paths):
        policy = NtrlPolicy.from_checkpoint(path)
        root = RngStream(base_seed)
        evaluations = []
        for i, party in evaluation_parties(pack, n_parties, base_seed, hv):
            ctx = GenerationContext(party=party, pack=pack, tier=tier,
                                    rng=root.split(f"ntrl/{ci}/{i}"))
            proposal = policy.generate(ctx)
            sim_seed = root.split(f"sims/{i}").seed
            metrics = run_batch(party, proposal.encounter, n_sims, sim_seed, pack, tier)
            evaluations.append(PartyEvaluation(
                party_digest=party_digest(party), party_size=len(party.members),
                proposal=proposal, metrics=metrics))
        per_ckpt.append(summarize(f"NTRL[{Path(path).name}]", evaluations))
    n = len(per_ckpt)
    pooled = {
        key: sum(getattr(s, key) for s in per_ckpt) / n
        for key in ("win_probability", "fight_longevity", "tpk_rate",
                    "team_xp_difference", "remaining_party_hp_pct",
                    "total_damage_to_party", "deaths_per_batch")
    }
    return {"per_checkpoint": [s.as_dict() for s in per_ckpt], "pooled": pooled,
            "hp_variation": hp_variation, "n_parties": n_parties, "n_sims": n_sims}
