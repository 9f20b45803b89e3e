"""HTTP JSON API: party sessions, simulation, baseline and policy
suggestions, and the three-encounter human submission workflow. Also serves
the built web UI when a static directory is configured.

Environment variables NTRL_PACK, NTRL_CKPT, NTRL_DATA_DIR and NTRL_PORT
provide defaults; explicit arguments and CLI flags win.
"""

from __future__ import annotations

import os
import secrets
import tempfile
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ntrl.content.loader import load_content_pack, load_default_pack
from ntrl.content.models import Tier
from ntrl.content.xp import adjusted_xp_for_ids, party_xp_budget
from ntrl.policies.base import GenerationContext
from ntrl.policies.dm import DmPolicy
from ntrl.policies.rnd import RndPolicy
from ntrl.sim.batch import run_batch
from ntrl.sim.combat import Encounter, Party, PartyMember
from ntrl.sim.rng import RngStream
from ntrl.agent.checkpoint import load_checkpoint
from ntrl.agent.network import _party_cache, _sample_index, _synergy_step
from ntrl.agent.features import encode_party
from ntrl.service.store import SessionRecord, Store
from ntrl.training.partygen import HpVariationConfig, apply_hp_variation, generate_party
from ntrl.training.reward import RewardConfig, compute_reward

import numpy as np

MAX_SIMS_PER_REQUEST = 1000
DEFAULT_SIMS = 100
SUBMISSION_SIZE = 3


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, fieldname: str | None = None):
        self.status = status
        self.code = code
        self.message = message
        self.fieldname = fieldname


class SimulateBody(BaseModel):
    session: str
    encounter: list[str]
    sims: int = Field(default=DEFAULT_SIMS, ge=1)
    seed: int | None = None


class SubmissionBody(BaseModel):
    session: str
    encounters: list[list[str]]
    nickname: str | None = None


class SuggestBody(BaseModel):
    session: str
    policy: str = "ntrl"


def _party_from_session(session: SessionRecord, pack) -> Party:
    return Party(tuple(
        PartyMember(base=pack.pc_templates[tid], hp_current=hp)
        for tid, hp in zip(session.party_templates, session.party_hp)
    ))


def create_app(pack_path: str | None = None, ckpt_path: str | None = None,
               data_dir: str | None = None, static_dir: str | None = None) -> FastAPI:
    pack_path = pack_path or os.environ.get("NTRL_PACK")
    ckpt_path = ckpt_path or os.environ.get("NTRL_CKPT")
    data_dir = data_dir or os.environ.get("NTRL_DATA_DIR") \
        or tempfile.mkdtemp(prefix="ntrl-data-")

    pack = load_content_pack(pack_path) if pack_path else load_default_pack()
    store = Store(Path(data_dir))
    reward_cfg = RewardConfig()
    net = load_checkpoint(ckpt_path) if ckpt_path else None
    dm_policy = DmPolicy()
    rnd_policy = RndPolicy()

    app = FastAPI(title="ntrl encounter service")

    @app.exception_handler(ApiError)
    async def api_error_handler(request: Request, exc: ApiError):
        body = {"code": exc.code, "message": exc.message}
        if exc.fieldname:
            body["field"] = exc.fieldname
        return JSONResponse(status_code=exc.status, content=body)

    def session_or_404(session_id: str) -> SessionRecord:
        session = store.get_session(session_id)
        if session is None:
            raise ApiError(404, "UNKNOWN_SESSION", f"no session {session_id!r}")
        return session

    def validate_encounter(ids: list[str], fieldname: str = "encounter") -> Encounter:
        if not 1 <= len(ids) <= 8:
            raise ApiError(400, "INVALID_ENCOUNTER",
                           f"encounter needs 1..8 enemies, got {len(ids)}", fieldname)
        enemies = []
        for mid in ids:
            monster = pack.monsters.get(mid)
            if monster is None:
                raise ApiError(400, "INVALID_ENCOUNTER", f"unknown monster {mid!r}", fieldname)
            enemies.append(monster)
        return Encounter(tuple(enemies))

    @app.get("/api/party/random")
    def party_random(hp_variation: str = Query(default="off")):
        if hp_variation not in ("on", "off"):
            raise ApiError(400, "INVALID_PARAMETER", "hp_variation must be on|off",
                           "hp_variation")
        rng = RngStream(secrets.randbits(63))
        party = generate_party(pack, rng)
        if hp_variation == "on":
            party = apply_hp_variation(party, HpVariationConfig(), rng)
        session = store.create_session(party.template_ids(), party.hp_list(),
                                       hp_variation == "on")
        return {"session": session.session_id, "party": _party_view(party),
                "hp_variation": hp_variation == "on"}

    def _party_view(party: Party) -> dict:
        return {
            "size": len(party.members),
            "members": [
                {
                    "template_id": m.base.id,
                    "name": m.base.name,
                    "level": m.base.level_or_cr,
                    "hp_current": m.hp_current,
                    "hp_max": m.base.hp_max,
                    "ac": m.base.ac,
                    "abilities": m.base.abilities.as_dict(),
                }
                for m in party.members
            ],
        }

    @app.get("/api/content/monsters")
    def content_monsters():
        return {
            "monsters": [
                {"id": m.id, "name": m.name, "cr": m.level_or_cr, "xp_value": m.xp_value,
                 "hp_max": m.hp_max, "ac": m.ac}
                for m in (pack.monsters[mid] for mid in pack.monster_ids())
            ]
        }

    @app.get("/api/content/xp-tables")
    def content_xp_tables():
        return {
            "encounter_multipliers": [[c, m] for c, m in pack.multiplier_table],
            "xp_budget_per_character": {
                str(level): {tier.value: row[tier] for tier in Tier}
                for level, row in sorted(pack.xp_budget_table.items())
            },
        }

    @app.get("/api/budget")
    def budget(session: str, tier: str = "DEADLY"):
        record = session_or_404(session)
        try:
            tier_val = Tier(tier)
        except ValueError:
            raise ApiError(400, "INVALID_TIER", f"unknown tier {tier!r}", "tier") from None
        party = _party_from_session(record, pack)
        b = party_xp_budget([m.base.level_or_cr for m in party.members], tier_val, pack)
        return {"per_character": b.per_character, "total": b.total,
                "difficulty_tier": b.difficulty_tier.value}

    @app.post("/api/encounter/xp")
    def encounter_xp(body: dict):
        ids = body.get("encounter", [])
        validate_encounter(ids)
        raw, adjusted = adjusted_xp_for_ids(ids, pack)
        return {"raw_xp": raw, "adjusted_xp": adjusted}

    @app.post("/api/simulate")
    def simulate(body: SimulateBody):
        record = session_or_404(body.session)
        encounter = validate_encounter(body.encounter)
        if body.sims > MAX_SIMS_PER_REQUEST:
            raise ApiError(400, "TOO_MANY_SIMS",
                           f"sims capped at {MAX_SIMS_PER_REQUEST}", "sims")
        party = _party_from_session(record, pack)
        seed = body.seed if body.seed is not None else secrets.randbits(63)
        metrics = run_batch(party, encounter, body.sims, seed, pack)
        return {"metrics": metrics.as_dict(), "seed": seed,
                "reward": compute_reward(metrics, party, reward_cfg)}

    @app.post("/api/submissions")
    def submissions(body: SubmissionBody):
        record = session_or_404(body.session)
        if len(body.encounters) != SUBMISSION_SIZE:
            raise ApiError(400, "WRONG_COUNT",
                           f"exactly {SUBMISSION_SIZE} encounters required", "encounters")
        normalized = [tuple(sorted(ids)) for ids in body.encounters]
        if len(set(normalized)) != SUBMISSION_SIZE:
            raise ApiError(400, "DUPLICATE_ENCOUNTER",
                           "the three encounters must be pairwise distinct", "encounters")
        encounters = [validate_encounter(ids, f"encounters[{i}]")
                      for i, ids in enumerate(body.encounters)]
        party = _party_from_session(record, pack)
        seed = secrets.randbits(63)    # server-assigned, recorded for replay
        results = []
        rewards = []
        for i, encounter in enumerate(encounters):
            metrics = run_batch(party, encounter, DEFAULT_SIMS,
                                RngStream(seed).split(f"submission/{i}").seed, pack)
            results.append(metrics.as_dict())
            rewards.append(compute_reward(metrics, party, reward_cfg))
        submission = {
            "submission_id": secrets.token_hex(8),
            "session": body.session,
            "encounters": body.encounters,
            "seed": seed,
            "results": results,
            "rewards": rewards,
            "provenance": "HUMAN",
        }
        if body.nickname:
            submission["nickname"] = body.nickname
        store.append_submission(submission)
        return submission

    @app.post("/api/suggest")
    def suggest(body: SuggestBody):
        record = session_or_404(body.session)
        party = _party_from_session(record, pack)
        rng = RngStream(secrets.randbits(63))
        ctx = GenerationContext(party=party, pack=pack, tier=Tier.DEADLY, rng=rng)
        if body.policy == "dm":
            return {"proposal": dm_policy.generate(ctx).as_dict()}
        if body.policy == "rnd":
            return {"proposal": rnd_policy.generate(ctx).as_dict()}
        if body.policy != "ntrl":
            raise ApiError(400, "INVALID_POLICY", f"unknown policy {body.policy!r}", "policy")
        if net is None:
            raise ApiError(409, "NO_MODEL_LOADED", "no checkpoint is loaded")
        proposal, step_probs = _ntrl_suggest(party, ctx)
        return {"proposal": proposal, "action_probabilities": step_probs}

    def _ntrl_suggest(party: Party, ctx: GenerationContext):
        arch = net.arch
        feats = encode_party(party, arch.vocab)
        params = {k: v.astype(np.float32) for k, v in net.params.items()}
        cache = _party_cache(params, feats, np.float32)
        monster_ids = pack.monster_ids()
        labels = monster_ids + ["STOP"]
        synergy = np.zeros(arch.n_classes, dtype=np.float64)
        picks: list[str] = []
        steps = []
        for i in range(arch.max_enemies):
            step = _synergy_step(params, cache, synergy, i == 0, np.float32, arch.n_actions,
                                 arch.synergy_logit_boost, arch.stop_boost_delay)
            a = _sample_index(ctx.rng, step["probs"])
            steps.append({
                "probabilities": {label: float(p) for label, p in zip(labels, step["probs"])},
                "action": labels[a],
            })
            if a == arch.n_classes:
                break
            picks.append(monster_ids[a])
            synergy[a] += 1
        raw, adjusted = adjusted_xp_for_ids(picks, pack)
        b = ctx.budget()
        proposal = {
            "enemies": picks, "raw_xp": raw, "adjusted_xp": adjusted,
            "budget": {"per_character": b.per_character, "total": b.total,
                       "difficulty_tier": b.difficulty_tier.value},
            "provenance": "NTRL",
        }
        return proposal, steps

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
