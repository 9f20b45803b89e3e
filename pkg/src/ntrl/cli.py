"""Command-line entry points: train, eval, suggest, simulate, baseline,
gradcheck, serve. Results go to stdout as JSON; failures exit non-zero with
a machine-readable error object on stderr."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ntrl.content.loader import PackError, load_content_pack, load_default_pack
from ntrl.content.models import ContentPack, Tier
from ntrl.sim.combat import Encounter, Party, PartyMember
from ntrl.sim.rng import RngStream


def _fail(code: str, message: str, exit_code: int = 1):
    sys.stderr.write(json.dumps({"code": code, "message": message}) + "\n")
    raise SystemExit(exit_code)


def _load_pack(args) -> ContentPack:
    try:
        if getattr(args, "pack", None):
            return load_content_pack(args.pack)
        return load_default_pack()
    except PackError as e:
        _fail(e.code, str(e))


def _load_party(path: str, pack: ContentPack) -> Party:
    doc = json.loads(Path(path).read_text())
    members = []
    for m in doc["members"]:
        template = pack.pc_templates.get(m["template_id"])
        if template is None:
            _fail("UNKNOWN_CLASS", f"unknown PC template {m['template_id']!r}")
        members.append(PartyMember(base=template,
                                   hp_current=m.get("hp_current", template.hp_max)))
    try:
        return Party(tuple(members))
    except ValueError as e:
        _fail("INVALID_PARTY", str(e))


def _load_encounter(path: str, pack: ContentPack) -> Encounter:
    doc = json.loads(Path(path).read_text())
    enemies = []
    for mid in doc["enemies"]:
        monster = pack.monsters.get(mid)
        if monster is None:
            _fail("UNKNOWN_MONSTER", f"unknown monster {mid!r}")
        enemies.append(monster)
    try:
        return Encounter(tuple(enemies))
    except ValueError as e:
        _fail("INVALID_ENCOUNTER", str(e))


def _reward_config(args):
    from ntrl.training.reward import RewardConfig
    if getattr(args, "config", None):
        doc = json.loads(Path(args.config).read_text())
        return RewardConfig(**doc.get("reward", {})), doc
    return RewardConfig(), {}


def cmd_simulate(args):
    from ntrl.sim.batch import run_batch
    pack = _load_pack(args)
    party = _load_party(args.party, pack)
    encounter = _load_encounter(args.encounter, pack)
    metrics = run_batch(party, encounter, args.sims, args.seed, pack, Tier(args.tier))
    print(json.dumps(metrics.as_dict(), indent=2))


def cmd_suggest(args):
    from ntrl.policies.base import GenerationContext
    from ntrl.policies.dm import DmPolicy
    from ntrl.policies.rnd import RndPolicy
    from ntrl.training.loop import NtrlPolicy
    pack = _load_pack(args)
    party = _load_party(args.party, pack)
    if args.policy == "dm":
        policy = DmPolicy()
    elif args.policy == "rnd":
        policy = RndPolicy()
    else:
        if not args.ckpt:
            _fail("NO_MODEL_LOADED", "policy=ntrl needs --ckpt")
        policy = NtrlPolicy.from_checkpoint(args.ckpt)
    ctx = GenerationContext(party=party, pack=pack, tier=Tier(args.tier),
                            rng=RngStream(args.seed))
    print(json.dumps(policy.generate(ctx).as_dict(), indent=2))


def cmd_baseline(args):
    from ntrl.policies.dm import DmPolicy
    from ntrl.policies.evaluate import evaluate_policy
    from ntrl.policies.rnd import RndPolicy
    from ntrl.training.partygen import HpVariationConfig
    pack = _load_pack(args)
    policy = DmPolicy() if args.policy == "dm" else RndPolicy()
    hv = HpVariationConfig() if args.hp_variation else None
    _, summary = evaluate_policy(policy, pack, args.parties, args.sims, args.seed,
                                 Tier(args.tier), hp_variation=hv)
    print(json.dumps(summary.as_dict(), indent=2))


def cmd_gradcheck(args):
    from ntrl.agent.gradcheck import run_gradcheck
    pack = _load_pack(args)
    report = run_gradcheck(pack, n_nets=args.nets, n_inputs=args.inputs,
                           seed=args.seed, coords_per_param=args.coords)
    print(json.dumps(report, indent=2))
    if report["max_relative_error"] >= args.tolerance:
        raise SystemExit(1)


def cmd_train(args):
    from ntrl.training.loop import TrainConfig, run_experiment
    from ntrl.training.reward import RewardConfig
    kwargs = dict(
        steps=args.steps, sims_per_step=args.sims,
        learning_rate=args.lr, pack_path=args.pack, out_dir=args.out,
        hp_variation=not args.no_hp_variation,
    )
    if args.seeds:
        kwargs["seeds"] = tuple(args.seeds)
    if args.config:
        doc = json.loads(Path(args.config).read_text())
        kwargs.update(doc.get("train", {}))
        if "seeds" in kwargs:
            kwargs["seeds"] = tuple(kwargs["seeds"])
        if "reward" in doc:
            kwargs["reward"] = RewardConfig(**doc["reward"])
    cfg = TrainConfig(**kwargs)
    results = run_experiment(cfg)
    summary = {
        str(seed): {
            "steps": len(records),
            "final_reward_mean_100": sum(r.reward for r in records[-100:]) / min(100, len(records)),
            "out": str(Path(cfg.out_dir) / f"seed-{seed}"),
        }
        for seed, (net, records) in results.items()
    }
    print(json.dumps(summary, indent=2))


def cmd_eval(args):
    from ntrl.training.loop import evaluate_final
    pack = _load_pack(args)
    report = evaluate_final(args.ckpt, args.parties, args.sims,
                            hp_variation=args.hp_variation, base_seed=args.seed,
                            pack=pack, tier=Tier(args.tier))
    print(json.dumps(report, indent=2))


def cmd_serve(args):
    import os
    import uvicorn
    from ntrl.service.app import create_app
    port = args.port if args.port is not None else int(os.environ.get("NTRL_PORT", "8000"))
    app = create_app(pack_path=args.pack, ckpt_path=args.ckpt,
                     data_dir=args.data_dir, static_dir=args.static_dir)
    uvicorn.run(app, host=args.host, port=port, log_level="info")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ntrl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--pack", default=None, help="content pack directory (default: bundled)")
        p.add_argument("--config", default=None, help="experiment config JSON")
        return p

    p = common(sub.add_parser("simulate", help="run a combat batch"))
    p.add_argument("--party", required=True)
    p.add_argument("--encounter", required=True)
    p.add_argument("--sims", type=int, default=100)
    p.add_argument("--tier", default="DEADLY", choices=[t.value for t in Tier])
    p.set_defaults(func=cmd_simulate)

    p = common(sub.add_parser("suggest", help="generate one encounter"))
    p.add_argument("--party", required=True)
    p.add_argument("--policy", default="dm", choices=["ntrl", "dm", "rnd"])
    p.add_argument("--ckpt", default=None)
    p.add_argument("--tier", default="DEADLY", choices=[t.value for t in Tier])
    p.set_defaults(func=cmd_suggest)

    p = common(sub.add_parser("baseline", help="evaluate a baseline policy"))
    p.add_argument("--policy", default="dm", choices=["dm", "rnd"])
    p.add_argument("--parties", type=int, default=100)
    p.add_argument("--sims", type=int, default=25)
    p.add_argument("--tier", default="DEADLY", choices=[t.value for t in Tier])
    p.add_argument("--hp-variation", action="store_true")
    p.set_defaults(func=cmd_baseline)

    p = common(sub.add_parser("gradcheck", help="finite-difference gradient audit"))
    p.add_argument("--nets", type=int, default=5)
    p.add_argument("--inputs", type=int, default=5)
    p.add_argument("--coords", type=int, default=25, help="sampled coordinates per parameter")
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.set_defaults(func=cmd_gradcheck)

    p = common(sub.add_parser("train", help="train the encounter policy"))
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--sims", type=int, default=100)
    p.add_argument("--seeds", type=int, nargs="*", default=None)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--out", default="runs")
    p.add_argument("--no-hp-variation", action="store_true")
    p.set_defaults(func=cmd_train)

    p = common(sub.add_parser("eval", help="evaluate trained checkpoints"))
    p.add_argument("--ckpt", nargs="+", required=True)
    p.add_argument("--parties", type=int, default=100)
    p.add_argument("--sims", type=int, default=100)
    p.add_argument("--tier", default="DEADLY", choices=[t.value for t in Tier])
    p.add_argument("--hp-variation", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = common(sub.add_parser("serve", help="run the HTTP service"))
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--ckpt", default=None)
    p.add_argument("--data-dir", default=None)
    p.add_argument("--static-dir", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except SystemExit:
        raise
    except PackError as e:
        _fail(e.code, str(e))
    except FileNotFoundError as e:
        _fail("MISSING_FILE", str(e))
    return 0


if __name__ == "__main__":
    sys.exit(main())
