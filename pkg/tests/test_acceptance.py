"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL
line. P5 and P6 run full evaluation/training protocols and take minutes."""

import itertools
import json
import time

import numpy as np
import pytest

from ntrl.agent.checkpoint import save_checkpoint
from ntrl.agent.gradcheck import run_gradcheck
from ntrl.agent.network import ArchConfig, PolicyNetwork
from ntrl.content.models import Tier
from ntrl.policies.dm import DmPolicy, best_encounter_for_budget
from ntrl.policies.evaluate import evaluate_policy
from ntrl.policies.rnd import RndPolicy
from ntrl.sim.batch import BatchMetrics, run_batch
from ntrl.sim.combat import Encounter, run_combat
from ntrl.sim.rng import RngStream
from ntrl.training.experiments import run_desk_scale
from ntrl.training.partygen import HP_THRESHOLDS, HpVariationConfig, apply_hp_variation, generate_party
from ntrl.training.reinforce import Adam, RunningBaseline, apply_policy_gradient
from ntrl.training.reward import RewardConfig, compute_reward


def report(name: str, ok: bool, detail: str = ""):
    print(f"{name}: {'PASS' if ok else 'FAIL'}" + (f"  [{detail}]" if detail else ""))
    assert ok, f"{name} failed: {detail}"


# -- P1 ------------------------------------------------------------------------

def test_p1_determinism(pack, party4):
    encounter = Encounter((pack.monsters["troll"], pack.monsters["ogre"]))
    runs = [run_combat(party4, encounter, 421, pack) for _ in range(2)]
    logs_equal = json.dumps(runs[0].log) == json.dumps(runs[1].log)
    results_equal = runs[0] == runs[1]
    batches = [run_batch(party4, encounter, 50, 77, pack) for _ in range(2)]
    report("P1 determinism", logs_equal and results_equal and batches[0] == batches[1],
           f"{len(runs[0].log)} log events byte-identical, batch metrics identical")


# -- P2 ------------------------------------------------------------------------

def test_p2_gradient_correctness(pack):
    result = run_gradcheck(pack, n_nets=5, n_inputs=5, seed=0, coords_per_param=25)
    report("P2 gradient correctness", result["max_relative_error"] < 1e-4,
           f"max rel err {result['max_relative_error']:.3g} over "
           f"{result['coordinates_checked']} coordinates")


# -- P3 ------------------------------------------------------------------------

def test_p3_synthetic_bandit():
    def softmax(z):
        e = np.exp(z - z.max())
        return e / e.sum()

    steps_needed = []
    for seed in range(1, 6):
        params = {"logits": np.zeros(2, dtype=np.float32)}
        opt = Adam(lr=0.1)
        baseline = RunningBaseline(window=100)
        rng = RngStream(seed)
        reached = None
        for step in range(500):
            p = softmax(params["logits"].astype(np.float64))
            arm = 0 if rng.uniform() < p[0] else 1
            reward = 1.0 if arm == 0 else 0.0
            grad = -p
            grad[arm] += 1.0
            advantage = reward - baseline.value()
            apply_policy_gradient(params, [({"logits": grad}, advantage)], opt)
            baseline.update(reward)
            if softmax(params["logits"])[0] >= 0.99:
                reached = step + 1
                break
        steps_needed.append(reached)
    report("P3 synthetic bandit", all(s is not None for s in steps_needed),
           f"better arm >= 0.99 within {steps_needed} steps for 5/5 seeds")


# -- P4 ------------------------------------------------------------------------

def test_p4_dm_heuristic_optimality(pack):
    # toy pools of <= 4 monster types against the enumeration oracle
    rng = RngStream(404)
    pool_choices = [
        ["goblin", "ogre", "owlbear", "troll"],
        ["kobold", "orc", "ettin"],
        ["wolf", "bandit_captain", "veteran", "hill_giant"],
    ]
    checked = 0
    for toy_ids in pool_choices:
        xp_by_id = {mid: pack.monsters[mid].xp_value for mid in toy_ids}

        class Toy:
            monsters = {mid: pack.monsters[mid] for mid in toy_ids}

            def monster_ids(self):
                return sorted(self.monsters)

            def multiplier(self, n):
                return pack.multiplier(n)

        toy = Toy()
        budgets = [rng.randint(50, 12_000) for _ in range(100 if len(toy_ids) == 4 else 0)]
        for budget in budgets:
            _, adjusted = best_encounter_for_budget(toy, budget)
            oracle = min(
                abs(int(sum(xp_by_id[c] for c in combo) * pack.multiplier(k)) - budget)
                for k in range(1, 9)
                for combo in itertools.combinations_with_replacement(sorted(toy_ids), k)
            )
            assert abs(adjusted - budget) == oracle, f"pool {toy_ids} budget {budget}"
            checked += 1

    # full 26-class pool: mean |team XP difference| under 10% of mean budget
    _, summary = evaluate_policy(DmPolicy(), pack, 100, 1, base_seed=4040)
    evals, _ = evaluate_policy(DmPolicy(), pack, 100, 1, base_seed=4040)
    mean_abs_diff = sum(abs(e.proposal.adjusted_xp - e.proposal.budget.total)
                        for e in evals) / len(evals)
    mean_budget = sum(e.proposal.budget.total for e in evals) / len(evals)
    ok = mean_abs_diff < 0.10 * mean_budget
    report("P4 DM heuristic optimality", ok,
           f"{checked} oracle-matched toy budgets; full pool mean |adjusted-budget| "
           f"{mean_abs_diff:.1f} vs 10% of mean budget {0.1 * mean_budget:.1f}")


# -- P5 ------------------------------------------------------------------------

def test_p5_baseline_ordering(pack):
    lines = []
    ok_all = True
    for seed in (1, 2, 3):
        _, dm = evaluate_policy(DmPolicy(), pack, 200, 25, seed)
        _, rnd = evaluate_policy(RndPolicy(), pack, 200, 25, seed)
        seed_ok = (rnd.tpk_rate > dm.tpk_rate) and (rnd.win_probability < dm.win_probability)
        ok_all = ok_all and seed_ok
        lines.append(f"seed {seed}: RND tpk {rnd.tpk_rate:.2f} > DM {dm.tpk_rate:.2f} "
                     f"and RND wp {rnd.win_probability:.3f} < DM {dm.win_probability:.3f}"
                     f" -> {'ok' if seed_ok else 'VIOLATED'}")
    report("P5 baseline ordering", ok_all, "; ".join(lines))


# -- P6 ------------------------------------------------------------------------

def test_p6_desk_scale_training(pack):
    comparisons = run_desk_scale(pack)
    passed = sum(1 for c in comparisons if c.passes())
    for c in comparisons:
        flags = " ".join(f"{k}={'Y' if v else 'n'}" for k, v in c.criteria().items())
        print(f"  seed {c.seed}: reward {c.ntrl_reward:.0f}/{c.dm_reward:.0f} "
              f"longevity {c.ntrl_longevity:.2f}/{c.dm_longevity:.2f} "
              f"hp% {c.ntrl_hp_pct:.1f}/{c.dm_hp_pct:.1f} wp {c.ntrl_wp:.3f} "
              f"tpk {c.ntrl_tpk:.2f}/{c.dm_tpk:.2f} | {flags}")
    report("P6 desk-scale training", passed >= 2,
           f"{passed}/3 seeds satisfied (a)-(d)")


# -- P7 ------------------------------------------------------------------------

def test_p7_reward_unit_suite():
    cfg = RewardConfig()

    def metrics(wp=0.0, fl=0.0, tpk=0, hp_pct=100.0, dmg=0.0, deaths=0):
        return BatchMetrics(win_probability=wp, fight_longevity=fl, tpk_count=tpk,
                            team_xp_difference=0, remaining_party_hp_pct=hp_pct,
                            total_damage_to_party=dmg, total_player_deaths=deaths,
                            n_sims=100)

    zero_ok = compute_reward(metrics(), None, cfg) == 0.0
    alpha_only_ok = all(compute_reward(metrics(wp=wp), None, cfg) == pytest.approx(1000 * wp)
                        for wp in (0.1, 0.5, 1.0))
    tpk_rewards = [compute_reward(metrics(wp=0.5, tpk=k), None, cfg) for k in range(6)]
    tpk_strict = all(a > b for a, b in zip(tpk_rewards, tpk_rewards[1:]))
    hand = compute_reward(metrics(wp=0.9, fl=7, hp_pct=60, dmg=90, deaths=50, tpk=1),
                          None, cfg) == pytest.approx(2180.0)
    report("P7 reward unit suite", zero_ok and alpha_only_ok and tpk_strict and hand,
           "zero form, alpha scaling, strict TPK monotonicity, hand example 2180")


# -- P8 ------------------------------------------------------------------------

def test_p8_hp_variation_bounds(pack):
    cfg = HpVariationConfig()
    rng = RngStream(808)
    applications = 0
    for i in range(2000):
        party = generate_party(pack, rng.split(f"p/{i}"))
        varied = apply_hp_variation(party, cfg, rng.split(f"v/{i}"))
        for member in varied.members:
            assert 1 <= member.hp_current <= member.base.hp_max
            applications += 1
        # the shared threshold is recoverable from the fixed set
        ratios = [m.hp_current / m.base.hp_max for m in varied.members]
        assert any(
            all(t * 0.95 - 0.51 / m.base.hp_max <= r <= min(t * 1.05 + 0.51 / m.base.hp_max, 1.0)
                or (m.hp_current == 1 and t * 1.05 * m.base.hp_max <= 1.51)
                for r, m in zip(ratios, varied.members))
            for t in HP_THRESHOLDS
        ), f"no threshold explains {ratios}"
    report("P8 HP variation bounds", applications >= 10_000,
           f"{applications} member applications all within clamp bounds and threshold set")


# -- P9 ------------------------------------------------------------------------

def test_p9_inference_latency(pack, tmp_path):
    from fastapi.testclient import TestClient
    from ntrl.service.app import create_app

    net = PolicyNetwork.create(ArchConfig.from_pack(pack), seed=9)
    ckpt = tmp_path / "latency.ntrl"
    save_checkpoint(net, ckpt)
    app = create_app(ckpt_path=str(ckpt), data_dir=str(tmp_path / "data"))
    client = TestClient(app)
    session = client.get("/api/party/random").json()["session"]

    latencies = []
    for _ in range(50):
        start = time.perf_counter()
        response = client.post("/api/suggest", json={"session": session, "policy": "ntrl"})
        latencies.append((time.perf_counter() - start) * 1e3)
        assert response.status_code == 200
    median = sorted(latencies)[len(latencies) // 2]
    report("P9 inference latency", median < 100.0,
           f"median {median:.1f} ms over 50 suggest calls")
