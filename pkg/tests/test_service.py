"""HTTP API surface: sessions, simulation, submissions, suggestions."""

import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from ntrl.agent.checkpoint import save_checkpoint
from ntrl.agent.network import ArchConfig, PolicyNetwork
from ntrl.content.xp import adjusted_xp_for_ids
from ntrl.service.app import create_app


@pytest.fixture()
def client(tmp_path):
    app = create_app(data_dir=str(tmp_path / "data"))
    return TestClient(app)


@pytest.fixture()
def client_with_model(pack, tmp_path):
    net = PolicyNetwork.create(ArchConfig.from_pack(pack), seed=1)
    ckpt = tmp_path / "model.ntrl"
    save_checkpoint(net, ckpt)
    app = create_app(ckpt_path=str(ckpt), data_dir=str(tmp_path / "data"))
    return TestClient(app)


def _session(client, hp_variation="off"):
    response = client.get(f"/api/party/random?hp_variation={hp_variation}")
    assert response.status_code == 200
    return response.json()


def test_party_random_full_hp(client):
    doc = _session(client)
    assert 3 <= doc["party"]["size"] <= 8
    for member in doc["party"]["members"]:
        assert member["level"] == 5
        assert member["hp_current"] == member["hp_max"]


def test_sessions_are_distinct(client):
    assert _session(client)["session"] != _session(client)["session"]


def test_party_random_with_variation(client):
    # threshold 1.0 appears 1/7 of the time; over 12 sessions some damage
    # must show up
    hurt = 0
    for _ in range(12):
        doc = _session(client, hp_variation="on")
        if any(m["hp_current"] < m["hp_max"] for m in doc["party"]["members"]):
            hurt += 1
    assert hurt > 0


def test_monsters_listing(client):
    doc = client.get("/api/content/monsters").json()
    assert len(doc["monsters"]) == 26
    assert all({"id", "name", "xp_value"} <= set(m) for m in doc["monsters"])


def test_budget_endpoint(client, pack):
    session = _session(client)
    sid = session["session"]
    response = client.get(f"/api/budget?session={sid}&tier=DEADLY")
    assert response.status_code == 200
    doc = response.json()
    assert doc["per_character"] == 1100
    assert doc["total"] == 1100 * session["party"]["size"]
    assert client.get(f"/api/budget?session={sid}&tier=BANANAS").status_code == 400
    assert client.get("/api/budget?session=nope&tier=EASY").status_code == 404


def test_simulate_deterministic_with_seed(client):
    sid = _session(client)["session"]
    body = {"session": sid, "encounter": ["ogre", "ogre"], "sims": 30, "seed": 99}
    a = client.post("/api/simulate", json=body).json()
    b = client.post("/api/simulate", json=body).json()
    assert a == b
    assert a["metrics"]["n_sims"] == 30


def test_simulate_defaults_to_100_sims(client):
    sid = _session(client)["session"]
    doc = client.post("/api/simulate", json={"session": sid, "encounter": ["kobold"]}).json()
    assert doc["metrics"]["n_sims"] == 100


def test_simulate_validation(client):
    sid = _session(client)["session"]
    nine = client.post("/api/simulate", json={"session": sid, "encounter": ["kobold"] * 9})
    assert nine.status_code == 400
    assert nine.json()["code"] == "INVALID_ENCOUNTER"
    unknown = client.post("/api/simulate", json={"session": sid, "encounter": ["tarrasque"]})
    assert unknown.status_code == 400
    missing = client.post("/api/simulate", json={"session": "nope", "encounter": ["kobold"]})
    assert missing.status_code == 404
    capped = client.post("/api/simulate",
                         json={"session": sid, "encounter": ["kobold"], "sims": 5000})
    assert capped.status_code == 400
    assert capped.json()["code"] == "TOO_MANY_SIMS"


def test_submission_flow_and_replay(client, pack, tmp_path):
    sid = _session(client)["session"]
    encounters = [["ogre"], ["ogre", "ogre"], ["troll"]]
    doc = client.post("/api/submissions",
                      json={"session": sid, "encounters": encounters}).json()
    assert len(doc["results"]) == 3
    assert all(r["n_sims"] == 100 for r in doc["results"])

    # stored metrics replay exactly from the recorded seed
    from ntrl.service.store import Store
    from ntrl.sim.batch import run_batch
    from ntrl.sim.combat import Encounter, Party, PartyMember
    from ntrl.sim.rng import RngStream
    store_dir = None
    # the client fixture used tmp_path/data
    stored = json.loads((tmp_path / "data" / "submissions.jsonl").read_text().splitlines()[0])
    sessions = {json.loads(line)["session_id"]: json.loads(line)
                for line in (tmp_path / "data" / "sessions.jsonl").read_text().splitlines()}
    session = sessions[stored["session"]]
    party = Party(tuple(
        PartyMember(base=pack.pc_templates[tid], hp_current=hp)
        for tid, hp in zip(session["party_templates"], session["party_hp"])))
    for i, ids in enumerate(stored["encounters"]):
        enc = Encounter(tuple(pack.monsters[m] for m in ids))
        replayed = run_batch(party, enc, 100,
                             RngStream(stored["seed"]).split(f"submission/{i}").seed, pack)
        assert replayed.as_dict() == stored["results"][i]


def test_submission_validation(client):
    sid = _session(client)["session"]
    dup = client.post("/api/submissions", json={
        "session": sid, "encounters": [["ogre"], ["ogre"], ["troll"]]})
    assert dup.status_code == 400
    assert dup.json()["code"] == "DUPLICATE_ENCOUNTER"
    # multiset identity: order does not make encounters distinct
    reordered = client.post("/api/submissions", json={
        "session": sid, "encounters": [["ogre", "wolf"], ["wolf", "ogre"], ["troll"]]})
    assert reordered.status_code == 400
    wrong = client.post("/api/submissions", json={"session": sid, "encounters": [["ogre"]]})
    assert wrong.status_code == 400
    assert wrong.json()["code"] == "WRONG_COUNT"


def test_suggest_dm_matches_budget(client):
    session = _session(client)
    doc = client.post("/api/suggest",
                      json={"session": session["session"], "policy": "dm"}).json()
    proposal = doc["proposal"]
    assert proposal["provenance"] == "DM"
    budget = proposal["budget"]["total"]
    assert abs(proposal["adjusted_xp"] - budget) <= 50


def test_suggest_without_model_409(client):
    sid = _session(client)["session"]
    response = client.post("/api/suggest", json={"session": sid, "policy": "ntrl"})
    assert response.status_code == 409
    assert response.json()["code"] == "NO_MODEL_LOADED"


def test_suggest_ntrl_probabilities(client_with_model):
    sid = _session(client_with_model)["session"]
    doc = client_with_model.post("/api/suggest",
                                 json={"session": sid, "policy": "ntrl"}).json()
    proposal = doc["proposal"]
    assert proposal["provenance"] == "NTRL"
    assert 1 <= len(proposal["enemies"]) <= 8
    steps = doc["action_probabilities"]
    assert len(steps) >= 1
    for step in steps:
        total = sum(step["probabilities"].values())
        assert abs(total - 1.0) < 1e-6
    # the first step masks the terminal action
    assert steps[0]["probabilities"]["STOP"] == 0.0


def test_encounter_xp_endpoint(client, pack):
    doc = client.post("/api/encounter/xp", json={"encounter": ["goblin", "goblin"]}).json()
    assert doc == {"raw_xp": 100, "adjusted_xp": 150}
    raw, adjusted = adjusted_xp_for_ids(["goblin", "goblin"], pack)
    assert (doc["raw_xp"], doc["adjusted_xp"]) == (raw, adjusted)


def test_xp_tables_endpoint(client, pack):
    doc = client.get("/api/content/xp-tables").json()
    assert doc["encounter_multipliers"][0] == [1, 1.0]
    assert doc["xp_budget_per_character"]["5"]["DEADLY"] == 1100


def test_session_party_immutable(client):
    session = _session(client)
    sid = session["session"]
    before = session["party"]
    client.post("/api/simulate", json={"session": sid, "encounter": ["troll"], "sims": 10})
    budget_doc = client.get(f"/api/budget?session={sid}&tier=EASY")
    assert budget_doc.status_code == 200
    # re-deriving the budget never mutates the stored party; simulate twice
    # and confirm the session produces identical budgets
    again = client.get(f"/api/budget?session={sid}&tier=EASY")
    assert budget_doc.json() == again.json()
