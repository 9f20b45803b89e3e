"""Checkpoint format: round-trips, corruption, version and arch mismatches."""

import dataclasses
import struct

import numpy as np
import pytest

from ntrl.agent.checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from ntrl.agent.features import encode_party
from ntrl.agent.network import ArchConfig, PolicyNetwork, forward
from ntrl.sim.combat import Party, PartyMember
from ntrl.sim.rng import RngStream
from ntrl.training.partygen import generate_party


@pytest.fixture()
def net(pack):
    n = PolicyNetwork.create(ArchConfig.from_pack(pack), seed=11)
    gen = np.random.default_rng(4)
    n.params["W_out"] = gen.normal(0, 0.2, n.params["W_out"].shape).astype(np.float32)
    n.training_step = 123
    n.reward_config_digest = "abc123"
    return n


def test_round_trip_bit_exact_forward(pack, net, tmp_path):
    path = tmp_path / "model.ntrl"
    save_checkpoint(net, path)
    loaded = load_checkpoint(path)
    assert loaded.training_step == 123
    assert loaded.seed == net.seed
    assert loaded.reward_config_digest == "abc123"
    assert loaded.arch == net.arch
    rng = RngStream(0)
    for i in range(100):
        party = generate_party(pack, rng.split(f"p/{i}"))
        feats = encode_party(party, net.arch.vocab)
        synergy = np.zeros(26)
        synergy[i % 26] = i % 4
        a = forward(net, feats, synergy)
        b = forward(loaded, feats, synergy)
        assert np.array_equal(a, b), "forward outputs must be bit-identical"


def test_magic_bytes(net, tmp_path):
    path = tmp_path / "model.ntrl"
    save_checkpoint(net, path)
    assert path.read_bytes()[:4] == b"NTRL"


def test_truncated_file_rejected(net, tmp_path):
    path = tmp_path / "model.ntrl"
    save_checkpoint(net, path)
    data = path.read_bytes()
    path.write_bytes(data[: len(data) // 2])
    with pytest.raises(CheckpointError) as err:
        load_checkpoint(path)
    assert err.value.code == "CORRUPT_CHECKPOINT"


def test_bitflip_rejected(net, tmp_path):
    path = tmp_path / "model.ntrl"
    save_checkpoint(net, path)
    data = bytearray(path.read_bytes())
    data[len(data) // 2] ^= 0xFF
    path.write_bytes(bytes(data))
    with pytest.raises(CheckpointError) as err:
        load_checkpoint(path)
    assert err.value.code == "CORRUPT_CHECKPOINT"


def test_unknown_format_version_rejected(net, tmp_path):
    path = tmp_path / "model.ntrl"
    save_checkpoint(net, path)
    data = bytearray(path.read_bytes())
    import hashlib
    struct.pack_into("<I", data, 4, 999)
    body = bytes(data[:-32])
    data[-32:] = hashlib.sha256(body).digest()
    path.write_bytes(bytes(data))
    with pytest.raises(CheckpointError) as err:
        load_checkpoint(path)
    assert err.value.code == "VERSION_MISMATCH"


def test_architecture_mismatch_rejected(pack, net, tmp_path):
    path = tmp_path / "model.ntrl"
    save_checkpoint(net, path)
    other = dataclasses.replace(net.arch, group_hidden=64)
    with pytest.raises(CheckpointError) as err:
        load_checkpoint(path, expect_arch=other)
    assert err.value.code == "VERSION_MISMATCH"
    assert load_checkpoint(path, expect_arch=net.arch).arch == net.arch


def test_not_a_checkpoint(tmp_path):
    path = tmp_path / "nope.ntrl"
    path.write_bytes(b"hello world, definitely not a checkpoint")
    with pytest.raises(CheckpointError) as err:
        load_checkpoint(path)
    assert err.value.code == "CORRUPT_CHECKPOINT"
