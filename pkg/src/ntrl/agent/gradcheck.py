"""Finite-difference audit of the policy gradients.

Small randomly initialized networks are sampled against random parties; for
every parameter tensor a random subset of coordinates is perturbed with
central differences in float64 and compared against the analytic gradient.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from ntrl.content.models import ContentPack
from ntrl.sim.rng import RngStream
from ntrl.training.partygen import HpVariationConfig, apply_hp_variation, generate_party
from ntrl.agent.features import encode_party
from ntrl.agent.network import (
    ArchConfig,
    PolicyNetwork,
    SampleTrace,
    _party_cache,
    _synergy_step,
    log_prob_gradient,
    sample_encounter,
)

FD_EPS = 3e-5


def small_arch(pack: ContentPack, init_seed: int) -> ArchConfig:
    """A shrunken architecture over the real vocabularies; cheap enough for
    exhaustive-ish coordinate probing."""
    return replace(
        ArchConfig.from_pack(pack, init_seed=init_seed),
        class_emb_dim=4, multihot_dim=3, num_proj_dim=6,
        synergy_proj_dim=8, group_hidden=12,
    )


def trace_log_prob(params: dict, arch: ArchConfig, feats, trace: SampleTrace
                   ) -> tuple[float, bytes]:
    """Total log-probability of a trace under float64 params, plus the ReLU
    activation pattern. Central differences are only valid when both
    evaluations share a pattern (the loss is piecewise smooth in between)."""
    prms = {k: v.astype(np.float64) for k, v in params.items()}
    cache = _party_cache(prms, feats, np.float64)
    synergy = np.zeros(arch.n_classes, dtype=np.float64)
    stop_index = arch.n_classes
    total = 0.0
    pattern = [(cache["h_num"] > 0).tobytes(), (cache["g_num"] > 0).tobytes(),
               (cache["g_cat"] > 0).tobytes()]
    for t in range(len(trace.log_probs)):
        action = trace.action_at(t, stop_index)
        step = _synergy_step(prms, cache, synergy, t == 0, np.float64, arch.n_actions,
                             arch.synergy_logit_boost, arch.stop_boost_delay)
        pattern.append((step["h_syn"] > 0).tobytes())
        pattern.append((step["g_syn"] > 0).tobytes())
        total += float(np.log(step["probs"][action]))
        if action != stop_index:
            synergy[action] += 1
    return total, b"".join(pattern)


def run_gradcheck(pack: ContentPack, n_nets: int = 5, n_inputs: int = 5,
                  seed: int = 0, coords_per_param: int = 25) -> dict:
    """Max relative FD error over n_nets random nets x n_inputs random
    parties/traces. The relative error floor avoids dividing rounding noise
    by a true-zero gradient."""
    rng = RngStream(seed)
    coord_gen = np.random.default_rng(seed)
    worst = 0.0
    worst_at = ""
    checks = 0
    kink_skips = 0
    for ni in range(n_nets):
        arch = small_arch(pack, init_seed=seed * 1000 + ni)
        net = PolicyNetwork.create(arch, seed=seed * 1000 + ni)
        # random-ish output layer: zero init would make most logits flat
        out_gen = np.random.default_rng(seed * 1000 + ni + 1)
        net.params["W_out"] = out_gen.normal(0, 0.3, net.params["W_out"].shape).astype(np.float32)
        for ii in range(n_inputs):
            party_rng = rng.split(f"party/{ni}/{ii}")
            party = generate_party(pack, party_rng)
            party = apply_hp_variation(party, HpVariationConfig(), party_rng)
            feats = encode_party(party, arch.vocab)
            _, trace, _ = sample_encounter(net, party, pack,
                                           rng.split(f"trace/{ni}/{ii}"), dtype=np.float64)
            grads, _ = log_prob_gradient(net, feats, trace, dtype=np.float64)
            base = {k: v.astype(np.float64) for k, v in net.params.items()}
            for name, arr in base.items():
                k = min(coords_per_param, arr.size)
                for flat in coord_gen.choice(arr.size, size=k, replace=False):
                    plus = {k2: (v.copy() if k2 == name else v) for k2, v in base.items()}
                    minus = {k2: (v.copy() if k2 == name else v) for k2, v in base.items()}
                    plus[name].flat[flat] += FD_EPS
                    minus[name].flat[flat] -= FD_EPS
                    f_plus, pat_plus = trace_log_prob(plus, arch, feats, trace)
                    f_minus, pat_minus = trace_log_prob(minus, arch, feats, trace)
                    if pat_plus != pat_minus:
                        kink_skips += 1
                        continue
                    fd = (f_plus - f_minus) / (2 * FD_EPS)
                    an = float(grads[name].flat[flat])
                    rel = abs(fd - an) / max(abs(fd), abs(an), 1e-6)
                    checks += 1
                    if rel > worst:
                        worst = rel
                        worst_at = f"net {ni} input {ii} {name}[{flat}]"
    return {
        "nets": n_nets,
        "inputs_per_net": n_inputs,
        "coordinates_checked": checks,
        "relu_boundary_skips": kink_skips,
        "max_relative_error": worst,
        "worst_coordinate": worst_at,
        "epsilon": FD_EPS,
    }
