"""The encounter policy network and its hand-rolled gradients.

Architecture: a shared per-member encoder (numeric projection plus
categorical embeddings) mean-pooled over the presence mask, a projection of
the running enemy-count vector, one 128-unit ReLU layer per feature group
(numeric / categorical / synergy), concatenation, and a linear layer to 27
logits: one per enemy class plus a terminal action that ends the encounter
early. Forward and backward run in float32 (training) or float64 (used by
the finite-difference checks).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ntrl.content.models import ContentPack
from ntrl.sim.combat import Encounter, Party
from ntrl.sim.rng import RngStream
from ntrl.agent.features import MAX_MEMBERS, FeatureVocab, PartyFeatures, encode_party

STOP = "STOP"


class ShapeMismatchError(Exception):
    """Input shapes disagree with the architecture config."""


class TraceMismatchError(Exception):
    """A replayed trace does not reproduce its recorded log-probabilities."""


@dataclass(frozen=True)
class ArchConfig:
    vocab: FeatureVocab
    n_classes: int
    max_enemies: int = 8
    class_emb_dim: int = 16
    multihot_dim: int = 8
    num_proj_dim: int = 32
    synergy_proj_dim: int = 32
    group_hidden: int = 128
    # fixed residuals from the enemy-count vector to the logits: picked
    # classes get stickier within an episode and the terminal action ramps
    # up once a team has formed, so sampling explores coherent compositions
    # across sizes instead of only incoherent max-size mixtures. Constant
    # with respect to parameters; the output layer can learn to override.
    synergy_logit_boost: float = 1.5
    stop_boost_delay: int = 2
    init_seed: int = 0

    @staticmethod
    def from_pack(pack: ContentPack, init_seed: int = 0) -> "ArchConfig":
        return ArchConfig(vocab=FeatureVocab.from_pack(pack),
                          n_classes=len(pack.monsters), init_seed=init_seed)

    @property
    def n_actions(self) -> int:
        return self.n_classes + 1          # + STOP

    @property
    def cat_dim(self) -> int:
        return self.class_emb_dim + 4 * self.multihot_dim

    def to_json(self) -> dict:
        return {
            "vocab": self.vocab.to_json(),
            "n_classes": self.n_classes,
            "max_enemies": self.max_enemies,
            "class_emb_dim": self.class_emb_dim,
            "multihot_dim": self.multihot_dim,
            "num_proj_dim": self.num_proj_dim,
            "synergy_proj_dim": self.synergy_proj_dim,
            "group_hidden": self.group_hidden,
            "synergy_logit_boost": self.synergy_logit_boost,
            "stop_boost_delay": self.stop_boost_delay,
            "init_seed": self.init_seed,
        }

    @staticmethod
    def from_json(d: dict) -> "ArchConfig":
        return ArchConfig(
            vocab=FeatureVocab.from_json(d["vocab"]),
            n_classes=d["n_classes"],
            max_enemies=d["max_enemies"],
            class_emb_dim=d["class_emb_dim"],
            multihot_dim=d["multihot_dim"],
            num_proj_dim=d["num_proj_dim"],
            synergy_proj_dim=d["synergy_proj_dim"],
            group_hidden=d["group_hidden"],
            synergy_logit_boost=d.get("synergy_logit_boost", 0.0),
            stop_boost_delay=d.get("stop_boost_delay", 0),
            init_seed=d["init_seed"],
        )


def _param_shapes(arch: ArchConfig) -> dict[str, tuple[int, ...]]:
    v = arch.vocab
    h = arch.group_hidden
    return {
        "class_emb": (len(v.pc_class_ids), arch.class_emb_dim),
        "W_saves": (6, arch.multihot_dim),
        "W_resist": (len(v.damage_types), arch.multihot_dim),
        "W_spells": (len(v.spell_ids), arch.multihot_dim),
        "W_abil": (len(v.ability_tags), arch.multihot_dim),
        "W_num": (v.numeric_dim, arch.num_proj_dim),
        "b_num": (arch.num_proj_dim,),
        "W_gnum": (arch.num_proj_dim, h),
        "b_gnum": (h,),
        "W_gcat": (arch.cat_dim, h),
        "b_gcat": (h,),
        "W_syn": (arch.n_classes, arch.synergy_proj_dim),
        "b_syn": (arch.synergy_proj_dim,),
        "W_gsyn": (arch.synergy_proj_dim, h),
        "b_gsyn": (h,),
        "W_out": (3 * h, arch.n_actions),
        "b_out": (arch.n_actions,),
    }


_BIAS_FAN_IN = {"b_num": "W_num", "b_gnum": "W_gnum", "b_gcat": "W_gcat",
                "b_syn": "W_syn", "b_gsyn": "W_gsyn"}


def init_params(arch: ArchConfig) -> dict[str, np.ndarray]:
    """Uniform fan-in init for weights and hidden biases; the output layer
    starts at zero so the initial policy is uniform over actions. Non-zero
    hidden biases also keep preactivations off the ReLU kink for the
    all-zero synergy input."""
    gen = np.random.default_rng(arch.init_seed)
    shapes = _param_shapes(arch)
    params: dict[str, np.ndarray] = {}
    for name, shape in shapes.items():
        if name in ("W_out", "b_out"):
            params[name] = np.zeros(shape, dtype=np.float32)
        else:
            fan_in = shapes[_BIAS_FAN_IN[name]][0] if name in _BIAS_FAN_IN else shape[0]
            bound = 1.0 / np.sqrt(fan_in)
            params[name] = gen.uniform(-bound, bound, size=shape).astype(np.float32)
    return params


@dataclass
class PolicyNetwork:
    arch: ArchConfig
    params: dict[str, np.ndarray]
    training_step: int = 0
    seed: int = 0
    reward_config_digest: str = ""

    @staticmethod
    def create(arch: ArchConfig, seed: int = 0) -> "PolicyNetwork":
        return PolicyNetwork(arch=replace(arch, init_seed=seed),
                             params=init_params(replace(arch, init_seed=seed)),
                             seed=seed)

    def zeros_like_params(self) -> dict[str, np.ndarray]:
        return {k: np.zeros_like(v) for k, v in self.params.items()}


# ---------------------------------------------------------------------------
# forward

def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max()
    e = np.exp(shifted)
    return e / e.sum()


def _party_cache(params: dict, feats: PartyFeatures, dtype) -> dict:
    mask = feats.mask.astype(dtype)
    m = mask.sum()
    x_num = feats.numeric.astype(dtype)
    h_num_pre = x_num @ params["W_num"] + params["b_num"]
    h_num = np.maximum(h_num_pre, 0)
    pool_num = (mask @ h_num) / m
    g_num_pre = pool_num @ params["W_gnum"] + params["b_gnum"]
    g_num = np.maximum(g_num_pre, 0)

    h_cat = np.concatenate([
        params["class_emb"][feats.class_ids],
        feats.saves.astype(dtype) @ params["W_saves"],
        feats.resistances.astype(dtype) @ params["W_resist"],
        feats.spell_lists.astype(dtype) @ params["W_spells"],
        feats.abilities.astype(dtype) @ params["W_abil"],
    ], axis=1)
    pool_cat = (mask @ h_cat) / m
    g_cat_pre = pool_cat @ params["W_gcat"] + params["b_gcat"]
    g_cat = np.maximum(g_cat_pre, 0)

    return {
        "mask": mask, "m": m, "x_num": x_num,
        "h_num": h_num, "pool_num": pool_num, "g_num": g_num,
        "pool_cat": pool_cat, "g_cat": g_cat,
    }


def _synergy_step(params: dict, cache: dict, synergy: np.ndarray, mask_stop: bool,
                  dtype, n_actions: int, synergy_boost: float = 0.0,
                  stop_delay: int = 0) -> dict:
    s_in = (synergy / 8.0).astype(dtype)
    h_syn_pre = s_in @ params["W_syn"] + params["b_syn"]
    h_syn = np.maximum(h_syn_pre, 0)
    g_syn_pre = h_syn @ params["W_gsyn"] + params["b_gsyn"]
    g_syn = np.maximum(g_syn_pre, 0)
    z = np.concatenate([cache["g_num"], cache["g_cat"], g_syn])
    logits = z @ params["W_out"] + params["b_out"]
    logits = logits.copy()
    # parameter-free episode coherence terms; see ArchConfig.synergy_logit_boost
    logits[: n_actions - 1] += synergy_boost * synergy.astype(dtype)
    logits[n_actions - 1] += synergy_boost * max(float(synergy.sum()) - stop_delay, 0.0)
    if mask_stop:
        logits[n_actions - 1] = -np.inf
    probs = _softmax(logits)
    return {"s_in": s_in, "h_syn": h_syn, "g_syn": g_syn, "z": z, "probs": probs}


def forward(net: PolicyNetwork, feats: PartyFeatures, synergy: np.ndarray,
            mask_stop: bool = False, dtype=np.float32) -> np.ndarray:
    """Action probabilities (n_classes + 1, STOP last) for one party state."""
    if synergy.shape != (net.arch.n_classes,):
        raise ShapeMismatchError(f"synergy must have shape ({net.arch.n_classes},), "
                                 f"got {synergy.shape}")
    if feats.numeric.shape != (MAX_MEMBERS, net.arch.vocab.numeric_dim):
        raise ShapeMismatchError(f"numeric features have shape {feats.numeric.shape}, "
                                 f"expected {(MAX_MEMBERS, net.arch.vocab.numeric_dim)}")
    params = {k: v.astype(dtype) for k, v in net.params.items()}
    cache = _party_cache(params, feats, dtype)
    step = _synergy_step(params, cache, synergy, mask_stop, dtype, net.arch.n_actions,
                         net.arch.synergy_logit_boost, net.arch.stop_boost_delay)
    return step["probs"]


# ---------------------------------------------------------------------------
# sampling

@dataclass(frozen=True)
class SampleTrace:
    """The chosen class indices, in order, plus the log-probability of every
    sampled action (including the trailing terminal action if one was drawn)."""

    class_indices: tuple[int, ...]
    log_probs: tuple[float, ...]
    stopped: bool

    def __post_init__(self):
        expected = len(self.class_indices) + (1 if self.stopped else 0)
        if len(self.log_probs) != expected:
            raise ValueError("log_probs length disagrees with actions")

    def action_at(self, t: int, stop_index: int) -> int:
        return self.class_indices[t] if t < len(self.class_indices) else stop_index


def _sample_index(rng: RngStream, probs: np.ndarray) -> int:
    u = rng.uniform()
    acc = 0.0
    last_positive = 0
    for i, p in enumerate(probs):
        if p > 0.0:
            last_positive = i
        acc += float(p)
        if u < acc:
            return i
    return last_positive


def sample_encounter(net: PolicyNetwork, party: Party, pack: ContentPack,
                     rng: RngStream, dtype=np.float32
                     ) -> tuple[Encounter, SampleTrace, PartyFeatures]:
    """Draw an encounter: up to max_enemies picks, stopping early if the
    terminal action is sampled. The terminal action is masked on the first
    draw so encounters are never empty."""
    arch = net.arch
    stop_index = arch.n_classes
    feats = encode_party(party, arch.vocab)
    params = {k: v.astype(dtype) for k, v in net.params.items()}
    cache = _party_cache(params, feats, dtype)

    monster_ids = pack.monster_ids()
    synergy = np.zeros(arch.n_classes, dtype=np.float64)
    picks: list[int] = []
    log_probs: list[float] = []
    stopped = False
    for i in range(arch.max_enemies):
        step = _synergy_step(params, cache, synergy, i == 0, dtype, arch.n_actions,
                             arch.synergy_logit_boost, arch.stop_boost_delay)
        a = _sample_index(rng, step["probs"])
        log_probs.append(float(np.log(step["probs"][a])))
        if a == stop_index:
            stopped = True
            break
        picks.append(a)
        synergy[a] += 1
    trace = SampleTrace(class_indices=tuple(picks), log_probs=tuple(log_probs),
                        stopped=stopped)
    enemies = tuple(pack.monsters[monster_ids[a]] for a in picks)
    return Encounter(enemies), trace, feats


# ---------------------------------------------------------------------------
# gradients

def log_prob_gradient(net: PolicyNetwork, feats: PartyFeatures, trace: SampleTrace,
                      dtype=np.float32) -> tuple[dict[str, np.ndarray], float]:
    """Gradient of the trace's total log-probability with respect to every
    parameter, by replaying the trace. Returns (grads, total_log_prob).

    Raises TraceMismatchError when the replayed per-step log-probabilities
    disagree with the recorded ones (wrong net, wrong party, or wrong dtype).
    """
    arch = net.arch
    stop_index = arch.n_classes
    params = {k: v.astype(dtype) for k, v in net.params.items()}
    cache = _party_cache(params, feats, dtype)

    synergy = np.zeros(arch.n_classes, dtype=np.float64)
    steps = []
    for t in range(len(trace.log_probs)):
        action = trace.action_at(t, stop_index)
        step = _synergy_step(params, cache, synergy, t == 0, dtype, arch.n_actions,
                             arch.synergy_logit_boost, arch.stop_boost_delay)
        replayed = float(np.log(step["probs"][action]))
        if replayed != trace.log_probs[t]:
            raise TraceMismatchError(
                f"step {t}: replayed log-prob {replayed!r} != recorded {trace.log_probs[t]!r}")
        steps.append((action, step))
        if action != stop_index:
            synergy[action] += 1

    grads = {k: np.zeros_like(v) for k, v in params.items()}
    total = float(sum(trace.log_probs))

    dg_num = np.zeros(arch.group_hidden, dtype=dtype)
    dg_cat = np.zeros(arch.group_hidden, dtype=dtype)
    h = arch.group_hidden
    for action, step in steps:
        dlogits = -step["probs"]
        dlogits[action] += 1.0
        grads["W_out"] += np.outer(step["z"], dlogits)
        grads["b_out"] += dlogits
        dz = params["W_out"] @ dlogits
        dg_num += dz[:h]
        dg_cat += dz[h:2 * h]
        dg_syn = dz[2 * h:]
        # synergy path, per step
        dpre2 = dg_syn * (step["g_syn"] > 0)
        grads["W_gsyn"] += np.outer(step["h_syn"], dpre2)
        grads["b_gsyn"] += dpre2
        dh = params["W_gsyn"] @ dpre2
        dpre1 = dh * (step["h_syn"] > 0)
        grads["W_syn"] += np.outer(step["s_in"], dpre1)
        grads["b_syn"] += dpre1

    # party paths, shared by all steps
    dpre_gnum = dg_num * (cache["g_num"] > 0)
    grads["W_gnum"] = np.outer(cache["pool_num"], dpre_gnum)
    grads["b_gnum"] = dpre_gnum
    dpool_num = params["W_gnum"] @ dpre_gnum
    dh_num = (cache["mask"][:, None] / cache["m"]) * dpool_num[None, :]
    dh_num_pre = dh_num * (cache["h_num"] > 0)
    grads["W_num"] = cache["x_num"].T @ dh_num_pre
    grads["b_num"] = dh_num_pre.sum(axis=0)

    dpre_gcat = dg_cat * (cache["g_cat"] > 0)
    grads["W_gcat"] = np.outer(cache["pool_cat"], dpre_gcat)
    grads["b_gcat"] = dpre_gcat
    dpool_cat = params["W_gcat"] @ dpre_gcat
    dh_cat = (cache["mask"][:, None] / cache["m"]) * dpool_cat[None, :]
    d0 = arch.class_emb_dim
    de_cls = dh_cat[:, :d0]
    for i in range(MAX_MEMBERS):
        if cache["mask"][i] > 0:
            grads["class_emb"][feats.class_ids[i]] += de_cls[i]
    blocks = ("W_saves", "W_resist", "W_spells", "W_abil")
    inputs = (feats.saves, feats.resistances, feats.spell_lists, feats.abilities)
    for j, (name, inp) in enumerate(zip(blocks, inputs)):
        lo = d0 + j * arch.multihot_dim
        hi = lo + arch.multihot_dim
        grads[name] = inp.astype(dtype).T @ dh_cat[:, lo:hi]

    return grads, total
