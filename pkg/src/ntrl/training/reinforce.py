"""Policy-gradient ascent: Adam, a running-mean baseline, and the update."""

from __future__ import annotations

from collections import deque

import numpy as np

from ntrl.agent.features import PartyFeatures
from ntrl.agent.network import PolicyNetwork, SampleTrace, log_prob_gradient
from ntrl.training.reward import RewardConfig


class NonFiniteGradientError(Exception):
    """NON_FINITE_GRADIENT: the step was aborted, parameters untouched."""


class Adam:
    """Adaptive-moment ascent on a dict of named parameter arrays."""

    def __init__(self, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}

    def ascend(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        """Move params along +grads (gradient ascent), in place."""
        self.t += 1
        for name, g in grads.items():
            g = g.astype(params[name].dtype)
            if name not in self.m:
                self.m[name] = np.zeros_like(params[name])
                self.v[name] = np.zeros_like(params[name])
            self.m[name] = self.beta1 * self.m[name] + (1 - self.beta1) * g
            self.v[name] = self.beta2 * self.v[name] + (1 - self.beta2) * (g * g)
            m_hat = self.m[name] / (1 - self.beta1 ** self.t)
            v_hat = self.v[name] / (1 - self.beta2 ** self.t)
            params[name] += self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


class RunningBaseline:
    """Mean of the most recent rewards; 0 until the first update."""

    def __init__(self, window: int = 100, enabled: bool = True):
        self.enabled = enabled
        self.values: deque[float] = deque(maxlen=window)

    def value(self, party=None) -> float:
        if not self.enabled or not self.values:
            return 0.0
        return sum(self.values) / len(self.values)

    def update(self, reward: float, party=None) -> None:
        if self.enabled:
            self.values.append(reward)


class PartyBaseline:
    """Running mean per (party size, entering-HP bucket).

    Rewards vary far more with the drawn party (size 3 at 10% HP vs size 8
    at full) than with the sampled encounter; a flat mean leaves that
    variance in the advantage and drowns the action signal. Bucketing by
    the party context removes it while staying a plain REINFORCE baseline.
    Falls back to the global mean until a bucket has a few samples."""

    def __init__(self, window: int = 50, min_samples: int = 3, enabled: bool = True):
        self.enabled = enabled
        self.min_samples = min_samples
        self.window = window
        self.buckets: dict[tuple[int, int], deque[float]] = {}
        self.global_values: deque[float] = deque(maxlen=200)

    @staticmethod
    def _bucket(party) -> tuple[int, int]:
        hp_now = sum(m.hp_current for m in party.members)
        hp_max = sum(m.base.hp_max for m in party.members)
        return len(party.members), int(round(10 * hp_now / hp_max))

    def value(self, party=None) -> float:
        if not self.enabled or not self.global_values:
            return 0.0
        if party is not None:
            values = self.buckets.get(self._bucket(party))
            if values is not None and len(values) >= self.min_samples:
                return sum(values) / len(values)
        return sum(self.global_values) / len(self.global_values)

    def update(self, reward: float, party=None) -> None:
        if not self.enabled:
            return
        self.global_values.append(reward)
        if party is not None:
            self.buckets.setdefault(self._bucket(party), deque(maxlen=self.window)).append(reward)


def make_baseline(kind: str, enabled: bool = True, window: int = 100):
    """kind: "party" (context-bucketed mean) or "mean" (flat running mean)."""
    if kind == "party":
        return PartyBaseline(enabled=enabled)
    if kind == "mean":
        return RunningBaseline(window=window, enabled=enabled)
    raise ValueError(f"unknown baseline kind {kind!r}")


def apply_policy_gradient(params: dict[str, np.ndarray],
                          grad_terms: list[tuple[dict[str, np.ndarray], float]],
                          optimizer: Adam) -> None:
    """Accumulate advantage-weighted log-probability gradients and take one
    ascent step. Raises NonFiniteGradientError before touching parameters."""
    total: dict[str, np.ndarray] = {}
    for grads, advantage in grad_terms:
        for name, g in grads.items():
            contrib = advantage * g
            if name in total:
                total[name] += contrib
            else:
                total[name] = contrib.copy()
    for name, g in total.items():
        if not np.isfinite(g).all():
            raise NonFiniteGradientError(f"non-finite gradient in {name}")
    optimizer.ascend(params, total)


def reinforce_step(net: PolicyNetwork, records: list[tuple[PartyFeatures, SampleTrace, float]],
                   optimizer: Adam, baseline, cfg: RewardConfig, parties=None) -> float:
    """One REINFORCE update from (features, trace, reward) records.

    The baseline is read before this batch's rewards enter it, so the
    advantage for reward R is (R - b) / reward_scale with b the baseline's
    current estimate (optionally conditioned on the party).
    Returns the surrogate loss, -sum(advantage * log pi(trace)).
    """
    parties = parties or [None] * len(records)
    grad_terms = []
    loss = 0.0
    for (feats, trace, reward), party in zip(records, parties):
        advantage = (reward - baseline.value(party)) / cfg.reward_scale
        grads, total_log_prob = log_prob_gradient(net, feats, trace)
        grad_terms.append((grads, advantage))
        loss -= advantage * total_log_prob
    apply_policy_gradient(net.params, grad_terms, optimizer)
    for (_, _, reward), party in zip(records, parties):
        baseline.update(reward, party)
    return loss
