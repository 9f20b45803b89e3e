"""Budget-matching encounter generator following the DMG procedure.

The search is exact over all multisets of 1..8 pool monsters: because the
count multiplier depends only on enemy count, reachable raw-XP sums per
count are tabulated once per pool (dynamic programming over suffixes),
then each query scans every (count, sum) pair for the minimal
|adjusted - budget|. Ties prefer fewer enemies, then the lexicographically
smallest id multiset, making output deterministic and independent of pool
ordering.
"""

from __future__ import annotations

import numpy as np

from ntrl.content.models import ContentPack
from ntrl.policies.base import EncounterProposal, GenerationContext, make_proposal

MAX_ENEMIES = 8

# keyed by id(pack); each entry pins the pack object so the id cannot be
# recycled while its plan is cached
_plan_cache: dict[int, tuple[object, "_PoolPlan"]] = {}


class _PoolPlan:
    """Reachability tables for one pool: reach[i][k][s] is true when k
    monsters drawn from ids[i:] (repetition allowed) can sum to s."""

    def __init__(self, pack: ContentPack):
        self.ids = pack.monster_ids()
        self.xp = [pack.monsters[mid].xp_value for mid in self.ids]
        n = len(self.ids)
        max_sum = MAX_ENEMIES * max(self.xp)
        reach = np.zeros((n + 1, MAX_ENEMIES + 1, max_sum + 1), dtype=bool)
        reach[n, 0, 0] = True
        for i in range(n - 1, -1, -1):
            reach[i] = reach[i + 1]
            v = self.xp[i]
            for k in range(1, MAX_ENEMIES + 1):
                reach[i, k, v:] |= reach[i, k - 1, : max_sum + 1 - v]
        self.reach = reach
        self.max_sum = max_sum

    def reconstruct(self, count: int, total: int) -> list[str]:
        """Lexicographically smallest id multiset with `count` members
        summing to `total`. Assumes reach[0][count][total]."""
        picks: list[str] = []
        i, k, s = 0, count, total
        while k > 0:
            v = self.xp[i]
            if s >= v and self.reach[i, k - 1, s - v]:
                picks.append(self.ids[i])
                k -= 1
                s -= v
            else:
                i += 1
        return picks


def _plan_for(pack: ContentPack) -> _PoolPlan:
    key = id(pack)
    entry = _plan_cache.get(key)
    if entry is None or entry[0] is not pack:
        entry = (pack, _PoolPlan(pack))
        _plan_cache[key] = entry
    return entry[1]


def best_encounter_for_budget(pack: ContentPack, budget_total: int) -> tuple[list[str], int]:
    """The multiset of 1..8 monster ids whose adjusted XP is closest to the
    budget, with the documented tie-breaking. Returns (ids, adjusted_xp)."""
    plan = _plan_for(pack)
    best: tuple[float, int, list[str], int] | None = None  # (|diff|, count, ids, adjusted)
    for k in range(1, MAX_ENEMIES + 1):
        mult = pack.multiplier(k)
        sums = np.nonzero(plan.reach[0, k])[0]
        adjusted = (sums * mult).astype(np.int64)
        diffs = np.abs(adjusted - budget_total)
        min_diff = diffs.min()
        if best is not None and min_diff > best[0]:
            continue
        for s in sums[diffs == min_diff]:
            candidate = plan.reconstruct(k, int(s))
            adj = int(int(s) * mult)
            key = (float(min_diff), k, candidate)
            if best is None or (best[0], best[1], best[2]) > key:
                best = (float(min_diff), k, candidate, adj)
    assert best is not None
    return best[2], best[3]


class DmPolicy:
    """Deterministic DMG-heuristic generator."""

    name = "DM"

    def generate(self, ctx: GenerationContext) -> EncounterProposal:
        budget = ctx.budget()
        ids, _ = best_encounter_for_budget(ctx.pack, budget.total)
        return make_proposal(ids, ctx, self.name)
