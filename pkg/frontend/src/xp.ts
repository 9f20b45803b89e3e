// Encounter XP arithmetic over the tables the server publishes. The live
// readout must agree with the server's adjusted XP for any multiset, so the
// rules live in one tiny function mirroring the service exactly.

import type { MonsterInfo, XpTables } from "./api.js";

export interface XpContext {
  xpByMonster: Map<string, number>;
  multipliers: [number, number][];   // [max enemy count, multiplier], ascending
}

export function makeXpContext(monsters: MonsterInfo[], tables: XpTables): XpContext {
  return {
    xpByMonster: new Map(monsters.map(m => [m.id, m.xp_value])),
    multipliers: tables.encounter_multipliers,
  };
}

export function countMultiplier(ctx: XpContext, enemyCount: number): number {
  for (const [maxCount, mult] of ctx.multipliers) {
    if (enemyCount <= maxCount) return mult;
  }
  return ctx.multipliers[ctx.multipliers.length - 1][1];
}

export function rawXp(ctx: XpContext, enemies: string[]): number {
  let total = 0;
  for (const id of enemies) {
    const xp = ctx.xpByMonster.get(id);
    if (xp === undefined) throw new Error(`unknown monster ${id}`);
    total += xp;
  }
  return total;
}

// Math.trunc matches the server's integer truncation of raw * multiplier
export function adjustedXp(ctx: XpContext, enemies: string[]): number {
  if (enemies.length === 0) return 0;
  return Math.trunc(rawXp(ctx, enemies) * countMultiplier(ctx, enemies.length));
}
