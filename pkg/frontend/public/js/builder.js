// Builder state for one encounter slot: a monster multiset capped at eight,
// with a live XP readout against the party budget. The server re-validates
// everything; these flags only drive the controls.
import { adjustedXp, rawXp } from "./xp.js";
export const MAX_ENEMIES = 8;
export function emptyBuilder(budgetTotal) {
    return {
        enemies: [], rawXp: 0, adjustedXp: 0, budgetTotal,
        full: false, empty: true, overBudget: false,
    };
}
function derive(enemies, ctx, budgetTotal) {
    const raw = enemies.length ? rawXp(ctx, enemies) : 0;
    const adjusted = enemies.length ? adjustedXp(ctx, enemies) : 0;
    return {
        enemies,
        rawXp: raw,
        adjustedXp: adjusted,
        budgetTotal,
        full: enemies.length >= MAX_ENEMIES,
        empty: enemies.length === 0,
        overBudget: adjusted > budgetTotal,
    };
}
export function addEnemy(state, ctx, id) {
    if (state.full)
        return state; // the ninth add is blocked
    return derive([...state.enemies, id], ctx, state.budgetTotal);
}
export function removeEnemy(state, ctx, id) {
    const idx = state.enemies.indexOf(id);
    if (idx < 0)
        return state;
    const next = state.enemies.slice();
    next.splice(idx, 1);
    return derive(next, ctx, state.budgetTotal);
}
export function clear(state) {
    return emptyBuilder(state.budgetTotal);
}
// multiset identity: ["ogre","wolf"] and ["wolf","ogre"] are the same encounter
export function encounterKey(enemies) {
    return [...enemies].sort().join("|");
}
export function distinctEncounters(builders) {
    const keys = builders.filter(b => !b.empty).map(b => encounterKey(b.enemies));
    return new Set(keys).size === keys.length;
}
export function submittable(builders) {
    if (builders.length !== 3)
        return { ok: false, reason: "three encounter slots required" };
    if (builders.some(b => b.empty))
        return { ok: false, reason: "every encounter needs at least one enemy" };
    if (!distinctEncounters(builders))
        return { ok: false, reason: "the three encounters must be distinct" };
    return { ok: true };
}
