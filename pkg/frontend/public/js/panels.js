// Metric panel rows: the six evaluation numbers plus reward, rendered
// verbatim from API payloads.
export function metricRows(metrics, reward) {
    return [
        { label: "Win probability", value: metrics.win_probability.toFixed(2) },
        { label: "Fight longevity", value: `${metrics.fight_longevity.toFixed(2)} rounds` },
        { label: "TPK", value: `${metrics.tpk_count} / ${metrics.n_sims}` },
        { label: "Team XP difference", value: String(metrics.team_xp_difference) },
        { label: "Remaining party HP", value: `${metrics.remaining_party_hp_pct.toFixed(1)}%` },
        { label: "Reward", value: reward.toFixed(0) },
    ];
}
export function hpPercent(current, max) {
    return Math.round((100 * current) / max);
}
