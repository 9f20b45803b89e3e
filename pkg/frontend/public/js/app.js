// DM workbench page: session party, three encounter builders with a live
// XP readout, simulation previews, the three-encounter submission flow, and
// side-by-side policy comparison panels.
import { ApiError, Client } from "./api.js";
import { addEnemy, clear, emptyBuilder, removeEnemy, submittable } from "./builder.js";
import { metricRows, hpPercent } from "./panels.js";
import { makeXpContext } from "./xp.js";
// tests point the page at an externally started service via NTRL_BASE
const client = new Client(globalThis.NTRL_BASE ?? "");
let state;
function el(id) {
    const node = document.getElementById(id);
    if (!node)
        throw new Error(`missing #${id}`);
    return node;
}
async function boot() {
    const hpVariation = new URLSearchParams(location.search).get("hp") === "on";
    const session = await client.newSession(hpVariation);
    const [monsters, tables, budget] = await Promise.all([
        client.monsters(), client.xpTables(), client.budget(session.session),
    ]);
    state = {
        session,
        monsters: monsters.monsters,
        xpCtx: makeXpContext(monsters.monsters, tables),
        budgetTotal: budget.total,
        builders: [emptyBuilder(budget.total), emptyBuilder(budget.total), emptyBuilder(budget.total)],
        active: 0,
        liveHp: session.party.members.map(m => m.hp_current),
        busy: false,
    };
    renderParty();
    renderPool();
    renderBuilder();
    el("submit-all").onclick = submitAll;
    el("budget-value").textContent =
        `${budget.total} XP (${budget.difficulty_tier.toLowerCase()}, ${budget.per_character}/character)`;
}
function renderParty() {
    const host = el("party-cards");
    host.innerHTML = "";
    state.session.party.members.forEach((m, i) => {
        const card = document.createElement("div");
        card.className = "card member";
        const pct = hpPercent(state.liveHp[i], m.hp_max);
        card.innerHTML = `
      <h3>${m.name} <span class="lvl">lv ${m.level}</span></h3>
      <div class="hpbar"><div class="hpfill" style="width:${pct}%"></div></div>
      <div class="hpnum">${state.liveHp[i]} / ${m.hp_max} HP &middot; AC ${m.ac}</div>
      <div class="abilities">${Object.entries(m.abilities)
            .map(([k, v]) => `<span>${k.toUpperCase()} ${v}</span>`).join(" ")}</div>
      <label class="live">what-if HP
        <input type="range" min="1" max="${m.hp_max}" value="${state.liveHp[i]}"
               data-member="${i}" class="hp-slider">
      </label>`;
        host.appendChild(card);
    });
    host.querySelectorAll(".hp-slider").forEach(slider => {
        slider.oninput = () => {
            state.liveHp[Number(slider.dataset.member)] = Number(slider.value);
            renderParty();
        };
        slider.onchange = () => void refreshSuggestion("live");
    });
}
function renderPool() {
    const host = el("pool");
    host.innerHTML = "";
    for (const m of state.monsters) {
        const row = document.createElement("div");
        row.className = "pool-row";
        row.innerHTML = `<span class="mname">${m.name}</span>
      <span class="mxp">CR ${m.cr} &middot; ${m.xp_value} XP</span>`;
        const btn = document.createElement("button");
        btn.textContent = "+";
        btn.className = "add";
        btn.dataset.monster = m.id;
        btn.onclick = () => {
            state.builders[state.active] = addEnemy(state.builders[state.active], state.xpCtx, m.id);
            renderBuilder();
        };
        row.appendChild(btn);
        host.appendChild(row);
    }
}
function renderBuilder() {
    const builder = state.builders[state.active];
    const tabs = el("slot-tabs");
    tabs.innerHTML = "";
    state.builders.forEach((b, i) => {
        const tab = document.createElement("button");
        tab.className = "tab" + (i === state.active ? " on" : "");
        tab.textContent = `Encounter ${i + 1} (${b.enemies.length})`;
        tab.onclick = () => { state.active = i; renderBuilder(); };
        tabs.appendChild(tab);
    });
    const list = el("chosen");
    list.innerHTML = "";
    const byId = new Map(state.monsters.map(m => [m.id, m]));
    const counts = new Map();
    for (const id of builder.enemies)
        counts.set(id, (counts.get(id) ?? 0) + 1);
    for (const [id, count] of counts) {
        const row = document.createElement("div");
        row.className = "chosen-row";
        row.innerHTML = `<span>${count} &times; ${byId.get(id)?.name ?? id}</span>`;
        const minus = document.createElement("button");
        minus.textContent = "−";
        minus.onclick = () => {
            state.builders[state.active] = removeEnemy(state.builders[state.active], state.xpCtx, id);
            renderBuilder();
        };
        row.appendChild(minus);
        list.appendChild(row);
    }
    const readout = el("xp-readout");
    readout.innerHTML = `raw <b>${builder.rawXp}</b> &middot; adjusted <b id="adjusted-xp">${builder.adjustedXp}</b> / budget ${builder.budgetTotal}`;
    readout.className = builder.overBudget ? "warn" : "";
    el("over-budget-note").textContent = builder.overBudget
        ? "over budget: allowed, but consider the party" : "";
    const full = builder.full;
    document.querySelectorAll("#pool .add").forEach(btn => {
        btn.disabled = full;
        btn.title = full ? "encounters are capped at eight enemies" : "";
    });
    el("simulate-slot").disabled = builder.empty || state.busy;
    el("clear-slot").disabled = builder.empty;
    el("clear-slot").onclick = () => {
        state.builders[state.active] = clear(state.builders[state.active]);
        renderBuilder();
    };
    el("simulate-slot").onclick = () => void simulateSlot();
    const verdict = submittable(state.builders);
    const submit = el("submit-all");
    submit.disabled = !verdict.ok || state.busy;
    el("submit-note").textContent = verdict.ok ? "" : (verdict.reason ?? "");
}
async function simulateSlot() {
    const builder = state.builders[state.active];
    state.busy = true;
    renderBuilder();
    try {
        const doc = await client.simulate(state.session.session, builder.enemies);
        renderPanel(el("preview"), `Encounter ${state.active + 1} preview (${doc.metrics.n_sims} sims)`, doc.metrics, doc.reward);
    }
    catch (err) {
        showError(err);
    }
    finally {
        state.busy = false;
        renderBuilder();
    }
}
function renderPanel(host, title, metrics, reward) {
    const panel = document.createElement("div");
    panel.className = "card panel";
    panel.innerHTML = `<h3>${title}</h3>` + metricRows(metrics, reward)
        .map(row => `<div class="mrow"><span>${row.label}</span><b>${row.value}</b></div>`)
        .join("");
    host.innerHTML = "";
    host.appendChild(panel);
}
async function refreshSuggestion(reason) {
    const host = el("suggestion");
    try {
        const doc = await client.suggest(state.session.session, "ntrl");
        const names = new Map(state.monsters.map(m => [m.id, m.name]));
        host.innerHTML = `<div class="card"><h3>NTRL suggestion${reason === "live" ? " (live)" : ""}</h3>
      <div>${doc.proposal.enemies.map(id => names.get(id) ?? id).join(", ")}</div>
      <div>raw ${doc.proposal.raw_xp} &middot; adjusted ${doc.proposal.adjusted_xp}</div></div>`;
    }
    catch (err) {
        if (err instanceof ApiError && err.status === 409) {
            host.innerHTML = `<div class="card muted">no model checkpoint loaded</div>`;
            return;
        }
        showError(err);
    }
}
async function submitAll() {
    state.busy = true;
    renderBuilder();
    try {
        const doc = await client.submit(state.session.session, state.builders.map(b => b.enemies));
        const compare = el("comparison");
        compare.innerHTML = "";
        doc.results.forEach((metrics, i) => {
            const spot = document.createElement("div");
            compare.appendChild(spot);
            renderPanel(spot, `HUMAN #${i + 1}`, metrics, doc.rewards[i]);
        });
        // the policy's pick for the same party, evaluated the same way
        try {
            const suggestion = await client.suggest(state.session.session, "ntrl");
            const sim = await client.simulate(state.session.session, suggestion.proposal.enemies);
            const spot = document.createElement("div");
            compare.appendChild(spot);
            renderPanel(spot, "NTRL", sim.metrics, sim.reward);
        }
        catch (err) {
            if (!(err instanceof ApiError && err.status === 409))
                throw err;
            const note = document.createElement("div");
            note.className = "card muted";
            note.textContent = "NTRL comparison unavailable: no model checkpoint loaded";
            compare.appendChild(note);
        }
        el("submission-id").textContent = `submission ${doc.submission_id}`;
    }
    catch (err) {
        showError(err);
    }
    finally {
        state.busy = false;
        renderBuilder();
    }
}
function showError(err) {
    const host = el("errors");
    host.textContent = err instanceof ApiError
        ? `${err.code}: ${err.message}`
        : String(err);
    setTimeout(() => { host.textContent = ""; }, 6000);
}
window.addEventListener("DOMContentLoaded", () => { void boot().catch(showError); });
