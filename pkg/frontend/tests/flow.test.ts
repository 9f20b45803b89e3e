// @vitest-environment jsdom
//
// S2: full human-submission flow through the real DOM app against the live
// service: session -> three encounters -> submit -> six-metric panels plus
// the policy comparison, with every rendered value byte-equal to what the
// API returned. S1's server-side mirror (nine enemies, duplicate triples)
// is checked against the API directly.

import { beforeAll, describe, expect, it } from "vitest";
import type { BatchMetrics, SimulateResponse, SubmissionResponse } from "../src/api.js";
import { metricRows } from "../src/panels.js";
import { serviceBase, until } from "./helpers.js";

const PAGE = `
  <div id="budget-value"></div>
  <div id="errors"></div>
  <div id="party-cards"></div>
  <div id="suggestion"></div>
  <div id="slot-tabs"></div>
  <div id="pool"></div>
  <div id="chosen"></div>
  <div id="xp-readout"></div>
  <div id="over-budget-note"></div>
  <button id="simulate-slot"></button>
  <button id="clear-slot"></button>
  <div id="preview"></div>
  <button id="submit-all"></button>
  <span id="submit-note"></span>
  <span id="submission-id"></span>
  <div id="comparison"></div>
`;

let base: string;
const recorded: { url: string; body: unknown }[] = [];

beforeAll(async () => {
  base = serviceBase();
  (globalThis as { NTRL_BASE?: string }).NTRL_BASE = base;
  const realFetch = globalThis.fetch;
  globalThis.fetch = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const res = await realFetch(input, init);
    const clone = res.clone();
    try {
      recorded.push({ url: String(input), body: await clone.json() });
    } catch {
      // non-JSON payloads are not interesting
    }
    return res;
  }) as typeof fetch;

  document.body.innerHTML = PAGE;
  await import("../src/app.js");
  window.dispatchEvent(new Event("DOMContentLoaded"));
  await until(() => document.getElementById("budget-value")!.textContent!.includes("XP"),
    "session boot");
  await until(() => document.querySelectorAll("#pool .add").length === 26, "pool render");
});

function poolButton(monsterId: string): HTMLButtonElement {
  const btn = document.querySelector<HTMLButtonElement>(`#pool .add[data-monster="${monsterId}"]`);
  if (!btn) throw new Error(`no pool button for ${monsterId}`);
  return btn;
}

function tab(index: number): HTMLButtonElement {
  return document.querySelectorAll<HTMLButtonElement>("#slot-tabs .tab")[index];
}

describe("the submission flow", () => {
  it("builds three encounters, blocks the ninth enemy, submits, and renders panels verbatim", async () => {
    // slot 1: eight kobolds, then verify the cap engages in the UI
    for (let i = 0; i < 8; i++) poolButton("kobold").click();
    expect(document.getElementById("xp-readout")!.textContent).toContain("raw");
    expect(poolButton("kobold").disabled).toBe(true);
    expect(poolButton("troll").disabled).toBe(true);
    expect(poolButton("kobold").title).toContain("eight");

    // slot 2 and 3: distinct encounters
    tab(1).click();
    poolButton("ogre").click();
    tab(2).click();
    poolButton("troll").click();

    const submit = document.getElementById("submit-all") as HTMLButtonElement;
    await until(() => !submit.disabled, "submit enabled");
    submit.click();
    await until(() => document.querySelectorAll("#comparison .panel").length >= 4,
      "comparison panels");

    const submission = recorded
      .map(r => r.body as SubmissionResponse)
      .find(b => b && (b as SubmissionResponse).submission_id);
    expect(submission, "submission response captured").toBeTruthy();
    expect(submission!.results.length).toBe(3);
    expect(document.getElementById("submission-id")!.textContent)
      .toContain(submission!.submission_id);

    // the three HUMAN panels render exactly the six metric rows from the
    // API payloads, byte for byte
    const panels = [...document.querySelectorAll("#comparison .panel")];
    submission!.results.forEach((metrics: BatchMetrics, i: number) => {
      const rows = [...panels[i].querySelectorAll(".mrow")];
      const expected = metricRows(metrics, submission!.rewards[i]);
      expect(rows.length).toBe(expected.length);
      expected.forEach((want, j) => {
        expect(rows[j].querySelector("span")!.textContent).toBe(want.label);
        expect(rows[j].querySelector("b")!.textContent).toBe(want.value);
      });
    });

    // the policy panel mirrors the simulate response for the suggested team
    const ntrlPanel = panels[3];
    expect(ntrlPanel.querySelector("h3")!.textContent).toBe("NTRL");
    const simulateBodies = recorded
      .filter(r => r.url.endsWith("/api/simulate"))
      .map(r => r.body as SimulateResponse);
    const last = simulateBodies[simulateBodies.length - 1];
    const expected = metricRows(last.metrics, last.reward);
    const rows = [...ntrlPanel.querySelectorAll(".mrow")];
    expected.forEach((want, j) => {
      expect(rows[j].querySelector("b")!.textContent).toBe(want.value);
    });
  });

  it("mirrors both constraints server-side", async () => {
    const session = (await (await fetch(base + "/api/party/random")).json()).session;
    const nine = await fetch(base + "/api/simulate", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ session, encounter: Array(9).fill("kobold") }),
    });
    expect(nine.status).toBe(400);
    expect((await nine.json()).code).toBe("INVALID_ENCOUNTER");

    const duplicate = await fetch(base + "/api/submissions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ session, encounters: [["ogre"], ["ogre"], ["troll"]] }),
    });
    expect(duplicate.status).toBe(400);
    expect((await duplicate.json()).code).toBe("DUPLICATE_ENCOUNTER");
  });

  it("live what-if sliders request a fresh suggestion", async () => {
    const before = recorded.filter(r => r.url.endsWith("/api/suggest")).length;
    const slider = document.querySelector<HTMLInputElement>(".hp-slider")!;
    slider.value = String(Math.max(1, Math.floor(Number(slider.max) * 0.3)));
    slider.dispatchEvent(new Event("change"));
    await until(
      () => recorded.filter(r => r.url.endsWith("/api/suggest")).length > before,
      "suggest call after slider change");
    await until(() => document.getElementById("suggestion")!.textContent!.length > 0,
      "suggestion rendered");
  });
});
