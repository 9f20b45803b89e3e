// Typed client for the encounter service JSON API. Every number the UI
// shows comes from these payloads; the client never simulates anything.

export interface Abilities {
  str: number; dex: number; con: number; int: number; wis: number; cha: number;
}

export interface PartyMember {
  template_id: string;
  name: string;
  level: number;
  hp_current: number;
  hp_max: number;
  ac: number;
  abilities: Abilities;
}

export interface PartyView {
  size: number;
  members: PartyMember[];
}

export interface SessionInfo {
  session: string;
  party: PartyView;
  hp_variation: boolean;
}

export interface MonsterInfo {
  id: string;
  name: string;
  cr: string | number;
  xp_value: number;
  hp_max: number;
  ac: number;
}

export interface XpTables {
  encounter_multipliers: [number, number][];
  xp_budget_per_character: Record<string, Record<string, number>>;
}

export interface BatchMetrics {
  win_probability: number;
  fight_longevity: number;
  tpk_count: number;
  team_xp_difference: number;
  remaining_party_hp_pct: number;
  total_damage_to_party: number;
  total_player_deaths: number;
  n_sims: number;
}

export interface SimulateResponse {
  metrics: BatchMetrics;
  seed: number;
  reward: number;
}

export interface SubmissionResponse {
  submission_id: string;
  session: string;
  encounters: string[][];
  seed: number;
  results: BatchMetrics[];
  rewards: number[];
  provenance: string;
}

export interface Budget {
  per_character: number;
  total: number;
  difficulty_tier: string;
}

export interface Proposal {
  enemies: string[];
  raw_xp: number;
  adjusted_xp: number;
  budget: Budget;
  provenance: string;
}

export interface SuggestResponse {
  proposal: Proposal;
  action_probabilities?: { probabilities: Record<string, number>, action: string }[];
}

export class ApiError extends Error {
  constructor(public status: number, public code: string, message: string) {
    super(message);
  }
}

async function request<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  const res = await fetch(base + path, init);
  const body = await res.json();
  if (!res.ok) {
    throw new ApiError(res.status, body.code ?? "UNKNOWN", body.message ?? res.statusText);
  }
  return body as T;
}

function post<T>(base: string, path: string, payload: unknown): Promise<T> {
  return request<T>(base, path, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(payload),
  });
}

export class Client {
  constructor(public base: string = "") {}

  newSession(hpVariation: boolean): Promise<SessionInfo> {
    return request(this.base, `/api/party/random?hp_variation=${hpVariation ? "on" : "off"}`);
  }

  monsters(): Promise<{ monsters: MonsterInfo[] }> {
    return request(this.base, "/api/content/monsters");
  }

  xpTables(): Promise<XpTables> {
    return request(this.base, "/api/content/xp-tables");
  }

  budget(session: string, tier = "DEADLY"): Promise<Budget> {
    return request(this.base, `/api/budget?session=${session}&tier=${tier}`);
  }

  encounterXp(encounter: string[]): Promise<{ raw_xp: number, adjusted_xp: number }> {
    return post(this.base, "/api/encounter/xp", { encounter });
  }

  simulate(session: string, encounter: string[], sims?: number, seed?: number): Promise<SimulateResponse> {
    return post(this.base, "/api/simulate", { session, encounter, ...(sims ? { sims } : {}), ...(seed !== undefined ? { seed } : {}) });
  }

  submit(session: string, encounters: string[][]): Promise<SubmissionResponse> {
    return post(this.base, "/api/submissions", { session, encounters });
  }

  suggest(session: string, policy: "ntrl" | "dm" | "rnd"): Promise<SuggestResponse> {
    return post(this.base, "/api/suggest", { session, policy });
  }
}
