// Typed client for the encounter service JSON API. Every number the UI
// shows comes from these payloads; the client never simulates anything.
export class ApiError extends Error {
    constructor(status, code, message) {
        super(message);
        this.status = status;
        this.code = code;
    }
}
async function request(base, path, init) {
    const res = await fetch(base + path, init);
    const body = await res.json();
    if (!res.ok) {
        throw new ApiError(res.status, body.code ?? "UNKNOWN", body.message ?? res.statusText);
    }
    return body;
}
function post(base, path, payload) {
    return request(base, path, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(payload),
    });
}
export class Client {
    constructor(base = "") {
        this.base = base;
    }
    newSession(hpVariation) {
        return request(this.base, `/api/party/random?hp_variation=${hpVariation ? "on" : "off"}`);
    }
    monsters() {
        return request(this.base, "/api/content/monsters");
    }
    xpTables() {
        return request(this.base, "/api/content/xp-tables");
    }
    budget(session, tier = "DEADLY") {
        return request(this.base, `/api/budget?session=${session}&tier=${tier}`);
    }
    encounterXp(encounter) {
        return post(this.base, "/api/encounter/xp", { encounter });
    }
    simulate(session, encounter, sims, seed) {
        return post(this.base, "/api/simulate", { session, encounter, ...(sims ? { sims } : {}), ...(seed !== undefined ? { seed } : {}) });
    }
    submit(session, encounters) {
        return post(this.base, "/api/submissions", { session, encounters });
    }
    suggest(session, policy) {
        return post(this.base, "/api/suggest", { session, policy });
    }
}
