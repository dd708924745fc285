// @vitest-environment jsdom
/** Live end-to-end: boots the real backend and drives the client layer and
 * DOM shell against it over actual HTTP. Skipped when python3 is missing. */

import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";

import { afterAll, beforeAll, describe, expect, test } from "vitest";

import { ApiClient, ApiFailure } from "../src/api.js";
import { App } from "../src/app.js";
import { until } from "./helpers.js";

const PYTHON = process.env.UUIS_PYTHON ?? "python3";
const hasPython = spawnSync(PYTHON, ["--version"]).status === 0;
const PORT = 18000 + (process.pid % 4000);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;
let workdir: string;

// node's undici fetch, pinned so jsdom globals never shadow it
const realFetch: typeof fetch = (input, init) => fetch(input, init);

function client(): ApiClient {
  return new ApiClient(BASE, realFetch);
}

beforeAll(async () => {
  if (!hasPython) return;
  workdir = mkdtempSync(join(tmpdir(), "uuis-e2e-"));
  const repoRoot = resolve(__dirname, "..", "..");
  server = spawn(PYTHON, [
    join(repoRoot, "scripts", "run_server.py"),
    "--db", join(workdir, "store.db"),
    "--port", String(PORT),
    "--backup-dir", join(workdir, "backups"),
  ], { cwd: repoRoot, stdio: "ignore",
       env: { ...process.env, UUIS_AUTH_PBKDF2_ITERATIONS: "1000" } });
  const deadline = Date.now() + 60_000;
  let ready = false;
  while (Date.now() < deadline && !ready) {
    try {
      const response = await realFetch(`${BASE}/api/session`);
      ready = response.status > 0;
    } catch {
      await new Promise((r) => setTimeout(r, 150));
    }
  }
  if (!ready) throw new Error("backend never came up");
}, 90_000);

afterAll(() => {
  server?.kill();
  if (workdir) rmSync(workdir, { recursive: true, force: true });
});

describe.skipIf(!hasPython)("live flows against the real backend", () => {
  test("login, search truncation, and scoped assets", async () => {
    const api = client();
    await expect(api.login("admin", "wrong-password"))
        .rejects.toMatchObject({ error: { code: "invalid-credentials" } });
    const session = await api.login("admin", "teamtwo");
    expect(session.level).toBe(3);

    const hits = await api.searchBasic("Dell9000");
    expect(hits.rows.map((r) => r.item_id)).toEqual([20, 21, 22, 329]);

    const truncated = await api.searchBasic("a".repeat(31));
    expect((truncated.captured as { text: string }).text).toHaveLength(30);

    const assets = await api.listAssets(0, 10);
    expect(assets.total_count).toBe(33);
    expect(assets.controls.next).toBe(true);
    expect(assets.controls.prev).toBe(false);
  });

  test("full operator workflow: import, request, approve, audit, backup",
       async () => {
    const api = client();
    await api.login("admin", "teamtwo");

    const imported = await api.importUsers(
        "user_code,last_name,first_name,password,title_id,affln_id,email\n" +
        "e2e_staff,Staff,Emily,staff-pass-12,2,20,e2e@uuis.example\n" +
        "e2e_member,Member,Moe,member-pass-12,4,20,\n");
    expect(imported.inserted).toBe(2);

    const dept = await api.createDepartment("E2E Studies", "E2E", 2);
    expect(dept.kind).toBe("department");
    const loc = await api.addLocation({ loc_code: "E2E-1",
                                        loc_name: "e2e shelf", bldg_id: 1,
                                        affln_id: 20 });

    const member = client();
    await member.login("e2e_member", "member-pass-12");
    const ask = await member.submitRequest(4, "a0002", "move the tower");
    expect(ask.status).toBe("pending");
    expect(ask.item_id).toBe(20);
    await expect(member.pendingRequests())
        .rejects.toMatchObject({ error: { code: "forbidden" } });

    const staff = client();
    await staff.login("e2e_staff", "staff-pass-12");
    const queue = await staff.pendingRequests();
    expect(queue.rows.map((r) => r.req_id)).toContain(ask.req_id);
    const approved = await staff.approveRequest(
        ask.req_id, { loc_id: loc.loc_id as number });
    expect(approved.status).toBe("approved");

    const asset = await staff.getAsset(20);
    expect(asset.loc_id).toBe(loc.loc_id);

    const logs = await api.auditLogs({ event_type_prefix: "request." });
    expect(logs.total_count).toBeGreaterThanOrEqual(2);

    const backup = await api.triggerBackup(true);
    expect(backup.archive).toMatch(/^manual-/);
    await expect(api.triggerBackup(false))
        .rejects.toMatchObject({ error: { code: "confirmation-required" } });

    const report = await api.produceReport({ kind: "entity_listing",
                                             entity: "users", "affln_id": 20 });
    expect(report.rows.map((r) => r.user_code)).toContain("e2e_staff");

    const csv = await api.exportSearch("Dell9000", "csv");
    expect(csv.split("\n")[0]).toContain("item_id");
  });

  test("error reports flow for a sysadmin after a failing import", async () => {
    const api = client();
    await api.login("admin", "teamtwo");
    await expect(api.importUsers("user_code,broken\nx\n"))
        .rejects.toMatchObject({ error: { code: "invalid-input" } });
    const errors = await api.listErrors();
    expect(errors.total_count).toBeGreaterThanOrEqual(1);
    const first = errors.rows[0] as { error_id: number };
    const annotated = await api.annotateError(first.error_id, "seen during e2e");
    expect(annotated.annotations.at(-1)?.comment).toBe("seen during e2e");
    const printable = await api.printErrors([first.error_id]);
    expect(printable).toContain("Error report");
  });

  test("lockout and unlock via role update", async () => {
    const admin = client();
    await admin.login("admin", "teamtwo");
    await admin.importUsers(
        "user_code,last_name,first_name,password,title_id,affln_id,email\n" +
        "e2e_locked,Locked,Lee,locked-pass-12,4,21,\n");
    const luckless = client();
    for (let i = 0; i < 3; i += 1) {
      await expect(luckless.login("e2e_locked", "bad-password"))
          .rejects.toBeInstanceOf(ApiFailure);
    }
    await expect(luckless.login("e2e_locked", "locked-pass-12"))
        .rejects.toMatchObject({ error: { code: "account-locked" } });

    const profile = await admin.profile();
    expect(profile.user_code).toBe("admin");
    // find the imported user id through search, then unlock
    const found = await admin.searchBasic("e2e_locked", "users");
    const userId = (found.rows[0] as { user_id: number }).user_id;
    await admin.updateUserRole(userId, { unlock: true });
    const restored = await luckless.login("e2e_locked", "locked-pass-12");
    expect(restored.user_code).toBe("e2e_locked");
  });

  test("DOM shell drives login and welcome against the live backend",
       async () => {
    document.body.innerHTML = "<div id='app'></div>";
    const root = document.getElementById("app") as HTMLElement;
    const app = new App(root, client(), 0);
    await app.start();
    await until(() => root.querySelector("form.login") !== null);

    (root.querySelector("[name=user_code]") as HTMLInputElement).value = "admin";
    (root.querySelector("[name=password]") as HTMLInputElement).value = "teamtwo";
    (root.querySelector("form") as HTMLFormElement)
        .dispatchEvent(new Event("submit", { cancelable: true }));
    await until(() => root.querySelector(".welcome") !== null, 15_000);
    expect(root.textContent).toContain("Welcome, admin");

    // welcome cards reflect an L3 session, including error management
    const cards = Array.from(root.querySelectorAll("[data-view]"))
        .map((c) => (c as HTMLElement).dataset.view);
    expect(cards).toEqual(expect.arrayContaining(
        ["requests", "assets", "admin", "review", "errors", "profile"]));

    // navigate to assets and watch the live table arrive
    app.state.navigate("assets");
    await until(() => root.querySelector("table") !== null, 15_000);
    expect(root.textContent).toContain("33 record(s)");
  });
});
