// @vitest-environment node
import { describe, expect, test } from "vitest";

import { ApiFailure } from "../src/api.js";
import { AppState, welcomeHeading } from "../src/state.js";
import { FakeServer, SESSION, page } from "./helpers.js";

function loggedInState(level: number, sysadmin = false) {
  const server = new FakeServer()
      .on("POST", "/api/login",
          () => ({ data: { ...SESSION, level, sysadmin } }))
      .on("POST", "/api/logout", () => ({ data: { logged_out: true } }))
      .on("GET", "/api/requests/pending",
          () => ({ data: page([{ req_id: 9 }], { total_count: 3 }) }));
  const state = new AppState(server.client());
  return { state, server };
}

describe("view availability per level", () => {
  test("anonymous sees only the login view", () => {
    const { state } = loggedInState(0);
    expect(state.can("login")).toBe(true);
    expect(state.can("assets")).toBe(false);
    expect(state.availableViews()).toEqual([]);
  });

  test("level 0 gets requests and profile but no asset or admin views", async () => {
    const { state } = loggedInState(0);
    await state.login("lo", "pw");
    expect(state.view).toBe("welcome");
    expect(state.can("requests")).toBe(true);
    expect(state.can("profile")).toBe(true);
    expect(state.can("assets")).toBe(false);
    expect(state.can("admin")).toBe(false);
    expect(state.can("review")).toBe(false);
    expect(state.can("errors")).toBe(false);
    expect(state.can("login")).toBe(false);
  });

  test("level 1 unlocks assets, admin, review; errors needs the IT bit", async () => {
    const { state } = loggedInState(1);
    await state.login("staff", "pw");
    for (const view of ["assets", "admin", "review", "requests"] as const) {
      expect(state.can(view)).toBe(true);
    }
    expect(state.can("errors")).toBe(false);
  });

  test("sysadmin capability opens the errors view", async () => {
    const { state } = loggedInState(3, true);
    await state.login("admin", "pw");
    expect(state.can("errors")).toBe(true);
  });
});

describe("workflow transitions", () => {
  test("login moves to welcome, logout back to login", async () => {
    const { state } = loggedInState(3, true);
    expect(state.view).toBe("login");
    await state.login("admin", "pw");
    expect(state.view).toBe("welcome");
    state.navigate("assets");
    expect(state.view).toBe("assets");
    await state.logout();
    expect(state.view).toBe("login");
    expect(state.session).toBeNull();
  });

  test("navigation to unavailable views is refused", async () => {
    const { state } = loggedInState(0);
    await state.login("lo", "pw");
    state.navigate("admin");
    expect(state.view).toBe("welcome");
  });

  test("an unauthenticated failure drops back to the login view", async () => {
    const { state } = loggedInState(2);
    await state.login("mid", "pw");
    const handled = state.handleFailure(
        new ApiFailure({ code: "unauthenticated", message: "gone" }, 401));
    expect(handled).toBe(true);
    expect(state.view).toBe("login");
    const other = state.handleFailure(
        new ApiFailure({ code: "conflict", message: "dup" }, 409));
    expect(other).toBe(false);
  });

  test("state change notifications fire", async () => {
    const { state } = loggedInState(1);
    let notified = 0;
    state.onChange(() => { notified += 1; });
    await state.login("staff", "pw");
    state.navigate("requests");
    expect(notified).toBe(2);
  });

  test("pending badge polls only for level 1 and above", async () => {
    const low = loggedInState(0);
    await low.state.login("lo", "pw");
    expect(await low.state.refreshPendingBadge()).toBe(0);
    expect(low.server.callsTo("/api/requests/pending")).toBe(0);

    const high = loggedInState(2);
    await high.state.login("mid", "pw");
    expect(await high.state.refreshPendingBadge()).toBe(3);
    expect(high.server.callsTo("/api/requests/pending")).toBe(1);
  });
});

test("welcome heading names the account, level, and scope", () => {
  const heading = welcomeHeading({ ...SESSION, level: 3 });
  expect(heading).toContain("admin");
  expect(heading).toContain("level 3");
  expect(heading).toContain("university-wide");
});
