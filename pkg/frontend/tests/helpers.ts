/** Test utilities: a scriptable fake API transport and DOM helpers. */

import { ApiClient } from "../src/api.js";

type Handler = (body: unknown, url: string) =>
    { status?: number; data?: unknown; error?: unknown } | string;

export class FakeServer {
  routes = new Map<string, Handler>();
  calls: { method: string; path: string; body: unknown }[] = [];

  on(method: string, path: string, handler: Handler): this {
    this.routes.set(`${method} ${path}`, handler);
    return this;
  }

  client(): ApiClient {
    return new ApiClient("", this.fetch.bind(this) as typeof fetch);
  }

  async fetch(url: string, init?: RequestInit): Promise<Response> {
    const method = init?.method ?? "GET";
    const path = url.split("?")[0];
    const body = typeof init?.body === "string" && init.body.startsWith("{")
        ? JSON.parse(init.body) : init?.body;
    this.calls.push({ method, path, body });
    const handler = this.routes.get(`${method} ${path}`) ??
        this.routes.get(`${method} ${url}`);
    if (!handler) {
      return jsonResponse(404, { status: "error",
                                 error: { code: "not-found",
                                          message: `no fake for ${method} ${url}` } });
    }
    const result = handler(body, url);
    if (typeof result === "string") {
      return new Response(result, { status: 200,
                                    headers: { "content-type": "text/plain" } });
    }
    if (result.error) {
      return jsonResponse(result.status ?? 400,
                          { status: "error", error: result.error });
    }
    return jsonResponse(result.status ?? 200,
                        { status: "ok", data: result.data });
  }

  callsTo(path: string, method?: string): number {
    return this.calls.filter(
        (c) => c.path === path && (!method || c.method === method)).length;
  }
}

function jsonResponse(status: number, payload: unknown): Response {
  return new Response(JSON.stringify(payload), {
    status, headers: { "content-type": "application/json" } });
}

export function page(rows: Record<string, unknown>[], overrides: Partial<{
  page_index: number; page_size: number; total_count: number;
  page_count: number; columns: string[];
}> = {}) {
  const pageIndex = overrides.page_index ?? 0;
  const pageCount = overrides.page_count ?? (rows.length ? 1 : 0);
  return {
    rows,
    columns: overrides.columns ?? Object.keys(rows[0] ?? {}),
    page_index: pageIndex,
    page_size: overrides.page_size ?? 25,
    total_count: overrides.total_count ?? rows.length,
    page_count: pageCount,
    controls: {
      first: pageIndex > 0,
      prev: pageIndex > 0,
      next: pageIndex < pageCount - 1,
      last: pageIndex < pageCount - 1,
      pages: pageCount,
    },
    note: null,
  };
}

export const SESSION = {
  token: "tok-test",
  user_id: 1,
  user_code: "admin",
  level: 3,
  role: { user_role_id: 1, title_id: 1, affln_id: 0, signature: 2048 },
  scope: { kind: "university", affln_id: null, describe: "university-wide" },
  sysadmin: true,
};

export const CATALOG = {
  affiliations: [
    { affln_id: 0, name: "UUIS", code: "UUIS", kind: "university",
      parent_id: null },
    { affln_id: 2, name: "Computer Science", code: "CSF", kind: "faculty",
      parent_id: 0 },
    { affln_id: 21, name: "CS", code: "CS", kind: "department", parent_id: 2 },
  ],
  buildings: [{ bldg_id: 1, bldg_code: "Hall", bldg_name: "Hall Building" }],
  categories: [{ cat_id: 0, description: "N/A" },
               { cat_id: 1, description: "Computer" }],
  locations: [{ loc_id: 3, loc_code: "H-011", loc_name: "H-011 Classromm",
                affln_id: null, status: null },
              { loc_id: 4, loc_code: "EV-011", loc_name: "EV-011 Classromm",
                affln_id: null, status: null }],
  request_types: [
    { req_type_id: 1, req_type_code: "General Request", description: "..." },
    { req_type_id: 4, req_type_code: "Moving", description: "needs barcode" },
  ],
  titles: [{ title_id: 2, title_name: "Inventory staff - Per department",
             permission: 8 }],
  property_definitions: [],
  item_statuses: ["active", "inactive", "stolen", "lent"],
};

export async function until(check: () => boolean, timeoutMs = 4000):
    Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (check()) return;
    await new Promise((resolve) => setTimeout(resolve, 10));
  }
  if (!check()) throw new Error("condition never became true");
}

export function submit(form: HTMLFormElement): void {
  form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}
