/** Typed client for the inventory service JSON API.
 *
 * Every response is an envelope; `ok` payloads come back as-is and error
 * envelopes are thrown as ApiFailure so callers can route on the stable
 * error code.
 */

export interface ApiError {
  code: string;
  message: string;
  field?: string;
  redirect?: string;
  detail?: unknown;
}

export interface PageControls {
  first: boolean;
  prev: boolean;
  next: boolean;
  last: boolean;
  pages: number;
}

export interface ResultPage<Row = Record<string, unknown>> {
  rows: Row[];
  columns: string[];
  page_index: number;
  page_size: number;
  total_count: number;
  page_count: number;
  controls: PageControls;
  note: string | null;
}

export interface SessionInfo {
  token: string;
  user_id: number;
  user_code: string;
  level: number;
  role: { user_role_id: number; title_id: number; affln_id: number;
          signature: number };
  scope: { kind: string; affln_id: number | null; describe: string };
  sysadmin: boolean;
}

export interface Catalog {
  affiliations: { affln_id: number; name: string; code: string; kind: string;
                  parent_id: number | null }[];
  buildings: { bldg_id: number; bldg_code: string;
               bldg_name: string | null }[];
  categories: { cat_id: number; description: string }[];
  locations: { loc_id: number; loc_code: string; loc_name: string;
               affln_id: number | null; status: string | null }[];
  request_types: { req_type_id: number; req_type_code: string;
                   description: string }[];
  titles: { title_id: number; title_name: string; permission: number }[];
  property_definitions: { prop_id: number; cat_id: number; prop_name: string;
                          default_value: string | null; required: number }[];
  item_statuses: string[];
}

export interface RequestRow {
  req_id: number;
  requester: number;
  request_type: number;
  item_id: number | null;
  description: string;
  status: string;
  date_submitted: string;
  comments: { author_id: number; time: string; kind: string; text: string }[];
  [key: string]: unknown;
}

export interface SearchParameter {
  field: string;
  operator: string;
  value: string;
}

export class ApiFailure extends Error {
  constructor(public readonly error: ApiError, public readonly status: number) {
    super(error.message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  token: string | null = null;

  constructor(private readonly base = "",
              private readonly fetchFn: FetchLike =
                  (...args) => globalThis.fetch(...args)) {}

  private async call<T>(method: string, path: string, body?: unknown,
                        raw?: { payload: string; contentType: string },
                        expectText = false): Promise<T> {
    const headers: Record<string, string> = {};
    let payload: string | undefined;
    if (raw) {
      headers["Content-Type"] = raw.contentType;
      payload = raw.payload;
    } else if (body !== undefined) {
      headers["Content-Type"] = "application/json";
      payload = JSON.stringify(body);
    }
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchFn(this.base + path,
                                        { method, headers, body: payload });
    const text = await response.text();
    if (expectText && response.ok) return text as unknown as T;
    let envelope: { status: string; data?: T; error?: ApiError };
    try {
      envelope = JSON.parse(text);
    } catch {
      throw new ApiFailure({ code: "bad-request",
                             message: `unparseable response: ${text.slice(0, 80)}` },
                           response.status);
    }
    if (envelope.status !== "ok" || envelope.error) {
      throw new ApiFailure(envelope.error ??
                           { code: "internal-error", message: "unknown failure" },
                           response.status);
    }
    return envelope.data as T;
  }

  // -- session ---------------------------------------------------------------

  async login(userCode: string, password: string): Promise<SessionInfo> {
    const info = await this.call<SessionInfo>("POST", "/api/login",
                                              { user_code: userCode, password });
    this.token = info.token;
    return info;
  }

  async restoreSession(): Promise<SessionInfo | null> {
    try {
      return await this.call<SessionInfo>("GET", "/api/session");
    } catch {
      return null;
    }
  }

  async logout(): Promise<void> {
    try {
      await this.call("POST", "/api/logout", {});
    } finally {
      this.token = null;
    }
  }

  changePassword(current: string, next: string, confirm: string) {
    return this.call<{ changed: boolean }>("POST", "/api/password",
                                           { current, new: next, confirm });
  }

  profile() {
    return this.call<Record<string, unknown>>("GET", "/api/profile");
  }

  updateProfile(fields: Record<string, string>) {
    return this.call<Record<string, unknown>>("PUT", "/api/profile", fields);
  }

  catalog() {
    return this.call<Catalog>("GET", "/api/catalog");
  }

  // -- search and assets --------------------------------------------------------

  searchBasic(text: string, target = "items", page = 0, size = 25) {
    return this.call<ResultPage & { captured: unknown; plan: unknown }>(
        "POST", `/api/search/basic?page=${page}&size=${size}`,
        { text, target });
  }

  searchAdvanced(parameters: SearchParameter[], connectives: string[] | null,
                 target = "items", page = 0, size = 25) {
    return this.call<ResultPage & { captured: unknown }>(
        "POST", `/api/search/advanced?page=${page}&size=${size}`,
        { parameters, connectives, target });
  }

  exportSearch(text: string, format: "csv" | "printable", target = "items") {
    return this.call<string>("POST", `/api/search/basic?format=${format}`,
                             { text, target }, undefined, true);
  }

  listAssets(page = 0, size = 25) {
    return this.call<ResultPage>("GET", `/api/assets?page=${page}&size=${size}`);
  }

  getAsset(itemId: number) {
    return this.call<Record<string, unknown>>("GET", `/api/assets/${itemId}`);
  }

  addAsset(fields: Record<string, unknown>, properties: Record<string, string>) {
    return this.call<Record<string, unknown>>("POST", "/api/assets",
                                              { fields, properties });
  }

  updateAssets(itemIds: number[], patch: Record<string, unknown>) {
    return this.call<{ items: Record<string, unknown>[] }>(
        "PUT", "/api/assets", { item_ids: itemIds, patch });
  }

  importAssets(csvText: string) {
    return this.call<{ inserted: number }>(
        "POST", "/api/assets/import", undefined,
        { payload: csvText, contentType: "text/csv" });
  }

  groupAssets(itemIds: number[]) {
    return this.call<{ group_id: number }>("POST", "/api/assets/group",
                                           { item_ids: itemIds });
  }

  // -- requests --------------------------------------------------------------------

  myRequests(page = 0, size = 25) {
    return this.call<ResultPage<RequestRow>>(
        "GET", `/api/requests?page=${page}&size=${size}`);
  }

  pendingRequests(page = 0, size = 25) {
    return this.call<ResultPage<RequestRow>>(
        "GET", `/api/requests/pending?page=${page}&size=${size}`);
  }

  submitRequest(requestType: number, identifier: string | null,
                description: string) {
    return this.call<RequestRow>("POST", "/api/requests",
                                 { request_type: requestType,
                                   identifier: identifier || undefined,
                                   description });
  }

  approveRequest(reqId: number, fulfillment: Record<string, unknown>) {
    return this.call<RequestRow>("POST", `/api/requests/${reqId}/approve`,
                                 { fulfillment });
  }

  rejectRequest(reqId: number, reason: string) {
    return this.call<RequestRow>("POST", `/api/requests/${reqId}/reject`,
                                 { reason });
  }

  cancelRequest(reqId: number) {
    return this.call<RequestRow>("POST", `/api/requests/${reqId}/cancel`, {});
  }

  // -- administration -----------------------------------------------------------------

  createDepartment(name: string, code: string, facultyId: number) {
    return this.call<Record<string, unknown>>(
        "POST", "/api/admin/departments",
        { name, code, faculty_id: facultyId });
  }

  createFaculty(name: string, code: string) {
    return this.call<Record<string, unknown>>("POST", "/api/admin/faculties",
                                              { name, code });
  }

  addLocation(record: Record<string, unknown>) {
    return this.call<Record<string, unknown>>("POST", "/api/admin/locations",
                                              record);
  }

  importUsers(csvText: string) {
    return this.call<{ inserted: number;
                       generated_passwords: Record<string, string> }>(
        "POST", "/api/admin/users/import", undefined,
        { payload: csvText, contentType: "text/csv" });
  }

  updateUserRole(userId: number, changes: Record<string, unknown>) {
    return this.call<Record<string, unknown>>(
        "PUT", `/api/admin/users/${userId}/role`, changes);
  }

  triggerBackup(confirmed: boolean) {
    return this.call<{ archive: string; checksum: string }>(
        "POST", "/api/admin/backup", { confirmed });
  }

  // -- review and errors ------------------------------------------------------------------

  reviewOptions() {
    return this.call<Record<string, unknown>>("GET", "/api/review/options");
  }

  auditLogs(filter: Record<string, unknown>, page = 0, size = 25) {
    return this.call<ResultPage>(
        "POST", `/api/review/logs?page=${page}&size=${size}`, filter);
  }

  produceReport(spec: Record<string, unknown>) {
    return this.call<{ title: string; description: string; columns: string[];
                       rows: Record<string, unknown>[] }>(
        "POST", "/api/review/reports", spec);
  }

  exportReport(spec: Record<string, unknown>, format: "csv" | "printable") {
    return this.call<string>("POST", `/api/review/reports?format=${format}`,
                             spec, undefined, true);
  }

  listErrors(page = 0, size = 25) {
    return this.call<ResultPage>("GET", `/api/errors?page=${page}&size=${size}`);
  }

  getError(errorId: number) {
    return this.call<Record<string, unknown> & {
      annotations: { author_id: number; created_at: string;
                     comment: string }[] }>("GET", `/api/errors/${errorId}`);
  }

  annotateError(errorId: number, comment: string) {
    return this.call<Record<string, unknown>>(
        "POST", `/api/errors/${errorId}/annotations`, { comment });
  }

  printErrors(ids: number[]) {
    return this.call<string>("POST", "/api/errors/print", { ids },
                             undefined, true);
  }
}
