/** View model: session, current view, and which views a session may reach. */

import { ApiClient, ApiFailure, SessionInfo } from "./api.js";

export type ViewName = "login" | "welcome" | "assets" | "requests" | "admin"
    | "review" | "errors" | "profile";

const ALL_VIEWS: ViewName[] = ["welcome", "assets", "requests", "admin",
                               "review", "errors", "profile"];

export class AppState {
  session: SessionInfo | null = null;
  view: ViewName = "login";
  pendingCount = 0;
  listeners: (() => void)[] = [];

  constructor(public readonly api: ApiClient) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    this.listeners.forEach((fn) => fn());
  }

  /** Views reachable at the session's level; mirrors server-side gates. */
  can(view: ViewName): boolean {
    if (!this.session) return view === "login";
    switch (view) {
      case "login":
        return false;
      case "assets":
      case "review":
        return this.session.level >= 1;
      case "admin":
        return this.session.level >= 1;   // import users + manual backup
      case "errors":
        return this.session.level >= 1 && this.session.sysadmin;
      default:
        return true;                      // welcome, requests, profile
    }
  }

  availableViews(): ViewName[] {
    return ALL_VIEWS.filter((v) => this.can(v));
  }

  async login(userCode: string, password: string): Promise<SessionInfo> {
    const info = await this.api.login(userCode, password);
    this.session = info;
    this.view = "welcome";
    this.emit();
    return info;
  }

  async restore(): Promise<boolean> {
    const info = await this.api.restoreSession();
    if (info) {
      this.session = info;
      this.api.token = info.token;
      this.view = "welcome";
      this.emit();
      return true;
    }
    return false;
  }

  async logout(): Promise<void> {
    try {
      await this.api.logout();
    } catch {
      // the session may already be gone server-side; drop it locally anyway
    }
    this.session = null;
    this.view = "login";
    this.pendingCount = 0;
    this.emit();
  }

  navigate(view: ViewName): void {
    if (!this.can(view)) return;
    this.view = view;
    this.emit();
  }

  /** Errors that mean the session died: fall back to the login view. */
  handleFailure(failure: unknown): boolean {
    if (failure instanceof ApiFailure &&
        failure.error.code === "unauthenticated") {
      this.session = null;
      this.view = "login";
      this.emit();
      return true;
    }
    return false;
  }

  async refreshPendingBadge(): Promise<number> {
    if (!this.session || this.session.level < 1) {
      this.pendingCount = 0;
      return 0;
    }
    try {
      const page = await this.api.pendingRequests(0, 1);
      this.pendingCount = page.total_count;
    } catch {
      this.pendingCount = 0;
    }
    return this.pendingCount;
  }
}

export function welcomeHeading(session: SessionInfo): string {
  const names = ["member", "inventory staff", "faculty administrator",
                 "university administrator"];
  return `Welcome, ${session.user_code} — level ${session.level}` +
         ` ${names[session.level] ?? ""} (${session.scope.describe})`;
}
