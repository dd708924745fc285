/** Application shell: navigation, session restore, view dispatch. */

import { ApiClient, Catalog } from "./api.js";
import { clear, el } from "./dom.js";
import { AppState, ViewName } from "./state.js";
import { renderAdmin } from "./views/admin.js";
import { renderAssets } from "./views/assets.js";
import { renderErrors } from "./views/errors.js";
import { renderLogin } from "./views/login.js";
import { renderProfile } from "./views/profile.js";
import { renderRequests } from "./views/requests.js";
import { renderReview } from "./views/review.js";
import { renderWelcome } from "./views/welcome.js";

const VIEW_LABELS: Record<ViewName, string> = {
  login: "Sign in",
  welcome: "Welcome",
  assets: "Assets",
  requests: "Requests",
  admin: "University",
  review: "Review",
  errors: "Errors",
  profile: "Profile",
};

export class App {
  private catalog: Catalog | null = null;
  readonly state: AppState;

  constructor(readonly root: HTMLElement, api?: ApiClient,
              private pollMs = 30_000) {
    this.state = new AppState(api ?? new ApiClient());
    this.state.onChange(() => void this.render());
  }

  async start(): Promise<void> {
    await this.state.restore();
    await this.render();
    if (this.pollMs > 0) {
      setInterval(() => void this.state.refreshPendingBadge(), this.pollMs);
    }
  }

  private async ensureCatalog(): Promise<Catalog> {
    if (!this.catalog) this.catalog = await this.state.api.catalog();
    return this.catalog;
  }

  async render(): Promise<void> {
    clear(this.root);
    const main = el("main", { id: "view" });
    if (this.state.session) {
      this.root.append(this.navBar());
    }
    this.root.append(main);
    const view = this.state.view;
    if (view === "login") {
      renderLogin(main, this.state);
      return;
    }
    try {
      const catalog = await this.ensureCatalog();
      switch (view) {
        case "welcome": renderWelcome(main, this.state); break;
        case "assets": renderAssets(main, this.state, catalog); break;
        case "requests": renderRequests(main, this.state, catalog); break;
        case "admin": renderAdmin(main, this.state, catalog); break;
        case "review": renderReview(main, this.state, catalog); break;
        case "errors": renderErrors(main, this.state); break;
        case "profile": renderProfile(main, this.state); break;
        default: renderWelcome(main, this.state);
      }
    } catch (failure) {
      if (!this.state.handleFailure(failure)) throw failure;
    }
    void this.state.refreshPendingBadge().then((count) => {
      const badge = this.root.querySelector("[data-badge=pending]");
      if (badge) badge.textContent = count ? ` (${count})` : "";
    });
  }

  private navBar(): HTMLElement {
    const links = this.state.availableViews().map((view) =>
      el("button", {
        type: "button",
        "data-nav-view": view,
        ...(view === this.state.view ? { "aria-current": "page" } : {}),
        onclick: () => this.state.navigate(view),
      }, VIEW_LABELS[view],
         view === "requests" ? el("span", { "data-badge": "pending" }) : null));
    return el("header", { class: "topbar" },
        el("strong", {}, "University Inventory"),
        el("nav", {}, ...links),
        el("button", {
          type: "button", "data-nav-view": "logout",
          onclick: () => void this.state.logout(),
        }, "Log out"));
  }
}

export function boot(): void {
  const root = document.getElementById("app");
  if (root) void new App(root).start();
}

declare global {
  interface Window { UUIS_NO_AUTOBOOT?: boolean }
}

if (typeof window !== "undefined" && !window.UUIS_NO_AUTOBOOT &&
    typeof document !== "undefined" && document.getElementById("app")) {
  boot();
}
