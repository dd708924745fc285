import { clear, el } from "../dom.js";
import { AppState, ViewName, welcomeHeading } from "../state.js";

const CARDS: { view: ViewName; title: string; blurb: string }[] = [
  { view: "requests", title: "Requests",
    blurb: "Submit, track, or cancel your requests." },
  { view: "assets", title: "Assets",
    blurb: "Search, add, update, group, and import assets." },
  { view: "admin", title: "University management",
    blurb: "Departments, locations, user import, backups." },
  { view: "review", title: "Review",
    blurb: "Audit logs and reports." },
  { view: "errors", title: "Error reports",
    blurb: "List, annotate, and print system errors." },
  { view: "profile", title: "My profile",
    blurb: "Personal information and password." },
];

export function renderWelcome(root: HTMLElement, state: AppState): void {
  clear(root);
  if (!state.session) return;
  const cards = CARDS.filter((c) => state.can(c.view)).map((c) =>
    el("button", {
      class: "card nav-card", type: "button", "data-view": c.view,
      onclick: () => state.navigate(c.view),
    }, el("h3", {}, c.title), el("p", {}, c.blurb)));
  root.append(
      el("section", { class: "welcome" },
         el("h2", {}, welcomeHeading(state.session)),
         el("div", { class: "cards" }, ...cards)));
}
