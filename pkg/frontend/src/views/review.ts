/** Review: audit-log search and report building, with print/save. */

import { ApiFailure, Catalog } from "../api.js";
import { clear, el, errorBox, withFormLock } from "../dom.js";
import { AppState } from "../state.js";
import { renderTable } from "../table.js";

export function renderReview(root: HTMLElement, state: AppState,
                             catalog: Catalog): void {
  clear(root);
  const results = el("div", {});
  root.append(el("h2", {}, "Review"), filterForm(), reportForm(), results);

  let lastFilter: Record<string, unknown> = {};
  let lastReport: Record<string, unknown> | null = null;

  function filterForm(): HTMLElement {
    const actor = el("input", { name: "actor", type: "number",
                                placeholder: "actor user id" });
    const item = el("input", { name: "item", type: "number",
                               placeholder: "item id" });
    const prefix = el("input", { name: "event_type_prefix",
                                 placeholder: "event prefix, e.g. asset." });
    const box = el("div", { class: "feedback" });
    const form = el("form", {
      class: "card",
      onsubmit: (event: Event) => {
        event.preventDefault();
        clear(box);
        lastFilter = {};
        if (actor.value) lastFilter.actor = Number(actor.value);
        if (item.value) lastFilter.item = Number(item.value);
        if (prefix.value) lastFilter.event_type_prefix = prefix.value;
        void withFormLock(form, () => loadLogs(0));
      },
    },
        el("h3", {}, "Audit logs"),
        el("label", {}, "Actor", actor),
        el("label", {}, "Item", item),
        el("label", {}, "Event type", prefix),
        el("button", { type: "submit" }, "Query"), box);
    return form;
  }

  async function loadLogs(page: number): Promise<void> {
    clear(results);
    lastReport = null;
    try {
      const result = await state.api.auditLogs(lastFilter, page);
      results.append(renderTable(result, {
        caption: "Audit entries in your scope",
        onPage: (index) => void loadLogs(index),
      }));
    } catch (failure) {
      if (!state.handleFailure(failure) && failure instanceof ApiFailure) {
        results.append(errorBox(failure.error.message, failure.error.code));
      }
    }
  }

  function reportForm(): HTMLElement {
    const kind = el("select", { name: "kind" },
        el("option", { value: "entity_listing" }, "entity listing"),
        el("option", { value: "field_comparison" }, "field comparison"));
    const entity = el("select", { name: "entity" },
        ...["users", "items", "locations"].map((e) =>
            el("option", { value: e }, e)));
    const left = metricSelect("left");
    const right = metricSelect("right");
    const affln = el("select", { name: "affln_id" },
        el("option", { value: "" }, "(whole scope)"),
        ...catalog.affiliations.map((a) =>
            el("option", { value: String(a.affln_id) },
               `${a.affln_id}: ${a.name}`)));
    const box = el("div", { class: "feedback" });
    const form = el("form", {
      class: "card",
      onsubmit: (event: Event) => {
        event.preventDefault();
        clear(box);
        const spec: Record<string, unknown> = { kind: kind.value };
        if (affln.value) spec.affln_id = Number(affln.value);
        if (kind.value === "entity_listing") {
          spec.entity = entity.value;
        } else {
          spec.left = left.value;
          spec.right = right.value;
          if (left.value === "items_in_category") spec.left_cat = 1;
          if (right.value === "items_in_category") spec.right_cat = 2;
        }
        void withFormLock(form, () => loadReport(spec));
      },
    },
        el("h3", {}, "Produce report"),
        el("label", {}, "Kind", kind),
        el("label", {}, "Entity", entity),
        el("label", {}, "Left metric", left),
        el("label", {}, "Right metric", right),
        el("label", {}, "Scope", affln),
        el("button", { type: "submit" }, "Run"),
        el("button", { type: "button", "data-export": "csv",
                       onclick: () => void exportReport("csv") }, "Save CSV"),
        el("button", { type: "button", "data-export": "printable",
                       onclick: () => void exportReport("printable") }, "Print"),
        box);
    return form;

    function metricSelect(name: string) {
      return el("select", { name },
          el("option", { value: "users" }, "users"),
          el("option", { value: "items_in_category" }, "items in category"),
          el("option", { value: "location_capacity" }, "location capacity"),
          el("option", { value: "location_seats" }, "location seats"));
    }
  }

  async function loadReport(spec: Record<string, unknown>): Promise<void> {
    clear(results);
    try {
      const doc = await state.api.produceReport(spec);
      lastReport = spec;
      results.append(renderTable({
        rows: doc.rows, columns: doc.columns, page_index: 0, page_size: 1000,
        total_count: doc.rows.length, page_count: doc.rows.length ? 1 : 0,
        controls: { first: false, prev: false, next: false, last: false,
                    pages: doc.rows.length ? 1 : 0 },
        note: null,
      }, { caption: doc.title }));
    } catch (failure) {
      if (!state.handleFailure(failure) && failure instanceof ApiFailure) {
        results.append(errorBox(failure.error.message, failure.error.code));
      }
    }
  }

  async function exportReport(format: "csv" | "printable"): Promise<void> {
    if (!lastReport) {
      results.append(errorBox("Run a report first."));
      return;
    }
    try {
      const text = await state.api.exportReport(lastReport, format);
      const blob = new Blob([text],
                            { type: format === "csv" ? "text/csv" : "text/html" });
      const link = el("a", {
        href: URL.createObjectURL(blob),
        download: format === "csv" ? "report.csv" : "report.html",
      });
      document.body.append(link);
      link.click();
      link.remove();
    } catch (failure) {
      if (failure instanceof ApiFailure) {
        results.append(errorBox(failure.error.message));
      }
    }
  }
}
