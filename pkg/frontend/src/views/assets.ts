/** Asset table: default-search listing, basic/advanced search, add,
 * bulk update, grouping, CSV import, and export. */

import { ApiFailure, Catalog, ResultPage } from "../api.js";
import { clear, el, errorBox, noteBox, withFormLock } from "../dom.js";
import { AppState } from "../state.js";
import { renderTable, selectedIds } from "../table.js";
import { attachSearchCap, validateSearchText, validateUpload } from "../validate.js";

interface AssetViewState {
  mode: "all" | "basic";
  text: string;
  page: number;
}

const local: AssetViewState = { mode: "all", text: "", page: 0 };

export function renderAssets(root: HTMLElement, state: AppState,
                             catalog: Catalog): void {
  clear(root);
  const feedback = el("div", { class: "feedback" });
  const results = el("div", { class: "results" });
  root.append(el("h2", {}, "Assets"), feedback, searchBar(), actions(), results);
  void load();

  function searchBar(): HTMLElement {
    const input = el("input", { name: "search", value: local.text,
                                placeholder: "basic search (30 chars max)" });
    attachSearchCap(input);
    const form = el("form", {
      class: "searchbar",
      onsubmit: (event: Event) => {
        event.preventDefault();
        clear(feedback);
        const problem = validateSearchText(input.value);
        if (problem) {                      // no network call on empty input
          feedback.append(errorBox(problem.message, problem.field));
          return;
        }
        local.mode = "basic";
        local.text = input.value;
        local.page = 0;
        void load();
      },
    },
        el("label", {}, "Search", input),
        el("button", { type: "submit" }, "Search"),
        el("button", {
          type: "button",
          onclick: () => {
            local.mode = "all";
            local.text = "";
            local.page = 0;
            input.value = "";
            void load();
          },
        }, "Show all"),
        el("button", {
          type: "button",
          onclick: () => void exportCurrent("csv"),
        }, "Save CSV"),
        el("button", {
          type: "button",
          onclick: () => void exportCurrent("printable"),
        }, "Print"));
    return form;
  }

  function actions(): HTMLElement {
    return el("div", { class: "asset-actions" },
              addAssetForm(), updateForm(), groupForm(), importForm());
  }

  async function load(): Promise<void> {
    clear(results);
    try {
      const page = local.mode === "all"
          ? await state.api.listAssets(local.page)
          : await state.api.searchBasic(local.text, "items", local.page);
      results.append(renderTable(page as ResultPage, {
        caption: local.mode === "all" ? "All visible assets"
                                      : `Matches for “${local.text}”`,
        selectable: true,
        onPage: (index) => { local.page = index; void load(); },
      }));
    } catch (failure) {
      if (!state.handleFailure(failure) && failure instanceof ApiFailure) {
        results.append(errorBox(failure.error.message, failure.error.code));
      }
    }
  }

  async function exportCurrent(format: "csv" | "printable"): Promise<void> {
    try {
      const text = await state.api.exportSearch(
          local.mode === "all" ? "" : local.text || " ", format);
      deliver(text, format);
    } catch (failure) {
      if (failure instanceof ApiFailure && failure.error.code === "empty-query") {
        // match-all export of the default view: search for anything printable
        feedback.append(errorBox("Run a search first, then print or save it."));
      } else if (failure instanceof ApiFailure) {
        feedback.append(errorBox(failure.error.message));
      }
    }
  }

  function deliver(text: string, format: "csv" | "printable"): void {
    if (format === "printable") {
      const win = window.open("", "_blank");
      if (win) {
        win.document.write(text);
        win.document.close();
        win.print();
        return;
      }
    }
    const blob = new Blob([text],
                          { type: format === "csv" ? "text/csv" : "text/html" });
    const link = el("a", { href: URL.createObjectURL(blob),
                           download: `assets.${format === "csv" ? "csv" : "html"}` });
    document.body.append(link);
    link.click();
    link.remove();
  }

  function addAssetForm(): HTMLElement {
    const description = el("input", { name: "description", required: true });
    const code = el("input", { name: "code" });
    const serial = el("input", { name: "serial_number" });
    const category = el("select", { name: "cat_id" },
        ...catalog.categories.map((c) =>
            el("option", { value: String(c.cat_id) },
               `${c.cat_id}: ${c.description}`)));
    const location = el("select", { name: "loc_id" },
        el("option", { value: "0" }, "0: none"),
        ...catalog.locations.map((l) =>
            el("option", { value: String(l.loc_id) },
               `${l.loc_id}: ${l.loc_code}`)));
    const props = el("input", {
      name: "properties", placeholder: "name=value;name=value" });
    const box = el("div", { class: "feedback" });
    const form = el("form", {
      class: "card",
      onsubmit: (event: Event) => {
        event.preventDefault();
        clear(box);
        void withFormLock(form, async () => {
          try {
            const properties: Record<string, string> = {};
            for (const chunk of props.value.split(";")) {
              if (!chunk.trim()) continue;
              const [name, ...rest] = chunk.split("=");
              properties[name.trim()] = rest.join("=").trim();
            }
            const item = await state.api.addAsset({
              item_description: description.value,
              code: code.value || undefined,
              serial_number: serial.value || undefined,
              cat_id: Number(category.value),
              loc_id: Number(location.value),
            }, properties);
            box.append(noteBox(`Created asset ${item.item_id}.`));
            void load();
          } catch (failure) {
            if (failure instanceof ApiFailure) {
              box.append(errorBox(failure.error.message, failure.error.field));
            }
          }
        });
      },
    },
        el("h3", {}, "Add asset"),
        el("label", {}, "Description", description),
        el("label", {}, "Barcode", code),
        el("label", {}, "Serial number", serial),
        el("label", {}, "Category", category),
        el("label", {}, "Location", location),
        el("label", {}, "Properties", props),
        el("button", { type: "submit" }, "Add"), box);
    return form;
  }

  function updateForm(): HTMLElement {
    const status = el("select", { name: "status" },
        el("option", { value: "" }, "(leave status)"),
        ...catalog.item_statuses.map((s) => el("option", { value: s }, s)));
    const location = el("select", { name: "loc_id" },
        el("option", { value: "" }, "(leave location)"),
        ...catalog.locations.map((l) =>
            el("option", { value: String(l.loc_id) },
               `${l.loc_id}: ${l.loc_code}`)));
    const box = el("div", { class: "feedback" });
    const form = el("form", {
      class: "card",
      onsubmit: (event: Event) => {
        event.preventDefault();
        clear(box);
        const ids = selectedIds(results);
        if (!ids.length) {
          box.append(errorBox("Tick at least one asset row first."));
          return;
        }
        const patch: Record<string, unknown> = {};
        if (status.value) patch.status = status.value;
        if (location.value) patch.loc_id = Number(location.value);
        void withFormLock(form, async () => {
          try {
            await state.api.updateAssets(ids, patch);
            box.append(noteBox(`Updated ${ids.length} asset(s).`));
            void load();
          } catch (failure) {
            if (failure instanceof ApiFailure) {
              box.append(errorBox(failure.error.message, failure.error.code));
            }
          }
        });
      },
    },
        el("h3", {}, "Update selected"),
        el("label", {}, "Status", status),
        el("label", {}, "Move to", location),
        el("button", { type: "submit" }, "Apply to selection"), box);
    return form;
  }

  function groupForm(): HTMLElement {
    const box = el("div", { class: "feedback" });
    return el("div", { class: "card" },
        el("h3", {}, "Group selected"),
        el("button", {
          type: "button",
          onclick: () => {
            clear(box);
            const ids = selectedIds(results);
            if (!ids.length) {
              box.append(errorBox("Tick the assets to group."));
              return;
            }
            void (async () => {
              try {
                const group = await state.api.groupAssets(ids);
                box.append(noteBox(`Group ${group.group_id} created.`));
                void load();
              } catch (failure) {
                if (failure instanceof ApiFailure) {
                  box.append(errorBox(failure.error.message, failure.error.code));
                }
              }
            })();
          },
        }, "Group"), box);
  }

  function importForm(): HTMLElement {
    const file = el("input", { type: "file", name: "csv", accept: ".csv" });
    const box = el("div", { class: "feedback" });
    const form = el("form", {
      class: "card",
      onsubmit: (event: Event) => {
        event.preventDefault();
        clear(box);
        const chosen = file.files?.[0];
        if (!chosen) {
          box.append(errorBox("Choose a CSV file."));
          return;
        }
        const oversize = validateUpload(chosen.size);
        if (oversize) {
          box.append(errorBox(oversize.message));
          return;
        }
        void withFormLock(form, async () => {
          try {
            const report = await state.api.importAssets(await chosen.text());
            box.append(noteBox(`Imported ${report.inserted} asset(s).`));
            void load();
          } catch (failure) {
            if (failure instanceof ApiFailure) {
              box.append(errorBox(failure.error.message, failure.error.code));
            }
          }
        });
      },
    },
        el("h3", {}, "Bulk add from CSV"),
        el("p", { class: "hint" },
           "Header: description,code,serial_number,cat_id,owner_id,loc_id," +
           "status,properties"),
        el("label", {}, "CSV file", file),
        el("button", { type: "submit" }, "Import"), box);
    return form;
  }
}
