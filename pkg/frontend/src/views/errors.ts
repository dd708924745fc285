/** Error reports: scoped listing, detail with annotations, printing. */

import { ApiFailure } from "../api.js";
import { clear, el, errorBox, noteBox, withFormLock } from "../dom.js";
import { AppState } from "../state.js";
import { renderTable, selectedIds } from "../table.js";
import { validateAnnotation } from "../validate.js";

export function renderErrors(root: HTMLElement, state: AppState): void {
  clear(root);
  const listing = el("div", {});
  const detail = el("div", {});
  root.append(el("h2", {}, "Error reports"), listing, detail);
  void load(0);

  async function load(page: number): Promise<void> {
    clear(listing);
    try {
      const result = await state.api.listErrors(page);
      listing.append(renderTable(result, {
        caption: "Reports in your scope",
        selectable: true,
        columns: ["error_id", "occurred_at", "source", "severity", "message",
                  "annotation_count"],
        onPage: (index) => void load(index),
      }));
      for (const row of result.rows) {
        listing.append(el("button", {
          type: "button", "data-detail": String(row.error_id),
          onclick: () => void openDetail(Number(row.error_id)),
        }, `Details #${row.error_id}`));
      }
      listing.append(el("button", {
        type: "button", "data-print": "selected",
        onclick: () => void printSelected(),
      }, "Print selected"));
    } catch (failure) {
      if (!state.handleFailure(failure) && failure instanceof ApiFailure) {
        listing.append(errorBox(failure.error.message, failure.error.code));
      }
    }
  }

  async function printSelected(): Promise<void> {
    const ids = selectedIds(listing);
    try {
      const text = await state.api.printErrors(ids);
      const win = window.open("", "_blank");
      if (win) {
        win.document.write(text);
        win.document.close();
        win.print();
      }
    } catch (failure) {
      if (failure instanceof ApiFailure) {
        listing.append(errorBox(failure.error.message, failure.error.code));
      }
    }
  }

  async function openDetail(errorId: number): Promise<void> {
    clear(detail);
    try {
      const report = await state.api.getError(errorId);
      const annotations = report.annotations.map((a) =>
          el("li", {}, `[${a.created_at} by user ${a.author_id}] ${a.comment}`));
      const comment = el("textarea", { name: "comment", maxlength: "2000" });
      const box = el("div", { class: "feedback" });
      const form = el("form", {
        class: "card",
        onsubmit: (event: Event) => {
          event.preventDefault();
          clear(box);
          const problem = validateAnnotation(comment.value);
          if (problem) {
            box.append(errorBox(problem.message, problem.field));
            return;
          }
          void withFormLock(form, async () => {
            try {
              await state.api.annotateError(errorId, comment.value);
              box.append(noteBox("Comment stored."));
              void openDetail(errorId);
            } catch (failure) {
              if (failure instanceof ApiFailure) {
                box.append(errorBox(failure.error.message, failure.error.code));
              }
            }
          });
        },
      },
          el("label", {}, "Add comment", comment),
          el("button", { type: "submit" }, "Submit comment"), box);
      detail.append(
          el("section", { class: "card", "data-error-detail": String(errorId) },
             el("h3", {}, `Report #${errorId}: ${report.message}`),
             el("p", {}, `${report.severity} from ${report.source}` +
                         ` at ${report.occurred_at}`),
             el("pre", {}, String(report.detail ?? "")),
             el("ul", { class: "annotations" }, ...annotations),
             form));
    } catch (failure) {
      if (failure instanceof ApiFailure) {
        detail.append(errorBox(failure.error.message, failure.error.code));
      }
    }
  }
}
